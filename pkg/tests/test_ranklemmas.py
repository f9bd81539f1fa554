import random

import mpmath as mp
import pytest

from dehnscan.errors import ArgumentError, HypothesisError
from dehnscan.exactnum import IntPolynomial
from dehnscan.lattice import SubgroupLattice
from dehnscan.ranklemmas import (
    Lemma41Class,
    SlopeConstraint,
    TwistedMatrix,
    check_constraints,
    classify_lemma41,
    constrained_rows,
    coprime_pairs,
    jacobian_block_rank,
    lemma41_exhaustive_scan,
    lemma42_basis_coefficients,
    verify_lemma42,
)


class TestConstraints:
    def test_satisfied(self):
        m = TwistedMatrix(((1, 2, 1, 2), (3, 1, 3, 1)))
        assert check_constraints(m, SlopeConstraint((2, 1), (-2, -1)))

    def test_violated(self):
        m = TwistedMatrix(((1, 2, 1, 2), (3, 1, 3, 1)))
        assert not check_constraints(m, SlopeConstraint((2, 1), (2, 1)))

    def test_generator_instances(self):
        rng = random.Random(2)
        pairs = coprime_pairs(4)
        for _ in range(25):
            s = SlopeConstraint(rng.choice(pairs), rng.choice(pairs))
            rows = constrained_rows(s, 2)
            if len(rows) < 2:
                continue
            m = TwistedMatrix((rng.choice(rows), rng.choice(rows)))
            assert check_constraints(m, s)


class TestLemma41:
    def test_negated_pair(self):
        m = TwistedMatrix(((1, 2, 1, 2), (3, 1, 3, 1)))
        res = classify_lemma41(m, SlopeConstraint((2, 1), (-2, -1)))
        assert res.classification is Lemma41Class.NEGATED_PAIR
        assert res.twisted_rank == 1
        # the statement/proof form discrepancy: recorded as data only
        assert res.matrix_form == "equal-columns"

    def test_equal_pair(self):
        m = TwistedMatrix(((1, 2, -1, -2), (0, 1, 0, -1)))
        res = classify_lemma41(m, SlopeConstraint((2, 1), (2, 1)))
        assert res.classification is Lemma41Class.EQUAL_PAIR
        assert res.matrix_form == "negated-columns"

    def test_rank_two(self):
        m = TwistedMatrix(((1, 0, 0, 1), (0, 1, 1, 0)))
        res = classify_lemma41(m, SlopeConstraint((1, 1), (1, 1)))
        assert res.classification is Lemma41Class.RANK_TWO
        assert res.twisted_rank == 2

    def test_quadratic_tau_rejected(self):
        m = TwistedMatrix(((1, 2, 1, 2), (3, 1, 3, 1)), IntPolynomial((-2, 0, 1)))
        with pytest.raises(HypothesisError):
            classify_lemma41(m, SlopeConstraint((2, 1), (-2, -1)))

    def test_rank_one_integer_matrix_rejected(self):
        m = TwistedMatrix(((1, 2, 1, 2), (2, 4, 2, 4)))
        with pytest.raises(HypothesisError):
            classify_lemma41(m, SlopeConstraint((2, 1), (-2, -1)))

    def test_unsatisfied_constraints_rejected(self):
        m = TwistedMatrix(((1, 2, 1, 2), (3, 1, 3, 1)))
        with pytest.raises(HypothesisError):
            classify_lemma41(m, SlopeConstraint((1, 1), (1, 1)))

    def test_gl2z_row_invariance(self):
        # classification depends only on the row space and the slopes
        rng = random.Random(6)
        m = TwistedMatrix(((1, 2, 1, 2), (3, 1, 3, 1)))
        s = SlopeConstraint((2, 1), (-2, -1))
        base = classify_lemma41(m, s).classification
        for _ in range(12):
            a, b, c, d = 1, rng.randint(-3, 3), rng.randint(-3, 3), 1
            while a * d - b * c not in (1, -1):
                a, b, c, d = (rng.randint(-2, 2) for _ in range(4))
                if a * d - b * c == 0:
                    a, d = 1, 1
            r1 = tuple(a * x + b * y for x, y in zip(m.rows[0], m.rows[1]))
            r2 = tuple(c * x + d * y for x, y in zip(m.rows[0], m.rows[1]))
            m2 = TwistedMatrix((r1, r2))
            assert classify_lemma41(m2, s).classification is base

    def test_mini_exhaustive(self):
        stats = lemma41_exhaustive_scan(entry_bound=1, slope_sum=3)
        assert stats["instances"] > 0
        assert stats["equal_pair"] > 0 and stats["negated_pair"] > 0


class TestLemma42:
    def test_block_example(self):
        m = TwistedMatrix(((1, 1, 0, 0), (0, 0, 1, 1)), "formal")
        assert verify_lemma42(m, SlopeConstraint((1, 1), (1, 1))) == 2

    def test_zero_entry_pairs_rejected(self):
        m = TwistedMatrix(((1, 1, 0, 0), (0, 0, 1, 1)), "formal")
        with pytest.raises(HypothesisError):
            verify_lemma42(m, SlopeConstraint((1, 0), (1, 1)))

    def test_generator_always_rank_two(self):
        rng = random.Random(8)
        pairs = [p for p in coprime_pairs(5) if p[0] != 0 and p[1] != 0]
        checked = 0
        while checked < 300:
            s = SlopeConstraint(rng.choice(pairs), rng.choice(pairs))
            rows = constrained_rows(s, 3)
            if len(rows) < 2:
                continue
            m = TwistedMatrix((rng.choice(rows), rng.choice(rows)))
            if m.integer_rank() != 2:
                continue
            assert verify_lemma42(m, s) == 2
            checked += 1

    def test_basis_coefficients_match_determinant(self):
        # oracle: expand the symbolic determinant over the formal basis
        import sympy

        t1, t2 = sympy.symbols("t1 t2")
        rng = random.Random(9)
        for _ in range(20):
            rows = tuple(tuple(rng.randint(-5, 5) for _ in range(4)) for _ in range(2))
            (a1, b1, c1, d1), (a2, b2, c2, d2) = rows
            det = sympy.expand((a1 + b1 * t1) * (c2 + d2 * t2)
                               - (c1 + d1 * t2) * (a2 + b2 * t1))
            poly = sympy.Poly(det, t1, t2)
            m = TwistedMatrix(rows, "formal")
            e1, et1, et2, et12 = lemma42_basis_coefficients(m)
            assert poly.coeff_monomial(1) == e1
            assert poly.coeff_monomial(t1) == et1
            assert poly.coeff_monomial(t2) == et2
            assert poly.coeff_monomial(t1 * t2) == et12


class TestJacobianBlocks:
    T1 = mp.mpc("0.31", "1.27")
    T2 = mp.mpc("-0.46", "0.92")

    def test_block_diagonal_full_rank(self):
        rows = [
            (1, 2, 0, 0, 3, -1, 0, 0),
            (2, -1, 0, 0, 1, 3, 0, 0),
            (0, 0, 1, 1, 0, 0, 2, -1),
            (0, 0, 2, -1, 0, 0, 1, 1),
        ]
        assert jacobian_block_rank(rows, self.T1, self.T2) == (4, 0)

    def test_rank_deficient_block(self):
        # first block has identical twisted columns
        rows = [
            (1, 2, 0, 0, 1, 2, 0, 0),
            (3, 1, 0, 0, 3, 1, 0, 0),
            (0, 0, 1, 1, 0, 0, 2, -1),
            (0, 0, 2, -1, 0, 0, 1, 1),
        ]
        assert jacobian_block_rank(rows, self.T1, self.T2) == (3, 1)

    def test_crossed_pattern(self):
        rows = [
            (1, 2, 0, 0, 0, 0, 3, -1),
            (2, -1, 0, 0, 0, 0, 1, 3),
            (0, 0, 1, 1, 2, -1, 0, 0),
            (0, 0, 2, -1, 1, 1, 0, 0),
        ]
        rank, dim = jacobian_block_rank(rows, self.T1, self.T2)
        assert (rank, dim) == (4, 0)

    def test_malformed_pattern_rejected(self):
        rows = [
            (1, 2, 3, 0, 0, 0, 0, -1),
            (2, -1, 0, 4, 0, 0, 1, 3),
            (0, 0, 1, 1, 2, -1, 0, 0),
            (0, 0, 2, -1, 1, 1, 0, 0),
        ]
        with pytest.raises(ArgumentError):
            jacobian_block_rank(rows, self.T1, self.T2)

    def test_agrees_with_svd_oracle(self):
        rng = random.Random(12)
        with mp.workdps(60):
            for _ in range(10000):
                deficient = rng.random() < 0.4
                r1 = [rng.randint(-4, 4) for _ in range(4)]
                if deficient:
                    r2 = [x * rng.choice([1, -1]) for x in r1]
                else:
                    r2 = [rng.randint(-4, 4) for _ in range(4)]
                r3 = [rng.randint(-4, 4) for _ in range(4)]
                r4 = [rng.randint(-4, 4) for _ in range(4)]
                rows = [
                    (r1[0], r1[1], 0, 0, r1[2], r1[3], 0, 0),
                    (r2[0], r2[1], 0, 0, r2[2], r2[3], 0, 0),
                    (0, 0, r3[0], r3[1], 0, 0, r3[2], r3[3]),
                    (0, 0, r4[0], r4[1], 0, 0, r4[2], r4[3]),
                ]
                try:
                    lat = SubgroupLattice(tuple(rows), 8)
                except ArgumentError:
                    continue
                rank, dim = jacobian_block_rank(lat, self.T1, self.T2, digits=40)
                jac = mp.matrix([
                    [row[0] * self.T1 + row[1], row[2] * self.T2 + row[3],
                     row[4] * self.T1 + row[5], row[6] * self.T2 + row[7]]
                    for row in rows])
                svals = mp.svd_c(jac, compute_uv=False)
                svd_rank = sum(1 for s in svals if s > mp.mpf("1e-20"))
                assert rank == svd_rank
                assert dim == 4 - rank
