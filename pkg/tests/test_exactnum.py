import math
import random
from fractions import Fraction

import mpmath as mp
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from dehnscan.errors import ArgumentError, PrecisionExhausted
from dehnscan.exactnum import (
    AlgebraicNumber,
    FieldElement,
    IntPolynomial,
    all_roots,
    bounded_height_algebraics,
    field_rank,
    height,
    height_tuple,
    mahler_log,
    min_poly_reconstruct,
    parse_int_polynomial,
)

X = sympy.Symbol("x")
PLASTIC = IntPolynomial((-1, -1, 0, 1))  # x^3 - x - 1


def close(a, b, tol="1e-25"):
    return abs(mp.mpf(a) - mp.mpf(b)) < mp.mpf(tol)


class TestIntPolynomial:
    def test_parse_roundtrip(self):
        p = parse_int_polynomial("x^2 - x - 1")
        assert p.coefficients == (-1, -1, 1)
        assert parse_int_polynomial(str(p)) == p

    def test_parse_with_stars(self):
        assert parse_int_polynomial("2*x - 1").coefficients == (-1, 2)

    def test_parse_rejects_rationals(self):
        with pytest.raises(ArgumentError):
            parse_int_polynomial("x/2 - 1")

    def test_primitive(self):
        assert IntPolynomial((-2, 0, -4)).primitive().coefficients == (1, 0, 2)

    def test_irreducible(self):
        assert IntPolynomial((-2, 0, 1)).is_irreducible()
        assert not IntPolynomial((1, 2, 1)).is_irreducible()


class TestMahler:
    def test_linear(self):
        # single root at 2, leading coefficient 1
        assert close(mahler_log(parse_int_polynomial("x - 2"), 40), mp.log(2))

    def test_root_at_zero(self):
        assert close(mahler_log(parse_int_polynomial("x"), 40), 0)

    def test_golden_quadratic(self):
        # oracle: quadratic formula gives roots (1 +- sqrt 5)/2; only the
        # golden ratio lies outside the unit circle
        with mp.workdps(60):
            expected = mp.log((1 + mp.sqrt(5)) / 2)
        assert close(mahler_log(parse_int_polynomial("x^2 - x - 1"), 40), expected)

    def test_lead_coefficient_counts(self):
        # 2x - 1: root 1/2 inside the unit circle, measure = |lead| = 2
        assert close(mahler_log(parse_int_polynomial("2x - 1"), 40), mp.log(2))

    def test_zero_rejected(self):
        with pytest.raises(ArgumentError):
            mahler_log(IntPolynomial((0,)), 40)


class TestHeight:
    def test_root_of_unity(self):
        assert close(height(AlgebraicNumber.from_rational(1), 40), 0)

    def test_integer(self):
        assert close(height(AlgebraicNumber.from_rational(2), 40), mp.log(2))

    def test_golden_place_sum_oracle(self):
        # place-sum oracle over Q(sqrt 5): embeddings phi and 1 - phi; only
        # |phi| exceeds 1 and the minimal polynomial is monic, so
        # h = (1/2) log phi with no finite contributions
        with mp.workdps(60):
            phi = (1 + mp.sqrt(5)) / 2
            expected = mp.log(phi) / 2
        golden = AlgebraicNumber(IntPolynomial((-1, -1, 1)), 1.618)
        assert close(height(golden, 40), expected)

    def test_power_identity(self):
        # h(alpha^n) = n h(alpha) via minimal polynomial of phi^n
        with mp.workdps(60):
            phi = (1 + mp.sqrt(5)) / 2
            base = height(AlgebraicNumber(IntPolynomial((-1, -1, 1)), 1.618), 40)
            for n in range(2, 6):
                poly = sympy.minimal_polynomial(sympy.Rational(1, 2) * (1 + sympy.sqrt(5)), X)
                pw = sympy.minimal_polynomial(((1 + sympy.sqrt(5)) / 2) ** n, X).as_poly()
                coeffs = tuple(int(c) for c in reversed(pw.all_coeffs()))
                a = AlgebraicNumber(IntPolynomial(coeffs), phi**n)
                assert close(height(a, 40), n * base)


class TestHeightTuple:
    def test_pair_of_units(self):
        assert close(height_tuple([1, 1], 40), 0)

    def test_singleton(self):
        assert close(height_tuple([2], 40), mp.log(2))

    def test_integer_pair_place_sum_oracle(self):
        # place-sum over Q: only the archimedean place contributes
        # max(1, 2, 3) = 3; finite places give nothing for integers
        assert close(height_tuple([2, 3], 40), mp.log(3))

    def test_fraction_pair(self):
        # finite part is log lcm(2, 3), archimedean part is log max(1, ...) = 0
        assert close(height_tuple([Fraction(1, 2), Fraction(1, 3)], 40), mp.log(6))

    def test_sandwich_inequality(self):
        golden = AlgebraicNumber(IntPolynomial((-1, -1, 1)), 1.618)
        sqrt2 = AlgebraicNumber(IntPolynomial((-2, 0, 1)), 1.414)
        h = height_tuple([golden, sqrt2], 40)
        h1 = height(golden, 40)
        h2 = height(sqrt2, 40)
        assert max(h1, h2) <= h + mp.mpf("1e-25")
        assert h <= h1 + h2 + mp.mpf("1e-25")

    def test_empty_rejected(self):
        with pytest.raises(ArgumentError):
            height_tuple([], 40)


class TestMinPolyReconstruct:
    def test_sqrt2(self):
        with mp.workdps(90):
            assert min_poly_reconstruct(mp.sqrt(2), 2, 60).coefficients == (-2, 0, 1)

    def test_rational(self):
        with mp.workdps(90):
            assert min_poly_reconstruct(mp.mpf("0.5"), 3, 60).coefficients == (-1, 2)

    def test_plastic_number(self):
        # oracle: exhaustive search over cubics with |coeff| <= 10 finds a
        # unique polynomial with a root near 1.3247
        with mp.workdps(60):
            x0 = mp.findroot(lambda t: t**3 - t - 1, mp.mpf("1.3"))
        hits = []
        for c0 in range(-10, 11):
            for c1 in range(-10, 11):
                for c2 in range(-10, 11):
                    val = abs(c0 + c1 * x0 + c2 * x0**2 + x0**3)
                    if val < 1e-8:
                        hits.append((c0, c1, c2, 1))
        assert hits == [(-1, -1, 0, 1)]
        with mp.workdps(90):
            assert min_poly_reconstruct(x0, 4, 60).coefficients == (-1, -1, 0, 1)

    def test_transcendental_none(self):
        with mp.workdps(90):
            assert min_poly_reconstruct(mp.pi, 3, 60) is None

    def test_precision_gate(self):
        with pytest.raises(PrecisionExhausted):
            min_poly_reconstruct(mp.mpf("1.5"), 5, 30)

    def test_identity_on_random_cubics(self):
        rng = random.Random(11)
        done = 0
        with mp.workdps(80):
            while done < 100:
                coeffs = [rng.randint(-20, 20) for _ in range(3)] + [rng.randint(1, 20)]
                p = IntPolynomial(tuple(coeffs)).primitive()
                if p.degree != 3 or not p.is_irreducible():
                    continue
                root = all_roots(p, 60)[0]
                rec = min_poly_reconstruct(root, 3, 60)
                assert rec == p, (p, rec)
                done += 1


class TestFieldElement:
    def test_rank_identical_columns(self):
        m = [[FieldElement.of(PLASTIC, 1, 2), FieldElement.of(PLASTIC, 1, 2)],
             [FieldElement.of(PLASTIC, 3, 1), FieldElement.of(PLASTIC, 3, 1)]]
        assert field_rank(m) == 1

    def test_rank_identity(self):
        m = [[FieldElement.of(PLASTIC, 1), FieldElement.of(PLASTIC, 0)],
             [FieldElement.of(PLASTIC, 0), FieldElement.of(PLASTIC, 1)]]
        assert field_rank(m) == 2

    def test_rank_generic(self):
        # oracle: det = (1+tau)(1-tau) - tau(2+tau) reduced mod tau^3-tau-1
        tau = sympy.Symbol("tau")
        det = sympy.rem(sympy.expand((1 + tau) * (1 - tau) - tau * (2 + tau)),
                        tau**3 - tau - 1, tau)
        assert det != 0
        m = [[FieldElement.of(PLASTIC, 1, 1), FieldElement.of(PLASTIC, 2, 1)],
             [FieldElement.of(PLASTIC, 0, 1), FieldElement.of(PLASTIC, 1, -1)]]
        assert field_rank(m) == 2

    def test_mixed_bases_rejected(self):
        other = IntPolynomial((-2, 0, 0, 1))
        m = [[FieldElement.of(PLASTIC, 1), FieldElement.of(other, 1)]]
        with pytest.raises(ArgumentError):
            field_rank(m)

    @given(st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9))
    @settings(max_examples=40, deadline=None)
    def test_inverse_roundtrip_field(self, a, b, c):
        e = FieldElement(PLASTIC, (Fraction(a), Fraction(b), Fraction(c)))
        if e.is_zero:
            return
        one = FieldElement.of(PLASTIC, 1)
        assert e * e.inverse() == one

    def test_agrees_with_float_rank(self):
        rng = random.Random(3)
        with mp.workdps(60):
            roots = all_roots(PLASTIC, 50)
            tau = next(r for r in roots if abs(mp.im(r)) < 1e-30 and mp.re(r) > 1)
            for _ in range(1000):
                size = rng.choice([2, 4])
                ints = [[(rng.randint(-5, 5), rng.randint(-5, 5)) for _ in range(size)]
                        for _ in range(size)]
                m = [[FieldElement.of(PLASTIC, a, b) for a, b in row] for row in ints]
                num = mp.matrix([[a + b * tau for a, b in row] for row in ints])
                sv = mp.svd_r(mp.matrix([[mp.re(x) for x in num[i, :]] for i in range(size)]),
                              compute_uv=False) if False else None
                # float-rank oracle via singular values of the complex matrix
                svals = mp.svd_c(num, compute_uv=False)
                float_rank = sum(1 for s in svals if s > mp.mpf("1e-20"))
                assert field_rank(m) == float_rank


class TestNorthcott:
    def test_degree_two_enumeration_matches_brute_force(self):
        bound = math.log(2) / 2
        found = bounded_height_algebraics(2, bound, digits=40)
        # brute-force oracle over all minimal polynomials with |coeff| <= 4
        brute = set()
        for a in range(1, 5):
            for b in range(-4, 5):
                for c in range(-4, 5):
                    p = IntPolynomial((c, b, a))
                    if p.degree < 1 or p.content() != 1 or not p.is_irreducible():
                        continue
                    h = mahler_log(p, 40) / p.degree
                    if h <= bound + mp.mpf("1e-12"):
                        brute.add(p.coefficients)
        for a in range(1, 5):
            for b in range(-4, 5):
                p = IntPolynomial((b, a))
                if p.degree == 1 and p.content() == 1 and p.is_irreducible():
                    if mahler_log(p, 40) <= bound + mp.mpf("1e-12"):
                        brute.add(p.coefficients)
        enumerated = {p.coefficients for p, _root in found}
        assert enumerated == brute
        # finite, and counted with multiplicity one per root
        per_poly = {}
        for p, _root in found:
            per_poly[p.coefficients] = per_poly.get(p.coefficients, 0) + 1
        for coeffs, count in per_poly.items():
            assert count == len(coeffs) - 1
