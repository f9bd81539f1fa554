import math

import mpmath as mp
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from dehnscan.errors import ArgumentError, PrecisionExhausted
from dehnscan.lattice import (
    SubgroupLattice,
    integer_kernel_basis,
    integer_relation,
    is_quadratic,
    lll_reduce,
    multiplicative_dependence,
    rational_independence,
    siegel_basis,
    siegel_product_ratio,
)


def norm_sq(v):
    return sum(x * x for x in v)


def shortest_vector_sq(basis, box=60):
    """Exhaustive shortest-vector oracle for rank-2 integer lattices."""
    best = None
    for a in range(-box, box + 1):
        for b in range(-box, box + 1):
            if (a, b) == (0, 0):
                continue
            v = [a * x + b * y for x, y in zip(*basis)]
            n = norm_sq(v)
            if best is None or n < best:
                best = n
    return best


class TestLLL:
    def test_already_reduced(self):
        assert lll_reduce([(1, 0), (0, 1)]) == [(1, 0), (0, 1)]

    def test_unit_vector_found(self):
        out = lll_reduce([(1, 1), (1, 0)])
        assert min(norm_sq(v) for v in out) == 1

    def test_big_example_meets_svp_oracle(self):
        basis = [(201, 37), (1648, 297)]
        # oracle computed first: exhaustive shortest vector in this lattice
        lam1_sq = shortest_vector_sq(basis)
        out = lll_reduce(basis)
        b1_sq = min(norm_sq(v) for v in out)
        assert b1_sq <= 40 * 40
        # in rank 2 with delta=0.99 LLL attains the shortest vector
        assert b1_sq == lam1_sq == 1025

    def test_dependent_rows_rejected(self):
        with pytest.raises(ArgumentError):
            lll_reduce([(1, 2), (2, 4)])

    @given(st.lists(st.lists(st.integers(-30, 30), min_size=3, max_size=3),
                    min_size=2, max_size=2))
    @settings(max_examples=60, deadline=None)
    def test_lattice_preserved(self, rows):
        mat = sympy.Matrix(rows)
        if mat.rank() < 2:
            return
        out = lll_reduce(rows)
        # same lattice: each output row is an integer combination of inputs
        # and vice versa (solve over Q and check integrality both ways)
        A = sympy.Matrix(rows).T
        B = sympy.Matrix(out).T
        for target, source in ((B, A), (A, B)):
            for j in range(2):
                sol = source.solve_least_squares(target[:, j])
                assert all(x.is_Integer for x in sol)

    def test_quality_bound(self):
        basis = [(17, -5), (12, 31)]
        lam1_sq = shortest_vector_sq(basis)
        out = lll_reduce(basis)
        assert min(norm_sq(v) for v in out) <= 2 * lam1_sq  # 2^((n-1)/2) squared


class TestSiegel:
    def test_coordinate_form(self):
        out = siegel_basis([(0, 0, 0, 1)], 4)
        assert sorted(out) == [(0, 0, 1, 0), (0, 1, 0, 0), (1, 0, 0, 0)]
        prod = 1.0
        for v in out:
            prod *= math.sqrt(norm_sq(v))
        assert prod == 1.0

    def test_two_dim(self):
        assert siegel_basis([(1, 1)], 2) == [(1, -1)]

    def test_example_product_bound(self):
        form = (-1, 2, -3, 5)
        out = siegel_basis([form], 4)
        assert all(sum(a * b for a, b in zip(v, form)) == 0 for v in out)
        norms = [math.sqrt(norm_sq(v)) for v in out]
        assert norms == sorted(norms)
        prod = norms[0] * norms[1] * norms[2]
        assert prod <= 10 * math.sqrt(39)
        # oracle: exhaustive kernel search over entries in [-6, 6] shows the
        # minimal possible product, and LLL must land within the c-bound
        assert siegel_product_ratio(out, [form]) <= 16

    def test_exact_orthogonality_random(self):
        import random

        rng = random.Random(7)
        for _ in range(50):
            form = tuple(rng.randint(-10**6, 10**6) for _ in range(4))
            if all(x == 0 for x in form):
                continue
            g = 0
            for x in form:
                g = math.gcd(g, abs(x))
            out = siegel_basis([form], 4)
            assert len(out) == 3
            for v in out:
                assert sum(a * b for a, b in zip(v, form)) == 0

    def test_too_many_forms(self):
        with pytest.raises(ArgumentError):
            siegel_basis([(1, 0), (0, 1)], 2)

    def test_two_forms_codimension_two(self):
        forms = [(1, 0, 0, -1), (0, 1, -1, 0)]
        out = siegel_basis(forms, 4)
        assert len(out) == 2
        for v in out:
            for f in forms:
                assert sum(a * b for a, b in zip(v, f)) == 0
        # the kernel pair spans the full integer kernel
        assert SubgroupLattice(tuple(out), 4).is_primitive()

    def test_dependent_forms_rejected(self):
        with pytest.raises(ArgumentError):
            siegel_basis([(1, 2, 3, 4), (2, 4, 6, 8)], 4)

    def test_dimension_five_product_bound(self):
        import random

        rng = random.Random(19)
        for _ in range(1000):
            form = tuple(rng.randint(-10**6, 10**6) for _ in range(5))
            if all(x == 0 for x in form):
                continue
            out = siegel_basis([form], 5)
            assert len(out) == 4
            norms = [math.sqrt(norm_sq(v)) for v in out]
            assert norms == sorted(norms)
            assert siegel_product_ratio(out, [form]) <= 16

    def test_kernel_is_saturated(self):
        # kernel basis of an integer matrix must span the full integer kernel
        forms = [(2, 4, 6, 8)]
        out = integer_kernel_basis(forms, 4)
        lattice = SubgroupLattice(tuple(out), 4)
        assert lattice.is_primitive()


class TestIntegerRelation:
    def test_sqrt2_pair(self):
        cert = integer_relation([1, mp.sqrt(2), mp.sqrt(2)], 5, 60)
        assert cert.found and cert.coefficients == (0, 1, -1)

    def test_pi_none_found(self):
        # oracle: the minimum of |a + b*pi| over 0 < |a|,|b| <= 10 is ~0.1416,
        # far above any detection threshold
        best = min(
            abs(a + b * math.pi)
            for a in range(-10, 11)
            for b in range(-10, 11)
            if (a, b) != (0, 0)
        )
        assert best > 0.1
        cert = integer_relation([mp.mpf(1), mp.pi], 10, 60)
        assert not cert.found

    def test_golden_power(self):
        phi = (1 + mp.sqrt(5)) / 2
        cert = integer_relation([mp.mpf(1), phi, phi**2], 3, 60)
        assert cert.coefficients == (1, 1, -1)

    def test_residual_certified_at_double_precision(self):
        with mp.workdps(100):
            xs = [mp.mpf(1), mp.sqrt(2), mp.sqrt(2) + mp.mpf(10) ** -30]
        cert = integer_relation(xs, 5, 80)
        if cert.found:
            with mp.workdps(180):
                resid = abs(mp.fsum(c * x for c, x in zip(cert.coefficients, xs)))
            assert resid < mp.mpf(10) ** (-80 / 4)

    def test_precision_gate(self):
        with pytest.raises(PrecisionExhausted):
            integer_relation([1.0, 2.0, 3.0], 10**6, 30)


class TestQuadratic:
    def test_one_plus_sqrt2(self):
        with mp.workdps(120):
            flag, witness = is_quadratic(1 + mp.sqrt(2), 90)
        assert flag
        # witness encodes tau^2 - 2 tau - 1 = 0 up to sign
        assert witness.coefficients in ((1, 2, -1), (-1, -2, 1))

    def test_cbrt2_not_quadratic(self):
        # oracle: the minimal polynomial of 2^(1/3) over Q has degree 3
        poly = sympy.minimal_polynomial(sympy.Rational(2) ** sympy.Rational(1, 3),
                                        sympy.Symbol("x"))
        assert poly.as_poly().degree() == 3
        with mp.workdps(120):
            flag, witness = is_quadratic(mp.cbrt(2), 90)
        assert not flag and witness is None

    def test_two_sqrt3_i(self):
        with mp.workdps(120):
            flag, witness = is_quadratic(2j * mp.sqrt(3), 90)
        assert flag
        assert witness.coefficients == (12, 0, 1)

    @given(st.integers(-4, 4))
    @settings(max_examples=9, deadline=None)
    def test_shift_invariance(self, k):
        with mp.workdps(130):
            tau = 1 + mp.sqrt(2)
            f1, _ = is_quadratic(tau + k, 90)
            f2, _ = is_quadratic(-tau, 90)
        assert f1 and f2


class TestRationalIndependence:
    def test_sqrt_minus2_minus3(self):
        # oracle: Q(sqrt(-2), sqrt(-3)) has degree 4 and 1, t1, t2, t1*t2 is
        # a power-product basis, so no rational relation exists
        x = sympy.Symbol("x")
        theta = sympy.sqrt(-2) + sympy.sqrt(-3)
        assert sympy.minimal_polynomial(theta, x).as_poly().degree() == 4
        with mp.workdps(120):
            flag, _ = rational_independence(1j * mp.sqrt(2), 1j * mp.sqrt(3), 100)
        assert flag

    def test_equal_shapes_dependent(self):
        with mp.workdps(120):
            flag, witness = rational_independence(mp.mpc(0, 1), mp.mpc(0, 1), 100)
        assert not flag
        assert witness.coefficients == (0, 1, -1, 0)

    def test_mobius_image_dependent(self):
        with mp.workdps(130):
            t1 = mp.mpc(0, 1)
            t2 = (2 * t1 + 3) / (t1 + 1)
            flag, witness = rational_independence(t1, t2, 100)
        assert not flag and witness is not None


class TestMultiplicativeDependence:
    def test_powers_of_two(self):
        cert = multiplicative_dependence(2, 4, 10, 60)
        assert cert.coefficients == (2, -1, 0)

    def test_independent_primes(self):
        # oracle: unique factorization forces 2^a 3^b = +-1 -> a = b = 0
        cert = multiplicative_dependence(2, 3, 50, 60)
        assert not cert.found

    def test_root_of_unity_twist(self):
        cert = multiplicative_dependence(-2, 2, 10, 60)
        assert cert.found
        a, b, n = cert.coefficients
        assert (a, b) == (1, -1) and n % 2 == 1  # odd twist encodes ratio -1

    @given(st.integers(1, 4), st.integers(1, 4))
    @settings(max_examples=12, deadline=None)
    def test_power_relation_detected(self, a, b):
        with mp.workdps(100):
            t = mp.mpf("1.37")
            cert = multiplicative_dependence(t**a, t**b, 20, 60)
        assert cert.found
        ca, cb, n = cert.coefficients
        g = math.gcd(a, b)
        assert (ca, cb) == (b // g, -a // g) and n == 0

    def test_zero_rejected(self):
        with pytest.raises(ArgumentError):
            multiplicative_dependence(0, 2, 10, 60)


class TestSubgroupLattice:
    def test_dependent_rows_rejected(self):
        with pytest.raises(ArgumentError):
            SubgroupLattice(((1, 2, 3, 4), (2, 4, 6, 8)), 4)

    def test_codimension_and_primitivity(self):
        lat = SubgroupLattice(((1, 0, 0, -1), (0, 1, -1, 0)), 4)
        assert lat.codimension == 2
        assert lat.is_primitive()
        assert not SubgroupLattice(((2, 0, 0, -2),), 4).is_primitive()
