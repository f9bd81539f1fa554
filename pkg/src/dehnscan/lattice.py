#
# lattice.py
#

# Integer-lattice algebra: LLL reduction, Siegel small bases, algebraic
# subgroup carriers, and integer-relation detection.  The relation engine
# backs the quadraticity test for cusp shapes, rational independence of
# two cusp shapes, and multiplicative-dependence detection for pairs of
# core holonomies.

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .errors import ArgumentError, PrecisionExhausted

# Default ceiling for relation coefficients; standard LLL relation-finding
# margin.  Callers that use the default must supply enough digits (the
# precision gate below enforces this).
DEFAULT_RELATION_BOUND = 10**6

# Calibrated bound on the Siegel product constant for ambient dimension <= 8.
# The existence statement only promises *some* universal constant; this value
# is the empirical ceiling enforced by the test suite.
SIEGEL_PRODUCT_CONSTANT = 16.0


@dataclass(frozen=True)
class SubgroupLattice:
    """Integer matrix whose rows are exponent vectors of monomial equations.

    Rows are required to be linearly independent over Q, so the codimension
    of the subgroup equals the number of rows.
    """

    rows: tuple
    n: int

    def __post_init__(self):
        rows = tuple(tuple(int(c) for c in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        for r in rows:
            if len(r) != self.n:
                raise ArgumentError("row length %d != ambient dimension %d" % (len(r), self.n))
        if rows and _rational_rank([list(r) for r in rows]) != len(rows):
            raise ArgumentError("subgroup rows are dependent over Q")

    @property
    def codimension(self):
        return len(self.rows)

    def is_primitive(self):
        """True iff the row space is saturated (the subgroup is a torus):
        the gcd of all maximal minors is 1."""
        import itertools as _it

        r = len(self.rows)
        if r == 0:
            return True
        g = 0
        for cols in _it.combinations(range(self.n), r):
            sub = [[self.rows[i][c] for c in cols] for i in range(r)]
            g = math.gcd(g, abs(_int_det(sub)))
            if g == 1:
                return True
        return g == 1


def _int_det(m):
    m = [[Fraction(x) for x in row] for row in m]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        piv = next((i for i in range(col, n) if m[i][col] != 0), None)
        if piv is None:
            return 0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        for i in range(col + 1, n):
            f = m[i][col] / m[col][col]
            m[i] = [a - f * b for a, b in zip(m[i], m[col])]
    return int(det)


@dataclass(frozen=True)
class RelationCertificate:
    """Outcome of an integer-relation search.

    kind is "relation" or "none-found"; when a relation is reported the
    coefficients are primitive with positive first nonzero entry and the
    residual re-verified at doubled precision.
    """

    kind: str
    coefficients: tuple = None
    residual: float = None

    @property
    def found(self):
        return self.kind == "relation"


def _rational_rank(rows):
    rows = [[Fraction(c) for c in r] for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    col = 0
    r = 0
    while r < len(rows) and col < ncols:
        piv = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(r + 1, len(rows)):
            if rows[i][col] != 0:
                f = rows[i][col] / rows[r][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        r += 1
        col += 1
        rank += 1
    return rank


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def lll_reduce(basis, delta=Fraction(99, 100)):
    """LLL-reduce a basis of an integer lattice (delta = 0.99).

    The input vectors must be independent over Q; the output spans the same
    lattice with the usual LLL guarantee |b_1| <= 2^((n-1)/2) * lambda_1.
    """
    b = [list(map(int, v)) for v in basis]
    if not b:
        return []
    n = len(b)
    half = Fraction(1, 2)
    mu = [[Fraction(0)] * n for _ in range(n)]
    bstar = [None] * n
    bsq = [Fraction(0)] * n

    def update_row(i):
        # refresh Gram-Schmidt data for row i against the valid rows below it
        v = [Fraction(x) for x in b[i]]
        for j in range(i):
            mu[i][j] = _dot(b[i], bstar[j]) / bsq[j]
            v = [a - mu[i][j] * c for a, c in zip(v, bstar[j])]
        bstar[i] = v
        bsq[i] = _dot(v, v)
        if bsq[i] == 0:
            raise ArgumentError("lll_reduce requires independent input rows")

    for i in range(n):
        update_row(i)
    k = 1
    while k < n:
        update_row(k)
        for j in range(k - 1, -1, -1):
            if abs(mu[k][j]) > half:
                r = int(round(mu[k][j]))
                b[k] = [a - r * c for a, c in zip(b[k], b[j])]
                update_row(k)
        if bsq[k] >= (delta - mu[k][k - 1] ** 2) * bsq[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            update_row(k - 1)
            k = max(k - 1, 1)
    return [tuple(v) for v in b]


def integer_kernel_basis(forms, n):
    """Basis of the saturated lattice {x in Z^n : <form, x> = 0 for all forms}.

    Computed by unimodular row reduction of the transposed form matrix with
    an identity tracker, so the result is a genuine Z-basis of the kernel.
    """
    r = len(forms)
    # rows: [ <x, form_1>, ..., <x, form_r> | x ] for x = e_1..e_n
    rows = [[forms[j][i] for j in range(r)] + [0] * n for i in range(n)]
    for i in range(n):
        rows[i][r + i] = 1
    for col in range(r):
        while True:
            live = [i for i in range(col, n) if rows[i][col] != 0]
            if not live:
                break
            piv = min(live, key=lambda i: abs(rows[i][col]))
            rows[col], rows[piv] = rows[piv], rows[col]
            done = True
            for i in range(col + 1, n):
                if rows[i][col] != 0:
                    q = rows[i][col] // rows[col][col]
                    rows[i] = [a - q * c for a, c in zip(rows[i], rows[col])]
                    if rows[i][col] != 0:
                        done = False
            if done:
                break
    kernel = [tuple(row[r:]) for row in rows[r:] if all(x == 0 for x in row[:r])]
    return kernel


def siegel_basis(forms, n):
    """Small integer vectors vanishing at the given linear forms.

    Returns n - r independent vectors orthogonal to every form, sorted by
    Euclidean length, with the product of their lengths bounded by
    SIEGEL_PRODUCT_CONSTANT times the product of the form lengths (enforced
    empirically for n <= 8).
    """
    forms = [tuple(int(c) for c in f) for f in forms]
    r = len(forms)
    if r >= n:
        raise ArgumentError("need fewer forms than the ambient dimension (r=%d, n=%d)" % (r, n))
    for f in forms:
        if len(f) != n:
            raise ArgumentError("form length != ambient dimension")
    if _rational_rank([list(f) for f in forms]) != r:
        raise ArgumentError("forms must be independent")
    kernel = integer_kernel_basis(forms, n)
    if len(kernel) != n - r:
        raise ArgumentError("kernel computation does not match codimension")
    reduced = lll_reduce(kernel)
    reduced = sorted(reduced, key=lambda v: (_dot(v, v), v))
    out = []
    for v in reduced:
        if any(_dot(v, f) != 0 for f in forms):
            raise AssertionError("kernel vector fails exact orthogonality")
        # canonical sign: first nonzero entry positive
        lead = next(x for x in v if x != 0)
        out.append(tuple(-x for x in v) if lead < 0 else v)
    return out


def siegel_product_ratio(vectors, forms):
    """Observed constant: product of basis lengths over product of form lengths."""
    num = 1.0
    for v in vectors:
        num *= math.sqrt(_dot(v, v))
    den = 1.0
    for f in forms:
        den *= math.sqrt(_dot(f, f))
    return num / den


def _as_mpc(x):
    if isinstance(x, Fraction):
        return mp.mpc(mp.mpf(x.numerator) / mp.mpf(x.denominator))
    return mp.mpc(x)


def integer_relation(xs, bound, digits):
    """Search for integers c (|c_i| <= bound, not all zero) with |sum c_i x_i| small.

    A relation is accepted only if its residual is below 10^(-digits/2) at
    working precision and survives re-verification at doubled precision
    (threshold 10^(-digits/4)).  Complex inputs contribute paired real
    constraints.  Reports none-found otherwise.
    """
    xs = list(xs)
    if not xs:
        raise ArgumentError("empty input")
    if bound < 1:
        raise ArgumentError("bound must be >= 1")
    if digits < 4 * len(xs) * math.log10(max(2, bound)):
        raise PrecisionExhausted(
            "need >= %.0f digits for %d values at bound %d"
            % (4 * len(xs) * math.log10(bound), len(xs), bound)
        )
    return _relation_search(xs, [bound] * len(xs), digits)


def _relation_search(xs, bounds, digits):
    n = len(xs)
    with mp.workdps(digits + 20):
        vals = [_as_mpc(x) for x in xs]
        use_imag = any(abs(mp.im(v)) > mp.mpf(10) ** (-digits) for v in vals)
        scale = mp.mpf(10) ** digits
        rows = []
        for i, v in enumerate(vals):
            row = [0] * n
            row[i] = 1
            row.append(int(mp.nint(mp.re(v) * scale)))
            if use_imag:
                row.append(int(mp.nint(mp.im(v) * scale)))
            rows.append(row)
        reduced = lll_reduce(rows)
        detect = mp.mpf(10) ** (-mp.mpf(digits) / 2)
        candidates = sorted(reduced, key=lambda r: _dot(r, r))
        for cand in candidates:
            coeffs = cand[:n]
            if all(c == 0 for c in coeffs):
                continue
            if any(abs(c) > b for c, b in zip(coeffs, bounds)):
                continue
            resid = abs(mp.fsum([c * v for c, v in zip(coeffs, vals)], absolute=False))
            if resid >= detect:
                continue
            # certify at doubled precision
            with mp.workdps(2 * digits + 20):
                vals2 = [_as_mpc(x) for x in xs]
                resid2 = abs(mp.fsum([c * v for c, v in zip(coeffs, vals2)], absolute=False))
            if resid2 > mp.mpf(10) ** (-mp.mpf(digits) / 4):
                continue
            g = 0
            for c in coeffs:
                g = math.gcd(g, abs(c))
            coeffs = [c // g for c in coeffs]
            lead = next(c for c in coeffs if c != 0)
            if lead < 0:
                coeffs = [-c for c in coeffs]
            resid_final = abs(mp.fsum([c * v for c, v in zip(coeffs, vals)], absolute=False))
            return RelationCertificate("relation", tuple(coeffs), float(resid_final))
    return RelationCertificate("none-found")


def is_quadratic(tau, digits, bound=DEFAULT_RELATION_BOUND):
    """Detect an integer relation among 1, tau, tau^2.

    Returns (flag, witness); the witness is the relation certificate when a
    quadratic (or lower-degree) relation is found, else None.
    """
    with mp.workdps(digits + 20):
        t = _as_mpc(tau)
        cert = integer_relation([mp.mpf(1), t, t * t], bound, digits)
    if cert.found:
        return True, cert
    return False, None


def rational_independence(t1, t2, digits, bound=DEFAULT_RELATION_BOUND):
    """True iff 1, tau1, tau2, tau1*tau2 admit no integer relation below the ceiling."""
    with mp.workdps(digits + 20):
        a = _as_mpc(t1)
        b = _as_mpc(t2)
        cert = integer_relation([mp.mpf(1), a, b, a * b], bound, digits)
    if cert.found:
        return False, cert
    return True, None


def multiplicative_dependence(t1, t2, bound, digits):
    """Search for integers (a, b, N), |a|,|b| <= bound, with
    a*log(t1) + b*log(t2) + N*pi*i = 0.

    An even N certifies t1^a * t2^b = 1; an odd N certifies t1^a * t2^b = -1
    (so (t1, t2) is still multiplicatively dependent, via doubling).  Returns
    a relation certificate or none-found.
    """
    with mp.workdps(digits + 20):
        v1 = _as_mpc(t1)
        v2 = _as_mpc(t2)
        if v1 == 0 or v2 == 0:
            raise ArgumentError("holonomies must be nonzero")
        l1 = mp.log(v1)
        l2 = mp.log(v2)
        xs = [l1, l2, mp.mpc(0, mp.pi)]
        if digits < 4 * len(xs) * math.log10(max(2, bound)):
            raise PrecisionExhausted(
                "need >= %.0f digits for bound %d"
                % (4 * len(xs) * math.log10(bound), bound)
            )
        # N only needs to absorb winding; bound it by the attainable log sizes
        nbound = int(mp.ceil((bound * (abs(l1) + abs(l2))) / mp.pi)) + 2
        return _relation_search(xs, [bound, bound, nbound], digits)
