#
# nzseries.py
#

# Truncated bivariate power series (exact rational-complex or
# arbitrary-precision coefficients), the potential-function fit over
# deformation space, the geometric-isolation test, and the series
# coefficient identities used by the two-cusp swapped-holonomy analysis.

from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .errors import ArgumentError, PrecisionExhausted
from .geometry import solve_deformed


@dataclass(frozen=True)
class QQc:
    """Exact rational complex number re + im*i."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @property
    def is_zero(self):
        return self.re == 0 and self.im == 0

    def __add__(self, other):
        other = _as_qqc(other)
        return QQc(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return QQc(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-_as_qqc(other))

    def __rsub__(self, other):
        return _as_qqc(other) + (-self)

    def __mul__(self, other):
        other = _as_qqc(other)
        return QQc(self.re * other.re - self.im * other.im,
                   self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_qqc(other)
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by zero QQc")
        return self * QQc(other.re / n, -other.im / n)

    def __eq__(self, other):
        try:
            other = _as_qqc(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def to_mpc(self):
        return mp.mpc(mp.mpf(self.re.numerator) / self.re.denominator,
                      mp.mpf(self.im.numerator) / self.im.denominator)

    def __repr__(self):
        return "QQc(%s, %s)" % (self.re, self.im)


def _as_qqc(x):
    if isinstance(x, QQc):
        return x
    if isinstance(x, (int, Fraction)):
        return QQc(Fraction(x))
    raise TypeError("cannot coerce %r to QQc" % (x,))


def _coeff_is_zero(c):
    if isinstance(c, QQc):
        return c.is_zero
    return c == 0


class TruncatedSeries2:
    """Bivariate power series in (u1, u2), truncated at total degree N.

    Coefficients may be exact (QQc / Fraction / int) or mpmath numbers; all
    arithmetic stays inside total degree <= N.
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, order, coeffs=None):
        if order < 0:
            raise ArgumentError("order must be >= 0")
        self.order = int(order)
        data = {}
        for (i, j), c in (coeffs or {}).items():
            if i < 0 or j < 0:
                raise ArgumentError("negative exponent in series")
            if i + j <= self.order and not _coeff_is_zero(c):
                data[(i, j)] = c
        self.coeffs = data

    @classmethod
    def zero(cls, order):
        return cls(order)

    @classmethod
    def variable(cls, which, order, one=1):
        if which == 1:
            return cls(order, {(1, 0): one})
        if which == 2:
            return cls(order, {(0, 1): one})
        raise ArgumentError("variable index must be 1 or 2")

    def coeff(self, i, j):
        c = self.coeffs.get((i, j))
        if c is not None:
            return c
        for other in self.coeffs.values():
            return other * 0
        return 0

    @property
    def constant_term(self):
        return self.coeffs.get((0, 0), 0)

    def __add__(self, other):
        other = self._coerce(other)
        order = min(self.order, other.order)
        out = dict(self.coeffs)
        for key, c in other.coeffs.items():
            out[key] = out[key] + c if key in out else c
        return TruncatedSeries2(order, out)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries2(self.order, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries2):
            return TruncatedSeries2(self.order, {k: c * other for k, c in self.coeffs.items()})
        order = min(self.order, other.order)
        out = {}
        for (i1, j1), c1 in self.coeffs.items():
            for (i2, j2), c2 in other.coeffs.items():
                i, j = i1 + i2, j1 + j2
                if i + j > order:
                    continue
                key = (i, j)
                term = c1 * c2
                out[key] = out[key] + term if key in out else term
        return TruncatedSeries2(order, out)

    def __rmul__(self, other):
        return self * other

    def scale(self, s):
        return TruncatedSeries2(self.order, {k: c * s for k, c in self.coeffs.items()})

    def _coerce(self, other):
        if isinstance(other, TruncatedSeries2):
            return other
        return TruncatedSeries2(self.order, {(0, 0): other})

    def truncate(self, order):
        return TruncatedSeries2(order, {k: c for k, c in self.coeffs.items() if k[0] + k[1] <= order})

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries2):
            return NotImplemented
        keys = set(self.coeffs) | set(other.coeffs)
        return all(_coeff_is_zero(self.coeff(i, j) - other.coeff(i, j)) for i, j in keys)

    def max_abs(self, predicate=None):
        worst = mp.mpf(0)
        for (i, j), c in self.coeffs.items():
            if predicate is not None and not predicate(i, j):
                continue
            if isinstance(c, QQc):
                c = c.to_mpc()
            worst = max(worst, abs(mp.mpc(c)))
        return worst

    def __repr__(self):
        items = ", ".join("(%d,%d): %r" % (i, j, c) for (i, j), c in sorted(self.coeffs.items()))
        return "TruncatedSeries2(order=%d, {%s})" % (self.order, items)


def series_compose(f, g1, g2):
    """f(g1, g2) truncated at f's order; inner series need zero constant term."""
    for g in (g1, g2):
        if not _coeff_is_zero(g.constant_term):
            raise ArgumentError("composition requires zero constant term")
    order = f.order
    one = TruncatedSeries2(order, {(0, 0): 1})
    pow1 = [one]
    pow2 = [one]
    for _ in range(order):
        pow1.append(pow1[-1] * g1.truncate(order))
        pow2.append(pow2[-1] * g2.truncate(order))
    out = TruncatedSeries2(order)
    for (i, j), c in f.coeffs.items():
        out = out + (pow1[i] * pow2[j]).scale(c)
    return out


# ---------------------------------------------------------------------------
# potential-function fit

# Fit-grid parameters: 8 angles per variable at two radii, with tensor
# Richardson extrapolation across the radii to cancel the leading DFT
# aliasing (error ~ (r/R)^16); keeps every low coefficient far below the
# acceptance tolerances while staying within 256 deformation solves.
FIT_ANGLES = 8
FIT_RADII = ("0.004", "0.008")


def fit_potential(gs, order, digits, radii=None, sampler=None):
    """Fit the potential-function series Phi of a gluing system.

    Samples the deformation space on a polydisk grid (prescribed longitude
    log-holonomies u), reads the meridian log-holonomies v, and recovers the
    coefficients of Phi with v_i = (1/2) dPhi/du_i.  The returned series has
    Phi(0,0) = 0 and is even in each variable up to the fitting floor.

    radii overrides the two grid radii (decimal strings); sampler overrides
    the deformation solver (u_targets, digits) -> v tuple, which lets a
    synthetic deformation space stand in for a gluing system.
    """
    k = gs.k
    if k > 2:
        raise ArgumentError("potential fit supports at most 2 cusps")
    if order < 4 or order % 2 != 0:
        raise ArgumentError("order must be an even integer >= 4")
    if sampler is None:
        def sampler(u_targets, digits_):
            _sh, _u, v = solve_deformed(gs, u_targets, digits_)
            return v
    with mp.workdps(digits + 15):
        radii = [mp.mpf(r) for r in (radii or FIT_RADII)]
        angles = [mp.exp(2j * mp.pi * m / FIT_ANGLES) for m in range(FIT_ANGLES)]
        if k == 1:
            vc = _fit_v_coeffs_1(sampler, radii, angles, digits)
            phi = {}
            for a, c in vc.items():
                phi[(a + 1, 0)] = 2 * c / (a + 1)
            return TruncatedSeries2(order, {key: c for key, c in phi.items()
                                            if key[0] + key[1] <= order})
        v1c, v2c = _fit_v_coeffs_2(sampler, radii, angles, digits)
        phi = {}
        for (a, b), c in v1c.items():
            phi[(a + 1, b)] = 2 * c / (a + 1)
        mismatch = mp.mpf(0)
        for (a, b), c in v2c.items():
            key = (a, b + 1)
            cand = 2 * c / (b + 1)
            if key in phi:
                mismatch = max(mismatch, abs(phi[key] - cand))
                phi[key] = (phi[key] + cand) / 2
            else:
                phi[key] = cand
        if mismatch > mp.mpf(10) ** (-digits // 3):
            raise PrecisionExhausted(
                "gradient fits disagree at %s; fit not trustworthy" % mp.nstr(mismatch, 5))
        return TruncatedSeries2(order, {key: c for key, c in phi.items()
                                        if key[0] + key[1] <= order and key != (0, 0)})


def _fit_v_coeffs_1(sampler, radii, angles, digits):
    A = len(angles)
    per_radius = []
    for r in radii:
        samples = []
        for w in angles:
            samples.append(sampler([r * w], digits)[0])
        coeffs = {}
        for a in range(A):
            acc = mp.fsum([samples[m] * mp.conj(angles[(a * m) % A]) for m in range(A)],
                          absolute=False)
            coeffs[a] = acc / (A * r**a)
        per_radius.append(coeffs)
    r1, r2 = radii
    # Richardson across the two radii cancels the order-(a+A) alias
    out = {}
    for a in per_radius[0]:
        e1, e2 = per_radius[0][a], per_radius[1][a]
        w1, w2 = r1**A, r2**A
        out[a] = (w2 * e1 - w1 * e2) / (w2 - w1)
    return out


def _fit_v_coeffs_2(sampler, radii, angles, digits):
    A = len(angles)
    table = {}
    for ra in radii:
        for rb in radii:
            grid = {}
            for m, wa in enumerate(angles):
                for l, wb in enumerate(angles):
                    grid[(m, l)] = sampler([ra * wa, rb * wb], digits)
            c1, c2 = {}, {}
            for a in range(A):
                for b in range(A):
                    acc1 = mp.fsum(
                        [grid[(m, l)][0] * mp.conj(angles[(a * m) % A] * angles[(b * l) % A])
                         for m in range(A) for l in range(A)], absolute=False)
                    acc2 = mp.fsum(
                        [grid[(m, l)][1] * mp.conj(angles[(a * m) % A] * angles[(b * l) % A])
                         for m in range(A) for l in range(A)], absolute=False)
                    c1[(a, b)] = acc1 / (A * A * ra**a * rb**b)
                    c2[(a, b)] = acc2 / (A * A * ra**a * rb**b)
            table[(ra, rb)] = (c1, c2)
    r1, r2 = radii

    def richardson(component):
        # eliminate the a-direction alias for each rb, then the b-direction
        per_rb = {}
        for rb in radii:
            e1 = table[(r1, rb)][component]
            e2 = table[(r2, rb)][component]
            w1, w2 = r1**A, r2**A
            per_rb[rb] = {key: (w2 * e1[key] - w1 * e2[key]) / (w2 - w1) for key in e1}
        w1, w2 = r1**A, r2**A
        return {key: (w2 * per_rb[r1][key] - w1 * per_rb[r2][key]) / (w2 - w1)
                for key in per_rb[r1]}

    return richardson(0), richardson(1)


def sgi_test(phi, tol):
    """True iff every mixed coefficient (i > 0 and j > 0) is below tol."""
    worst = phi.max_abs(lambda i, j: i > 0 and j > 0)
    return bool(worst < tol)


def m22(phi):
    """Coefficient of u1^2 u2^2 in the potential series."""
    return phi.coeff(2, 2)


@dataclass(frozen=True)
class Section7Residuals:
    """The three series coefficients the swapped-holonomy analysis kills."""

    u1u2sq: object   # coefficient of u1*u2^2 in the h1 identity
    u2: object       # coefficient of u2 in the linear-combination identity
    u1squ2: object   # coefficient of u1^2*u2 in the linear-combination identity


def section7_constraints(h1, h2, phi_prime, coeffs):
    """Residuals of the swapped-cusp substitution identities.

    Substitutes u2' = (1/c2) phi'(u2) - (b2/c2) h2(u1, u2) into
        h1(u1, u2) - h1(u1, u2') = 0
        a1*u2 + b1*h2(u1, u2) + c1*u2' + d1*h2(u1, u2') = 0
    and reads off the u1*u2^2, u2 and u1^2*u2 coefficients.  Exact when the
    inputs are exact.
    """
    a1, b1, c1, d1, b2, c2 = coeffs
    if c2 == 0:
        raise ArgumentError("c2 must be nonzero")
    order = min(h1.order, h2.order, phi_prime.order)
    if order < 4:
        raise ArgumentError("series order must be >= 4")
    exact = any(isinstance(c, (QQc, Fraction, int)) for c in
                list(h1.coeffs.values()) + list(h2.coeffs.values()))
    if exact:
        c = QQc(Fraction(1, 1)) / QQc(Fraction(c2))
        b = QQc(-Fraction(b2)) / QQc(Fraction(c2))
    else:
        c = mp.mpf(1) / c2
        b = mp.mpf(-b2) / c2
    phi2 = TruncatedSeries2(order, {(i, j): v for (i, j), v in phi_prime.coeffs.items()})
    u2p = phi2.scale(c) + h2.truncate(order).scale(b)
    if not _coeff_is_zero(u2p.constant_term):
        raise ArgumentError("substitution series has a constant term")
    u1 = TruncatedSeries2.variable(1, order, one=_one_like(u2p))
    u2 = TruncatedSeries2.variable(2, order, one=_one_like(u2p))
    ea = h1.truncate(order) - series_compose(h1.truncate(order), u1, u2p)
    eb = (u2.scale(a1) + h2.truncate(order).scale(b1) + u2p.scale(c1)
          + series_compose(h2.truncate(order), u1, u2p).scale(d1))
    return Section7Residuals(ea.coeff(1, 2), eb.coeff(0, 1), eb.coeff(2, 1))


def _one_like(series):
    for c in series.coeffs.values():
        if isinstance(c, QQc):
            return QQc(Fraction(1))
        return mp.mpf(1)
    return 1
