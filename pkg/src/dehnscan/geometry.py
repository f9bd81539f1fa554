#
# geometry.py
#

# Gluing-system ingestion and Newton solvers for complete, deformed, and
# Dehn-filled hyperbolic structures.  All logarithm branches are fixed by
# continuation from the complete structure; peripheral log-holonomies and
# core-geodesic holonomies are read off the tracked branches.

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .errors import ArgumentError, MalformedSystemError, NoConvergenceError, StepSizeError


@dataclass(frozen=True)
class ExponentRow:
    """One multiplicative equation  sign * prod z^a * (1-z)^b."""

    a: tuple
    b: tuple
    sign: int

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(x) for x in self.a))
        object.__setattr__(self, "b", tuple(int(x) for x in self.b))
        if self.sign not in (1, -1):
            raise MalformedSystemError("row sign must be +1 or -1")

    def log_sum(self, log_z, log_w):
        return mp.fsum(
            [c * l for c, l in zip(self.a, log_z) if c] +
            [c * l for c, l in zip(self.b, log_w) if c],
            absolute=False,
        )

    def jacobian(self, z):
        return [
            (av / zv if av else 0) - (bv / (1 - zv) if bv else 0)
            for av, bv, zv in zip(self.a, self.b, z)
        ]


@dataclass(frozen=True)
class Slope:
    p: int
    q: int

    def __post_init__(self):
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "q", int(self.q))
        if (self.p, self.q) == (0, 0):
            raise ArgumentError("slope (0,0) is not a filling")
        if math.gcd(abs(self.p), abs(self.q)) != 1:
            raise ArgumentError("slope %s is not coprime" % ((self.p, self.q),))

    def normalized(self):
        """Canonical representative of (p,q) ~ (-p,-q)."""
        if self.p < 0 or (self.p == 0 and self.q < 0):
            return Slope(-self.p, -self.q)
        return self

    def completion(self):
        """(r, s) with p*r - q*s = 1 (core curve exponents)."""
        g, x, y = _xgcd(self.p, self.q)
        # p*x + q*y = 1  ->  r = x, s = -y
        return x, -y

    def __str__(self):
        return "%d/%d" % (self.p, self.q)


def _xgcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        qt = old_r // r
        old_r, r = r, old_r - qt * r
        old_s, s = s, old_s - qt * s
        old_t, t = t, old_t - qt * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


@dataclass(frozen=True)
class GluingSystem:
    name: str
    n: int
    k: int
    edges: tuple       # n ExponentRow
    meridians: tuple   # k ExponentRow
    longitudes: tuple  # k ExponentRow
    reference_shapes: tuple = None

    def __post_init__(self):
        for row in self.edges + self.meridians + self.longitudes:
            if len(row.a) != self.n or len(row.b) != self.n:
                raise MalformedSystemError("exponent vector length != tetrahedron count")
        if len(self.edges) != self.n:
            raise MalformedSystemError("expected %d edge rows, got %d" % (self.n, len(self.edges)))
        if len(self.meridians) != self.k or len(self.longitudes) != self.k:
            raise MalformedSystemError("expected %d meridian and longitude rows" % self.k)
        subset = _independent_rows(self.edges)
        if len(subset) != self.n - self.k:
            raise MalformedSystemError(
                "edge system rank %d, expected n - k = %d" % (len(subset), self.n - self.k)
            )
        object.__setattr__(self, "_edge_subset", subset)

    @property
    def edge_subset(self):
        return self._edge_subset


def _independent_rows(rows):
    """Indices of a maximal Q-independent subset of [a | b] exponent rows."""
    mat = []
    picked = []
    for idx, row in enumerate(rows):
        cand = [Fraction(x) for x in row.a + row.b]
        vec = cand[:]
        for pivot in mat:
            pos = next(i for i, c in enumerate(pivot) if c != 0)
            if vec[pos] != 0:
                f = vec[pos] / pivot[pos]
                vec = [x - f * y for x, y in zip(vec, pivot)]
        if any(c != 0 for c in vec):
            mat.append(vec)
            picked.append(idx)
    return tuple(picked)


def parse_gluing_system(doc):
    """Validate a gluing-system JSON document (text or parsed dict)."""
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise MalformedSystemError("not valid JSON: %s" % exc) from exc
    if not isinstance(doc, dict):
        raise MalformedSystemError("top-level JSON object expected")
    try:
        name = doc["name"]
        n = int(doc["tetrahedra"])
        k = int(doc["cusps"])
        edges = tuple(
            ExponentRow(e["theta1"], e["theta2"], int(e["sign"])) for e in doc["edge_equations"]
        )
        meridians = tuple(
            ExponentRow(e["mu1"], e["mu2"], int(e["sign"])) for e in doc["meridians"]
        )
        longitudes = tuple(
            ExponentRow(e["lambda1"], e["lambda2"], int(e["sign"])) for e in doc["longitudes"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedSystemError("schema violation: %s" % exc) from exc
    ref = None
    if "reference_solution" in doc:
        try:
            ref = tuple(complex(s[0], s[1]) for s in doc["reference_solution"]["shapes"])
        except (KeyError, TypeError, IndexError) as exc:
            raise MalformedSystemError("bad reference_solution block: %s" % exc) from exc
        if len(ref) != n:
            raise MalformedSystemError("reference_solution length != tetrahedron count")
    return GluingSystem(name, n, k, edges, meridians, longitudes, ref)


def load_gluing_system(path):
    with open(path) as fh:
        return parse_gluing_system(fh.read())


@dataclass(frozen=True)
class ShapeAssignment:
    """Tetrahedron shapes with their tracked logarithm branches."""

    z: tuple
    log_z: tuple
    log_1mz: tuple
    residual: object
    digits: int

    def __iter__(self):
        return iter(self.z)


@dataclass(frozen=True)
class FilledPoint:
    shapes: ShapeAssignment
    slopes: tuple      # Slope or None (None = cusp left complete)
    u: tuple
    v: tuple
    t: tuple           # core holonomies (None for unfilled cusps)
    digits: int


# per-cusp boundary conditions for the Newton solver
class Complete:
    pass


@dataclass(frozen=True)
class PrescribedU:
    value: object


@dataclass(frozen=True)
class Filled:
    slope: Slope
    scale: object = 1  # homotopy parameter; 1 = genuine Dehn equation


def _snap_ipi(value, parity):
    """Nearest i*pi*m with m = parity (mod 2); constants of the log form."""
    m = int(mp.nint(mp.im(value) / mp.pi))
    if m % 2 != parity % 2:
        m += 1 if mp.im(value) / mp.pi > m else -1
    return mp.mpc(0, m * mp.pi)


class _System:
    """Log-form gluing system with pinned branch constants."""

    def __init__(self, gs, digits):
        self.gs = gs
        self.digits = digits
        self.c_edge = None   # constants for all n edge rows
        self.c_u = None      # longitude log constants (vanish at complete)
        self.c_v = None      # meridian log constants

    def principal_logs(self, z):
        return [mp.log(zv) for zv in z], [mp.log(1 - zv) for zv in z]

    def pin_edges(self, log_z, log_w):
        self.c_edge = []
        for row in self.gs.edges:
            parity = 0 if row.sign == 1 else 1
            self.c_edge.append(_snap_ipi(row.log_sum(log_z, log_w), parity))

    def pin_peripherals(self, log_z, log_w):
        self.c_u, self.c_v = [], []
        for i in range(self.gs.k):
            lam = self.gs.longitudes[i]
            mu = self.gs.meridians[i]
            self.c_u.append(_snap_ipi(lam.log_sum(log_z, log_w), 0 if lam.sign == 1 else 1))
            self.c_v.append(_snap_ipi(mu.log_sum(log_z, log_w), 0 if mu.sign == 1 else 1))

    def u_of(self, i, log_z, log_w):
        return self.gs.longitudes[i].log_sum(log_z, log_w) - self.c_u[i]

    def v_of(self, i, log_z, log_w):
        return self.gs.meridians[i].log_sum(log_z, log_w) - self.c_v[i]

    def edge_residual(self, log_z, log_w):
        """Max defect over all edge rows against the pinned constants."""
        worst = mp.mpf(0)
        for row, c in zip(self.gs.edges, self.c_edge):
            worst = max(worst, abs(row.log_sum(log_z, log_w) - c))
        return worst

    def newton(self, z, log_z, log_w, conditions, target, max_steps=80):
        """Newton iteration on edge subset + per-cusp condition rows.

        Branches continue along the path; steps are damped so no shape can
        cross a logarithm cut within one step.
        """
        gs = self.gs
        n = gs.n
        two_pi_i = 2j * mp.pi

        def residual_rows():
            rows = []
            for idx in gs.edge_subset:
                rows.append(gs.edges[idx].log_sum(log_z, log_w) - self.c_edge[idx])
            for i, cond in enumerate(conditions):
                u = self.u_of(i, log_z, log_w)
                v = self.v_of(i, log_z, log_w)
                if isinstance(cond, Complete):
                    rows.append(u)
                elif isinstance(cond, PrescribedU):
                    rows.append(u - cond.value)
                else:
                    rows.append(cond.slope.p * v + cond.slope.q * u - cond.scale * two_pi_i)
            return rows

        for step in range(max_steps):
            rows = residual_rows()
            err = max(abs(r) for r in rows)
            if err < target:
                return z, log_z, log_w, err
            jac = []
            for idx in gs.edge_subset:
                jac.append(gs.edges[idx].jacobian(z))
            for i, cond in enumerate(conditions):
                ju = gs.longitudes[i].jacobian(z)
                jv = gs.meridians[i].jacobian(z)
                if isinstance(cond, (Complete, PrescribedU)):
                    jac.append(ju)
                else:
                    p, q = cond.slope.p, cond.slope.q
                    jac.append([p * a + q * b for a, b in zip(jv, ju)])
            try:
                delta = mp.lu_solve(mp.matrix(jac), mp.matrix([-r for r in rows]))
            except ZeroDivisionError as exc:
                raise NoConvergenceError("singular Jacobian: %s" % exc, last_iterate=tuple(z))
            # damp so the branch continuation below stays valid
            limit = mp.mpf("0.5")
            worst = mp.mpf(0)
            for dv, zv in zip(delta, z):
                worst = max(worst, abs(dv / zv), abs(dv / (1 - zv)))
            scale = 1 if worst <= limit else limit / worst
            new_z, new_lz, new_lw = [], [], []
            for zv, lz, lw, dv in zip(z, log_z, log_w, delta):
                zn = zv + scale * dv
                if zn == 0 or zn == 1:
                    raise NoConvergenceError("degenerate shape", last_iterate=tuple(z))
                new_z.append(zn)
                new_lz.append(lz + _log_ratio(zn, zv))
                new_lw.append(lw + _log_ratio(1 - zn, 1 - zv))
            z, log_z, log_w = new_z, new_lz, new_lw
        raise NoConvergenceError(
            "Newton did not reach %s in %d steps (err %s)" % (mp.nstr(target, 5), max_steps, mp.nstr(err, 5)),
            last_iterate=tuple(z),
        )


def _log_ratio(new, old):
    r = new / old
    if mp.re(r) <= 0 and abs(mp.im(r)) < mp.mpf("0.2") * abs(r):
        raise StepSizeError("branch continuation step too large")
    return mp.log(r)


# cache of solved complete structures keyed by (system, digits); entries are
# immutable, so concurrent solvers can at worst duplicate a computation
_COMPLETE_CACHE = {}


def _complete_context(gs, digits):
    key = (gs, digits)
    if key in _COMPLETE_CACHE:
        return _COMPLETE_CACHE[key]
    with mp.workdps(digits + 15):
        sys_ = _System(gs, digits)
        start = [mp.mpc(mp.cos(mp.pi / 3), mp.sin(mp.pi / 3))] * gs.n
        log_z, log_w = sys_.principal_logs(start)
        sys_.pin_edges(log_z, log_w)
        # provisional peripheral constants from the start guess
        sys_.pin_peripherals(log_z, log_w)
        target = mp.mpf(10) ** (-(digits + 8))
        conditions = [Complete()] * gs.k
        try:
            z, log_z, log_w, err = sys_.newton(start, log_z, log_w, conditions, target)
        except (NoConvergenceError, StepSizeError):
            if gs.reference_shapes is None:
                raise
            start = [mp.mpc(s) for s in gs.reference_shapes]
            log_z, log_w = sys_.principal_logs(start)
            sys_.pin_edges(log_z, log_w)
            sys_.pin_peripherals(log_z, log_w)
            z, log_z, log_w, err = sys_.newton(start, log_z, log_w, conditions, target)
        if not all(mp.im(zv) > 0 for zv in z):
            raise NoConvergenceError("non-geometric solution (negatively oriented shapes)",
                                     last_iterate=tuple(z))
        # re-pin every constant exactly at the complete structure
        sys_.pin_edges(log_z, log_w)
        sys_.pin_peripherals(log_z, log_w)
        residual = sys_.edge_residual(log_z, log_w)
        # the Newton subset omits the redundant edge rows; an inconsistent
        # system (e.g. a corrupted sign) surfaces as a full-system defect
        if residual > mp.mpf(10) ** (-digits + 8):
            raise NoConvergenceError(
                "full edge system defect %s after convergence" % mp.nstr(residual, 5),
                last_iterate=tuple(z))
        shapes = ShapeAssignment(tuple(z), tuple(log_z), tuple(log_w), residual, digits)
        _COMPLETE_CACHE[key] = (sys_, shapes)
        return _COMPLETE_CACHE[key]


def solve_complete(gs, digits):
    """Complete hyperbolic structure (all peripheral log-holonomies zero)."""
    _sys, shapes = _complete_context(gs, digits)
    return shapes


def peripheral_logs(gs, shapes):
    """Longitude and meridian log-holonomies (u, v) at a branch-tracked point."""
    sys_, _complete = _complete_context(gs, shapes.digits)
    with mp.workdps(shapes.digits + 15):
        u = tuple(sys_.u_of(i, shapes.log_z, shapes.log_1mz) for i in range(gs.k))
        v = tuple(sys_.v_of(i, shapes.log_z, shapes.log_1mz) for i in range(gs.k))
    return u, v


def _solve_conditions(gs, conditions, digits):
    """Continuation solve from the complete structure for mixed conditions."""
    sys_, complete = _complete_context(gs, digits)
    with mp.workdps(digits + 15):
        target = mp.mpf(10) ** (-(digits + 8))
        z, log_z, log_w = list(complete.z), list(complete.log_z), list(complete.log_1mz)
        schedule = [1]
        attempt = 0
        s_done = 0
        while schedule:
            s_next = schedule[-1]
            scaled = []
            for cond in conditions:
                if isinstance(cond, Filled):
                    scaled.append(Filled(cond.slope, s_next))
                elif isinstance(cond, PrescribedU):
                    scaled.append(PrescribedU(cond.value * s_next))
                else:
                    scaled.append(cond)
            try:
                z, log_z, log_w, err = sys_.newton(z, log_z, log_w, scaled, target)
                s_done = s_next
                schedule.pop()
            except (NoConvergenceError, StepSizeError):
                attempt += 1
                if attempt > 24:
                    raise NoConvergenceError(
                        "continuation failed for %s" % (conditions,), last_iterate=tuple(z))
                mid = (s_done + s_next) / mp.mpf(2)
                if abs(mid - s_done) < mp.mpf("1e-6"):
                    raise NoConvergenceError(
                        "continuation stalled at %s" % mid, last_iterate=tuple(z))
                schedule.append(mid)
        residual = sys_.edge_residual(log_z, log_w)
        if residual > mp.mpf(10) ** (-digits + 8):
            raise NoConvergenceError(
                "full edge system defect %s after convergence" % mp.nstr(residual, 5),
                last_iterate=tuple(z))
        shapes = ShapeAssignment(tuple(z), tuple(log_z), tuple(log_w), residual, digits)
        u = tuple(sys_.u_of(i, log_z, log_w) for i in range(gs.k))
        v = tuple(sys_.v_of(i, log_z, log_w) for i in range(gs.k))
        return shapes, u, v


def solve_deformed(gs, u_targets, digits):
    """Solve the gluing system with prescribed longitude log-holonomies.

    u_targets may contain None (cusp kept complete).  Returns (shapes, u, v).
    """
    conditions = [
        Complete() if w is None else PrescribedU(mp.mpc(w)) for w in u_targets
    ]
    if len(conditions) != gs.k:
        raise ArgumentError("need one u target per cusp")
    return _solve_conditions(gs, conditions, digits)


def solve_filled(gs, slopes, digits):
    """Hyperbolic Dehn filling; slopes may contain None to leave a cusp complete.

    Imposes p*v + q*u = 2*pi*i per filled cusp on the branch continued from
    the complete structure and derives each core holonomy t = exp(s*v + r*u)
    with p*r - q*s = 1, normalized to |t| > 1.
    """
    if len(slopes) != gs.k:
        raise ArgumentError("need one slope per cusp")
    conditions = []
    for sl in slopes:
        if sl is None:
            conditions.append(Complete())
        else:
            if not isinstance(sl, Slope):
                sl = Slope(*sl)
            conditions.append(Filled(sl))
    shapes, u, v = _solve_conditions(gs, conditions, digits)
    with mp.workdps(digits + 15):
        ts = []
        for i, sl in enumerate(slopes):
            if sl is None:
                ts.append(None)
                continue
            if not isinstance(sl, Slope):
                sl = Slope(*sl)
            r, s = sl.completion()
            t = mp.exp(s * v[i] + r * u[i])
            if abs(t) < 1:
                t = 1 / t
            ts.append(t)
        return FilledPoint(shapes, tuple(
            sl if (sl is None or isinstance(sl, Slope)) else Slope(*sl) for sl in slopes
        ), u, v, tuple(ts), digits)


def core_holonomy_consistency(fp, i):
    """Recompute t_i from the shifted unimodular completion (r+q, s+p)."""
    sl = fp.slopes[i]
    if sl is None:
        raise ArgumentError("cusp %d is not filled" % i)
    r, s = sl.completion()
    with mp.workdps(fp.digits + 15):
        t = mp.exp((s + sl.p) * fp.v[i] + (r + sl.q) * fp.u[i])
        if abs(t) < 1:
            t = 1 / t
        return t
