#
# scanner.py
#

# End-to-end empirical verification: enumerate slopes, solve the fillings,
# compare core holonomies (orientation-preserving: equality; orientation-
# reversing: conjugate equality) and holonomy sets, run multiplicative-
# dependence detection, and assemble deterministic reports.

import json
import math
from dataclasses import dataclass, field

import mpmath as mp

from .errors import ArgumentError, DehnscanError
from .geometry import Slope, core_holonomy_consistency, solve_filled
from .lattice import SubgroupLattice, multiplicative_dependence, siegel_basis


def enumerate_slopes(min_sum, max_sum):
    """Normalized coprime slopes with min_sum <= |p|+|q| <= max_sum.

    (p, q) and (-p, -q) give the same filling; the canonical representative
    has p > 0, or p == 0 and q > 0.  Deterministic order.
    """
    out = []
    for s in range(min_sum, max_sum + 1):
        for p in range(0, s + 1):
            q_abs = s - p
            for q in sorted({q_abs, -q_abs}):
                if p == 0 and q <= 0:
                    continue
                if p == 0 and q != 1:
                    continue
                if (p, q) == (0, 0) or math.gcd(p, abs(q)) != 1:
                    continue
                out.append(Slope(p, q))
    return out


@dataclass
class CollisionReport:
    manifold: str
    mode: str
    max_coeff: int
    tolerance: float
    digits: int
    table: list = field(default_factory=list)       # per-filling holonomy data
    failures: list = field(default_factory=list)
    collisions: list = field(default_factory=list)  # survived re-verification
    artifacts: list = field(default_factory=list)   # dissolved at 2x precision
    dependence: list = field(default_factory=list)  # multiplicative certificates
    min_gap: str = None
    convergence: list = field(default_factory=list)  # (|p|+|q|, mean |t-1|, count)

    @property
    def unexplained(self):
        return [c for c in self.collisions if not c.get("explained", False)]

    @property
    def unexplained_dependence(self):
        return [c for c in self.dependence if not c.get("explained", False)]

    def to_json(self):
        doc = {
            "manifold": self.manifold,
            "mode": self.mode,
            "max_coeff": self.max_coeff,
            "tolerance": repr(self.tolerance),
            "digits": self.digits,
            "table": self.table,
            "failures": self.failures,
            "collisions": self.collisions,
            "precision_artifacts": self.artifacts,
            "dependence": self.dependence,
            "min_gap": self.min_gap,
            "convergence": self.convergence,
        }
        return json.dumps(doc, indent=1, sort_keys=True)

    def to_csv(self):
        lines = ["p,q,re_t,im_t,abs_t,residual"]
        for row in self.table:
            if "p" in row:
                lines.append("%s,%s,%s,%s,%s,%s" % (
                    row["p"], row["q"], row["re_t"], row["im_t"], row["abs_t"], row["residual"]))
            else:
                lines.append(",".join(str(row[k]) for k in sorted(row)))
        return "\n".join(lines) + "\n"


def _nstr(x, digits):
    return mp.nstr(x, digits, strip_zeros=False)


def _check_filled_invariants(gs, fp, digits):
    """The scanner re-asserts solver invariants instead of trusting them."""
    with mp.workdps(digits + 15):
        slack = mp.mpf(10) ** (-digits + 14)
        for i, sl in enumerate(fp.slopes):
            if sl is None:
                continue
            defect = abs(mp.exp(sl.p * fp.v[i] + sl.q * fp.u[i]) - 1)
            if defect > slack:
                raise DehnscanError("Dehn equation defect %s" % mp.nstr(defect, 5))
            if not abs(fp.t[i]) > 1:
                raise DehnscanError("|t| <= 1")
            other = core_holonomy_consistency(fp, i)
            if abs(other - fp.t[i]) > slack * max(1, abs(fp.t[i])):
                raise DehnscanError("completion shift changed t")


def scan_cosmetic(gs, max_coeff, tol, mode="op", digits=60, min_sum=5):
    """Cosmetic-filling scan of a 1-cusped system.

    Solves every normalized coprime slope with min_sum <= |p|+|q| <= max_coeff
    and reports distinct-slope pairs whose core holonomies collide below tol:
    orientation-preserving mode compares t with t', orientation-reversing
    mode compares t with conj(t').  Candidates are re-verified at doubled
    working precision; those that dissolve are listed as artifacts.
    """
    if gs.k != 1:
        raise ArgumentError("scan_cosmetic needs a 1-cusped system")
    if max_coeff < 8:
        raise ArgumentError("max_coeff must be >= 8")
    if mode not in ("op", "or"):
        raise ArgumentError("mode must be 'op' or 'or'")
    tol = mp.mpf(tol)
    report = CollisionReport(gs.name, mode, max_coeff, float(tol), digits)
    solved = {}
    with mp.workdps(digits + 15):
        for sl in enumerate_slopes(min_sum, max_coeff):
            try:
                fp = solve_filled(gs, [sl], digits)
                _check_filled_invariants(gs, fp, digits)
            except DehnscanError as exc:
                report.failures.append({"p": sl.p, "q": sl.q, "reason": str(exc)})
                continue
            solved[(sl.p, sl.q)] = fp.t[0]
            report.table.append({
                "p": sl.p, "q": sl.q,
                "re_t": _nstr(mp.re(fp.t[0]), digits),
                "im_t": _nstr(mp.im(fp.t[0]), digits),
                "abs_t": _nstr(abs(fp.t[0]), digits),
                "residual": _nstr(fp.shapes.residual, 5),
            })
        keys = sorted(solved)
        min_gap = None
        candidates = []
        for ia in range(len(keys)):
            for ib in range(ia + 1, len(keys)):
                ta, tb = solved[keys[ia]], solved[keys[ib]]
                d = abs(ta - mp.conj(tb)) if mode == "or" else abs(ta - tb)
                if d < tol:
                    candidates.append((keys[ia], keys[ib], d))
                elif min_gap is None or d < min_gap:
                    min_gap = d
        report.min_gap = _nstr(min_gap, 8) if min_gap is not None else None
        recheck = {}

        def _resolve(p, q):
            if (p, q) not in recheck:
                recheck[(p, q)] = solve_filled(gs, [Slope(p, q)], 2 * digits).t[0]
            return recheck[(p, q)]

        for (pa, qa), (pb, qb), d in candidates:
            t_a = _resolve(pa, qa)
            t_b = _resolve(pb, qb)
            with mp.workdps(2 * digits + 15):
                d2 = abs(t_a - mp.conj(t_b)) if mode == "or" else abs(t_a - t_b)
            entry = {
                "slopeA": [pa, qa], "slopeB": [pb, qb],
                "distance": _nstr(d2, 8),
                "kind": "conjugate" if mode == "or" else "equal",
            }
            if d2 >= tol:
                report.artifacts.append(entry)
                continue
            entry["explained"] = bool(mode == "or" and (pa, qa) == (pb, -qb))
            report.collisions.append(entry)
        _convergence_rows(report, solved, min_sum, max_coeff)
    return report


def _convergence_rows(report, solved, min_sum, max_coeff):
    for c in range(min_sum, max_coeff + 1):
        vals = [abs(t - 1) for (p, q), t in sorted(solved.items()) if abs(p) + abs(q) == c]
        if vals:
            mean = mp.fsum(vals) / len(vals)
            report.convergence.append([c, _nstr(mean, 8), len(vals)])


def scan_two_cusp(gs, max_coeff, tol, digits=60, min_sum=5,
                  dependence_bound=50, dependence_digits=None,
                  symmetric=False, sample=None):
    """Two-cusp scan: compare unordered holonomy sets between distinct
    coefficient pairs (both matchings) and run multiplicative-dependence
    detection on each filling's holonomy pair.

    symmetric=True treats coefficient pairs as unordered (manifolds whose
    cusps are exchanged by a symmetry fill to the same manifold both ways).
    sample caps the number of fillings, chosen deterministically.
    """
    if gs.k != 2:
        raise ArgumentError("scan_two_cusp needs a 2-cusped system")
    if max_coeff < 8:
        raise ArgumentError("max_coeff must be >= 8")
    tol = mp.mpf(tol)
    report = CollisionReport(gs.name, "two-cusp", max_coeff, float(tol), digits)
    slopes = enumerate_slopes(min_sum, max_coeff)
    pairs = []
    for s1 in slopes:
        for s2 in slopes:
            if symmetric and (s2.p, s2.q) < (s1.p, s1.q):
                continue
            pairs.append((s1, s2))
    if sample is not None and len(pairs) > sample:
        step = len(pairs) / sample
        pairs = [pairs[int(i * step)] for i in range(sample)]
    solved = {}
    with mp.workdps(digits + 15):
        for s1, s2 in pairs:
            try:
                fp = solve_filled(gs, [s1, s2], digits)
                _check_filled_invariants(gs, fp, digits)
            except DehnscanError as exc:
                report.failures.append(
                    {"pair": [[s1.p, s1.q], [s2.p, s2.q]], "reason": str(exc)})
                continue
            key = ((s1.p, s1.q), (s2.p, s2.q))
            solved[key] = (fp.t[0], fp.t[1])
            report.table.append({
                "p1": s1.p, "q1": s1.q, "p2": s2.p, "q2": s2.q,
                "re_t1": _nstr(mp.re(fp.t[0]), digits), "im_t1": _nstr(mp.im(fp.t[0]), digits),
                "re_t2": _nstr(mp.re(fp.t[1]), digits), "im_t2": _nstr(mp.im(fp.t[1]), digits),
                "residual": _nstr(fp.shapes.residual, 5),
            })
            dd = dependence_digits or digits
            cert = multiplicative_dependence(fp.t[0], fp.t[1], dependence_bound, dd)
            if cert.found:
                # equal coefficients on exchange-symmetric cusps force
                # t1 = t2; that dependence is expected signal, not a finding
                diagonal = symmetric and (s1.p, s1.q) == (s2.p, s2.q)
                report.dependence.append({
                    "pair": [[s1.p, s1.q], [s2.p, s2.q]],
                    "coefficients": list(cert.coefficients),
                    "residual": repr(cert.residual),
                    "explained": bool(diagonal),
                })
        keys = sorted(solved)
        min_gap = None
        candidates = []
        for ia in range(len(keys)):
            for ib in range(ia + 1, len(keys)):
                d = _set_distance(solved[keys[ia]], solved[keys[ib]])
                if d < tol:
                    candidates.append((keys[ia], keys[ib], d))
                elif min_gap is None or d < min_gap:
                    min_gap = d
        report.min_gap = _nstr(min_gap, 8) if min_gap is not None else None
        for ka, kb, d in candidates:
            fa = solve_filled(gs, [Slope(*ka[0]), Slope(*ka[1])], 2 * digits)
            fb = solve_filled(gs, [Slope(*kb[0]), Slope(*kb[1])], 2 * digits)
            with mp.workdps(2 * digits + 15):
                d2 = _set_distance((fa.t[0], fa.t[1]), (fb.t[0], fb.t[1]))
            entry = {"pairA": [list(ka[0]), list(ka[1])],
                     "pairB": [list(kb[0]), list(kb[1])],
                     "distance": _nstr(d2, 8), "kind": "set-equal"}
            (report.collisions if d2 < tol else report.artifacts).append(entry)
    return report


def _set_distance(ts_a, ts_b):
    direct = max(abs(ts_a[0] - ts_b[0]), abs(ts_a[1] - ts_b[1]))
    swapped = max(abs(ts_a[0] - ts_b[1]), abs(ts_a[1] - ts_b[0]))
    return min(direct, swapped)


def siegel_subgroup_for_point(slope_a, slope_b, t=None, digits=60):
    """Codimension-2 subgroup through the paired Dehn point.

    Builds the constraint vector (-q, p, -q', p'), takes the two shortest
    vectors of its Siegel kernel basis as subgroup rows, and (when a core
    holonomy t is supplied) verifies numerically that the point
    (t^-q, t^p, t^-q', t^p') satisfies both monomial equations.
    """
    sa = slope_a if isinstance(slope_a, Slope) else Slope(*slope_a)
    sb = slope_b if isinstance(slope_b, Slope) else Slope(*slope_b)
    v = (-sa.q, sa.p, -sb.q, sb.p)
    basis = siegel_basis([v], 4)
    rows = SubgroupLattice((basis[0], basis[1]), 4)
    if t is not None:
        with mp.workdps(digits + 15):
            tv = mp.mpc(t)
            point = (tv ** (-sa.q), tv ** sa.p, tv ** (-sb.q), tv ** sb.p)
            slack = mp.mpf(10) ** (-digits + 15)
            for row in rows.rows:
                mono = mp.mpf(1)
                for e, x in zip(row, point):
                    mono *= x ** e
                if abs(mono - 1) > slack:
                    raise DehnscanError(
                        "Dehn point fails subgroup containment: |mono-1| = %s"
                        % mp.nstr(abs(mono - 1), 5))
    return rows
