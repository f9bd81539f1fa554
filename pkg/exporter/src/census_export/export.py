#
# export.py
#

# Extract gluing equations, peripheral-curve exponent vectors, and signs
# from the census toolkit and write fixture JSON.  No computation beyond
# extraction and format conversion; the document is validated by re-parsing
# through the consumer's schema before anything lands on disk.

import json
import os
import tempfile
from dataclasses import dataclass

from dehnscan.errors import MalformedSystemError
from dehnscan.geometry import parse_gluing_system


class ExportError(RuntimeError):
    pass


class ToolkitUnavailable(ExportError):
    pass


class UnknownManifold(ExportError):
    pass


@dataclass(frozen=True)
class ExportRecord:
    name: str
    raw_rows: tuple
    document: dict


def _load_toolkit():
    try:
        import snappy
    except ImportError as exc:
        raise ToolkitUnavailable(
            "census toolkit is not installed (pip install snappy): %s" % exc
        ) from exc
    return snappy


def _as_int_row(values, n, what):
    row = [int(v) for v in values]
    if len(row) != n:
        raise ExportError("%s row has length %d, expected %d" % (what, len(row), n))
    return row


def build_document(name, manifold):
    """Fixture document from a toolkit manifold (rectangular equation form)."""
    n = int(manifold.num_tetrahedra())
    k = int(manifold.num_cusps())
    rows = list(manifold.gluing_equations("rect"))
    if len(rows) != n + 2 * k:
        raise ExportError(
            "toolkit returned %d equations for %d tetrahedra, %d cusps"
            % (len(rows), n, k))
    edges = []
    for a, b, c in rows[:n]:
        edges.append({
            "theta1": _as_int_row(a, n, "edge"),
            "theta2": _as_int_row(b, n, "edge"),
            "sign": int(c),
        })
    meridians, longitudes = [], []
    for i in range(k):
        ma, mb, mc = rows[n + 2 * i]
        la, lb, lc = rows[n + 2 * i + 1]
        meridians.append({
            "mu1": _as_int_row(ma, n, "meridian"),
            "mu2": _as_int_row(mb, n, "meridian"),
            "sign": int(mc),
        })
        longitudes.append({
            "lambda1": _as_int_row(la, n, "longitude"),
            "lambda2": _as_int_row(lb, n, "longitude"),
            "sign": int(lc),
        })
    shapes = [complex(z) for z in manifold.tetrahedra_shapes("rect")]
    doc = {
        "name": str(name),
        "tetrahedra": n,
        "cusps": k,
        "edge_equations": edges,
        "meridians": meridians,
        "longitudes": longitudes,
        "reference_solution": {"shapes": [[z.real, z.imag] for z in shapes]},
        # peripheral conventions differ between toolkits; recorded verbatim
        "basis_note": (
            "peripheral rows exactly as returned by the census toolkit's "
            "rectangular gluing equations (meridian row first, then longitude, "
            "per cusp); no normalization applied"),
    }
    return doc, tuple(tuple(r) for r in rows)


def export(name, out_path, toolkit=None):
    """Resolve a census name, emit its fixture JSON, and self-validate.

    Fails descriptively on an unknown manifold or a missing toolkit and
    never leaves a partial file behind.
    """
    snappy = toolkit if toolkit is not None else _load_toolkit()
    try:
        manifold = snappy.Manifold(name)
    except Exception as exc:
        raise UnknownManifold("census name %r did not resolve: %s" % (name, exc)) from exc
    doc, raw = build_document(name, manifold)
    text = json.dumps(doc, indent=1) + "\n"
    try:
        parse_gluing_system(text)
    except MalformedSystemError as exc:
        raise ExportError("emitted document failed schema validation: %s" % exc) from exc
    directory = os.path.dirname(os.path.abspath(out_path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, out_path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return ExportRecord(str(name), raw, doc)
