"""One-shot exporter from a census triangulation toolkit to gluing-system
fixture JSON.

Extraction and format conversion only; the emitted documents follow the
schema consumed by dehnscan.geometry.parse_gluing_system, with the toolkit's
complete-structure shapes embedded as an advisory reference block.
"""

from .export import ExportError, ExportRecord, ToolkitUnavailable, UnknownManifold, export

__all__ = ["export", "ExportRecord", "ExportError", "ToolkitUnavailable", "UnknownManifold"]
