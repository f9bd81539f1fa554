"""Arbitrary-precision hyperbolic Dehn-filling machinery.

Subpackages: exact number kernel and heights (exactnum), integer-lattice
algebra and relation detection (lattice), gluing-system solvers (geometry),
potential-function series (nzseries), exact rank lemmas (ranklemmas), and
the collision scanner (scanner).
"""

__version__ = "0.1.0"
