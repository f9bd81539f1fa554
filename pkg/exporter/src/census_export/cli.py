#
# cli.py
#

import argparse
import sys

from .export import ExportError, export


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="census-export",
        description="export census triangulation data as a gluing-system fixture")
    ap.add_argument("name", help="census identifier, e.g. m004")
    ap.add_argument("out", help="output JSON path")
    args = ap.parse_args(argv)
    try:
        record = export(args.name, args.out)
    except ExportError as exc:
        print("export failed: %s" % exc, file=sys.stderr)
        return 1
    print("wrote %s (%d tetrahedra, %d cusps)" % (
        args.out, record.document["tetrahedra"], record.document["cusps"]))
    return 0


if __name__ == "__main__":
    sys.exit(main())
