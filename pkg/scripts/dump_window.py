"""Dump an affine Grassmannian window as JSONL of lattice normal forms.

Usage: python scripts/dump_window.py [--group SL2] [--q 3] [--bound 1] [--out PATH]
"""

import argparse
import json
import sys

from expflag.fq_oracle import enumerate_gr_window


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--group", default="SL2", choices=["SL2", "PGL2"])
    ap.add_argument("--q", type=int, default=3)
    ap.add_argument("--bound", type=int, default=1)
    ap.add_argument("--out", default="-")
    args = ap.parse_args(argv)

    points = enumerate_gr_window(args.group, (args.bound,), args.q)
    fh = sys.stdout if args.out == "-" else open(args.out, "w")
    try:
        for p in points:
            fh.write(json.dumps(p.to_json(), sort_keys=True) + "\n")
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
