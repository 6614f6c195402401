"""Emit the twisted averaged convolution matrix over F_q as TSV.

Rows are (source coweight, target coweight, count); counts are integers
after dividing the raw character sums by the predicted q-powers.

Usage: python scripts/action_matrix.py [--group SL2] [--q 3] [--bound 2] [--mu 1]
"""

import argparse
import sys

from expflag.fq_oracle import cyc_as_int, whittaker_action


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--group", default="SL2", choices=["SL2", "PGL2"])
    ap.add_argument("--q", type=int, default=3)
    ap.add_argument("--bound", type=int, default=2)
    ap.add_argument("--mu", type=int, default=1)
    ap.add_argument("--out", default="-")
    args = ap.parse_args(argv)

    mat = whittaker_action(args.group, (args.bound,), (args.mu,), args.q)
    fh = sys.stdout if args.out == "-" else open(args.out, "w")
    try:
        fh.write("source\ttarget\tcount\n")
        for (lam, nu), v in sorted(mat.items()):
            iv = cyc_as_int(v)
            if iv:
                fh.write(f"{lam[0]}\t{nu[0]}\t{iv}\n")
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
