"""Compare interpolated finite-field structure constants with the generic ones.

For each pair (lam, mu) in the window the script interpolates the oracle
counts over the given q list into Z[q] and prints them next to the exact
module coefficients. Any disagreement is reported and exits nonzero.

Usage: python scripts/interpolation_report.py [--group SL2] [--bound 1]
"""

import argparse
import sys

from expflag.root_datum import build_root_datum
from expflag.exp_module import ExpModule
from expflag.fq_oracle import interpolate_structure_constants
from expflag.strata import dominant_coweights_below


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--group", default="SL2", choices=["SL2", "PGL2"])
    ap.add_argument("--bound", type=int, default=1)
    ap.add_argument("--q-list", default="2,3,4,5,7,9")
    args = ap.parse_args(argv)

    q_list = [int(x) for x in args.q_list.split(",")]
    rd = build_root_datum(args.group)
    M = ExpModule(rd)
    window = dominant_coweights_below(rd, (args.bound,))
    bad = 0
    for lam in window:
        for mu in window:
            generic = {
                nu: c for nu, c in M.spherical_action_basis(lam, mu).support.items()
            }
            oracle = interpolate_structure_constants(args.group, lam, mu, q_list)
            oracle = {nu: p for nu, p in oracle.items() if not p.is_zero()}
            status = "ok" if oracle == generic else "MISMATCH"
            if status != "ok":
                bad += 1
            print(f"lam={lam} mu={mu} [{status}]")
            for nu in sorted(set(generic) | set(oracle)):
                g = generic.get(nu)
                o = oracle.get(nu)
                print(f"  nu={nu}  generic={g}  oracle={o}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
