"""Build the four shipped banks and print their filters, moments and tightness."""

import argparse

import numpy as np

from twfpd.cli import EXAMPLES, load_example
from twfpd.construct import build_bank, verify_bank


def show(name, poly):
    arr, lo = poly.to_dense()
    # rows run over k2 from high to low so the grid reads like a plot
    print(f"  {name}: origin at column {-lo[0]}, row {arr.shape[1] - 1 + lo[1]}")
    with np.printoptions(precision=4, suppress=True, linewidth=120):
        print(np.flipud(arr.T))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("names", nargs="*", default=list(EXAMPLES))
    parser.add_argument("--filters", action="store_true", help="print every filter grid")
    args = parser.parse_args()
    for name in args.names:
        bank = build_bank(load_example(name))
        rep = verify_bank(bank)
        print(f"{name}: lam={bank.lam} N={len(bank.g)} reps={list(bank.coset_reps)}")
        print(f"  tight={rep.tight} uep={rep.uep_max_residual:.2e} sos={rep.sos_max_residual:.2e}")
        print(f"  vm D={rep.moments.vm_directional} C={rep.moments.vm_complementary} "
              f"accuracy={rep.moments.accuracy} flatness={rep.moments.flatness}")
        if args.filters:
            for mname, m in bank.masks():
                show(mname, m)


if __name__ == "__main__":
    main()
