"""Print per-sample multiplication counts for one analysis/synthesis cycle."""

import argparse

from twfpd.cli import EXAMPLES, load_example
from twfpd.construct import box_spline_config, build_bank
from twfpd.transform import complexity_report


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--side", type=int, default=256, help="image side for lam = 2 (lam = 3 uses 243)")
    parser.add_argument("--box-dims", type=int, nargs="*", default=[2, 3, 4])
    args = parser.parse_args()
    print(f"{'bank':<10} {'alpha':>5} {'beta*':>6} {'3a+b*':>6} {'LP/pt':>7} {'std bound':>9} {'std/pt':>7}")
    rows = [(n, build_bank(load_example(n))) for n in EXAMPLES]
    rows += [(f"box n={n}", build_bank(box_spline_config(n))) for n in args.box_dims]
    for name, bank in rows:
        if bank.n == 2:
            shape = (243, 243) if bank.lam == 3 else (args.side, args.side)
        else:
            shape = (8,) * bank.n
        rep = complexity_report(bank, shape)
        print(f"{name:<10} {rep.alpha:>5} {rep.beta_star:>6.2f} {rep.lp_constant:>6g} "
              f"{sum(rep.measured_lp.values()):>7.3f} {rep.standard_constant:>9g} "
              f"{sum(rep.measured_standard.values()):>7.3f}")


if __name__ == "__main__":
    main()
