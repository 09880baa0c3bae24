"""Tabulate the predicted density on a y grid in both r-sum modes."""

import argparse

import numpy as np

from sqmurmur.murmur import DensityConfig, RSumMode, predicted_density


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ymax", type=float, default=4.0)
    ap.add_argument("--step", type=float, default=0.05)
    args = ap.parse_args()
    full = DensityConfig()
    lit = DensityConfig(r_sum_mode=RSumMode.HALF_RANGE)
    print("y,full_support,half_range")
    for y in np.arange(args.step, args.ymax + 1e-9, args.step):
        print(f"{y:.4g},{predicted_density(y, full):.12g},{predicted_density(y, lit):.12g}")


if __name__ == "__main__":
    main()
