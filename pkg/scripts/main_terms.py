"""Window class-number sums against their main terms as X grows.

For each X: the four-term h average against A P / sqrt(X) with the per-term split,
the H_1 sum at r = 1 against its main term, and the r = 2 / r = 1 ratio against
sqrt(4y - 4) C(2) / (sqrt(4y - 1) C(1)).
"""

import argparse
import math
import time

from sqmurmur.arith import constant_C
from sqmurmur.murmur import Window, nearest_prime, h_average_check, h_average_parts, h1_sum_check


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--x", type=int, nargs="+", default=[10 ** 4, 10 ** 5, 10 ** 6])
    ap.add_argument("--y", type=float, default=1.0)
    ap.add_argument("--y-pair", type=float, default=2.5, help="y for the r = 2 / r = 1 comparison")
    args = ap.parse_args()

    print("X        P     four-term ratio   P2N    N      4P2N   4N     H1 ratio (r=1)   r2/r1 vs expected")
    for X in args.x:
        t0 = time.time()
        P = nearest_prime(math.sqrt(args.y * X))
        w_h = Window(X, round(X ** 0.75))
        parts = h_average_parts(w_h, P)
        ratio_h = h_average_check(w_h, P).ratio
        split = "  ".join(f"{a / m:.3f}" for a, m in parts.values())
        w_h1 = Window(X, round(X ** 0.6))
        ratio_h1 = h1_sum_check(w_h1, P, 1).ratio

        Pp = nearest_prime(math.sqrt(args.y_pair * X))
        y = Pp * Pp / X
        one = h1_sum_check(w_h1, Pp, 1).lhs
        two = h1_sum_check(w_h1, Pp, 2).lhs
        want = math.sqrt(4 * y - 4) / math.sqrt(4 * y - 1) * constant_C(2) / constant_C(1)
        print(f"{X:<8} {P:<5} {ratio_h:.5f}           {split}   {ratio_h1:.5f}          {two / one:.4f} vs {want:.4f}"
              f"   ({time.time() - t0:.0f}s)")


if __name__ == "__main__":
    main()
