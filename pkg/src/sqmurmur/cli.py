"""Command-line entry point: class numbers, traces, densities, sweeps, and grid checks."""

from __future__ import annotations

import argparse
import csv
import io
import sys

from .arith import EulerProductConfig


class _Parser(argparse.ArgumentParser):
    # usage errors exit 1; exit code 2 is reserved for failed verification
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(x) -> str:
    return format(float(x), ".12g")


def cmd_classnum(args) -> int:
    from . import classnum

    d = args.d
    if d <= 0:
        raise ValueError("d must be positive")
    if not classnum.is_discriminant(d):
        print("h=0")
        return 0
    if args.approx is not None:
        print(f"h~{_fmt(classnum.approx_h_via_L(d, args.approx))}")
        return 0
    if args.cache:
        cache = classnum.ClassNumberCache(args.cache)
        h, H1 = cache.gauss_h(d), cache.hurwitz_H1(d)
        cache.save()
    else:
        h, H1 = classnum.gauss_h(d), classnum.hurwitz_H1(d)
    print(f"h={h} H1={H1}")
    return 0


def cmd_trace(args) -> int:
    from .trace import TraceParams, trace_rhs

    print(trace_rhs(TraceParams(args.N, args.P, args.k)))
    return 0


def _density_cfg(mode: str, prime_bound: int):
    from .murmur import DensityConfig, RSumMode

    return DensityConfig(EulerProductConfig(prime_bound), RSumMode(mode))


def cmd_density(args) -> int:
    from .murmur import predicted_density

    print(_fmt(predicted_density(args.y, _density_cfg(args.mode, args.prime_bound))))
    return 0


CSV_HEADER = ["X", "Y", "P", "y", "mode", "empirical", "predicted", "residual", "excluded_levels"]


def sweep_rows_to_csv(points) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for p in points:
        w.writerow([p.X, p.Y, p.P, _fmt(p.y), p.mode.value, _fmt(p.empirical), _fmt(p.predicted),
                    _fmt(p.residual), p.excluded_levels])
    return buf.getvalue()


def cmd_sweep(args) -> int:
    from .classnum import ClassNumberCache
    from .murmur import sweep

    cache = ClassNumberCache(args.cache) if args.cache else None
    pts = sweep(args.x, args.y, (args.delta, args.delta2), _density_cfg(args.mode, args.prime_bound),
                cache=cache, threads=args.threads)
    if cache is not None:
        cache.save()
    text = sweep_rows_to_csv(pts)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify(args) -> int:
    from .checks import run_all

    results = run_all(args.grid)
    for r in results:
        print(r.line())
        for f in r.failures:
            print(f"      {f}")
    return 0 if all(r.passed for r in results) else 2


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sqmurmur", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    c = sub.add_parser("classnum", help="h(-d) and H_1(-d)")
    c.add_argument("d", type=int)
    g = c.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true", help="enumerate reduced forms (default)")
    g.add_argument("--approx", type=int, metavar="T", help="truncated L-series with T terms")
    c.add_argument("--cache", help="class-number cache file")
    c.set_defaults(func=cmd_classnum)

    t = sub.add_parser("trace", help="trace of -T_{P^k} W_N on the new subspace")
    t.add_argument("N", type=int)
    t.add_argument("P", type=int)
    t.add_argument("k", type=int)
    t.set_defaults(func=cmd_trace)

    modes = ["full_support", "half_range"]
    d = sub.add_parser("density", help="predicted murmuration density at y = P^2/X")
    d.add_argument("y", type=float)
    d.add_argument("--mode", choices=modes, default="full_support")
    d.add_argument("--prime-bound", type=int, default=10 ** 6)
    d.set_defaults(func=cmd_density)

    s = sub.add_parser("sweep", help="empirical vs predicted over an (X, y) grid, as CSV")
    s.add_argument("--x", type=int, nargs="+", required=True)
    s.add_argument("--y", type=float, nargs="+", required=True)
    s.add_argument("--delta", type=float, default=0.25)
    s.add_argument("--delta2", type=float, default=0.2)
    s.add_argument("--mode", choices=modes, default="full_support")
    s.add_argument("--prime-bound", type=int, default=10 ** 6)
    s.add_argument("--out")
    s.add_argument("--threads", type=int)
    s.add_argument("--cache")
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="closed forms against brute force")
    v.add_argument("--grid", choices=["small", "full"], default="small")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ZeroDivisionError) as e:
        print(f"sqmurmur: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
