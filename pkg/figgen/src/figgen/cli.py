"""Command line interface.

    figgen convergence --in traces.csv --out fig2.png --snr 10,20
    figgen rates --in results.csv --out fig3.png [--filter-rt] [--median]

Exit code 0 on success, 2 on configuration or input errors.
"""

from __future__ import annotations

import argparse
import sys

from figgen import figures


def _parse_floats(text):
    return tuple(float(x) for x in text.split(",") if x.strip())


def _cmd_convergence(args):
    spec = figures.FigureSpec(
        kind="convergence",
        input_path=args.input,
        output_path=args.output,
        snr_select=args.snr,
    )
    series = figures.plot_convergence(spec)
    print(f"wrote {args.output} ({len(series)} series)")
    return 0


def _cmd_rates(args):
    spec = figures.FigureSpec(
        kind="rate_vs_snr",
        input_path=args.input,
        output_path=args.output,
        filter_rt_satisfied=args.filter_rt,
        aggregate="median" if args.median else "mean",
    )
    series = figures.plot_rate_vs_snr(spec)
    print(f"wrote {args.output} ({len(series)} series)")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="figgen", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    conv = sub.add_parser("convergence", help="median convergence curves per SNR")
    conv.add_argument("--in", dest="input", required=True)
    conv.add_argument("--out", dest="output", required=True)
    conv.add_argument("--snr", type=_parse_floats, help="SNRs to plot, e.g. 10,20")
    conv.set_defaults(func=_cmd_convergence)

    rates = sub.add_parser("rates", help="aggregate rate vs SNR per method")
    rates.add_argument("--in", dest="input", required=True)
    rates.add_argument("--out", dest="output", required=True)
    rates.add_argument(
        "--filter-rt",
        action="store_true",
        help="drop rows with rt_satisfied=false before aggregating",
    )
    rates.add_argument(
        "--median", action="store_true", help="aggregate with medians instead of means"
    )
    rates.set_defaults(func=_cmd_rates)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
