"""Command line interface.

    srbeam run --nt 2 --nr 2 --nb 2 --rt 2 --snr-db 0,5,10,15,20,25 \
        --trials 100 --seed 42 --methods ub,epm,mrt-g,mrt-h --out results.csv
    srbeam oracle --scalar g,h,f --budget B --rt R

``--config path`` reads key=value lines (same keys as the long flags);
explicit flags override file values.  Exit code 0 on a completed run even
when individual trials recorded failures; nonzero on config or I/O errors.
"""

from __future__ import annotations

import argparse
import sys

from srbeam import harness, oracle
from srbeam.epm_cccp import EpmConfig


def _parse_floats(text):
    return tuple(float(x) for x in text.split(",") if x.strip())


def _parse_methods(text):
    return tuple(m.strip() for m in text.split(",") if m.strip())


def _read_config_file(path):
    values = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {raw.strip()!r}")
            key, val = line.split("=", 1)
            values[key.strip().replace("-", "_")] = val.strip()
    return values


_RUN_KEYS = {
    "nt": int,
    "nr": int,
    "nb": int,
    "rt": float,
    "snr_db": _parse_floats,
    "trials": int,
    "seed": int,
    "methods": _parse_methods,
    "out": str,
    "trace": str,
    "mu_init": float,
    "max_cccp_iters": int,
    "tol": float,
    "random_samples": int,
}


def _build_run_config(args):
    values = {}
    if args.config:
        raw = _read_config_file(args.config)
        for key, conv in _RUN_KEYS.items():
            if key in raw:
                values[key] = conv(raw[key])
        unknown = set(raw) - set(_RUN_KEYS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for key in _RUN_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    epm = EpmConfig(
        mu_init=values.get("mu_init", 1.0),
        max_cccp_iters=values.get("max_cccp_iters", 50),
        cccp_tol=values.get("tol", 1e-4),
    )
    return harness.ExperimentConfig(
        n_t=values.get("nt", 2),
        n_r=values.get("nr", 2),
        n_b=values.get("nb", 2),
        snr_db_list=values.get("snr_db", (0.0, 5.0, 10.0, 15.0, 20.0, 25.0)),
        r_t_min=values.get("rt", 2.0),
        trials=values.get("trials", 100),
        seed=values.get("seed", 42),
        methods=values.get("methods", ("ub", "epm", "mrt-g", "mrt-h")),
        epm=epm,
        output_path=values.get("out", "results.csv"),
        trace_path=values.get("trace"),
        random_samples=values.get("random_samples", 10000),
    )


def _cmd_run(args):
    config = _build_run_config(args)
    records, _ = harness.run_experiment(config)
    n_ok = sum(1 for r in records if r.status == "ok")
    print(f"wrote {len(records)} records ({n_ok} ok) to {config.output_path}")
    if config.trace_path:
        print(f"traces written to {config.trace_path}")
    return 0


def _cmd_oracle(args):
    if args.scalar:
        parts = [complex(x) for x in args.scalar.split(",")]
        if len(parts) != 3:
            raise ValueError("--scalar expects g,h,f")
        res = oracle.scalar_closed_form(*parts, budget=args.budget, r_t=args.rt)
        if not res.feasible:
            print("infeasible")
        else:
            print(f"r_b = {res.best_r_b:.9g} bits/s/Hz at full power")
        return 0
    raise ValueError("oracle needs --scalar g,h,f")


def build_parser():
    parser = argparse.ArgumentParser(prog="srbeam", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a Monte Carlo experiment")
    run.add_argument("--config", help="key=value config file; flags override")
    run.add_argument("--nt", type=int)
    run.add_argument("--nr", type=int)
    run.add_argument("--nb", type=int)
    run.add_argument("--rt", type=float)
    run.add_argument("--snr-db", dest="snr_db", type=_parse_floats)
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--methods", type=_parse_methods)
    run.add_argument("--out", dest="out")
    run.add_argument("--trace", dest="trace")
    run.add_argument("--mu-init", dest="mu_init", type=float)
    run.add_argument("--max-cccp-iters", dest="max_cccp_iters", type=int)
    run.add_argument("--tol", type=float)
    run.add_argument("--random-samples", dest="random_samples", type=int)
    run.set_defaults(func=_cmd_run)

    orc = sub.add_parser("oracle", help="closed-form scalar oracle")
    orc.add_argument("--scalar", help="g,h,f as complex literals")
    orc.add_argument("--budget", type=float, required=True)
    orc.add_argument("--rt", type=float, default=0.0)
    orc.set_defaults(func=_cmd_oracle)
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
