"""Aggregate CSV rows into figure data and render with matplotlib (Agg)."""

from __future__ import annotations

import csv
import statistics
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

TRACE_COLUMNS = ("trial", "snr_db", "iter", "objective", "penalty_residual")
RESULT_COLUMNS = (
    "trial",
    "snr_db",
    "method",
    "r_b",
    "rt_satisfied",
)

METHOD_LABELS = {
    "ub": "UB",
    "epm": "EPM-LO",
    "mrt-g": "MRT-G",
    "mrt-h": "MRT-H",
}
METHOD_ORDER = ("ub", "epm", "mrt-g", "mrt-h")

KINDS = ("convergence", "rate_vs_snr")


class MissingColumns(ValueError):
    pass


class EmptySelection(ValueError):
    pass


@dataclass
class FigureSpec:
    kind: str
    input_path: str
    output_path: str
    filter_rt_satisfied: bool = False
    snr_select: Optional[Sequence[float]] = None
    aggregate: str = "mean"  # rate curves only; "mean" | "median"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}")
        if self.aggregate not in ("mean", "median"):
            raise ValueError(f"unknown aggregate {self.aggregate!r}")


def _read_rows(path, required):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise MissingColumns(f"{path}: missing columns {missing}")
        return list(reader)


def convergence_series(spec) -> Dict[float, Tuple[List[int], List[float]]]:
    """Per-SNR median objective vs iteration.

    Trials stop at different iteration counts; a finished trial holds its
    final value for later iterations so the median stays an aggregate over
    the full trial set at every x position.
    """
    rows = _read_rows(spec.input_path, TRACE_COLUMNS)
    per_trial: Dict[Tuple[float, str], Dict[int, float]] = {}
    for row in rows:
        snr = float(row["snr_db"])
        if spec.snr_select is not None and not any(
            abs(snr - s) <= 1e-9 for s in spec.snr_select
        ):
            continue
        key = (snr, row["trial"])
        per_trial.setdefault(key, {})[int(row["iter"])] = float(row["objective"])
    if not per_trial:
        raise EmptySelection(f"{spec.input_path}: no trace rows selected")

    by_snr: Dict[float, List[Dict[int, float]]] = {}
    for (snr, _), trace in per_trial.items():
        by_snr.setdefault(snr, []).append(trace)

    series = {}
    for snr, traces in sorted(by_snr.items()):
        max_iter = max(max(t) for t in traces)
        iters = list(range(1, max_iter + 1))
        values = []
        for it in iters:
            points = [t.get(it, t[max(k for k in t if k <= it)]) for t in traces]
            values.append(statistics.median(points))
        series[snr] = (iters, values)
    return series


def plot_convergence(spec):
    """Write the convergence figure; returns the plotted series."""
    series = convergence_series(spec)
    fig, ax = plt.subplots(figsize=(6, 4))
    for snr, (iters, values) in series.items():
        ax.plot(iters, values, marker="o", markersize=3, label=f"{snr:g} dB")
    ax.set_xlabel("iteration")
    ax.set_ylabel("objective")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(spec.output_path, dpi=150)
    plt.close(fig)
    return series


def rate_series(spec) -> Dict[str, Tuple[List[float], List[float]]]:
    """Per-method aggregate r_b vs SNR, keyed by method name."""
    rows = _read_rows(spec.input_path, RESULT_COLUMNS)
    grouped: Dict[Tuple[str, float], List[float]] = {}
    for row in rows:
        method = row["method"]
        if method not in METHOD_LABELS:
            continue
        if spec.filter_rt_satisfied and row["rt_satisfied"] != "true":
            continue
        snr = float(row["snr_db"])
        if spec.snr_select is not None and not any(
            abs(snr - s) <= 1e-9 for s in spec.snr_select
        ):
            continue
        grouped.setdefault((method, snr), []).append(float(row["r_b"]))
    if not grouped:
        raise EmptySelection(f"{spec.input_path}: no result rows selected")

    agg = statistics.mean if spec.aggregate == "mean" else statistics.median
    series = {}
    for method in METHOD_ORDER:
        points = sorted(
            (snr, agg(vals)) for (m, snr), vals in grouped.items() if m == method
        )
        if points:
            series[method] = ([p[0] for p in points], [p[1] for p in points])
    return series


def plot_rate_vs_snr(spec):
    """Write the rate-versus-SNR figure; returns the plotted series."""
    series = rate_series(spec)
    fig, ax = plt.subplots(figsize=(6, 4))
    for method, (snrs, values) in series.items():
        ax.plot(snrs, values, marker="s", markersize=4, label=METHOD_LABELS[method])
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("secondary rate (bits/s/Hz)")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(spec.output_path, dpi=150)
    plt.close(fig)
    return series
