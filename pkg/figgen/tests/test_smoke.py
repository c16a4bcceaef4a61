"""End-to-end smoke: a 20-trial experiment run feeds both figure kinds."""

import csv
import statistics

import pytest

from figgen import FigureSpec, plot_convergence, plot_rate_vs_snr

srbeam_harness = pytest.importorskip("srbeam.harness")


@pytest.fixture(scope="module")
def smoke_csvs(tmp_path_factory):
    base = tmp_path_factory.mktemp("smoke")
    config = srbeam_harness.ExperimentConfig(
        snr_db_list=(10.0, 20.0),
        trials=20,
        seed=3,
        methods=("ub", "epm", "mrt-g", "mrt-h"),
        output_path=str(base / "results.csv"),
        trace_path=str(base / "traces.csv"),
    )
    srbeam_harness.run_experiment(config)
    return base


def test_two_panel_output(smoke_csvs):
    conv = plot_convergence(
        FigureSpec(
            kind="convergence",
            input_path=str(smoke_csvs / "traces.csv"),
            output_path=str(smoke_csvs / "fig_convergence.png"),
            snr_select=(10.0, 20.0),
        )
    )
    rates = plot_rate_vs_snr(
        FigureSpec(
            kind="rate_vs_snr",
            input_path=str(smoke_csvs / "results.csv"),
            output_path=str(smoke_csvs / "fig_rates.png"),
        )
    )
    assert sorted(conv) == [10.0, 20.0]
    assert sorted(rates) == ["epm", "mrt-g", "mrt-h", "ub"]
    for name in ("fig_convergence.png", "fig_rates.png"):
        assert (smoke_csvs / name).stat().st_size > 0

    # plotted points must equal the arithmetic means recomputed from the CSV
    grouped = {}
    with open(smoke_csvs / "results.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            grouped.setdefault((row["method"], float(row["snr_db"])), []).append(
                float(row["r_b"])
            )
    for method, (snrs, values) in rates.items():
        for snr, val in zip(snrs, values):
            assert val == statistics.mean(grouped[(method, snr)])
