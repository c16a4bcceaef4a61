import statistics

import pytest

from figgen import (
    EmptySelection,
    FigureSpec,
    MissingColumns,
    plot_convergence,
    plot_rate_vs_snr,
)
from figgen.figures import convergence_series, rate_series

TRACE_HEADER = "trial,snr_db,iter,objective,penalty_residual"
RESULT_HEADER = (
    "trial,seed_used,snr_db,method,r_b,r_t_achieved,rt_satisfied,"
    "iterations,status,rank_ratio"
)


def write(path, lines):
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def result_row(trial, snr, method, r_b, rt_ok="true"):
    return f"{trial},1,{snr},{method},{r_b},2.0,{rt_ok},5,ok,"


class TestFigureSpec:
    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            FigureSpec(kind="pie", input_path="a", output_path="b")

    def test_unknown_aggregate_rejected(self):
        with pytest.raises(ValueError):
            FigureSpec(kind="rate_vs_snr", input_path="a", output_path="b", aggregate="mode")


class TestConvergence:
    def spec(self, inp, out, snr=None):
        return FigureSpec(
            kind="convergence", input_path=inp, output_path=out, snr_select=snr
        )

    def test_single_trial_single_line(self, tmp_path):
        rows = [TRACE_HEADER] + [f"0,10,{i},{1.0 + 0.5 * i},1e-9" for i in range(1, 6)]
        inp = write(tmp_path / "t.csv", rows)
        series = plot_convergence(self.spec(inp, str(tmp_path / "f.png")))
        assert list(series) == [10.0]
        iters, values = series[10.0]
        assert iters == [1, 2, 3, 4, 5]
        assert values == [1.5, 2.0, 2.5, 3.0, 3.5]
        assert (tmp_path / "f.png").stat().st_size > 0

    def test_median_across_trials_with_padding(self, tmp_path):
        # trial 0 stops after 2 iterations and holds its final value
        rows = [
            TRACE_HEADER,
            "0,10,1,1.0,0",
            "0,10,2,2.0,0",
            "1,10,1,3.0,0",
            "1,10,2,4.0,0",
            "1,10,3,5.0,0",
            "2,10,1,0.0,0",
            "2,10,2,6.0,0",
            "2,10,3,7.0,0",
        ]
        inp = write(tmp_path / "t.csv", rows)
        series = convergence_series(self.spec(inp, ""))
        iters, values = series[10.0]
        assert iters == [1, 2, 3]
        assert values == [
            statistics.median([1.0, 3.0, 0.0]),
            statistics.median([2.0, 4.0, 6.0]),
            statistics.median([2.0, 5.0, 7.0]),
        ]

    def test_snr_selection(self, tmp_path):
        rows = [TRACE_HEADER, "0,10,1,1.0,0", "0,20,1,2.0,0", "0,15,1,9.0,0"]
        inp = write(tmp_path / "t.csv", rows)
        series = convergence_series(self.spec(inp, "", snr=(10.0, 20.0)))
        assert sorted(series) == [10.0, 20.0]

    def test_empty_selection(self, tmp_path):
        inp = write(tmp_path / "t.csv", [TRACE_HEADER])
        with pytest.raises(EmptySelection):
            convergence_series(self.spec(inp, ""))

    def test_no_rows_at_selected_snr(self, tmp_path):
        inp = write(tmp_path / "t.csv", [TRACE_HEADER, "0,10,1,1.0,0"])
        with pytest.raises(EmptySelection):
            convergence_series(self.spec(inp, "", snr=(25.0,)))

    def test_missing_columns(self, tmp_path):
        inp = write(tmp_path / "t.csv", ["trial,iter,objective", "0,1,1.0"])
        with pytest.raises(MissingColumns):
            convergence_series(self.spec(inp, ""))


class TestRates:
    def spec(self, inp, out="", **kw):
        return FigureSpec(kind="rate_vs_snr", input_path=inp, output_path=out, **kw)

    def test_single_method_single_series(self, tmp_path):
        rows = [RESULT_HEADER, result_row(0, 10, "epm", 3.0), result_row(1, 10, "epm", 5.0)]
        inp = write(tmp_path / "r.csv", rows)
        series = plot_rate_vs_snr(self.spec(inp, str(tmp_path / "f.png")))
        assert list(series) == ["epm"]
        assert series["epm"] == ([10.0], [4.0])
        assert (tmp_path / "f.png").stat().st_size > 0

    def test_means_match_manual_computation(self, tmp_path):
        rows = [RESULT_HEADER]
        expect = {}
        for method, vals in (("ub", [4.0, 6.0]), ("epm", [3.0, 4.0]), ("mrt-g", [1.0, 2.0])):
            for t, v in enumerate(vals):
                rows.append(result_row(t, 10, method, v))
                rows.append(result_row(t, 20, method, 2 * v))
            expect[method] = ([10.0, 20.0], [statistics.mean(vals), 2 * statistics.mean(vals)])
        inp = write(tmp_path / "r.csv", rows)
        series = rate_series(self.spec(inp))
        assert series == expect

    def test_method_order_and_labels_known(self, tmp_path):
        rows = [RESULT_HEADER]
        for method in ("mrt-h", "mrt-g", "epm", "ub", "random"):
            rows.append(result_row(0, 10, method, 1.0))
        inp = write(tmp_path / "r.csv", rows)
        series = rate_series(self.spec(inp))
        # unknown methods dropped, known ones in fixed legend order
        assert list(series) == ["ub", "epm", "mrt-g", "mrt-h"]

    def test_filter_rt_satisfied(self, tmp_path):
        rows = [
            RESULT_HEADER,
            result_row(0, 10, "epm", 2.0, rt_ok="true"),
            result_row(1, 10, "epm", 8.0, rt_ok="false"),
        ]
        inp = write(tmp_path / "r.csv", rows)
        assert rate_series(self.spec(inp))["epm"] == ([10.0], [5.0])
        assert rate_series(self.spec(inp, filter_rt_satisfied=True))["epm"] == ([10.0], [2.0])

    def test_median_aggregate_flag(self, tmp_path):
        rows = [RESULT_HEADER] + [
            result_row(t, 10, "epm", v) for t, v in enumerate([1.0, 2.0, 9.0])
        ]
        inp = write(tmp_path / "r.csv", rows)
        assert rate_series(self.spec(inp))["epm"][1] == [4.0]
        assert rate_series(self.spec(inp, aggregate="median"))["epm"][1] == [2.0]

    def test_missing_columns(self, tmp_path):
        inp = write(tmp_path / "r.csv", ["trial,method,r_b", "0,epm,1.0"])
        with pytest.raises(MissingColumns):
            rate_series(self.spec(inp))

    def test_empty_file(self, tmp_path):
        inp = write(tmp_path / "r.csv", [RESULT_HEADER])
        with pytest.raises(EmptySelection):
            rate_series(self.spec(inp))
