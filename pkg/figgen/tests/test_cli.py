from figgen import cli

TRACE_HEADER = "trial,snr_db,iter,objective,penalty_residual"
RESULT_HEADER = (
    "trial,seed_used,snr_db,method,r_b,r_t_achieved,rt_satisfied,"
    "iterations,status,rank_ratio"
)


def test_convergence_command(tmp_path, capsys):
    inp = tmp_path / "traces.csv"
    inp.write_text(
        "\n".join([TRACE_HEADER, "0,10,1,1.0,0", "0,10,2,2.0,0", "0,20,1,3.0,0"]) + "\n"
    )
    out = tmp_path / "fig2.png"
    rc = cli.main(["convergence", "--in", str(inp), "--out", str(out), "--snr", "10,20"])
    assert rc == 0
    assert out.stat().st_size > 0
    assert "2 series" in capsys.readouterr().out


def test_rates_command_with_filter(tmp_path, capsys):
    inp = tmp_path / "results.csv"
    inp.write_text(
        "\n".join(
            [
                RESULT_HEADER,
                "0,1,10,epm,3.0,2.0,true,5,ok,",
                "1,1,10,epm,9.0,1.0,false,5,ok,",
            ]
        )
        + "\n"
    )
    out = tmp_path / "fig3.png"
    rc = cli.main(["rates", "--in", str(inp), "--out", str(out), "--filter-rt"])
    assert rc == 0
    assert out.stat().st_size > 0


def test_missing_input_exits_2(tmp_path, capsys):
    rc = cli.main(
        ["rates", "--in", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "f.png")]
    )
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_empty_trace_exits_2(tmp_path, capsys):
    inp = tmp_path / "traces.csv"
    inp.write_text(TRACE_HEADER + "\n")
    rc = cli.main(["convergence", "--in", str(inp), "--out", str(tmp_path / "f.png")])
    assert rc == 2
