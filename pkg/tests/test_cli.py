import datetime as dt

import numpy as np
import pytest

from factor_group.cli import cli_main
from factor_group.io import format_table, load_csv_panel


@pytest.fixture
def panel_csv(tmp_path):
    gen = np.random.default_rng(8)
    t = 80
    b = np.repeat([[2.0, 0.0], [0.0, 2.0], [1.5, 1.5]], 6, axis=0)
    x = gen.standard_normal((t, 2)) @ b.T + 0.5 * gen.standard_normal((t, 18))
    dates = [dt.date(2018, 1, 1) + dt.timedelta(days=i) for i in range(t)]
    rows = [dict(date=d, **{f"p{j}": v for j, v in enumerate(row)}) for d, row in zip(dates, x)]
    path = tmp_path / "panel.csv"
    path.write_text(format_table(["date"] + [f"p{j}" for j in range(18)], rows, float_fmt="r"))
    return path


def test_simulate_stdout(capsys):
    code = cli_main(["simulate", "--scenario", "s1", "--t", "40", "--n", "90", "--kappa", "0.5",
                     "--reps", "2", "--seed", "7", "--folds", "4"])
    out = capsys.readouterr().out
    assert code == 0
    lines = [line for line in out.splitlines() if not line.startswith("#")]
    assert lines[0].startswith("scenario,t,n,kappa,init,mse")
    assert lines[1].startswith("S1,40,90,0.5,PCA,") and lines[2].startswith("S1,40,90,0.5,PPCA,")
    assert "# seed: 7" in out and "# config_hash: " in out


def test_simulate_markdown(capsys):
    assert cli_main(["simulate", "--t", "30", "--n", "90", "--reps", "1", "--format", "md",
                     "--folds", "3"]) == 0
    assert capsys.readouterr().out.startswith("| scenario")


def test_fit_artifacts(panel_csv, tmp_path, capsys):
    out = tmp_path / "out"
    code = cli_main(["fit", "--input", str(panel_csv), "--r", "auto", "--lambda", "cv",
                     "--folds", "4", "--output-dir", str(out)])
    assert code == 0
    loadings = [l for l in (out / "loadings.csv").read_text().splitlines() if l[0] != "#"]
    groups = [l for l in (out / "groups.csv").read_text().splitlines() if l[0] != "#"]
    assert loadings[0] == "series,b_1,b_2,group"
    assert groups[0] == "series,group" and len(groups) == 19
    assert len({l.split(",")[1] for l in groups[1:]}) == 3
    # scores.csv is panel-shaped and round-trips exactly
    scores = load_csv_panel(out / "scores.csv")
    assert scores.series_names == ("f_1", "f_2")
    np.testing.assert_allclose(scores.values.T @ scores.values / scores.t, np.eye(2), atol=1e-10)
    again = tmp_path / "again.csv"
    rows = [dict(date=d, f_1=a, f_2=b) for d, (a, b) in zip(scores.time_labels, scores.values)]
    again.write_text(format_table(["date", "f_1", "f_2"], rows, float_fmt="r"))
    np.testing.assert_array_equal(load_csv_panel(again).values, scores.values)


def test_panel_csv_roundtrip(panel_csv, tmp_path):
    panel = load_csv_panel(panel_csv)
    rows = [dict(date=d, **dict(zip(panel.series_names, row)))
            for d, row in zip(panel.time_labels, panel.values.tolist())]
    copy = tmp_path / "copy.csv"
    copy.write_text(format_table(["date", *panel.series_names], rows, float_fmt="r"))
    np.testing.assert_array_equal(load_csv_panel(copy).values, panel.values)


def test_group_report(panel_csv, capsys):
    assert cli_main(["group", "--input", str(panel_csv), "--r", "2", "--lambda", "0.5"]) == 0
    out = capsys.readouterr().out
    assert "# k_hat: 3" in out
    assert "k,s,rho,ic,selected" in out


def test_usage_errors(capsys):
    assert cli_main([]) == 1
    assert cli_main(["simulate", "--t", "abc"]) == 1
    assert cli_main(["fit"]) == 1
    assert cli_main(["grid", "--t", "123"]) == 1
    assert "usage:" in capsys.readouterr().err


def test_computation_errors(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("date,a,b\n20180101,1,x\n20180102,2,3\n")
    assert cli_main(["fit", "--input", str(bad), "--output-dir", str(tmp_path)]) == 2
    flat = tmp_path / "flat.csv"
    flat.write_text("date,a,b,c\n20180101,1,5,2\n20180102,2,5,1\n20180103,4,5,0\n")
    assert cli_main(["group", "--input", str(flat), "--standardize", "--r", "1",
                     "--lambda", "0"]) == 2
    assert cli_main(["simulate", "--n", "10", "--reps", "1"]) == 2
    assert "computation error" in capsys.readouterr().err


def test_threads_env_default(monkeypatch):
    from factor_group.cli import build_parser
    monkeypatch.setenv("FACTOR_GROUP_THREADS", "3")
    assert build_parser().parse_args(["simulate"]).threads == 3


def test_simulate_deterministic_across_threads(tmp_path):
    outs = []
    for threads in ("1", "2", "1"):
        path = tmp_path / f"s{len(outs)}.csv"
        assert cli_main(["simulate", "--t", "40", "--n", "90", "--reps", "3", "--seed", "11",
                         "--folds", "4", "--threads", threads, "--output", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]
