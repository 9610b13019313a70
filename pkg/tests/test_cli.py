import csv
import json
import os

import pytest

from gt_market.cli import build_parser, run_cli


@pytest.fixture
def pair_csv(tmp_path):
    out = tmp_path / "pair.csv"
    assert run_cli(["simulate", "--vol", "0.2", "--stock-vol", "0.3", "--horizon", "0.5", "--seed", "3", "-o", str(out)]) == 0
    return out


def test_quantiles_csv(tmp_path):
    out = tmp_path / "q.csv"
    assert run_cli(["quantiles", "--qmin", "1e-5", "--qmax", "0.5", "--points", "200", "-o", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["q", "X", "eta", "ratio"]
    assert len(rows) == 201


def test_quantiles_json_stdout(capsys):
    assert run_cli(["quantiles", "--points", "3", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert len(data) == 3 and set(data[0]) == {"q", "X", "eta", "ratio"}


def test_simulate_header(pair_csv):
    assert pair_csv.read_text().splitlines()[0] == "t,index,stock"


def test_analyze_capm_report(pair_csv, capsys):
    rc = run_cli(["analyze", "--input", str(pair_csv), "--n-max", "5", "--delta", "0.1", "--T", "0.01",
                  "--family", "capm_optimized"])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    rep = out["bounds"][0]
    assert rep["spec"]["family"] == "capm_optimized"
    assert isinstance(rep["hit"], bool)
    assert {"identities", "tpd", "terminal", "ladder"} <= set(out)


def test_analyze_side_outputs(pair_csv, tmp_path):
    lad, cur, cap = tmp_path / "l.json", tmp_path / "c.csv", tmp_path / "k.csv"
    rc = run_cli(["analyze", "--input", str(pair_csv), "--n-max", "5", "--dump-ladder", str(lad),
                  "--emit-curves", str(cur), "--emit-capital", str(cap), "--mix", "stock_mix", "-o", str(tmp_path / "a.json")])
    assert rc == 0
    assert json.loads(lad.read_text())["mode"] == "pair"
    assert cur.read_text().splitlines()[0] == "t,n,sigma_I,mu_I,sigma_S,mu_S,sigma_cross,delta"
    assert cap.read_text().splitlines()[0] == "t,capital,relative,theoretical_exponent"


def test_report_bundle(capsys):
    rc = run_cli(["report", "--stock-vol", "0.3", "--horizon", "0.5", "--n-max", "5", "--family", "capm_mixing",
                  "--epsilon", "5", "--T", "0.01", "--seed", "2", "--resolution", "warn"])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert set(out["strategies"]) == {"cash_mix", "stock_mix"}
    assert out["source"]["seed"] == 2


@pytest.mark.parametrize(
    "argv, needle",
    [
        (["quantiles", "--points", "0"], "--points"),
        (["quantiles", "--bogus"], "--bogus"),
        (["simulate", "--dt", "-1"], "--dt"),
        (["analyze"], "--input"),
        (["analyze", "--input", "missing.csv"], "--input"),
        (["coverage", "--family", "ep_mixing", "--T", "0.02"], "--epsilon"),
        (["coverage", "--family", "ep_optimized"], "--T"),
        (["quantiles", "--qmax", "0.7"], "--qmax"),
        (["coverage", "--format", "csv", "--suite", "acceptance"], "--format"),
    ],
)
def test_input_errors_exit_one(argv, needle, capsys):
    assert run_cli(argv) == 1
    err = capsys.readouterr().err
    assert needle in err


def test_bad_row_named(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("t,index\n0,1\n1,-2\n")
    out = tmp_path / "out.json"
    assert run_cli(["analyze", "--input", str(bad), "-o", str(out)]) == 1
    assert "row 3" in capsys.readouterr().err
    assert not out.exists()


def test_no_partial_output_on_failure(pair_csv, tmp_path):
    # tau undefined for a budget the path never reaches: nothing is written
    out, cur = tmp_path / "o.json", tmp_path / "c.csv"
    rc = run_cli(["analyze", "--input", str(pair_csv), "--n-max", "5", "--family", "ep_optimized", "--T", "50",
                  "--emit-curves", str(cur), "-o", str(out)])
    assert rc == 1
    assert not out.exists() and not cur.exists()
    assert [p for p in os.listdir(tmp_path) if p.endswith(".tmp")] == []


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"qmin": 1e-3, "points": 7}))
    out = tmp_path / "q.csv"
    assert run_cli(["quantiles", "--config", str(cfg), "--points", "4", "-o", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert len(rows) == 5
    assert float(rows[1][0]) == pytest.approx(1e-3)


@pytest.mark.parametrize("content, needle", [({"nope": 1}, "nope"), ({"points": 0}, "points"), ([1, 2], "object")])
def test_config_errors(tmp_path, capsys, content, needle):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(content))
    assert run_cli(["quantiles", "--config", str(cfg)]) == 1
    assert needle in capsys.readouterr().err


def test_coverage_small_run_reproducible(tmp_path):
    args = ["coverage", "--vol", "0.2", "--drift-mode", "index_numeraire", "--horizon", "0.75", "--n-paths", "30",
            "--level", "5", "--family", "ep_clt_two_sided", "--family", "ep_optimized", "--T", "0.02",
            "--anytime-epsilon", "1", "--seed", "9"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run_cli(args + ["-o", str(a), "--workers", "1"]) == 0
    assert run_cli(args + ["-o", str(b), "--workers", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    data = json.loads(a.read_text())
    assert len(data["results"]) == 3 and len(data["config_hash"]) == 40


def test_supermartingale_and_lil_experiments(capsys):
    assert run_cli(["coverage", "--experiment", "supermartingale", "--strategy", "cash_mix:0.5", "--n-paths", "10",
                    "--dt", "1e-3", "--level", "3", "--drift-mode", "index_numeraire"]) == 0
    assert json.loads(capsys.readouterr().out)["results"][0]["label"] == "cash_mix(eps=0.5)"
    assert run_cli(["coverage", "--experiment", "lil", "--budget", "5", "--n-paths", "2", "--vol", "1",
                    "--dt", "3e-4", "--drift-mode", "index_numeraire"]) == 0
    assert json.loads(capsys.readouterr().out)["applicable"]


def test_help_lists_units(capsys):
    for sub in ("simulate", "analyze", "coverage", "quantiles", "report"):
        assert run_cli([sub, "--help"]) == 0
    text = capsys.readouterr().out
    for unit in ("time unit", "sqrt(time unit)", "dimensionless", "units of sigma_I"):
        assert unit in text


def test_every_flag_has_help():
    parser = build_parser()
    sub = next(a for a in parser._actions if hasattr(a, "choices") and isinstance(a.choices, dict))
    for name, p in sub.choices.items():
        for action in p._actions:
            assert action.help, f"{name} {action.option_strings} lacks help"
