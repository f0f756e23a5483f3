import json
import os

import pytest

from split_thue import cli


CONFIG = {
    "name": "fibonacci-pow2",
    "A": {"recurrence": [1, -1, -1], "initial": [1, 2]},
    "B": {"recurrence": [1, -2], "initial": [2]},
    "options": {"n_lo": 2, "n_hi": 4, "y_max": 50},
}


@pytest.fixture()
def config_path(tmp_path):
    p = tmp_path / "family.json"
    p.write_text(json.dumps(CONFIG))
    return str(p)


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out) if out else None


def test_solve_clean_range(config_path, capsys):
    code, report = run(["solve", config_path], capsys)
    assert code == cli.EXIT_OK
    assert report["nontrivial_found"] == 0
    assert [p["n"] for p in report["per_n"]] == [2, 3, 4]
    assert all(len(p["solutions"]) == 8 for p in report["per_n"])


def test_solve_nontrivial_exit_code(config_path, capsys):
    code, report = run(["solve", config_path, "--n-lo", "1", "--n-hi", "1"], capsys)
    assert code == cli.EXIT_NONTRIVIAL
    assert report["nontrivial_found"] == 2


def test_verify_report_structure(config_path, capsys):
    code, report = run(["verify", config_path], capsys)
    assert code == cli.EXIT_OK
    assert report["case"] == "strict"
    assert report["hypotheses"]["passed"]
    assert report["constants"]["eps"] == pytest.approx(0.8090169943749475)
    assert all(row["xi_bound_ok"] for row in report["per_n"])
    assert report["residuals"] and all(r["ok"] for r in report["residuals"])


def test_bounds_no_crossing_exit_code(config_path, capsys):
    code, report = run(["bounds", config_path, "--n-cap", "10000"], capsys)
    assert code == cli.EXIT_BOUND
    assert report["no_crossing"] and report["n0"] is None


def test_bounds_finite_n0(config_path, capsys):
    code, report = run(["bounds", config_path, "--n-cap", str(10**25)], capsys)
    assert code == cli.EXIT_OK
    assert report["n0"] == 59362923407947908538


def test_usage_errors(tmp_path, capsys):
    assert cli.main(["solve", str(tmp_path / "missing.json")]) == cli.EXIT_USAGE
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["solve", str(bad)]) == cli.EXIT_USAGE
    incomplete = tmp_path / "incomplete.json"
    incomplete.write_text(json.dumps({"A": CONFIG["A"]}))
    assert cli.main(["solve", str(incomplete)]) == cli.EXIT_USAGE
    capsys.readouterr()


def test_option_validation(config_path, capsys):
    assert cli.main(["solve", config_path, "--n-lo", "5", "--n-hi", "2"]) == cli.EXIT_USAGE
    assert cli.main(["solve", config_path, "--y-max", "-3"]) == cli.EXIT_USAGE
    capsys.readouterr()


def test_env_var_overrides_bits(config_path, capsys, monkeypatch):
    monkeypatch.setenv("SPLIT_THUE_BITS", "128")
    code, report = run(["solve", config_path], capsys)
    assert code == cli.EXIT_OK
    assert report["config"]["options"]["working_bits"] == 128
    monkeypatch.setenv("SPLIT_THUE_BITS", "not-a-number")
    assert cli.main(["solve", config_path]) == cli.EXIT_USAGE
    capsys.readouterr()


def test_stdin_config(capsys, monkeypatch, tmp_path):
    import io

    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(CONFIG)))
    code, report = run(["solve", "-"], capsys)
    assert code == cli.EXIT_OK
    assert report["config"]["name"] == "fibonacci-pow2"


def test_output_files(config_path, tmp_path, capsys):
    j = tmp_path / "out.json"
    m = tmp_path / "out.md"
    c = tmp_path / "out.csv"
    code = cli.main(
        ["verify", config_path, "--json-out", str(j), "--md-out", str(m), "--csv-out", str(c)]
    )
    capsys.readouterr()
    assert code == cli.EXIT_OK
    report = json.loads(j.read_text())
    assert report["command"] == "verify"
    md = m.read_text()
    assert md.startswith("# split-thue verify report")
    header = c.read_text().splitlines()[0]
    assert header == "n,name,residual,bound,ratio,ok"


def test_deterministic_json(config_path, tmp_path, capsys):
    outs = []
    for i in range(2):
        p = tmp_path / f"run{i}.json"
        cli.main(["verify", config_path, "--json-out", str(p)])
        outs.append(p.read_bytes())
    capsys.readouterr()
    assert outs[0] == outs[1]


def test_case_override_flag(config_path, capsys):
    code, report = run(["bounds", config_path, "--n-cap", "100", "--case-override", "strict"], capsys)
    assert code in (cli.EXIT_OK, cli.EXIT_BOUND)
    assert report["case"] == "strict"
