import csv
import json

import pytest

from lawn_isac import experiments as ex
from lawn_isac.cli import EXIT_CONFIG, EXIT_OK, EXIT_VALIDATION, run


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_converge_writes_trace_and_sidecar(tmp_path):
    out = tmp_path / "trace.csv"
    assert run(["converge", "--out", str(out)]) == EXIT_OK
    rows = read_csv(out)
    assert list(rows[0]) == list(ex.TRACE_COLUMNS)
    assert 1 <= len(rows) <= 25
    assert [int(r["iter"]) for r in rows] == list(range(1, len(rows) + 1))
    meta = json.loads((tmp_path / "trace.csv.meta.json").read_text())
    assert meta["command"] == "converge" and meta["config"]["seed"] == 2025
    assert meta["termination"] == "converged" and meta["version"]


def test_seed_changes_values_not_schema(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(["converge", "--out", str(a)])
    run(["converge", "--seed", "7", "--out", str(b)])
    ra, rb = read_csv(a), read_csv(b)
    assert list(ra[0]) == list(rb[0])
    assert ra[-1]["asinr"] != rb[-1]["asinr"]


def test_outputs_are_byte_identical(tmp_path):
    for name in ("x", "y"):
        assert run(["converge", "--out", str(tmp_path / f"{name}.csv")]) == EXIT_OK
    assert (tmp_path / "x.csv").read_bytes() == (tmp_path / "y.csv").read_bytes()
    assert (tmp_path / "x.csv.meta.json").read_bytes() == (tmp_path / "y.csv.meta.json").read_bytes()


def test_config_file_and_errors(tmp_path):
    good = tmp_path / "good.json"
    good.write_text('{"p_elements": 8, "tol": 1e-3}')
    assert run(["converge", "--config", str(good), "--out", str(tmp_path / "t.csv")]) == EXIT_OK
    bad = tmp_path / "bad.json"
    bad.write_text('{"p_elements": -1}')
    assert run(["converge", "--config", str(bad)]) == EXIT_CONFIG
    assert run(["converge", "--config", str(tmp_path / "missing.json")]) == EXIT_CONFIG
    bad.write_text("{oops")
    assert run(["converge", "--config", str(bad)]) == EXIT_CONFIG


def test_single_point_sweep(tmp_path):
    out = tmp_path / "s.csv"
    code = run(["sweep", "--param", "ris_elements", "--values", "12", "--scheme",
                "stackelberg,nash,average", "--out", str(out)])
    assert code == EXIT_OK
    rows = read_csv(out)
    assert [r["scheme"] for r in rows] == ["stackelberg", "nash", "average"]
    assert all(r["value"] == "12" for r in rows)


def test_sweep_rejects_bad_values(capsys):
    assert run(["sweep", "--param", "ris_elements", "--values", "8,9.5"]) == EXIT_CONFIG
    assert "9.5" in capsys.readouterr().err
    assert run(["sweep", "--param", "epsilon_si", "--values", "0.1,2.0", "--scheme", "average"]) == EXIT_CONFIG
    assert "2.0" in capsys.readouterr().err
    assert run(["sweep", "--param", "epsilon_si", "--values", "0.1", "--scheme", "bogus"]) == EXIT_CONFIG


def test_sweep_multiple_runs_average(tmp_path):
    out = tmp_path / "r.csv"
    assert run(["sweep", "--param", "epsilon_si", "--values", "0.1", "--runs", "2",
                "--scheme", "stackelberg", "--out", str(out)]) == EXIT_OK
    row = read_csv(out)[0]
    assert row["runs"] == "2"
    singles = [ex.sweep_table(ex.ScenarioConfig(seed=s), "epsilon_si", [0.1], 1, ["stackelberg"])[0]["u_att"]
               for s in (2025, 2026)]
    assert float(row["u_att"]) == pytest.approx(sum(singles) / 2)


def test_aoi_validate_small_run(tmp_path):
    out = tmp_path / "aoi.csv"
    code = run(["aoi-validate", "--runs", "10000", "--out", str(out)])
    rows = read_csv(out)
    assert len(rows) == 9 and list(rows[0]) == list(ex.AOI_COLUMNS)
    assert code in (EXIT_OK, EXIT_VALIDATION)


def test_aoi_validate_negative_control(tmp_path):
    out = tmp_path / "neg.csv"
    assert run(["aoi-validate", "--runs", "100000", "--wrong-formula", "--out", str(out)]) == EXIT_VALIDATION
    assert any(r["status"] == "FAIL" for r in read_csv(out))


def test_baselines_subset(tmp_path):
    out = tmp_path / "b.csv"
    assert run(["baselines", "--scheme", "stackelberg,average", "--out", str(out)]) == EXIT_OK
    assert [r["scheme"] for r in read_csv(out)] == ["stackelberg", "average"]


def test_uniqueness_command(tmp_path):
    out = tmp_path / "u.csv"
    assert run(["uniqueness", "--runs", "5", "--out", str(out)]) == EXIT_OK
    assert len(read_csv(out)) == 5
    meta = json.loads((tmp_path / "u.csv.meta.json").read_text())
    assert meta["max_strategy_distance"] <= meta["threshold"]


def test_uniqueness_flags_multiple_equilibria(tmp_path):
    cfg = tmp_path / "record.json"
    cfg.write_text('{"rollback": "record"}')
    assert run(["uniqueness", "--config", str(cfg), "--runs", "6", "--out", str(tmp_path / "u.csv")]) \
        == EXIT_VALIDATION


def test_stdout_when_no_out(capsys):
    assert run(["baselines", "--scheme", "average"]) == EXIT_OK
    assert capsys.readouterr().out.startswith(",".join(ex.SCHEME_COLUMNS))
