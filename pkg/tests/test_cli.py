import csv
import json
import logging

import numpy as np
import pytest

from disqb.cli import ConfigError, default_threads, main, parse_config, read_config_file
from disqb.reporting import CURVE_COLUMNS, emit_csv


def run_cli(*args):
    return main([str(a) for a in args])


SMALL_RUN = (
    "--n_realizations", 3, "--grid.points", 12, "--grid.max", 100, "--seed", 5,
)


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def test_parse_config_expands_chain_mbl_preset():
    config = parse_config({"model": "chain", "preset": "chain-mbl"})
    assert config.disorder.delta == 5.0
    assert config.disorder.j2 == pytest.approx(0.3)
    assert config.disorder.h == pytest.approx(0.6)
    assert config.n_realizations == 100
    assert config.charging.omega == 1.0


def test_parse_config_explicit_delta_overrides_preset(caplog):
    with caplog.at_level(logging.WARNING, logger="disqb"):
        config = parse_config({"model": "chimera", "preset": "chimera-ergodic", "delta": "3"})
    assert config.disorder.delta == 3.0
    assert any("overrides preset" in rec.message for rec in caplog.records)


def test_parse_config_missing_model():
    with pytest.raises(ConfigError, match="'model'"):
        parse_config({"preset": "chain-ergodic"})


def test_parse_config_unknown_key():
    with pytest.raises(ConfigError, match="'momentum'"):
        parse_config({"model": "chain", "momentum": "3"})


def test_parse_config_preset_model_mismatch():
    with pytest.raises(ConfigError, match="belongs to model"):
        parse_config({"model": "chimera", "preset": "chain-mbl"})


def test_parse_config_chain_only_keys_rejected_for_chimera():
    with pytest.raises(ConfigError, match="'h' only applies"):
        parse_config({"model": "chimera", "preset": "chimera-mbl", "h": "0.6"})


def test_parse_config_requires_delta_without_preset():
    with pytest.raises(ConfigError, match="'delta'"):
        parse_config({"model": "chain"})
    config = parse_config({"model": "chain", "delta": "2.5"})
    assert config.disorder.delta == 2.5
    assert config.disorder.h == pytest.approx(0.6)


def test_parse_config_bad_values():
    with pytest.raises(ConfigError, match="'delta'"):
        parse_config({"model": "chain", "delta": "-1"})
    with pytest.raises(ConfigError, match="'grid.max'"):
        parse_config({"model": "chain", "delta": "1", "grid.min": "10", "grid.max": "1"})
    with pytest.raises(ConfigError, match="'n_realizations'"):
        parse_config({"model": "chain", "delta": "1", "n_realizations": "0"})


def test_config_file_parsing(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# chain study\nmodel = chain\npreset = chain-ergodic\nseed = 9\n")
    raw = read_config_file(path)
    assert raw == {"model": "chain", "preset": "chain-ergodic", "seed": "9"}
    bad = tmp_path / "bad.cfg"
    bad.write_text("model = chain\nwibble = 3\n")
    with pytest.raises(ConfigError, match="wibble"):
        read_config_file(bad)


def test_default_threads_env(monkeypatch):
    monkeypatch.delenv("DISQB_THREADS", raising=False)
    assert default_threads() == 1
    monkeypatch.setenv("DISQB_THREADS", "4")
    assert default_threads() == 4
    monkeypatch.setenv("DISQB_THREADS", "zero")
    with pytest.raises(ConfigError):
        default_threads()


def test_missing_model_exit_code(tmp_path, capsys):
    code = run_cli("run", "--preset", "chain-ergodic", "--output", tmp_path)
    assert code == 2
    assert "model" in capsys.readouterr().err


def test_run_end_to_end(tmp_path):
    out = tmp_path / "run"
    code = run_cli("run", "--model", "chain", "--preset", "chain-ergodic",
                   "--output", out, *SMALL_RUN)
    assert code == 0
    rows = read_rows(out / "curves.csv")
    assert tuple(rows[0]) == CURVE_COLUMNS
    assert len(rows) == 1 + 13  # header + t=0 + 12 log points
    times = [float(r[0]) for r in rows[1:]]
    assert times == sorted(times)
    assert times[0] == 0.0
    assert rows[1][5] == ""  # power undefined at t = 0
    assert float(rows[1][1]) == pytest.approx(0.0, abs=1e-10)  # empty battery
    assert float(rows[1][3]) == pytest.approx(1.0, abs=1e-10)

    summary = json.loads((out / "summary.json").read_text())
    assert summary["config"]["preset"] == "chain-ergodic"
    assert summary["n_realizations"] == 3
    assert summary["e_max"]["min"] > 0
    assert "wall_time_seconds" in summary

    manifest = json.loads((out / "manifest.json").read_text())
    names = {entry["path"] for entry in manifest["files"]}
    assert {"curves.csv", "summary.json", "curves.png"} <= names
    assert all(len(entry["sha256"]) == 64 for entry in manifest["files"])
    assert (out / "curves.png").stat().st_size > 0


def test_no_figures_flag(tmp_path):
    out = tmp_path / "run"
    code = run_cli("run", "--model", "chimera", "--preset", "chimera-mbl",
                   "--output", out, "--no-figures", *SMALL_RUN)
    assert code == 0
    assert not (out / "curves.png").exists()


def test_rerun_is_byte_identical_across_thread_counts(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    for out, threads in ((out1, 1), (out2, 3)):
        code = run_cli("run", "--model", "chain", "--preset", "chain-mbl",
                       "--output", out, "--threads", threads, "--no-figures", *SMALL_RUN)
        assert code == 0
    assert (out1 / "curves.csv").read_bytes() == (out2 / "curves.csv").read_bytes()


def test_emit_csv_empty_rows(tmp_path):
    path = emit_csv([], CURVE_COLUMNS, tmp_path / "empty.csv")
    rows = read_rows(path)
    assert len(rows) == 1
    assert tuple(rows[0]) == CURVE_COLUMNS


def test_emit_csv_significant_digits(tmp_path):
    path = emit_csv([(1 / 3, 2.0)], ("a", "b"), tmp_path / "digits.csv")
    rows = read_rows(path)
    assert rows[1][0] == "0.333333333333"
    assert rows[1][1] == "2"


def test_disorder_sweep_end_to_end(tmp_path):
    out = tmp_path / "sweep"
    code = run_cli("disorder-sweep", "--model", "chain", "--preset", "chain-anderson",
                   "--deltas", "1,2", "--output", out, "--no-figures", *SMALL_RUN)
    assert code == 0
    assert (out / "curves_delta_1.csv").exists()
    assert (out / "curves_delta_2.csv").exists()
    summary = json.loads((out / "summary.json").read_text())
    stats = summary["window_statistics"]
    assert set(stats) == {"1", "2"}
    assert stats["1"]["time_averaged_ergotropy_mean"] > 0


def test_cost_sweep_end_to_end(tmp_path):
    out = tmp_path / "costs"
    code = run_cli("cost-sweep", "--deltas", "1,5", "--models", "chain",
                   "--n_realizations", 10, "--output", out, "--no-figures")
    assert code == 0
    rows = read_rows(out / "costs.csv")
    assert rows[0][0] == "delta"
    assert len(rows) == 3
    by_delta = {float(r[0]): r for r in rows[1:]}
    # high disorder: charging much cheaper than interactions (normalized)
    assert float(by_delta[5.0][8]) < float(by_delta[5.0][6])


def test_periodic_cli_small_run(tmp_path):
    out = tmp_path / "periodic"
    code = run_cli("periodic", "--model", "chain", "--preset", "chain-ergodic",
                   "--output", out, "--no-figures", "--n_realizations", 2,
                   "--grid.points", 4, "--grid.min", 0.1, "--grid.max", 0.4, "--seed", 5)
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    cert = summary["convergence_certificate"]
    assert cert["converged"] is True
    assert cert["max_state_difference"] < 1e-6
    assert summary["config"]["drive"] == "periodic"


def test_periodic_cli_unconverged_step_exits_3(tmp_path, capsys):
    code = run_cli("periodic", "--model", "chain", "--preset", "chain-ergodic",
                   "--output", tmp_path / "bad", "--no-figures", "--n_realizations", 1,
                   "--grid.points", 3, "--grid.min", 1.0, "--grid.max", 4.0,
                   "--step", 0.05, "--seed", 5)
    assert code == 3
    assert "convergence" in capsys.readouterr().err


def test_periodic_subcommand_rejects_static_drive(tmp_path):
    code = run_cli("periodic", "--model", "chain", "--preset", "chain-ergodic",
                   "--drive", "static", "--output", tmp_path)
    assert code == 2


def test_validate_passes_on_fresh_checkout(capsys):
    code = run_cli("validate")
    out = capsys.readouterr().out
    assert code == 0
    assert "FAIL" not in out
    assert "interaction_cost_local_term" in out
