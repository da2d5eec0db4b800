import json
import subprocess
import sys
from pathlib import Path

import pytest

from nanonmr.cli import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, main
from nanonmr.dipolar import supported_indices


def write(tmp_path, obj, name="cfg.json"):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


SMALL = {"experiment": "simple-qfi-vs-theta", "grid": {"theta": [0.3, 1.0]}, "params": {"N": 20}}


def test_run_writes_csv_and_manifest(tmp_path, capsys):
    cfg = write(tmp_path, SMALL)
    out = tmp_path / "out"
    assert main(["run", "--config", cfg, "--out", str(out), "--threads", "2"]) == EXIT_OK
    files = sorted(p.name for p in out.iterdir())
    assert len(files) == 2 and files[0].endswith(".csv") and files[1].endswith(".manifest.json")
    assert "2 rows" in capsys.readouterr().out


def test_threads_env_and_flag_agree(tmp_path, monkeypatch):
    cfg = write(tmp_path, SMALL)
    monkeypatch.setenv("NANONMR_THREADS", "3")
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "a.csv")]) == EXIT_OK
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "b.csv"), "--threads", "1"]) == EXIT_OK
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_seed_override_changes_hash(tmp_path):
    cfg = write(tmp_path, SMALL)
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) == EXIT_OK
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "o"), "--seed", "5"]) == EXIT_OK
    assert len(list((tmp_path / "o").glob("*.csv"))) == 2


def test_validate(tmp_path, capsys):
    assert main(["validate", "--config", write(tmp_path, SMALL)]) == EXIT_OK
    assert "2 grid points" in capsys.readouterr().out


@pytest.mark.parametrize("bad", [
    "{not json",
    {"experiment": "simple-qfi-vs-theta", "grid": {"theta": [0.3]}, "gtau_": 1},
    {"experiment": "spatial", "grid": {"tau": [1.0]}},
])
def test_config_errors_exit_2(tmp_path, capsys, bad):
    assert main(["validate", "--config", write(tmp_path, bad)]) == EXIT_CONFIG
    assert main(["run", "--config", write(tmp_path, bad)]) == EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_missing_file_and_bad_threads(tmp_path):
    assert main(["validate", "--config", str(tmp_path / "nope.json")]) == EXIT_CONFIG
    assert main(["run", "--config", write(tmp_path, SMALL), "--threads", "0"]) == EXIT_CONFIG
    assert main(["integrals", "--depth", "-1"]) == EXIT_CONFIG


def test_numeric_failure_exit_3(tmp_path, capsys):
    # finite-volume regime forced without a volume: a module error, not a config error
    bad = {"experiment": "spatial", "grid": {"tau": [1.0]}, "params": {"regime": "finite-volume"},
           "geometry": {"depth": 10.0, "diffusion": 1.0}}
    assert main(["run", "--config", write(tmp_path, bad), "--out", str(tmp_path / "o")]) == EXIT_NUMERIC
    assert "tau" in capsys.readouterr().err
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    code = main(["run", "--config", write(tmp_path, SMALL), "--out", str(blocker / "x" / "y.csv")])
    assert code == EXIT_NUMERIC
    assert "output error" in capsys.readouterr().err


def test_integrals(capsys):
    assert main(["integrals", "--order", "2", "--alpha", "0", "--depth", "1"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "0.19635" in out  # pi / 4
    assert len(out.strip().splitlines()) == 1 + len(supported_indices(2))


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "nanonmr.cli", "integrals", "--order", "1"],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0 and "-4.18879" in r.stdout


DEMO_CONFIGS = sorted((Path(__file__).resolve().parents[1] / "demos" / "configs").glob("*.json"))


@pytest.mark.parametrize("path", DEMO_CONFIGS, ids=lambda p: p.stem)
def test_demo_configs_validate(path):
    assert main(["validate", "--config", str(path)]) == EXIT_OK
