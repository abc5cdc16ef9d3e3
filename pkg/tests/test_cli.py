import csv
import json
import shutil
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from factornorm.catalog import DEFAULT_BOUND_PAIRS, Catalog
from factornorm.cli import main
from factornorm.config import ConfigError, load_config, parse_config
from factornorm.semigroup import estimate_growth_bound

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def run(tmp_path, cfg, *extra):
    return main(["run", str(cfg), "--out", str(tmp_path), *extra])


def write_json(tmp_path, obj, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return p


# ----------------------------------------------------------- end to end

def test_constant_symbol_table(tmp_path):
    assert run(tmp_path, CONFIGS / "gamma2-constant.toml") == 0
    rows = read_rows(tmp_path / "gamma2-table.csv")
    assert [r["n"] for r in rows] == ["4", "8", "16"]
    for r in rows:
        assert abs(float(r["gamma2_upper"]) - 1) <= 1e-6
        assert abs(float(r["gamma2_lower"]) - 1) <= 1e-6
        assert r["status"] == "ok"
    meta = json.loads((tmp_path / "gamma2-table.json").read_text())
    assert meta["experiment"] == "gamma2-table" and meta["failed"] == 0
    assert meta["config"]["params"]["sizes"] == [4, 8, 16]
    details = (tmp_path / "gamma2-table.jsonl").read_text().splitlines()
    assert len(details) == 3 and json.loads(details[0])["kind"] == "gamma2"


def test_growth_small_nondecreasing(tmp_path):
    assert run(tmp_path, CONFIGS / "symbol-growth-small.toml") == 0
    rows = read_rows(tmp_path / "symbol-growth.csv")
    vals = [float(r["gamma2_upper"]) for r in rows]
    assert all(b >= a - 2e-6 for a, b in zip(vals, vals[1:]))
    assert all(r["nondecreasing"] == "true" for r in rows)


def test_csv_deterministic_across_runs_and_threads(tmp_path):
    cfg = CONFIGS / "gamma2-constant.toml"
    outs = []
    for k, threads in enumerate(["1", "1", "2"]):
        d = tmp_path / str(k)
        assert run(d, cfg, "--threads", threads) == 0
        outs.append((d / "gamma2-table.csv").read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_seed_override_recorded(tmp_path):
    assert run(tmp_path, CONFIGS / "gamma2-constant.toml", "--seed", "9") == 0
    meta = json.loads((tmp_path / "gamma2-table.json").read_text())
    assert meta["seed"] == 9 and meta["config"]["seed"] == 9


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "factornorm.cli", "run",
                           str(CONFIGS / "gamma2-constant.toml"), "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "3/3 rows ok" in proc.stdout


@pytest.mark.skipif(shutil.which("factornorm") is None, reason="console script not installed")
def test_console_script_help():
    out = subprocess.run(["factornorm", "--help"], capture_output=True, text=True, check=True)
    assert "run" in out.stdout


# ----------------------------------------------------------- exit codes

@pytest.mark.parametrize("cfg", [
    {"experiment": "no-such-thing", "seed": 0},
    {"experiment": "gamma2-table", "seed": "x"},
    {"experiment": "gamma2-table", "seed": 0, "tolerances": {"sdp": -1.0}},
    {"experiment": "gamma2-table", "seed": 0, "tolerances": {"warp": 1.0}},
    {"experiment": "gamma2-table", "seed": 0, "params": {"symbols": ["missing"]}},
    {"experiment": "bound-verify", "seed": 0, "params": {"pairs": [["nope", "exp1xexp1"]]}},
])
def test_config_errors_exit_2(tmp_path, cfg, capsys):
    assert run(tmp_path, write_json(tmp_path, cfg)) == 2
    assert "config error" in capsys.readouterr().err


def test_bad_toml_exit_2(tmp_path):
    p = tmp_path / "bad.toml"
    p.write_text("experiment = \n")
    assert run(tmp_path, p) == 2


def test_missing_file_exit_2(tmp_path):
    assert run(tmp_path, tmp_path / "absent.toml") == 2


def test_failed_row_exit_3(tmp_path):
    cfg = {"experiment": "bound-verify", "seed": 0, "output": {"name": "blowup"},
           "catalog": {"models": {"blowup": [[-1.0, 0.0], [0.0, 1.0]]}},
           "params": {"pairs": [["blowup", "exp1xexp1"], ["id1", "exp1xexp1"]]}}
    assert run(tmp_path, write_json(tmp_path, cfg, "blowup.json")) == 3
    rows = read_rows(tmp_path / "blowup.csv")
    assert rows[0]["status"].startswith("error:")
    assert rows[1]["status"] == "ok"


# ----------------------------------------------------------- configs and catalog

def test_shipped_configs_parse():
    for p in sorted(CONFIGS.iterdir()):
        cfg = load_config(p)
        Catalog(cfg.catalog)


def test_tolerance_defaults_and_override():
    cfg = parse_config({"experiment": "fejer-demo", "seed": 3, "tolerances": {"sdp": 1e-7}})
    assert cfg.tol("sdp") == 1e-7 and cfg.tol("bound") == 1e-4
    with pytest.raises(ConfigError):
        parse_config({"seed": 3})


def test_custom_catalog_entries():
    cat = Catalog(load_config(CONFIGS / "custom-catalog.json").catalog)
    assert cat.weight("slow").l1_norm() == pytest.approx(1.0)
    assert cat.model("upper").boundedFlag
    with pytest.raises(KeyError):
        cat.symbol("nothing")


def test_catalog_bound_pairs_cover_both_regimes():
    cat = Catalog()
    assert len(DEFAULT_BOUND_PAIRS) >= 20
    growth = {m: estimate_growth_bound(cat.model(m)) for m, _ in DEFAULT_BOUND_PAIRS}
    assert any(abs(c - 1) < 1e-9 for c in growth.values())
    assert any(c > 1.5 for c in growth.values())
    for _, w in DEFAULT_BOUND_PAIRS:
        cat.tensor_weight(w)


def test_catalog_hardy_roots_off_circle():
    for h in Catalog().hardy.values():
        c = np.trim_zeros(np.asarray(h.coeffs), "b")
        if len(c) > 1:
            assert np.all(np.abs(np.abs(np.roots(c[::-1])) - 1) >= 0.1)
