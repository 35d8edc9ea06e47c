import copy
import csv
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from irsnoma.cli import ALPHA_COLUMNS, ROBUST_COLUMNS, ConfigError, load_config, main, parse_spec
from irsnoma.model import table1_scenario

ROOT = Path(__file__).resolve().parents[1]
TABLE1 = ROOT / "scenarios" / "table1.json"
ROBUST = ROOT / "scenarios" / "table1_robust.json"

GOLDEN_ALPHA_HEADER = "gap_db,epsilon_db,alpha,n1,ue,p_sinr_analytic,p_snr_analytic,p_ic_analytic,p_ic_mc,ci_low,ci_high,trials,seed"
GOLDEN_ROBUST_HEADER = "gap_db,epsilon_db,alpha_robust_analytic,alpha_robust_mc,fallback_analytic,fallback_mc,max_ic_outage"


def _raw():
    return json.loads(TABLE1.read_text())


def _write(tmp_path, obj, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return p


def _read(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def test_table1_config():
    spec = load_config(TABLE1)
    assert spec.scenario == table1_scenario()
    sc = spec.scenario
    assert (sc.n_elements, sc.bs_link.fading.m, sc.ue[0].fading.m, sc.ue[1].fading.m) == (32, 6, 3, 1.5)
    assert (sc.bs_link.pathloss_db, sc.ue[0].pathloss_db, sc.ue[0].tx_power_dbm, sc.noise_power_dbm) == (-65, -70, 30, -110)
    assert spec.epsilon_db_list == (1, 5, 10) and spec.pathloss_gap_db_list == (0, 5, 10)


def test_defaults_applied():
    raw = _raw()
    for key in ("lambda", "trials", "seed", "sources", "pathloss_gap_db"):
        raw.pop(key)
    spec = parse_spec(raw)
    assert (spec.lam, spec.trials, spec.seed, spec.sources) == (0.1, 10**6, 1, ("analytic", "montecarlo"))


def test_missing_noise_named():
    raw = _raw()
    del raw["scenario"]["noise_power_dbm"]
    with pytest.raises(ConfigError, match="noise_power_dbm"):
        parse_spec(raw)


def test_nakagami_bound_rejected():
    raw = _raw()
    raw["scenario"]["ue"][1]["m"] = 0.3
    with pytest.raises(ValueError, match=r"ue\[1\]"):
        parse_spec(raw)


@pytest.mark.parametrize(
    "mutate, field",
    [
        (lambda r: r.update(epsilon_db=[]), "epsilon_db"),
        (lambda r: r.update(trials=0), "trials"),
        (lambda r: r.update(sources=["oracle"]), "sources"),
        (lambda r: r.update({"lambda": 2}), "lambda"),
        (lambda r: r["scenario"].update(n_elements=0), "n_elements"),
        (lambda r: r["scenario"]["bs_link"].update(pathloss_db="loud"), "bs_link.pathloss_db"),
    ],
)
def test_validation_names_field(mutate, field):
    raw = copy.deepcopy(_raw())
    mutate(raw)
    with pytest.raises(ConfigError, match=field.replace(".", r"\.")):
        parse_spec(raw)


def test_json_error_has_line_context(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "scenario": {\n    "n_elements": 32,,\n  }\n}\n')
    with pytest.raises(ConfigError) as exc:
        load_config(p)
    assert ":3:" in str(exc.value) and '"n_elements": 32,,' in str(exc.value)


def test_alpha_sweep_rows_and_determinism(tmp_path):
    raw = _raw()
    raw["trials"] = 20000
    cfg = _write(tmp_path, raw)
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["alpha-sweep", "--config", str(cfg), "--output", str(out1)]) == 0
    assert main(["alpha-sweep", "--config", str(cfg), "--output", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    text = out1.read_text(encoding="utf-8")
    assert text.splitlines()[0] == GOLDEN_ALPHA_HEADER
    rows = _read(out1)
    assert len(rows) == 3 * 3 * 33 * 2
    keys = [(float(r["gap_db"]), float(r["epsilon_db"]), int(r["n1"]), int(r["ue"])) for r in rows]
    assert keys == sorted(keys)
    for r in rows:
        for col in ("p_sinr_analytic", "p_snr_analytic", "p_ic_analytic", "p_ic_mc", "ci_low", "ci_high"):
            assert 0.0 <= float(r[col]) <= 1.0
        assert float(r["ci_low"]) <= float(r["p_ic_mc"]) <= float(r["ci_high"])
        assert float(r["p_snr_analytic"]) <= float(r["p_ic_analytic"]) <= float(r["p_sinr_analytic"])
        assert (r["trials"], r["seed"]) == ("20000", "1")


def test_analytic_only_leaves_mc_empty(tmp_path):
    out = tmp_path / "a.csv"
    assert main(["alpha-sweep", "--config", str(TABLE1), "--output", str(out), "--analytic-only"]) == 0
    rows = _read(out)
    assert len(rows) == 594
    assert all(r[c] == "" for r in rows for c in ("p_ic_mc", "ci_low", "ci_high", "trials", "seed"))


def test_mc_only_and_overrides(tmp_path):
    out = tmp_path / "m.csv"
    args = ["alpha-sweep", "--config", str(TABLE1), "--output", str(out), "--mc-only", "--trials", "5000", "--seed", "9"]
    assert main(args) == 0
    rows = _read(out)
    assert all(r["p_ic_analytic"] == "" and r["trials"] == "5000" and r["seed"] == "9" for r in rows)


def test_robust_sweep_shape(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["robust-sweep", "--config", str(ROBUST), "--output", str(out), "--analytic-only"]) == 0
    assert out.read_text(encoding="utf-8").splitlines()[0] == GOLDEN_ROBUST_HEADER
    rows = _read(out)
    assert len(rows) == 7 * 26
    assert [float(r["epsilon_db"]) for r in rows[:26]] == list(range(-10, 16))
    assert all(r["alpha_robust_mc"] == "" and r["fallback_mc"] == "" for r in rows)
    assert all(0.0 <= float(r["max_ic_outage"]) <= 1.0 for r in rows)


def test_robust_lambda_zero_all_fallback(tmp_path):
    raw = json.loads(ROBUST.read_text())
    raw["lambda"] = 0
    raw["trials"] = 8192
    cfg = _write(tmp_path, raw)
    out = tmp_path / "r.csv"
    assert main(["robust-sweep", "--config", str(cfg), "--output", str(out)]) == 0
    rows = _read(out)
    assert all(r["fallback_analytic"] == "true" and r["fallback_mc"] == "true" for r in rows)
    assert all(float(r["alpha_robust_analytic"]) == 1.0 == float(r["alpha_robust_mc"]) for r in rows)


def test_column_constants_match_golden():
    assert ",".join(ALPHA_COLUMNS) == GOLDEN_ALPHA_HEADER
    assert ",".join(ROBUST_COLUMNS) == GOLDEN_ROBUST_HEADER


def test_worker_env_does_not_change_bytes(tmp_path):
    raw = _raw()
    raw["trials"] = 3 * 8192 + 5
    raw["epsilon_db"] = [5]
    raw["pathloss_gap_db"] = [0]
    cfg = _write(tmp_path, raw)
    outs = []
    for workers in ("1", "3"):
        out = tmp_path / f"w{workers}.csv"
        env = dict(os.environ, IRSNOMA_WORKERS=workers)
        proc = subprocess.run(
            [sys.executable, "-m", "irsnoma", "alpha-sweep", "--config", str(cfg), "--output", str(out)],
            env=env, capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_error_exit_codes(tmp_path, capsys):
    assert main(["alpha-sweep", "--config", str(tmp_path / "nope.json"), "--output", "-"]) == 1
    assert "irsnoma: error:" in capsys.readouterr().err
    raw = _raw()
    raw["scenario"]["ue"][0]["m"] = 0.3
    assert main(["alpha-sweep", "--config", str(_write(tmp_path, raw)), "--output", "-"]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["alpha-sweep", "--config", str(TABLE1), "--output", "-", "--analytic-only", "--mc-only"])
    assert exc.value.code != 0


def test_stdout_output(capsys):
    assert main(["robust-sweep", "--config", str(ROBUST), "--output", "-", "--analytic-only"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == GOLDEN_ROBUST_HEADER and len(lines) == 183


@pytest.mark.slow
def test_robust_sources_agree_full_grid(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["robust-sweep", "--config", str(ROBUST), "--output", str(out)]) == 0
    bad = [
        (r["gap_db"], r["epsilon_db"], r["alpha_robust_analytic"], r["alpha_robust_mc"])
        for r in _read(out)
        if float(r["max_ic_outage"]) > 1e-3
        and abs(float(r["alpha_robust_analytic"]) - float(r["alpha_robust_mc"])) > 2 / 32 + 1e-12
    ]
    assert not bad, f"analytic/MC robust alpha differ by more than 2/N at {bad}"
