"""Command line entry point: JSON experiment config in, CSV sweep table out.

    irsnoma alpha-sweep  --config scenarios/table1.json --output alpha.csv
    irsnoma robust-sweep --config scenarios/table1_robust.json --output robust.csv

Worker threads for Monte Carlo are taken from $IRSNOMA_WORKERS (default: CPU
count); the output bytes do not depend on it.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from .model import BsLink, LinkFading, Scenario, UeLink, alpha_grid
from .specfun import DomainError
from .splitopt import ANALYTIC, DEFAULT_LAMBDA, MONTECARLO, McOptions, select_robust, sweep_grid

ALPHA_SWEEP = "alpha_sweep"
ROBUST_SWEEP = "robust_vs_threshold"

ALPHA_COLUMNS = [
    "gap_db", "epsilon_db", "alpha", "n1", "ue",
    "p_sinr_analytic", "p_snr_analytic", "p_ic_analytic",
    "p_ic_mc", "ci_low", "ci_high", "trials", "seed",
]
ROBUST_COLUMNS = [
    "gap_db", "epsilon_db", "alpha_robust_analytic", "alpha_robust_mc",
    "fallback_analytic", "fallback_mc", "max_ic_outage",
]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentSpec:
    scenario: Scenario
    sweep_kind: str
    epsilon_db_list: tuple[float, ...]
    pathloss_gap_db_list: tuple[float, ...] = (0.0,)
    lam: float = DEFAULT_LAMBDA
    trials: int = 10**6
    seed: int = 1
    sources: tuple[str, ...] = (ANALYTIC, MONTECARLO)

    def __post_init__(self):
        if self.sweep_kind not in (ALPHA_SWEEP, ROBUST_SWEEP):
            raise ConfigError(f"sweep_kind: expected {ALPHA_SWEEP!r} or {ROBUST_SWEEP!r}, got {self.sweep_kind!r}")
        if not self.epsilon_db_list:
            raise ConfigError("epsilon_db: at least one threshold is required")
        if not self.pathloss_gap_db_list:
            raise ConfigError("pathloss_gap_db: at least one gap is required")
        if not self.sources or any(s not in (ANALYTIC, MONTECARLO) for s in self.sources):
            raise ConfigError(f"sources: expected a non-empty subset of ['analytic', 'montecarlo'], got {self.sources!r}")
        if MONTECARLO in self.sources and self.trials < 1:
            raise ConfigError(f"trials: must be >= 1, got {self.trials!r}")
        if not 0.0 <= self.lam <= 1.0:
            raise ConfigError(f"lambda: must lie in [0, 1], got {self.lam!r}")

    @property
    def mc_options(self) -> McOptions:
        return McOptions(trials=self.trials, seed=self.seed)


# --- config parsing -------------------------------------------------------

_MISSING = object()


def _get(obj: dict, key: str, path: str, default=_MISSING):
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected an object")
    if key not in obj:
        if default is _MISSING:
            raise ConfigError(f"{path}.{key}: required field is missing")
        return default
    return obj[key]


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{path}: expected a finite number, got {value!r}")
    return float(value)


def _integer(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    return value


def _number_list(value, path: str) -> tuple[float, ...]:
    if not isinstance(value, list):
        raise ConfigError(f"{path}: expected a list of numbers")
    return tuple(_number(v, f"{path}[{i}]") for i, v in enumerate(value))


def _fading(obj, path: str) -> LinkFading:
    m = _number(_get(obj, "m", path), f"{path}.m")
    try:
        return LinkFading(m)
    except DomainError as exc:
        raise ConfigError(f"{path}.m: {exc}") from exc


def _pathloss(obj, path: str) -> float:
    pl = _number(_get(obj, "pathloss_db", path), f"{path}.pathloss_db")
    if pl > 0:
        raise ConfigError(f"{path}.pathloss_db: must be <= 0 dB, got {pl!r}")
    return pl


def parse_scenario(obj, path: str = "scenario") -> Scenario:
    n = _integer(_get(obj, "n_elements", path), f"{path}.n_elements")
    if n < 1:
        raise ConfigError(f"{path}.n_elements: must be >= 1, got {n}")
    bs = _get(obj, "bs_link", path)
    bs_link = BsLink(_fading(bs, f"{path}.bs_link"), _pathloss(bs, f"{path}.bs_link"))
    ues = _get(obj, "ue", path)
    if not isinstance(ues, list) or len(ues) != 2:
        raise ConfigError(f"{path}.ue: expected a list of exactly two UEs")
    links = []
    for i, ue in enumerate(ues):
        p = f"{path}.ue[{i}]"
        power = _number(_get(ue, "tx_power_dbm", p), f"{p}.tx_power_dbm")
        links.append(UeLink(_fading(ue, p), _pathloss(ue, p), power))
    noise = _number(_get(obj, "noise_power_dbm", path), f"{path}.noise_power_dbm")
    return Scenario(n, bs_link, tuple(links), noise)


def parse_spec(obj) -> ExperimentSpec:
    if not isinstance(obj, dict):
        raise ConfigError("top level: expected an object")
    scenario = parse_scenario(_get(obj, "scenario", "config"), "scenario")
    sources = _get(obj, "sources", "config", [ANALYTIC, MONTECARLO])
    if not isinstance(sources, list) or not sources or any(s not in (ANALYTIC, MONTECARLO) for s in sources):
        raise ConfigError(f"sources: expected a non-empty subset of ['analytic', 'montecarlo'], got {sources!r}")
    trials = _integer(_get(obj, "trials", "config", 10**6), "trials")
    seed = _integer(_get(obj, "seed", "config", 1), "seed")
    kind = _get(obj, "sweep_kind", "config", ALPHA_SWEEP)
    if not isinstance(kind, str):
        raise ConfigError(f"sweep_kind: expected a string, got {kind!r}")
    return ExperimentSpec(
        scenario=scenario,
        sweep_kind=kind,
        epsilon_db_list=_number_list(_get(obj, "epsilon_db", "config"), "epsilon_db"),
        pathloss_gap_db_list=_number_list(_get(obj, "pathloss_gap_db", "config", [0.0]), "pathloss_gap_db"),
        lam=_number(_get(obj, "lambda", "config", DEFAULT_LAMBDA), "lambda"),
        trials=trials,
        seed=seed,
        sources=tuple(s for s in (ANALYTIC, MONTECARLO) if s in sources),
    )


def load_config(path) -> ExperimentSpec:
    text = Path(path).read_text(encoding="utf-8")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        lines = text.splitlines()
        context = lines[exc.lineno - 1] if 0 < exc.lineno <= len(lines) else ""
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg}): {context.strip()}") from exc
    return parse_spec(obj)


# --- sweeps ---------------------------------------------------------------

def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_csv(rows, columns, output) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    data = buf.getvalue()
    if hasattr(output, "write"):
        output.write(data)
    else:
        Path(output).write_text(data, encoding="utf-8")


def _grids(spec: ExperimentSpec):
    gaps, eps = spec.pathloss_gap_db_list, spec.epsilon_db_list
    analytic = sweep_grid(spec.scenario, gaps, eps, ANALYTIC) if ANALYTIC in spec.sources else None
    mc = sweep_grid(spec.scenario, gaps, eps, MONTECARLO, spec.mc_options) if MONTECARLO in spec.sources else None
    return analytic, mc


def alpha_sweep_rows(spec: ExperimentSpec) -> list[list]:
    analytic, mc = _grids(spec)
    has_mc = mc is not None
    out = []
    n_splits = len(alpha_grid(spec.scenario.n_elements))
    for gap in spec.pathloss_gap_db_list:
        for eps in spec.epsilon_db_list:
            a_rows = analytic[(gap, eps)] if analytic else None
            m_rows = mc[(gap, eps)] if mc else None
            for s in range(n_splits):
                split = (a_rows or m_rows)[s].split
                for ue in (1, 2):
                    a = a_rows[s].ue(ue) if a_rows else None
                    ic = m_rows[s].mc[ue - 1][2] if m_rows else None
                    out.append([
                        gap, eps, split.alpha, split.n1, ue,
                        a.p_sinr if a else None, a.p_snr if a else None, a.p_ic if a else None,
                        ic.p_hat if ic else None, ic.ci_low if ic else None, ic.ci_high if ic else None,
                        spec.trials if has_mc else None, spec.seed if has_mc else None,
                    ])
    return out


def run_alpha_sweep(spec: ExperimentSpec, output) -> int:
    if spec.sweep_kind != ALPHA_SWEEP:
        raise ConfigError(f"sweep_kind: alpha sweep requires {ALPHA_SWEEP!r}, got {spec.sweep_kind!r}")
    rows = alpha_sweep_rows(spec)
    _write_csv(rows, ALPHA_COLUMNS, output)
    return len(rows)


def robust_sweep_rows(spec: ExperimentSpec) -> list[list]:
    analytic, mc = _grids(spec)
    out = []
    for gap in spec.pathloss_gap_db_list:
        weak = spec.scenario.with_gap(gap).weak_ue()
        for eps in spec.epsilon_db_list:
            a = select_robust(analytic[(gap, eps)], spec.lam, weak) if analytic else None
            m = select_robust(mc[(gap, eps)], spec.lam, weak) if mc else None
            ref = a or m
            out.append([
                gap, eps, a.alpha if a else None, m.alpha if m else None,
                a.fallback_applied if a else None, m.fallback_applied if m else None,
                ref.max_ic_outage,
            ])
    return out


def run_robust_sweep(spec: ExperimentSpec, output) -> int:
    if spec.sweep_kind != ROBUST_SWEEP:
        raise ConfigError(f"sweep_kind: robust sweep requires {ROBUST_SWEEP!r}, got {spec.sweep_kind!r}")
    rows = robust_sweep_rows(spec)
    _write_csv(rows, ROBUST_COLUMNS, output)
    return len(rows)


# --- entry point ----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="irsnoma", description="Outage sweeps for split-IRS NOMA uplinks.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("alpha-sweep", "outage vs. split factor for each gap and threshold"),
        ("robust-sweep", "robust split factor vs. threshold for each gap"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON experiment file")
        p.add_argument("--output", required=True, help="CSV file to write ('-' for stdout)")
        p.add_argument("--trials", type=int, help="Monte Carlo trials per point")
        p.add_argument("--seed", type=int, help="Monte Carlo seed")
        src = p.add_mutually_exclusive_group()
        src.add_argument("--analytic-only", action="store_true")
        src.add_argument("--mc-only", action="store_true")
    return parser


def apply_overrides(spec: ExperimentSpec, args) -> ExperimentSpec:
    changes = {"sweep_kind": ALPHA_SWEEP if args.command == "alpha-sweep" else ROBUST_SWEEP}
    if args.trials is not None:
        changes["trials"] = args.trials
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.analytic_only:
        changes["sources"] = (ANALYTIC,)
    elif args.mc_only:
        changes["sources"] = (MONTECARLO,)
    return replace(spec, **changes)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = apply_overrides(load_config(args.config), args)
        output = sys.stdout if args.output == "-" else args.output
        run = run_alpha_sweep if args.command == "alpha-sweep" else run_robust_sweep
        n = run(spec, output)
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"irsnoma: error: {exc}", file=sys.stderr)
        return 1
    if output is not sys.stdout:
        print(f"wrote {n} rows to {args.output}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
