"""Split-factor sweeps and the min-max robust split with a limiting threshold."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .analytic import UeOutage, evaluate_outage
from .model import Scenario, Split, alpha_grid, db_to_linear
from .simulator import IC, SINR, SNR, McEstimate, simulate
from .specfun import DomainError

__all__ = [
    "ANALYTIC",
    "MONTECARLO",
    "DEFAULT_LAMBDA",
    "McOptions",
    "SweepRow",
    "RobustChoice",
    "SweepError",
    "sweep",
    "sweep_grid",
    "select_robust",
    "robust_alpha",
]

ANALYTIC = "analytic"
MONTECARLO = "montecarlo"
SOURCES = (ANALYTIC, MONTECARLO)
DEFAULT_LAMBDA = 0.1


class SweepError(RuntimeError):
    """A sweep row failed; the message names the split and threshold."""


@dataclass(frozen=True)
class McOptions:
    trials: int = 10**6
    seed: int = 1
    workers: int | None = None


@dataclass(frozen=True)
class SweepRow:
    split: Split
    epsilon_db: float
    ue1: UeOutage
    ue2: UeOutage
    source: str
    # (sinr, snr, ic) estimates per UE, Monte Carlo rows only
    mc: tuple[tuple[McEstimate, ...], tuple[McEstimate, ...]] | None = None

    def ue(self, index: int) -> UeOutage:
        return self.ue1 if index == 1 else self.ue2

    @property
    def max_ic(self) -> float:
        return max(self.ue1.p_ic, self.ue2.p_ic)


@dataclass(frozen=True)
class RobustChoice:
    alpha: float
    n1: int
    max_ic_outage: float
    fallback_applied: bool
    # min-max minimizer before the limiting-threshold rule
    argmin_n1: int
    argmin_alpha: float


def _check_source(source: str) -> None:
    if source not in SOURCES:
        raise DomainError(f"source must be one of {SOURCES}, got {source!r}")


def _analytic_rows(scenario: Scenario, epsilon_db: float) -> list[SweepRow]:
    eps = db_to_linear(epsilon_db)
    rows = []
    for split in alpha_grid(scenario.n_elements):
        try:
            ue1, ue2 = evaluate_outage(scenario, split, eps)
        except (ValueError, ArithmeticError) as exc:
            raise SweepError(f"analytic evaluation failed at n1={split.n1}, epsilon={epsilon_db} dB: {exc}") from exc
        rows.append(SweepRow(split, epsilon_db, ue1, ue2, ANALYTIC))
    return rows


def _mc_outage(est) -> UeOutage:
    return UeOutage(est[SINR].p_hat, est[SNR].p_hat, est[IC].p_hat)


def sweep_grid(
    scenario: Scenario,
    gaps_db: Sequence[float],
    epsilons_db: Sequence[float],
    source: str,
    mc_options: McOptions | None = None,
) -> dict[tuple[float, float], list[SweepRow]]:
    """Sweeps for every (pathloss gap, threshold) pair, keyed by ``(gap_db, epsilon_db)``.

    Monte Carlo sweeps share one set of channel draws across all pairs and
    splits (common random numbers).
    """
    _check_source(source)
    pairs = [(float(g), float(e)) for g in gaps_db for e in epsilons_db]
    if source == ANALYTIC:
        return {(g, e): _analytic_rows(scenario.with_gap(g), e) for g, e in pairs}
    opts = mc_options or McOptions()
    grid = alpha_grid(scenario.n_elements)
    points = [(scenario.with_gap(g), db_to_linear(e)) for g, e in pairs]
    res = simulate(points, [s.n1 for s in grid], opts.trials, opts.seed, opts.workers)
    out = {}
    for p, (g, e) in enumerate(pairs):
        rows = []
        for s, split in enumerate(grid):
            est = res.estimates(s, p)
            rows.append(SweepRow(split, e, _mc_outage(est[0]), _mc_outage(est[1]), MONTECARLO, est))
        out[(g, e)] = rows
    return out


def sweep(
    scenario: Scenario,
    epsilon_db: float,
    source: str,
    mc_options: McOptions | None = None,
) -> list[SweepRow]:
    """One row per split n1 = 0..N for ``scenario`` as given (no gap applied)."""
    _check_source(source)
    if source == ANALYTIC:
        return _analytic_rows(scenario, float(epsilon_db))
    opts = mc_options or McOptions()
    grid = alpha_grid(scenario.n_elements)
    res = simulate([(scenario, db_to_linear(epsilon_db))], [s.n1 for s in grid], opts.trials, opts.seed, opts.workers)
    rows = []
    for s, split in enumerate(grid):
        est = res.estimates(s, 0)
        rows.append(SweepRow(split, float(epsilon_db), _mc_outage(est[0]), _mc_outage(est[1]), MONTECARLO, est))
    return rows


def select_robust(rows: Sequence[SweepRow], lam: float, weak_ue: int) -> RobustChoice:
    """Min-max split over ``rows`` with the limiting-threshold fallback.

    Ties in max(p_ic) go to the larger n1.  If the weak UE's IC outage at the
    minimizer is not below ``lam``, the whole surface goes to the strong UE.
    """
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"lambda must lie in [0, 1], got {lam!r}")
    if weak_ue not in (1, 2):
        raise DomainError(f"weak_ue must be 1 or 2, got {weak_ue!r}")
    if not rows:
        raise DomainError("no sweep rows")
    rows = sorted(rows, key=lambda r: r.split.n1)
    best = rows[0]
    for row in rows[1:]:
        if row.max_ic <= best.max_ic:
            best = row
    if best.ue(weak_ue).p_ic < lam:
        return RobustChoice(best.split.alpha, best.split.n1, best.max_ic, False, best.split.n1, best.split.alpha)
    strong_n1 = best.split.n_elements if weak_ue == 2 else 0
    target = next((r for r in rows if r.split.n1 == strong_n1), None)
    if target is None:
        raise DomainError(f"sweep rows do not contain the fallback split n1={strong_n1}")
    return RobustChoice(
        target.split.alpha, target.split.n1, target.max_ic, True, best.split.n1, best.split.alpha
    )


def robust_alpha(
    scenario: Scenario,
    epsilon_db: float,
    lam: float = DEFAULT_LAMBDA,
    source: str = ANALYTIC,
    mc_options: McOptions | None = None,
) -> RobustChoice:
    return select_robust(sweep(scenario, epsilon_db, source, mc_options), lam, scenario.weak_ue())
