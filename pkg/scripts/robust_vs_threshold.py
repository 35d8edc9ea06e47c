#!/usr/bin/env python3
"""Robust split factor vs. outage threshold for several pathloss gaps.

Prints one row per threshold and one column per gap; '*' marks rows where
the limiting threshold sent the whole surface to the strong UE.
"""
import argparse
from pathlib import Path

from irsnoma.cli import load_config
from irsnoma.splitopt import ANALYTIC, MONTECARLO, McOptions, select_robust, sweep_grid

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default=ROOT / "scenarios" / "table1_robust.json")
    ap.add_argument("--lam", type=float, default=None, help="override the limiting threshold")
    ap.add_argument("--mc-trials", type=int, default=0, help="also run Monte Carlo with this many trials")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    spec = load_config(args.config)
    lam = spec.lam if args.lam is None else args.lam
    gaps, epss = spec.pathloss_gap_db_list, spec.epsilon_db_list
    grids = {ANALYTIC: sweep_grid(spec.scenario, gaps, epss, ANALYTIC)}
    if args.mc_trials:
        grids[MONTECARLO] = sweep_grid(spec.scenario, gaps, epss, MONTECARLO, McOptions(args.mc_trials, args.seed))

    for source, grid in grids.items():
        print(f"\n{source}, lambda = {lam:g}")
        print("eps_dB " + " ".join(f"{g:>8g}" for g in gaps))
        for e in epss:
            cells = []
            for g in gaps:
                c = select_robust(grid[(g, e)], lam, spec.scenario.with_gap(g).weak_ue())
                cells.append(f"{c.alpha:7.4f}{'*' if c.fallback_applied else ' '}")
            print(f"{e:6g} " + " ".join(cells))


if __name__ == "__main__":
    main()
