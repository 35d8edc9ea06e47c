#!/usr/bin/env python3
"""Channel-power moments: closed form vs. simulation.

The closed form treats the randomly combined part as complex Gaussian, so its
fourth moment is 2M^2.  For a finite sum of M unit-power Nakagami products
the exact value is 2M^2 + M(E|x|^4 - 2) with E|x|^4 = (1 + 1/m_BS)(1 + 1/m_h).
The third column shows the z-score after adding that correction.
"""
import argparse

from irsnoma.analytic import channel_power_moments
from irsnoma.model import Split, table1_scenario
from irsnoma.simulator import simulate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=10**6)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    sc = table1_scenario()
    n = sc.n_elements
    splits = [0, 8, 16, 24, 32]
    res = simulate([(sc, 1.0)], splits, args.trials, args.seed)
    print("n1 UE   z(mean)  z(2nd)  z(2nd, corrected)")
    for s, n1 in enumerate(splits):
        for ue in (1, 2):
            mean, se1, m2, se2 = res.sample_moments(s, ue, sc)
            ref = channel_power_moments(sc, ue, Split.of(n1, n))
            m_rand = n - (n1 if ue == 1 else n - n1)
            kurt = (1 + 1 / sc.bs_link.fading.m) * (1 + 1 / sc.ue_link(ue).fading.m)
            fix = sc.link_gain(ue) ** 2 * m_rand * (kurt - 2)
            print(
                f"{n1:2d}  {ue}  {(mean - ref.first) / se1:8.2f} {(m2 - ref.second) / se2:7.2f}"
                f" {(m2 - ref.second - fix) / se2:10.2f}"
            )


if __name__ == "__main__":
    main()
