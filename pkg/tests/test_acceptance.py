"""Acceptance gate.  Each test records one PASS/FAIL line (printed in the
terminal summary) before asserting, so the full report survives failures."""
import time

import numpy as np
import pytest
from scipy import stats

from irsnoma.analytic import channel_power_moments, evaluate_outage, match_gamma, received_power_params
from irsnoma.model import BsLink, LinkFading, MomentPair, Scenario, Split, UeLink, db_to_linear
from irsnoma.simulator import IC, SINR, SNR, estimate_outage, realize_and_measure, sample_channel_powers, simulate, trial_outcome
from irsnoma.specfun import reg_inc_beta, reg_lower_gamma
from irsnoma.splitopt import ANALYTIC, MONTECARLO, McOptions, select_robust, sweep, sweep_grid
from conftest import ACCEPTANCE_LINES
from oracles import inc_beta_quad, lower_gamma_quad

pytestmark = pytest.mark.slow


def _report(n, ok, detail):
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'} AC{n}: {detail}")
    return ok


def test_ac1_moment_matching_exact():
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(10**4):
        mean = 10 ** rng.uniform(-12, 3)
        var = mean * mean * 10 ** rng.uniform(-3, 3)
        pair = MomentPair(mean, mean * mean + var)
        rec = match_gamma(pair).moments()
        worst = max(worst, abs(rec.first / pair.first - 1), abs(rec.second / pair.second - 1))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-12 and dt < 1.0
    assert _report(1, ok, f"max relative moment error {worst:.2e} (<= 1e-12), {dt:.2f} s (< 1 s)")


def test_ac2_special_function_accuracy():
    rng = np.random.default_rng(102)
    t0 = time.perf_counter()
    g_err = b_err = 0.0
    for _ in range(1000):
        k = rng.uniform(0.5, 150)
        x = rng.uniform(0, 5 * k)
        g_err = max(g_err, abs(reg_lower_gamma(k, x) - lower_gamma_quad(k, x)))
    for _ in range(1000):
        a, b, x = rng.uniform(0.5, 100), rng.uniform(0.5, 100), rng.uniform()
        b_err = max(b_err, abs(reg_inc_beta(x, a, b) - inc_beta_quad(x, a, b)))
    dt = time.perf_counter() - t0
    ok = g_err <= 1e-8 and b_err <= 1e-8 and dt < 30
    assert _report(2, ok, f"gamma {g_err:.1e}, beta {b_err:.1e} vs quadrature (<= 1e-8), {dt:.1f} s (< 30 s)")


def test_ac3_closed_form_moments(table1):
    splits = [0, 8, 16, 24, 32]
    res = simulate([(table1, 1.0)], splits, 10**7, seed=103)
    worst, where = 0.0, None
    for s, n1 in enumerate(splits):
        split = Split.of(n1, 32)
        for ue in (1, 2):
            mean, se1, m2, se2 = res.sample_moments(s, ue, table1)
            ref = channel_power_moments(table1, ue, split)
            for name, z in (("mean", abs(mean - ref.first) / se1), ("2nd", abs(m2 - ref.second) / se2)):
                if z > worst:
                    worst, where = z, f"n1={n1} UE{ue} {name}"
    ok = worst <= 3.0
    assert _report(3, ok, f"worst |analytic - sample| = {worst:.2f} SE at {where} (<= 3 SE, 1e7 trials)")


def test_ac4_gamma_fit_ks(table1):
    split = Split.of(32, 32)
    z1, _ = sample_channel_powers(table1, split, 10**5, seed=104)
    g = received_power_params(table1, 1, split)
    ks = stats.kstest(z1 * table1.ue[0].tx_power_mw, stats.gamma(g.shape, scale=g.scale).cdf).statistic
    assert _report(4, ks <= 0.02, f"KS distance {ks:.4f} (<= 0.02, 1e5 trials)")


def test_ac5_strong_ue_agreement(table1):
    ana = sweep(table1, 5.0, ANALYTIC)
    mc = sweep(table1, 5.0, MONTECARLO, McOptions(trials=10**6, seed=105))
    worst, at = 0.0, None
    for a, m in zip(ana, mc):
        strong = 1 if m.ue1.p_ic <= m.ue2.p_ic else 2
        d = abs(a.ue(strong).p_ic - m.ue(strong).p_ic)
        if d >= worst:
            worst, at = d, (a.split.n1, strong)
    assert _report(5, worst <= 0.03, f"worst strong-UE |p_ic analytic - mc| = {worst:.4f} at n1={at[0]} UE{at[1]} (<= 0.03)")


def test_ac6_boost_one_ue(table1):
    details, ok = [], True
    for eps_db in (5.0, 10.0):
        eps = db_to_linear(eps_db)
        for source in ("analytic", "mc"):
            if source == "analytic":
                full = evaluate_outage(table1, Split.of(32, 32), eps)[0].p_ic
                half = evaluate_outage(table1, Split.of(16, 32), eps)[0].p_ic
            else:
                full = estimate_outage(table1, Split.of(32, 32), eps, 10**6, seed=106)[0][IC].p_hat
                half = estimate_outage(table1, Split.of(16, 32), eps, 10**6, seed=106)[0][IC].p_hat
            ok &= full < half
            details.append(f"{source}@{eps_db:g}dB {full:.4f}<{half:.4f}")
    assert _report(6, ok, "UE1 p_ic(alpha=1) < p_ic(alpha=0.5): " + ", ".join(details))


def test_ac7_split_moves_toward_weak_ue(table1):
    sc = table1.with_gap(10.0)
    a = select_robust(sweep(sc, 1.0, ANALYTIC), 0.1, sc.weak_ue())
    m = select_robust(sweep(sc, 1.0, MONTECARLO, McOptions(trials=10**6, seed=107)), 0.1, sc.weak_ue())
    ok = a.argmin_alpha < 0.5 and m.argmin_alpha < 0.5
    assert _report(
        7, ok, f"10 dB gap, 1 dB: min-max alpha analytic {a.argmin_alpha:.4f}, mc {m.argmin_alpha:.4f} (< 0.5 required)"
    )


def test_ac8_robust_cross_validation(table1):
    gaps, epss = [0.0, 10.0, 20.0], [0.0, 5.0, 10.0]
    ana = sweep_grid(table1, gaps, epss, ANALYTIC)
    mc = sweep_grid(table1, gaps, epss, MONTECARLO, McOptions(trials=10**6, seed=108))
    bad = []
    for key in ana:
        weak = table1.with_gap(key[0]).weak_ue()
        ca, cm = select_robust(ana[key], 0.1, weak), select_robust(mc[key], 0.1, weak)
        if ca.fallback_applied != cm.fallback_applied:
            bad.append(f"{key} fallback {ca.fallback_applied}/{cm.fallback_applied}")
        elif max(ca.max_ic_outage, cm.max_ic_outage) > 1e-3 and abs(ca.n1 - cm.n1) > 2:
            bad.append(f"{key} n1 {ca.n1}/{cm.n1}")
    assert _report(8, not bad, f"9 (gap, eps) points, mismatches: {bad or 'none'} (alpha within 2/N, flags exact)")


def _random_scenario(rng):
    ue = tuple(
        UeLink(LinkFading(rng.uniform(0.5, 8)), -rng.uniform(60, 90), rng.uniform(10, 35)) for _ in range(2)
    )
    return Scenario(int(rng.integers(1, 65)), BsLink(LinkFading(rng.uniform(0.5, 8)), -rng.uniform(50, 75)), ue, -rng.uniform(95, 120))


def test_ac9_simulator_invariants():
    rng = np.random.default_rng(109)
    t0 = time.perf_counter()
    failures = []
    for c in range(20):
        sc = _random_scenario(rng)
        eps = db_to_linear(rng.uniform(-10, 20))
        split = Split.of(int(rng.integers(0, sc.n_elements + 1)), sc.n_elements)
        trial_rng = np.random.default_rng(c)
        for _ in range(200):
            z1, z2 = realize_and_measure(sc, split, trial_rng)
            out = trial_outcome(z1, z2, sc, eps)
            for i in range(2):
                if out.snr[i] < out.sinr[i] or (out.ic_success[i] and not out.snr[i] > eps):
                    failures.append(f"cfg{c} per-trial")
        r1 = simulate([(sc, eps)], [split.n1], 3 * 8192 + 11, seed=c, workers=1)
        r3 = simulate([(sc, eps)], [split.n1], 3 * 8192 + 11, seed=c, workers=3)
        if not np.array_equal(r1.counts, r3.counts):
            failures.append(f"cfg{c} workers")
        k = r1.counts[0, 0]
        if np.any(k[:, SNR] > k[:, IC]) or np.any(k[:, IC] > k[:, SINR]):
            failures.append(f"cfg{c} ordering")
    dt = time.perf_counter() - t0
    ok = not failures and dt < 300
    assert _report(9, ok, f"20 random configs, violations: {failures or 'none'}, {dt:.1f} s (< 300 s)")


def test_ac10_throughput(table1):
    t0 = time.perf_counter()
    simulate([(table1, db_to_linear(5.0))], list(range(33)), 10**6, seed=110)
    dt = time.perf_counter() - t0
    assert _report(10, dt < 60, f"1e6 trials, N=32, all 33 splits: {dt:.1f} s (< 60 s)")
