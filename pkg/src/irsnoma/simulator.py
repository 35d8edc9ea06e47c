"""Monte Carlo ground truth for the split-IRS NOMA uplink.

Trials are grouped into fixed-size blocks; block ``b`` draws from a Philox
stream keyed by ``SeedSequence(seed, spawn_key=(b,))``.  Blocks are
independent, so any number of workers produces identical counts.

One block of channel draws is evaluated for every requested split at once:
UE1 owns elements ``[0, n1)`` and UE2 owns ``[n1, N)``, so the coherent and
randomly combined sums of each UE are differences of prefix sums over the
element axis.  ``realize_and_measure`` keeps the literal per-element phase
computation for single trials.  All (scenario, threshold) points that share
the fading parameters reuse the same draws, since pathloss, power and noise
only rescale the normalized channel power.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats

from .model import LinkFading, Scenario, Split
from .specfun import DomainError

__all__ = [
    "BLOCK_TRIALS",
    "WORKERS_ENV",
    "ChannelRealization",
    "TrialOutcome",
    "McEstimate",
    "SimulationResult",
    "sample_nakagami",
    "draw_realization",
    "phase_vector",
    "realize_and_measure",
    "trial_outcome",
    "simulate",
    "estimate_outage",
    "sample_channel_powers",
    "default_workers",
]

BLOCK_TRIALS = 8192
WORKERS_ENV = "IRSNOMA_WORKERS"
_Z95 = 1.959963984540054

# event axis of the count array
SINR, SNR, IC = 0, 1, 2


@dataclass(frozen=True)
class ChannelRealization:
    bs_elements: np.ndarray
    ue_elements: tuple[np.ndarray, np.ndarray]


@dataclass(frozen=True)
class TrialOutcome:
    sinr: tuple[float, float]
    snr: tuple[float, float]
    ic_success: tuple[bool, bool]


@dataclass(frozen=True)
class McEstimate:
    """Empirical outage fraction with a 95% confidence interval."""

    p_hat: float
    ci_low: float
    ci_high: float
    trials: int

    @classmethod
    def from_count(cls, failures: int, trials: int) -> McEstimate:
        if trials < 1:
            raise DomainError(f"trials must be >= 1, got {trials!r}")
        k = int(failures)
        p = k / trials
        if k < 10 or trials - k < 10:
            # Clopper-Pearson where the normal approximation breaks down
            lo = 0.0 if k == 0 else float(stats.beta.ppf(0.025, k, trials - k + 1))
            hi = 1.0 if k == trials else float(stats.beta.ppf(0.975, k + 1, trials - k))
        else:
            half = _Z95 * math.sqrt(p * (1.0 - p) / trials)
            lo, hi = p - half, p + half
        return cls(p, max(0.0, min(lo, p)), min(1.0, max(hi, p)), trials)


def _shape(m) -> float:
    return m.m if isinstance(m, LinkFading) else float(m)


def sample_nakagami(m: LinkFading | float, rng: np.random.Generator, size=None):
    """Nakagami(m, 1) magnitudes as the root of Gamma(m, 1/m) variates."""
    shape = _shape(m)
    if not shape >= 0.5:
        raise DomainError(f"Nakagami m must be >= 0.5, got {shape!r}")
    return np.sqrt(rng.gamma(shape, 1.0 / shape, size))


def _complex_coeffs(m, rng, size):
    mag = sample_nakagami(m, rng, size)
    phase = rng.uniform(0.0, 2.0 * np.pi, size)
    return mag * np.exp(1j * phase)


def draw_realization(scenario: Scenario, rng: np.random.Generator) -> ChannelRealization:
    n = scenario.n_elements
    hb = _complex_coeffs(scenario.bs_link.fading, rng, n)
    h1 = _complex_coeffs(scenario.ue[0].fading, rng, n)
    h2 = _complex_coeffs(scenario.ue[1].fading, rng, n)
    return ChannelRealization(hb, (h1, h2))


def phase_vector(realization: ChannelRealization, split: Split) -> np.ndarray:
    """Element phases that co-phase each UE's cascaded channel on its own elements."""
    hb = realization.bs_elements
    h1, h2 = realization.ue_elements
    owner = np.where(np.arange(hb.size) < split.n1, 0, 1)
    cascade = np.where(owner == 0, hb * h1, hb * h2)
    return -np.angle(cascade)


def realize_and_measure(scenario: Scenario, split: Split, rng: np.random.Generator) -> tuple[float, float]:
    """One channel draw; returns (Z_1, Z_2) under the shared phase configuration."""
    if split.n_elements != scenario.n_elements:
        raise DomainError(f"split covers {split.n_elements} elements, scenario has {scenario.n_elements}")
    real = draw_realization(scenario, rng)
    rot = np.exp(1j * phase_vector(real, split))
    out = []
    for i, h in enumerate(real.ue_elements, start=1):
        s = np.sum(rot * real.bs_elements * h)
        out.append(scenario.link_gain(i) * abs(s) ** 2)
    return out[0], out[1]


def trial_outcome(z1: float, z2: float, scenario: Scenario, epsilon: float) -> TrialOutcome:
    r1 = z1 * scenario.ue[0].tx_power_mw
    r2 = z2 * scenario.ue[1].tx_power_mw
    pw = scenario.noise_mw
    sinr = (r1 / (r2 + pw), r2 / (r1 + pw))
    snr = (r1 / pw, r2 / pw)
    first = (sinr[0] > epsilon, sinr[1] > epsilon)
    ic = (
        first[0] or (first[1] and snr[0] > epsilon),
        first[1] or (first[0] and snr[1] > epsilon),
    )
    return TrialOutcome(sinr, snr, ic)


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw:
        n = int(raw)
        if n < 1:
            raise DomainError(f"{WORKERS_ENV} must be >= 1, got {raw!r}")
        return n
    return os.cpu_count() or 1


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def _prefix(x: np.ndarray) -> np.ndarray:
    out = np.zeros((x.shape[0], x.shape[1] + 1), dtype=x.dtype)
    np.cumsum(x, axis=1, out=out[:, 1:])
    return out


def _normalized_gains(rng, trials, fading_key, n1_values):
    """|S_1|^2 and |S_2|^2 (no pathloss) for each trial and split, shape (trials, splits).

    With phi_n = -arg(h_BS,n h_j,n) on UE j's elements, UE i sees
    |h_BS,n||h_i,n| exp(j(psi_i,n - psi_j,n)) there: the BS-link phase cancels
    and only the uniform difference of the two UE-link phases is drawn.
    """
    n, m_bs, m1, m2 = fading_key
    size = (trials, n)
    hb = sample_nakagami(m_bs, rng, size)
    a1 = hb * sample_nakagami(m1, rng, size)
    a2 = hb * sample_nakagami(m2, rng, size)
    delta = rng.uniform(0.0, 2.0 * np.pi, size)
    cos_d, sin_d = np.cos(delta), np.sin(delta)
    own1, own2 = _prefix(a1), _prefix(a2)
    x1 = _prefix(a1 * cos_d + 1j * (a1 * sin_d))
    x2 = _prefix(a2 * cos_d - 1j * (a2 * sin_d))
    idx = np.asarray(n1_values)
    s1 = own1[:, idx] + (x1[:, n:n + 1] - x1[:, idx])
    s2 = (own2[:, n:n + 1] - own2[:, idx]) + x2[:, idx]
    return s1.real ** 2 + s1.imag ** 2, s2.real ** 2 + s2.imag ** 2


@dataclass(frozen=True)
class _Point:
    a1: float
    a2: float
    noise: float
    eps: float


def _count_block(g1, g2, points):
    counts = np.empty((g1.shape[1], len(points), 2, 3), dtype=np.int64)
    for p, pt in enumerate(points):
        r1 = pt.a1 * g1
        r2 = pt.a2 * g2
        sinr1_ok = r1 > pt.eps * (r2 + pt.noise)
        sinr2_ok = r2 > pt.eps * (r1 + pt.noise)
        snr1_ok = r1 > pt.eps * pt.noise
        snr2_ok = r2 > pt.eps * pt.noise
        ic1_ok = sinr1_ok | (sinr2_ok & snr1_ok)
        ic2_ok = sinr2_ok | (sinr1_ok & snr2_ok)
        n = g1.shape[0]
        counts[:, p, 0, SINR] = n - sinr1_ok.sum(axis=0)
        counts[:, p, 0, SNR] = n - snr1_ok.sum(axis=0)
        counts[:, p, 0, IC] = n - ic1_ok.sum(axis=0)
        counts[:, p, 1, SINR] = n - sinr2_ok.sum(axis=0)
        counts[:, p, 1, SNR] = n - snr2_ok.sum(axis=0)
        counts[:, p, 1, IC] = n - ic2_ok.sum(axis=0)
    return counts


def _power_sums(g1, g2):
    out = np.empty((g1.shape[1], 2, 4))
    for u, g in enumerate((g1, g2)):
        q = g.copy()
        for p in range(4):
            out[:, u, p] = q.sum(axis=0)
            if p < 3:
                q *= g
    return out


@dataclass(frozen=True)
class SimulationResult:
    """Outage counts and normalized channel-power sums from one simulation run.

    ``counts[s, p, u, e]`` holds the number of trials where UE ``u+1`` was in
    outage for event ``e`` (SINR, SNR, IC) at split ``n1_values[s]`` and
    point ``p``.  ``power_sums[s, u, q]`` is the sum of ``|S|^(2(q+1))``.
    """

    n1_values: tuple[int, ...]
    points: tuple[tuple[Scenario, float], ...]
    trials: int
    counts: np.ndarray
    power_sums: np.ndarray

    def estimates(self, split_index: int, point_index: int):
        """((sinr, snr, ic) for UE1, (sinr, snr, ic) for UE2) as McEstimate."""
        c = self.counts[split_index, point_index]
        return tuple(
            tuple(McEstimate.from_count(int(c[u, e]), self.trials) for e in (SINR, SNR, IC)) for u in (0, 1)
        )

    def sample_moments(self, split_index: int, ue_index: int, scenario: Scenario):
        """Sample mean and second moment of Z_i with their standard errors."""
        s = self.power_sums[split_index, ue_index - 1] / self.trials
        g = scenario.link_gain(ue_index)
        mean, m2, m4 = g * s[0], g * g * s[1], g ** 4 * s[3]
        n = self.trials
        se1 = math.sqrt(max(m2 - mean * mean, 0.0) / n)
        se2 = math.sqrt(max(m4 - m2 * m2, 0.0) / n)
        return mean, se1, m2, se2


def _run_blocks(fn, n_blocks, workers):
    if workers <= 1 or n_blocks <= 1:
        return [fn(b) for b in range(n_blocks)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n_blocks)))


def simulate(
    points: Sequence[tuple[Scenario, float]],
    n1_values: Sequence[int],
    trials: int,
    seed: int,
    workers: int | None = None,
) -> SimulationResult:
    """Count outage events for every (scenario, linear epsilon) point and split.

    All scenarios must share element count and Nakagami parameters.
    """
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials!r}")
    if not points:
        raise DomainError("at least one (scenario, epsilon) point is required")
    key = points[0][0].fading_key()
    for sc, eps in points:
        if sc.fading_key() != key:
            raise DomainError("all scenarios in one simulation must share N and the fading parameters")
        if not eps > 0:
            raise DomainError(f"epsilon must be > 0 (linear), got {eps!r}")
    n = key[0]
    n1_values = tuple(int(v) for v in n1_values)
    if any(not 0 <= v <= n for v in n1_values):
        raise DomainError(f"split sizes must lie in [0, {n}]")
    pts = [_Point(sc.rx_scale_mw(1), sc.rx_scale_mw(2), sc.noise_mw, float(eps)) for sc, eps in points]
    n_blocks = -(-trials // BLOCK_TRIALS)

    def run(block):
        size = min(BLOCK_TRIALS, trials - block * BLOCK_TRIALS)
        g1, g2 = _normalized_gains(_block_rng(seed, block), size, key, n1_values)
        return _count_block(g1, g2, pts), _power_sums(g1, g2)

    parts = _run_blocks(run, n_blocks, workers or default_workers())
    counts = np.zeros((len(n1_values), len(pts), 2, 3), dtype=np.int64)
    sums = np.zeros((len(n1_values), 2, 4))
    for c, s in parts:
        counts += c
        sums += s
    return SimulationResult(n1_values, tuple((sc, float(e)) for sc, e in points), trials, counts, sums)


def estimate_outage(
    scenario: Scenario,
    split: Split,
    epsilon: float,
    trials: int,
    seed: int,
    workers: int | None = None,
):
    """Per-UE (sinr, snr, ic) McEstimate triples at linear threshold ``epsilon``."""
    if split.n_elements != scenario.n_elements:
        raise DomainError(f"split covers {split.n_elements} elements, scenario has {scenario.n_elements}")
    res = simulate([(scenario, epsilon)], [split.n1], trials, seed, workers)
    return res.estimates(0, 0)


def sample_channel_powers(scenario: Scenario, split: Split, trials: int, seed: int):
    """Per-trial (Z_1, Z_2) arrays drawn from the same block streams as ``simulate``."""
    key = scenario.fading_key()
    z1, z2 = [], []
    for block in range(-(-trials // BLOCK_TRIALS)):
        size = min(BLOCK_TRIALS, trials - block * BLOCK_TRIALS)
        g1, g2 = _normalized_gains(_block_rng(seed, block), size, key, [split.n1])
        z1.append(g1[:, 0])
        z2.append(g2[:, 0])
    return scenario.link_gain(1) * np.concatenate(z1), scenario.link_gain(2) * np.concatenate(z2)
