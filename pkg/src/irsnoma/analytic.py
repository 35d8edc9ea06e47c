"""Gamma-approximation outage analysis for the split-IRS NOMA uplink.

Pipeline: product-Nakagami mean -> coherent (Gamma) and random (complex
Gaussian) sum statistics -> first two moments of the channel power Z_i ->
matched Gamma -> SINR / SNR / interference-cancellation outage.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .model import GammaParams, LinkFading, MomentPair, Scenario, Split
from .specfun import DomainError, log_gamma, reg_inc_beta, reg_lower_gamma

__all__ = [
    "ZERO_MASS",
    "DegenerateDistributionError",
    "ConsistencyError",
    "HatParams",
    "UeOutage",
    "match_gamma",
    "scale_gamma",
    "product_nakagami_mean",
    "coherent_sum_params",
    "gamma_raw_moment",
    "rayleigh_part_moment",
    "channel_power_moments",
    "received_power_params",
    "hat_params",
    "sinr_outage",
    "snr_outage",
    "ic_outage",
    "evaluate_outage",
]

# coherent sums with mu this close to 1 are effectively deterministic
MU_MAX = 1.0 - 1e-9
# SNR-vs-SINR outage inversions up to this size are treated as rounding noise
RECONCILE_TOL = 1e-9


class DegenerateDistributionError(DomainError):
    """Zero or negative variance: no Gamma distribution fits."""


class ConsistencyError(ValueError):
    """Outage inputs that cannot come from one consistent channel model."""


class _ZeroMass:
    """Marker for an empty coherent sum (the sum is identically zero)."""

    def __repr__(self):
        return "ZERO_MASS"


ZERO_MASS = _ZeroMass()


@dataclass(frozen=True)
class HatParams:
    """Gamma parameters of the desired signal and of interference-plus-noise."""

    k_hat_i: float
    theta_hat_i: float
    k_hat_j: float
    theta_hat_j: float


@dataclass(frozen=True)
class UeOutage:
    p_sinr: float
    p_snr: float
    p_ic: float


def match_gamma(moments: MomentPair) -> GammaParams:
    mu = moments.first
    var = moments.second - mu * mu
    if not mu > 0 or not var > 0:
        raise DegenerateDistributionError(
            f"no Gamma fit for first={moments.first!r}, second={moments.second!r} (variance {var!r})"
        )
    return GammaParams(mu * mu / var, var / mu)


def scale_gamma(params: GammaParams, c: float) -> GammaParams:
    if not c > 0:
        raise DomainError(f"scaling constant must be > 0, got {c!r}")
    return GammaParams(params.shape, c * params.scale)


def _m(x) -> float:
    return x.m if isinstance(x, LinkFading) else float(x)


def product_nakagami_mean(m1: LinkFading | float, m2: LinkFading | float) -> float:
    """E{|h_BS,n| |h_i,n|} for independent unit-spread Nakagami magnitudes."""
    a, b = _m(m1), _m(m2)
    if not (a >= 0.5 and b >= 0.5):
        raise DomainError(f"Nakagami m must be >= 0.5, got ({a!r}, {b!r})")
    log_mu = (
        log_gamma(a + 0.5) + log_gamma(b + 0.5) - log_gamma(a) - log_gamma(b) - 0.5 * (math.log(a) + math.log(b))
    )
    return math.exp(log_mu)


def coherent_sum_params(n_i: int, mu_i: float) -> GammaParams | _ZeroMass:
    """Gamma approximation of the sum of n_i phase-aligned magnitude products."""
    if not 0.0 < mu_i < 1.0:
        raise DomainError(f"mu_i must lie in (0, 1), got {mu_i!r}")
    if mu_i > MU_MAX:
        raise DomainError(f"mu_i={mu_i!r} is too close to 1: near-deterministic channel, Gamma shape diverges")
    if n_i < 0:
        raise DomainError(f"n_i must be >= 0, got {n_i!r}")
    if n_i == 0:
        return ZERO_MASS
    one_minus = 1.0 - mu_i * mu_i
    return GammaParams(n_i * mu_i * mu_i / one_minus, one_minus / mu_i)


def gamma_raw_moment(params: GammaParams | _ZeroMass, p: int) -> float:
    """E{Y^p} = Gamma(k+p) theta^p / Gamma(k)."""
    if p not in (1, 2, 3, 4):
        raise DomainError(f"moment order must be 1..4, got {p!r}")
    if params is ZERO_MASS:
        return 0.0
    k, theta = params.shape, params.scale
    return math.exp(log_gamma(k + p) - log_gamma(k) + p * math.log(theta))


def rayleigh_part_moment(n_random: int, p: int) -> float:
    """E{|S|^p} for S ~ CN(0, n_random)."""
    if p not in (2, 4):
        raise DomainError(f"moment order must be 2 or 4, got {p!r}")
    if n_random < 0:
        raise DomainError(f"n_random must be >= 0, got {n_random!r}")
    if n_random == 0:
        return 0.0
    return math.gamma(1.0 + p / 2) * n_random ** (p / 2)


def channel_power_moments(scenario: Scenario, ue_index: int, split: Split) -> MomentPair:
    """First two moments of Z_i, the channel power of UE ``ue_index`` under ``split``."""
    if split.n_elements != scenario.n_elements:
        raise DomainError(f"split covers {split.n_elements} elements, scenario has {scenario.n_elements}")
    mu_i = product_nakagami_mean(scenario.bs_link.fading, scenario.ue_link(ue_index).fading)
    n_i = split.coherent_count(ue_index)
    coherent = coherent_sum_params(n_i, mu_i)
    c2 = gamma_raw_moment(coherent, 2)
    c4 = gamma_raw_moment(coherent, 4)
    r2 = rayleigh_part_moment(scenario.n_elements - n_i, 2)
    r4 = rayleigh_part_moment(scenario.n_elements - n_i, 4)
    g = scenario.link_gain(ue_index)
    return MomentPair(g * (c2 + r2), g * g * (c4 + r4 + 4.0 * c2 * r2))


def received_power_params(scenario: Scenario, ue_index: int, split: Split) -> GammaParams:
    """Gamma approximation of Z_i P_i (mW)."""
    z = match_gamma(channel_power_moments(scenario, ue_index, split))
    return scale_gamma(z, scenario.ue_link(ue_index).tx_power_mw)


def hat_params(p_i: GammaParams, p_j: GammaParams, noise_mw: float) -> HatParams:
    """Desired-signal parameters and the Gamma fit of interference plus constant noise.

    The interferer's shape/scale are adjusted so that the mean grows by the
    noise power while the variance is unchanged.
    """
    mean_j = p_j.shape * p_j.scale
    var_j = p_j.shape * p_j.scale * p_j.scale
    total = mean_j + noise_mw
    return HatParams(p_i.shape, p_i.scale, total * total / var_j, var_j / total)


def sinr_outage(p_i: GammaParams, p_j: GammaParams, noise_mw: float, epsilon: float) -> float:
    """P{Z_i P_i / (Z_j P_j + P_w) <= epsilon} under the Gamma approximations (power-scaled params)."""
    if not epsilon > 0:
        raise DomainError(f"epsilon must be > 0 (linear), got {epsilon!r}")
    if not noise_mw >= 0:
        raise DomainError(f"noise power must be >= 0, got {noise_mw!r}")
    h = hat_params(p_i, p_j, noise_mw)
    num = epsilon * h.theta_hat_j
    return reg_inc_beta(num / (h.theta_hat_i + num), h.k_hat_i, h.k_hat_j)


def snr_outage(p_i: GammaParams, noise_mw: float, epsilon: float) -> float:
    """P{Z_i P_i / P_w <= epsilon}: Gamma CDF at epsilon * P_w."""
    if not epsilon > 0:
        raise DomainError(f"epsilon must be > 0 (linear), got {epsilon!r}")
    if not noise_mw > 0:
        raise DomainError(f"noise power must be > 0, got {noise_mw!r}")
    return reg_lower_gamma(p_i.shape, epsilon * noise_mw / p_i.scale)


def ic_outage(p_out_i: float, p_out_j: float, p_out_snr_i: float) -> float:
    """Outage of UE i under parallel interference cancellation.

    UE i succeeds either directly, or after the partner j is decoded and
    removed, in which case only the noise-limited condition remains.
    Success events of the two UEs are combined as if independent.
    """
    for name, p in (("p_out_i", p_out_i), ("p_out_j", p_out_j), ("p_out_snr_i", p_out_snr_i)):
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"{name} must lie in [0, 1], got {p!r}")
    if p_out_snr_i > p_out_i:
        if p_out_snr_i - p_out_i > RECONCILE_TOL:
            raise ConsistencyError(
                f"SNR outage {p_out_snr_i!r} exceeds SINR outage {p_out_i!r}: inconsistent inputs"
            )
        p_out_i = p_out_snr_i
    succ_i = 1.0 - p_out_i
    succ_j = 1.0 - p_out_j
    succ_snr_i = 1.0 - p_out_snr_i
    p = 1.0 - min(succ_i + succ_j * succ_snr_i, succ_snr_i)
    # exact result lies in [p_out_snr_i, p_out_i]; rounding in 1 - (1 - s) can step outside
    return min(max(p, p_out_snr_i), p_out_i)


def evaluate_outage(scenario: Scenario, split: Split, epsilon: float) -> tuple[UeOutage, UeOutage]:
    """SINR, SNR and IC outage of (UE1, UE2) at linear threshold ``epsilon``.

    SINR <= SNR holds per realization, but the interference-plus-noise
    Gamma fit can put mass below the noise floor when interference is weak,
    so the SINR outage is floored at the SNR outage before IC combining.
    """
    noise = scenario.noise_mw
    g1 = received_power_params(scenario, 1, split)
    g2 = received_power_params(scenario, 2, split)
    snr1 = snr_outage(g1, noise, epsilon)
    snr2 = snr_outage(g2, noise, epsilon)
    sinr1 = max(sinr_outage(g1, g2, noise, epsilon), snr1)
    sinr2 = max(sinr_outage(g2, g1, noise, epsilon), snr2)
    return (
        UeOutage(sinr1, snr1, ic_outage(sinr1, sinr2, snr1)),
        UeOutage(sinr2, snr2, ic_outage(sinr2, sinr1, snr2)),
    )
