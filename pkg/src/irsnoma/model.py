"""Domain types, unit conversions and element-split arithmetic.

All power arithmetic downstream of this module is linear (mW for powers,
plain gain factors for pathlosses); dB values live only on the
configuration types below.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .specfun import DomainError

__all__ = [
    "LinkFading",
    "BsLink",
    "UeLink",
    "Scenario",
    "Split",
    "MomentPair",
    "GammaParams",
    "db_to_linear",
    "split_from_alpha",
    "alpha_grid",
    "table1_scenario",
]

# slack for alpha*n products such as (17/32)*32 landing just above an integer
_CEIL_SLACK = 1e-9


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


@dataclass(frozen=True)
class LinkFading:
    """Nakagami-m magnitude distribution with unit spread."""

    m: float

    def __post_init__(self):
        if not (math.isfinite(self.m) and self.m >= 0.5):
            raise DomainError(f"Nakagami m must be >= 0.5, got {self.m!r}")


@dataclass(frozen=True)
class BsLink:
    fading: LinkFading
    pathloss_db: float

    def __post_init__(self):
        _check_pathloss(self.pathloss_db)

    @property
    def gain(self) -> float:
        return db_to_linear(self.pathloss_db)


@dataclass(frozen=True)
class UeLink:
    fading: LinkFading
    pathloss_db: float
    tx_power_dbm: float

    def __post_init__(self):
        _check_pathloss(self.pathloss_db)
        if not math.isfinite(self.tx_power_dbm):
            raise DomainError(f"tx_power_dbm must be finite, got {self.tx_power_dbm!r}")

    @property
    def gain(self) -> float:
        return db_to_linear(self.pathloss_db)

    @property
    def tx_power_mw(self) -> float:
        return db_to_linear(self.tx_power_dbm)


def _check_pathloss(pl_db: float) -> None:
    if not (math.isfinite(pl_db) and pl_db <= 0.0):
        raise DomainError(f"pathloss_db must be finite and <= 0, got {pl_db!r}")


@dataclass(frozen=True)
class Scenario:
    """Physical configuration of the two-UE IRS uplink.

    ``ue[0]`` is UE1 and ``ue[1]`` is UE2; UE indices elsewhere in the
    package are 1-based to match that naming.
    """

    n_elements: int
    bs_link: BsLink
    ue: tuple[UeLink, UeLink]
    noise_power_dbm: float

    def __post_init__(self):
        if isinstance(self.n_elements, bool) or not isinstance(self.n_elements, int) or self.n_elements < 1:
            raise DomainError(f"n_elements must be a positive integer, got {self.n_elements!r}")
        object.__setattr__(self, "ue", tuple(self.ue))
        if len(self.ue) != 2:
            raise DomainError(f"exactly two UEs are supported, got {len(self.ue)}")
        if not math.isfinite(self.noise_power_dbm):
            raise DomainError(f"noise_power_dbm must be finite, got {self.noise_power_dbm!r}")

    def ue_link(self, ue_index: int) -> UeLink:
        if ue_index not in (1, 2):
            raise DomainError(f"ue_index must be 1 or 2, got {ue_index!r}")
        return self.ue[ue_index - 1]

    @property
    def noise_mw(self) -> float:
        return db_to_linear(self.noise_power_dbm)

    def link_gain(self, ue_index: int) -> float:
        """Product of BS-IRS and IRS-UE pathlosses (linear)."""
        return self.bs_link.gain * self.ue_link(ue_index).gain

    def rx_scale_mw(self, ue_index: int) -> float:
        """Received power per unit normalized channel power, l_BS * l_h * P in mW."""
        return self.link_gain(ue_index) * self.ue_link(ue_index).tx_power_mw

    def weak_ue(self) -> int:
        """UE with the smaller l_h * P; UE2 on exact ties."""
        a1 = self.ue[0].gain * self.ue[0].tx_power_mw
        a2 = self.ue[1].gain * self.ue[1].tx_power_mw
        return 1 if a1 < a2 else 2

    def with_gap(self, gap_db: float) -> Scenario:
        """Copy with UE2's IRS pathloss set ``gap_db`` below UE1's."""
        ue2 = replace(self.ue[1], pathloss_db=self.ue[0].pathloss_db - gap_db)
        return replace(self, ue=(self.ue[0], ue2))

    def fading_key(self) -> tuple[int, float, float, float]:
        """Everything the channel draw depends on; scenarios sharing it can share draws."""
        return (self.n_elements, self.bs_link.fading.m, self.ue[0].fading.m, self.ue[1].fading.m)


@dataclass(frozen=True)
class Split:
    n1: int
    n2: int

    def __post_init__(self):
        if self.n1 < 0 or self.n2 < 0 or self.n1 + self.n2 < 1:
            raise DomainError(f"invalid split n1={self.n1}, n2={self.n2}")

    @classmethod
    def of(cls, n1: int, n: int) -> Split:
        if not 0 <= n1 <= n:
            raise DomainError(f"n1={n1} outside [0, {n}]")
        return cls(n1, n - n1)

    @property
    def n_elements(self) -> int:
        return self.n1 + self.n2

    @property
    def alpha(self) -> float:
        return self.n1 / self.n_elements

    def coherent_count(self, ue_index: int) -> int:
        if ue_index == 1:
            return self.n1
        if ue_index == 2:
            return self.n2
        raise DomainError(f"ue_index must be 1 or 2, got {ue_index!r}")


def split_from_alpha(alpha: float, n: int) -> Split:
    """UE1 gets ceil(alpha * n) elements, UE2 the rest."""
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha!r}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n!r}")
    n1 = min(n, max(0, math.ceil(alpha * n - _CEIL_SLACK)))
    return Split.of(n1, n)


def alpha_grid(n: int) -> list[Split]:
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n!r}")
    return [Split.of(n1, n) for n1 in range(n + 1)]


@dataclass(frozen=True)
class MomentPair:
    """First and second raw moments of a non-negative random variable."""

    first: float
    second: float

    def __post_init__(self):
        if not (math.isfinite(self.first) and math.isfinite(self.second)):
            raise DomainError(f"moments must be finite, got {self.first!r}, {self.second!r}")
        if self.first < 0 or self.second < 0:
            raise DomainError("moments of a non-negative variable must be non-negative")

    @property
    def variance(self) -> float:
        return self.second - self.first * self.first


@dataclass(frozen=True)
class GammaParams:
    shape: float
    scale: float

    def __post_init__(self):
        if not (self.shape > 0 and self.scale > 0 and math.isfinite(self.shape) and math.isfinite(self.scale)):
            raise DomainError(f"Gamma shape/scale must be finite and > 0, got ({self.shape!r}, {self.scale!r})")

    @property
    def mean(self) -> float:
        return self.shape * self.scale

    @property
    def second_moment(self) -> float:
        return self.shape * (self.shape + 1.0) * self.scale * self.scale

    def moments(self) -> MomentPair:
        return MomentPair(self.mean, self.second_moment)


def table1_scenario(gap_db: float = 0.0) -> Scenario:
    """Reference scenario: 32 elements, m_BS=6, m_h=(3, 1.5), l_BS=-65 dB, l_h1=-70 dB, 30 dBm, -110 dBm noise."""
    return Scenario(
        n_elements=32,
        bs_link=BsLink(LinkFading(6.0), -65.0),
        ue=(
            UeLink(LinkFading(3.0), -70.0, 30.0),
            UeLink(LinkFading(1.5), -70.0 - gap_db, 30.0),
        ),
        noise_power_dbm=-110.0,
    )
