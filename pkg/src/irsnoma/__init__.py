"""Outage analysis and simulation of IRS-assisted two-user NOMA uplinks with element splitting."""
from .model import (
    BsLink,
    GammaParams,
    LinkFading,
    MomentPair,
    Scenario,
    Split,
    UeLink,
    alpha_grid,
    db_to_linear,
    split_from_alpha,
    table1_scenario,
)
from .specfun import DomainError

__version__ = "0.1.0"

__all__ = [
    "BsLink",
    "DomainError",
    "GammaParams",
    "LinkFading",
    "MomentPair",
    "Scenario",
    "Split",
    "UeLink",
    "alpha_grid",
    "db_to_linear",
    "split_from_alpha",
    "table1_scenario",
]
