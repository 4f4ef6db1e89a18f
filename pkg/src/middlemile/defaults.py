"""Default radio parameters and cost tables for generated instances."""

from __future__ import annotations

from middlemile.model import CostTables, LinkCost, RadioParams, TowerCost

DEFAULT_RADIO = RadioParams(
    U=100.0,
    R=10000.0,
    HTMIN=10.0,
    HTMAX=35.0,
    R_MP=8000.0,
    BWMAX=90.0,
    U_Omni=100.0,
    R_Omni=6000.0,
    HTOmni=30.0,
    HTOmniSD=10.0,
)

# Integer costs keep greedy/optimum comparisons exact.
DEFAULT_TOWER = TowerCost(
    ((10.0, 100.0), (15.0, 250.0), (20.0, 500.0), (25.0, 900.0), (30.0, 1500.0), (35.0, 2400.0))
)

DEFAULT_ANTENNA = {"PP": 50.0, "MP": 90.0, "Omni": 400.0, "OmniSD": 60.0}

DEFAULT_COSTS = CostTables(tower=DEFAULT_TOWER, link=LinkCost(unit=200.0), antenna=DEFAULT_ANTENNA)

DEFAULT_HEIGHT_STEP = 5.0
