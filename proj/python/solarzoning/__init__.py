"""Zoning-constrained solar supply curves and capacity expansion."""

from ._core import (
    SOLAR_POWER_DENSITY_W_M2,
    WIND_POWER_DENSITY_W_M2,
    ContractViolation,
    CostAssumptions,
    ParseError,
    ValidationError,
    compare,
    crf,
    developable_area,
    lcoe,
    load_config,
    polygon_area,
    run_scenario,
    site_capacity,
    solver_version,
    supply_curve,
)

__all__ = [
    "SOLAR_POWER_DENSITY_W_M2",
    "WIND_POWER_DENSITY_W_M2",
    "ContractViolation",
    "CostAssumptions",
    "ParseError",
    "ValidationError",
    "compare",
    "crf",
    "developable_area",
    "lcoe",
    "load_config",
    "polygon_area",
    "run_scenario",
    "site_capacity",
    "solver_version",
    "supply_curve",
]
