"""Optimal single-security trading under proportional costs and quadratic risk.

Computes closed-form no-trade zones and optimal position paths for concave
forecast profiles, verifies them against an independent discretized path
optimizer, and simulates a position driven by an evolving no-trade zone.
"""

from ntzsolver.forecast import (
    ConvexityClass,
    ForecastProfile,
    classify_profile,
    eval_forecast,
    eval_forecast_rate,
    inverse_legendre,
    legendre_transform,
)
from ntzsolver.utility import (
    CostModel,
    PositionPath,
    UtilityBreakdown,
    read_path_csv,
    utility_by_parts,
    utility_direct,
    write_path_csv,
)
from ntzsolver.closed_form import (
    NoTradeZone,
    PlateauSolution,
    cost_free_target,
    initial_trade,
    ntz_bounds,
    ntz_width,
    optimal_path,
    plateau_utility,
    rational_pstar,
    solve_plateau,
    solve_plateau_time,
)
from ntzsolver.tv_oracle import OracleConfig, estimate_ntz, optimize_path, tv_prox
from ntzsolver.simulator import (
    RevisionScenario,
    SimulationRecord,
    gauged_ntz,
    run_simulation,
)
from ntzsolver.scaling import fit_scaling_exponent

__version__ = "0.1.0"

__all__ = [
    "ConvexityClass",
    "CostModel",
    "ForecastProfile",
    "NoTradeZone",
    "OracleConfig",
    "PlateauSolution",
    "PositionPath",
    "RevisionScenario",
    "SimulationRecord",
    "UtilityBreakdown",
    "classify_profile",
    "cost_free_target",
    "estimate_ntz",
    "eval_forecast",
    "eval_forecast_rate",
    "fit_scaling_exponent",
    "gauged_ntz",
    "initial_trade",
    "inverse_legendre",
    "legendre_transform",
    "ntz_bounds",
    "ntz_width",
    "optimal_path",
    "optimize_path",
    "plateau_utility",
    "rational_pstar",
    "read_path_csv",
    "run_simulation",
    "solve_plateau",
    "solve_plateau_time",
    "tv_prox",
    "utility_by_parts",
    "utility_direct",
    "write_path_csv",
]
