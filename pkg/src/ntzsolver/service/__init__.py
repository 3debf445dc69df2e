"""HTTP service wrapping the solver package."""

from ntzsolver.service.models import (
    CostConfig,
    GridConfig,
    OracleSection,
    ProfileConfig,
    RiskConfig,
    ScenarioConfig,
    SimulateRequest,
    SimulateResponse,
    SolveRequest,
    SolveResponse,
    SweepConfig,
    SweepRequest,
    SweepResponse,
    ToleranceConfig,
    VerifyRequest,
    VerifyResponse,
)

__all__ = [
    "CostConfig",
    "GridConfig",
    "OracleSection",
    "ProfileConfig",
    "RiskConfig",
    "ScenarioConfig",
    "SimulateRequest",
    "SimulateResponse",
    "SolveRequest",
    "SolveResponse",
    "SweepConfig",
    "SweepRequest",
    "SweepResponse",
    "ToleranceConfig",
    "VerifyRequest",
    "VerifyResponse",
]
