"""Request and response schemas for the solver service.

Request models mirror the sections of the CLI JSON config file
(profile, cost, risk, grid, oracle, scenario, sweep, tolerances);
each section knows how to build the core object it describes.
Responses always carry a `status` field: "ok" and "no-trade" are
successful outcomes, everything else names the failure.
"""

import math

import numpy as np
from pydantic import BaseModel, Field, model_validator

from ntzsolver.forecast import ForecastProfile
from ntzsolver.tv_oracle import OracleConfig
from ntzsolver.utility import CostModel

RATIONAL = "Rational"
TABULATED = "Tabulated"


class ProfileConfig(BaseModel):
    kind: str = RATIONAL
    f_inf: float | None = None
    gamma: float | None = None
    knots: list[list[float]] | None = None

    @model_validator(mode="after")
    def check_fields(self):
        if self.kind == RATIONAL:
            for key in ("f_inf", "gamma"):
                if getattr(self, key) is None:
                    raise ValueError(f"Rational profile is missing `{key}`")
        elif self.kind == TABULATED:
            if not self.knots:
                raise ValueError("Tabulated profile is missing `knots`")
        else:
            raise ValueError(f"profile kind must be {RATIONAL} or {TABULATED}")
        return self

    def build(self) -> ForecastProfile:
        if self.kind == RATIONAL:
            return ForecastProfile.rational(self.f_inf, self.gamma)
        return ForecastProfile.tabulated(self.knots)


class CostConfig(BaseModel):
    c: float | None = None
    c_mean: float | None = None
    c_now: float | None = None

    @model_validator(mode="after")
    def check_rates(self):
        if self.c is not None and self.c_mean is not None:
            raise ValueError("give either `c` or `c_mean`, not both")
        if self.c is None and self.c_mean is None:
            raise ValueError("cost config is missing `c` (or `c_mean`)")
        mean = self.c if self.c_mean is None else self.c_mean
        if mean < 0:
            raise ValueError("slippage rate must be non-negative")
        if self.c_now is not None and self.c_now < 0:
            raise ValueError("`c_now` must be non-negative")
        return self

    def build(self) -> CostModel:
        mean = self.c if self.c_mean is None else self.c_mean
        return CostModel(mean, self.c_now)


class RiskConfig(BaseModel):
    k: float = Field(gt=0.0)


class GridConfig(BaseModel):
    dt: float = Field(0.01, gt=0.0)
    horizon: float = Field(50.0, gt=0.0)

    def times(self):
        n_steps = int(round(self.horizon / self.dt))
        return np.arange(n_steps + 1) * self.dt


class OracleSection(BaseModel):
    dt: float = Field(1e-3, gt=0.0)
    horizon: float = Field(50.0, gt=0.0)
    tol: float = Field(1e-10, gt=0.0, le=1e-4)
    max_iter: int = Field(2000, ge=1000)
    terminal_liquidation: bool = True

    def build(self) -> OracleConfig:
        return OracleConfig(
            dt=self.dt,
            horizon=self.horizon,
            tol=self.tol,
            max_iter=self.max_iter,
            terminal_liquidation=self.terminal_liquidation,
        )


class ScenarioConfig(BaseModel):
    kind: str = "MeanReverting"
    schedule: list[list[float]] = Field(default_factory=list)
    rev_rate: float = Field(0.0, ge=0.0)
    rev_target: float | None = None
    rev_vol: float = Field(0.0, ge=0.0)
    seed: int = 0
    dt: float = Field(0.01, gt=0.0)
    steps: int = Field(500, ge=1)


class SweepConfig(BaseModel):
    c_values: list[float] | None = None
    c_min: float = Field(1e-5, gt=0.0)
    c_max: float = Field(1e-3, gt=0.0)
    n_points: int = Field(10, ge=3)
    include_oracle: bool = False
    strict: bool = False

    def costs(self) -> list[float]:
        if self.c_values is not None:
            if len(self.c_values) < 3:
                raise ValueError("sweep needs at least 3 cost points")
            if any(b <= a for a, b in zip(self.c_values, self.c_values[1:])):
                raise ValueError("sweep `c_values` must be strictly increasing")
            return [float(c) for c in self.c_values]
        if self.c_max <= self.c_min:
            raise ValueError("sweep needs c_max > c_min")
        lo, hi = math.log10(self.c_min), math.log10(self.c_max)
        step = (hi - lo) / (self.n_points - 1)
        return [10.0 ** (lo + i * step) for i in range(self.n_points)]


class ToleranceConfig(BaseModel):
    first_trade_abs: float = Field(5e-3, gt=0.0)
    utility_rel: float = Field(1e-3, gt=0.0)
    ntz_abs: float = Field(5e-3, gt=0.0)


class SolveRequest(BaseModel):
    profile: ProfileConfig
    cost: CostConfig
    risk: RiskConfig
    grid: GridConfig = GridConfig()
    p0: float = 0.0


class VerifyRequest(BaseModel):
    profile: ProfileConfig
    cost: CostConfig
    risk: RiskConfig
    oracle: OracleSection = OracleSection()
    tolerances: ToleranceConfig = ToleranceConfig()
    p0: float = 0.0


class SweepRequest(BaseModel):
    profile: ProfileConfig
    risk: RiskConfig
    sweep: SweepConfig = SweepConfig()
    oracle: OracleSection = OracleSection()
    strict: bool = False


class SimulateRequest(BaseModel):
    profile: ProfileConfig
    cost: CostConfig
    risk: RiskConfig
    scenario: ScenarioConfig = ScenarioConfig()
    p0: float = 0.0


class SolveResponse(BaseModel):
    status: str
    error: str | None = None
    solution: dict | None = None
    ntz: dict | None = None
    initial_position: float | None = None
    path_times: list[float] | None = None
    path_positions: list[float] | None = None
    path_utility: dict | None = None


class VerifyResponse(BaseModel):
    status: str
    error: str | None = None
    report: dict | None = None


class SweepResponse(BaseModel):
    status: str
    error: str | None = None
    rows: list[dict] | None = None
    fitted_slope: float | None = None
    fit_stderr: float | None = None
    oracle_slope: float | None = None
    oracle_stderr: float | None = None
    svg: str | None = None


class SimulateResponse(BaseModel):
    status: str
    error: str | None = None
    columns: dict | None = None
    totals: dict | None = None
    svg: str | None = None
