"""Position simulation against an evolving forecast.

Each step re-gauges the problem: the current forecast is treated as a
fresh profile starting now (t0 = 0), its no-trade zone is recomputed,
and the position is clamped into the zone. Alpha accrues at the current
profile's instantaneous rate, risk at k P^2, and slippage at the
immediate rate c_now per unit traded. Forecast revisions follow either a
deterministic schedule of (time, f_inf, gamma) overrides or a
mean-reverting diffusion of f_inf driven by the deterministic stream in
the rng module, so identical seeds give bit-identical records.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ntzsolver.closed_form import NoTradeZone, initial_trade, ntz_bounds
from ntzsolver.errors import NotConcave
from ntzsolver.forecast import (
    RATIONAL,
    ForecastProfile,
    eval_forecast_rate,
    forecast_limit,
)
from ntzsolver.rng import Rng
from ntzsolver.utility import CostModel

DETERMINISTIC = "Deterministic"
MEAN_REVERTING = "MeanReverting"

SIM_CSV_HEADER = "t,f_inf,ntz_low,ntz_high,position,trade,step_cost"


@dataclass
class RevisionScenario:
    """How the forecast evolves during a simulation.

    Deterministic: schedule entries (time, f_inf, gamma) take effect from
    their time onward; an empty schedule holds the initial profile fixed.
    MeanReverting: d f_inf = rev_rate (rev_target - f_inf) dt
    + rev_vol sqrt(dt) xi with gamma held fixed; requires a rational
    initial profile.
    """

    kind: str = DETERMINISTIC
    schedule: list = field(default_factory=list)
    rev_rate: float = 0.0
    rev_target: float = 0.0
    rev_vol: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in (DETERMINISTIC, MEAN_REVERTING):
            raise ValueError(f"unknown scenario kind {self.kind!r}")
        if self.rev_rate < 0:
            raise ValueError("rev_rate must be non-negative")
        if self.rev_vol < 0:
            raise ValueError("rev_vol must be non-negative")
        entries = [(float(t), float(fi), float(g)) for t, fi, g in self.schedule]
        if any(g <= 0 for _, _, g in entries):
            raise ValueError("schedule gamma values must be positive")
        if any(b[0] < a[0] for a, b in zip(entries, entries[1:])):
            raise ValueError("schedule times must be non-decreasing")
        self.schedule = entries
        self.seed = int(self.seed)


@dataclass
class SimulationRecord:
    """Per-step trace plus aggregate accounting for one simulated run."""

    times: np.ndarray
    f_inf: np.ndarray
    ntz_low: np.ndarray
    ntz_high: np.ndarray
    position: np.ndarray
    trade: np.ndarray
    step_cost: np.ndarray
    gross_alpha: float
    total_slippage: float
    risk_penalty: float
    trade_count: int
    turnover: float
    status: str = "ok"

    def totals(self) -> dict:
        return {
            "gross_alpha": self.gross_alpha,
            "total_slippage": self.total_slippage,
            "risk_penalty": self.risk_penalty,
            "trade_count": self.trade_count,
            "turnover": self.turnover,
            "status": self.status,
        }

    def write_csv(self, fh) -> None:
        fh.write(SIM_CSV_HEADER + "\n")
        for row in zip(
            self.times,
            self.f_inf,
            self.ntz_low,
            self.ntz_high,
            self.position,
            self.trade,
            self.step_cost,
        ):
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def gauged_ntz(profile: ForecastProfile, cost: CostModel, k: float) -> NoTradeZone:
    """No-trade zone of the current forecast gauged to start now (t0 = 0)."""
    return ntz_bounds(profile, cost, k)


def run_simulation(
    scenario: RevisionScenario,
    profile: ForecastProfile,
    p0: float,
    cost: CostModel,
    k: float,
    dt: float,
    steps: int,
) -> SimulationRecord:
    """Simulate a position driven by the evolving no-trade zone.

    Per step: revise the forecast, re-gauge the zone, clamp the position
    into it, then accrue alpha, risk, and the immediate-execution cost of
    the trade. An unsupported profile shape mid-run halts the simulation
    and returns the partial record with a non-ok status.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if steps < 1:
        raise ValueError("steps must be at least 1")
    mean_reverting = scenario.kind == MEAN_REVERTING
    if mean_reverting and profile.kind != RATIONAL:
        raise ValueError("mean-reverting revisions require a rational profile")

    rng = Rng(scenario.seed)
    current = profile
    f_inf = profile.f_inf if profile.kind == RATIONAL else forecast_limit(profile)
    gamma = profile.gamma if profile.kind == RATIONAL else None
    position = float(p0)
    sched = scenario.schedule
    si = 0

    cols = {name: [] for name in ("t", "f", "lo", "hi", "pos", "tr", "cost")}
    alpha = slippage = risk = turnover = 0.0
    trade_count = 0
    status = "ok"

    for step in range(steps):
        t0 = step * dt
        if mean_reverting:
            shock = rng.normal()
            f_inf = (
                f_inf
                + scenario.rev_rate * (scenario.rev_target - f_inf) * dt
                + scenario.rev_vol * math.sqrt(dt) * shock
            )
            current = ForecastProfile.rational(f_inf, gamma)
        else:
            revised = False
            while si < len(sched) and sched[si][0] <= t0:
                _, f_inf, gamma = sched[si]
                si += 1
                revised = True
            if revised:
                current = ForecastProfile.rational(f_inf, gamma)
        try:
            zone = gauged_ntz(current, cost, k)
        except NotConcave:
            status = "not-concave"
            break
        trade = initial_trade(position, zone)
        position += trade
        step_cost = cost.c_now * abs(trade)
        alpha += eval_forecast_rate(current, 0.0) * position * dt
        risk += k * position * position * dt
        slippage += step_cost
        if trade != 0.0:
            trade_count += 1
            turnover += abs(trade)
        cols["t"].append(t0)
        cols["f"].append(f_inf)
        cols["lo"].append(zone.low)
        cols["hi"].append(zone.high)
        cols["pos"].append(position)
        cols["tr"].append(trade)
        cols["cost"].append(step_cost)

    return SimulationRecord(
        times=np.array(cols["t"]),
        f_inf=np.array(cols["f"]),
        ntz_low=np.array(cols["lo"]),
        ntz_high=np.array(cols["hi"]),
        position=np.array(cols["pos"]),
        trade=np.array(cols["tr"]),
        step_cost=np.array(cols["cost"]),
        gross_alpha=alpha,
        total_slippage=slippage,
        risk_penalty=risk,
        trade_count=trade_count,
        turnover=turnover,
        status=status,
    )
