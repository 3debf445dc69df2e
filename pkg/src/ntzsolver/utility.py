"""Mean-variance utility of discretized position paths.

The utility of holding P(t) against a forecast f(t) with slippage c and
risk aversion k is

    U[P] = integral of (fdot P - c |Pdot| - k P^2) dt.

Positions are piecewise constant between grid points: P_i is held on
[t_i, t_{i+1}) and trades happen instantaneously at grid times, so the
|Pdot| integral is an exact sum of |delta P| and the continuous-variation
part is zero. Quadrature convention (shared by both utility forms so they
stay algebraically identical):

* alpha term: sum of P_i * (f(t_{i+1}) - f(t_i)), the exact integral of
  fdot P for piecewise-constant P;
* risk term: left-Riemann sum of k P_i^2 over the same intervals;
* slippage: c_now times the t=0 trade, c_mean times every later trade
  (plus c_mean * |P_final| when terminal liquidation is charged).

The integrated-by-parts form rewrites the alpha term through the trades,
U = -sum over trades of dP (f + c sign dP) - k integral P^2, valid when
f(0) = 0 and the boundary term f(T) P_final vanishes.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from ntzsolver.errors import BoundaryTermTooLarge, MismatchedGrid
from ntzsolver.forecast import ForecastProfile, eval_forecast


@dataclass
class CostModel:
    """Per-unit slippage: c_mean for future trades, c_now for the immediate one."""

    c_mean: float
    c_now: float | None = None

    def __post_init__(self):
        if self.c_now is None:
            self.c_now = self.c_mean
        self.c_mean = float(self.c_mean)
        self.c_now = float(self.c_now)
        if self.c_mean < 0 or self.c_now < 0:
            raise ValueError("slippage rates must be non-negative")


@dataclass
class PositionPath:
    """Discretized position trajectory; P_i is held on [t_i, t_{i+1})."""

    times: np.ndarray
    positions: np.ndarray
    initial_position: float = 0.0

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.positions = np.asarray(self.positions, dtype=float)
        self.initial_position = float(self.initial_position)
        if self.times.size == 0:
            raise MismatchedGrid("empty path grid")
        if self.times.shape != self.positions.shape:
            raise MismatchedGrid("times and positions differ in length")
        if self.times[0] != 0.0:
            raise MismatchedGrid("path must start at t=0")
        if np.any(np.diff(self.times) <= 0):
            raise MismatchedGrid("times must be strictly increasing")

    @property
    def trades(self):
        """(time, signed delta) for every discontinuity, including the t=0 jump."""
        out = []
        first = self.positions[0] - self.initial_position
        if first != 0.0:
            out.append((float(self.times[0]), float(first)))
        deltas = np.diff(self.positions)
        for i in np.nonzero(deltas)[0]:
            out.append((float(self.times[i + 1]), float(deltas[i])))
        return out

    @property
    def final_position(self) -> float:
        return float(self.positions[-1])


@dataclass
class UtilityBreakdown:
    """Component split of realized utility; total = alpha + slippage + risk."""

    alpha_term: float
    slippage_term: float
    risk_term: float
    total: float

    def to_dict(self):
        return {
            "alpha": self.alpha_term,
            "slippage": self.slippage_term,
            "risk": self.risk_term,
            "total": self.total,
        }


def _slippage(path: PositionPath, cost: CostModel, terminal_liquidation: bool) -> float:
    first = abs(path.positions[0] - path.initial_position)
    later = float(np.sum(np.abs(np.diff(path.positions))))
    total = cost.c_now * first + cost.c_mean * later
    if terminal_liquidation:
        total += cost.c_mean * abs(path.final_position)
    return -total


def _risk(path: PositionPath, k: float) -> float:
    dts = np.diff(path.times)
    return -k * float(np.sum(path.positions[:-1] ** 2 * dts))


def utility_direct(
    path: PositionPath,
    profile: ForecastProfile,
    cost: CostModel,
    k: float,
    terminal_liquidation: bool = True,
) -> UtilityBreakdown:
    """Evaluate the utility in its direct form, with a component breakdown.

    With terminal_liquidation on, an extra c_mean * |P_final| charge
    approximates unwinding the residual position beyond the truncated
    horizon, matching the infinite-horizon accounting.
    """
    fvals = eval_forecast(profile, path.times)
    alpha = float(np.sum(path.positions[:-1] * np.diff(fvals)))
    slippage = _slippage(path, cost, terminal_liquidation)
    risk = _risk(path, k)
    total = alpha + slippage + risk
    return UtilityBreakdown(
        alpha_term=alpha, slippage_term=slippage, risk_term=risk, total=total
    )


def utility_by_parts(
    path: PositionPath,
    profile: ForecastProfile,
    cost: CostModel,
    k: float,
    boundary_correction: bool = False,
) -> float:
    """Evaluate the utility in its integrated-by-parts form.

    Equals the direct form (terminal liquidation off) when the path ends
    flat; a nonzero final position leaves a boundary term f(T) * P_final,
    added back when boundary_correction is requested and rejected as
    BoundaryTermTooLarge otherwise (threshold 1e-6 relative).
    """
    fvals = eval_forecast(profile, path.times)
    first_delta = path.positions[0] - path.initial_position
    deltas = np.diff(path.positions)

    traded = -first_delta * (fvals[0] + cost.c_now * np.sign(first_delta))
    traded -= float(np.sum(deltas * (fvals[1:] + cost.c_mean * np.sign(deltas))))
    total = traded + _risk(path, k)

    boundary = float(fvals[-1]) * path.final_position
    if boundary_correction:
        return total + boundary
    if abs(boundary) > 1e-6 * abs(total):
        raise BoundaryTermTooLarge(
            f"boundary term f(T)*P_final = {boundary} is not negligible; "
            "pass boundary_correction=True or extend the horizon"
        )
    return total


def write_path_csv(path: PositionPath, fh) -> None:
    """Serialize a path as CSV with header ``t,position`` (repr-exact floats)."""
    fh.write("t,position\n")
    for t, p in zip(path.times, path.positions):
        fh.write(f"{repr(float(t))},{repr(float(p))}\n")


def read_path_csv(fh, initial_position: float = 0.0) -> PositionPath:
    """Load a path written by write_path_csv; P0 travels separately."""
    reader = csv.reader(fh)
    header = next(reader, None)
    if header is None or [c.strip() for c in header] != ["t", "position"]:
        raise ValueError("path CSV must have header 't,position'")
    times, positions = [], []
    for row in reader:
        if not row:
            continue
        times.append(float(row[0]))
        positions.append(float(row[1]))
    return PositionPath(
        times=np.array(times), positions=np.array(positions),
        initial_position=initial_position,
    )


def breakdown_to_json(breakdown: UtilityBreakdown) -> str:
    return json.dumps(breakdown.to_dict(), indent=2)
