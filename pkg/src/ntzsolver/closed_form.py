"""Closed-form plateau solution and no-trade zone for concave forecasts.

For a concave forecast f with f(0) = 0, slippage c, and risk aversion k,
the optimal initial trade from a flat start buys up to the plateau level

    P* = fdot(tau) / (2k) = fhat_inverse(2c) / (2k),

where the plateau time tau solves the tangent condition
f(tau) - tau fdot(tau) = 2c (the tangent of the forecast curve with
intercept 2c). The position is held at P* until the descending cost-free
target fdot(t)/(2k) meets it, then rides that curve to zero. Positions
already between P* and the cost-free target fdot(0)/(2k) are not traded
at all: that interval is the no-trade zone, asymmetric around nothing in
particular. Immediate and future slippage may differ (c_now vs c_mean),
which replaces the 2c threshold by c_now + c_mean and re-gauges the zone.

Everything here assumes a positive concave profile; negative forecasts
are mirrored on entry and positions negated on exit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from ntzsolver.errors import NonPositiveRisk, NonPositiveTau, NoTangent
from ntzsolver.forecast import (
    RATIONAL,
    ForecastProfile,
    _find_root,
    _require_concave,
    characteristic_time,
    eval_forecast,
    eval_forecast_rate,
    forecast_limit,
    inverse_legendre,
    mirror_profile,
)
from ntzsolver.utility import CostModel, PositionPath

# tau value reported for the degenerate no-tangent solution; serialized
# as null with status "no-trade" at the file-format boundary
TAU_NO_TRADE = math.inf


@dataclass
class PlateauSolution:
    """Closed-form solution: plateau time, plateau level, target, utility."""

    tau: float
    p_star: float
    target0: float
    utility: float

    @property
    def is_no_trade(self) -> bool:
        return math.isinf(self.tau)

    def to_dict(self):
        return {
            "tau": None if self.is_no_trade else self.tau,
            "p_star": self.p_star,
            "target0": self.target0,
            "utility": self.utility,
        }


@dataclass
class NoTradeZone:
    """Position interval [low, high] within which trading is suboptimal."""

    low: float
    high: float

    def to_dict(self):
        return {"low": self.low, "high": self.high}


def cost_free_target(profile: ForecastProfile, k: float, t: float) -> float:
    """Optimal position without costs: fdot(t) / (2k)."""
    if k <= 0:
        raise NonPositiveRisk("risk aversion k must be positive")
    return eval_forecast_rate(profile, t) / (2.0 * k)


def solve_plateau_time(profile: ForecastProfile, c: float) -> float:
    """Solve the tangent condition f(tau) - tau fdot(tau) = 2c for tau.

    The intercept g(tau) = f(tau) - tau fdot(tau) increases monotonically
    from 0 to f(inf) for concave f, so the root is unique. No tangent
    exists when f(inf) <= 2c; trading is then not worth the cost.
    """
    if c <= 0:
        raise ValueError("solve_plateau_time requires c > 0")
    flim = forecast_limit(profile)
    if flim <= 2.0 * c:
        raise NoTangent(f"f(inf) = {flim} <= 2c = {2.0 * c}; best not to trade")

    def g(tau):
        return (
            eval_forecast(profile, tau)
            - tau * eval_forecast_rate(profile, tau)
            - 2.0 * c
        )

    hi = characteristic_time(profile)
    for _ in range(200):
        if g(hi) >= 0:
            break
        hi *= 2.0
    return _find_root(g, 0.0, hi)


def _tail_integral(profile: ForecastProfile, tau: float) -> float:
    """Integral of fdot(t)^2 from tau to infinity."""
    if profile.kind == RATIONAL:
        g = profile.gamma
        return profile.f_inf**2 * g / (3.0 * (1.0 + g * tau) ** 3)
    t_last = profile.last_knot_time
    if tau >= t_last:
        return 0.0  # flat extension: fdot = 0 beyond the last knot
    # the squared interpolant derivative has kinks at the knots; telling
    # the quadrature where they are keeps it at full accuracy
    knot_times = np.array([t for t, _ in profile.knots])
    interior = knot_times[(knot_times > tau) & (knot_times < t_last)]
    val, _ = quad(
        lambda t: eval_forecast_rate(profile, t) ** 2,
        tau,
        t_last,
        epsrel=1e-10,
        epsabs=0.0,
        limit=interior.size + 500,
        points=interior,
    )
    return val


def plateau_utility(profile: ForecastProfile, tau: float, c: float, k: float) -> float:
    """Utility of the buy-plateau-ride plan as a function of plateau time tau.

    U(tau) = (f(tau) - 2c) fdot(tau) / (2k) - tau fdot(tau)^2 / (4k)
             + integral from tau to infinity of fdot^2 / (4k) dt.
    """
    if tau <= 0:
        raise NonPositiveTau("plateau time must be positive")
    if k <= 0:
        raise NonPositiveRisk("risk aversion k must be positive")
    f_tau = eval_forecast(profile, tau)
    fdot_tau = eval_forecast_rate(profile, tau)
    return (
        (f_tau - 2.0 * c) * fdot_tau / (2.0 * k)
        - tau * fdot_tau**2 / (4.0 * k)
        + _tail_integral(profile, tau) / (4.0 * k)
    )


def solve_plateau(profile: ForecastProfile, c: float, k: float) -> PlateauSolution:
    """Full closed-form solution for a flat start (P0 = 0).

    The plateau level is computed both as fdot(tau)/(2k) and as
    fhat_inverse(2c)/(2k); the two must agree, which cross-checks the
    tangent solve against the conjugate inversion. When no tangent
    exists the degenerate no-trade solution (P* = 0, infinite tau
    sentinel, zero utility) is returned rather than an error so cost
    sweeps cross the boundary smoothly.
    """
    if k <= 0:
        raise NonPositiveRisk("risk aversion k must be positive")
    flim = forecast_limit(profile)
    if flim < 0:
        inner = solve_plateau(mirror_profile(profile), c, k)
        return PlateauSolution(
            tau=inner.tau,
            p_star=-inner.p_star,
            target0=-inner.target0,
            utility=inner.utility,
        )
    _require_concave(profile)
    target0 = cost_free_target(profile, k, 0.0)
    if c == 0.0:
        # cost-free degenerate case: no plateau, ride from t=0
        utility = _tail_integral(profile, 0.0) / (4.0 * k)
        return PlateauSolution(tau=0.0, p_star=target0, target0=target0, utility=utility)
    if flim <= 2.0 * c:
        return PlateauSolution(tau=TAU_NO_TRADE, p_star=0.0, target0=target0, utility=0.0)
    tau = solve_plateau_time(profile, c)
    p_direct = eval_forecast_rate(profile, tau) / (2.0 * k)
    p_conjugate = inverse_legendre(profile, 2.0 * c) / (2.0 * k)
    assert abs(p_direct - p_conjugate) <= 1e-9 * max(1.0, abs(p_direct)), (
        f"plateau level mismatch: {p_direct} vs {p_conjugate}"
    )
    return PlateauSolution(
        tau=tau,
        p_star=p_direct,
        target0=target0,
        utility=plateau_utility(profile, tau, c, k),
    )


def ntz_bounds(profile: ForecastProfile, cost: CostModel, k: float) -> NoTradeZone:
    """No-trade zone [fhat_inverse(c_now + c_mean)/(2k), fdot(0)/(2k)].

    With c_now = c_mean this is the plain 2c zone. The lower bound is 0
    when f(inf) does not clear the cost threshold (no tangent: entering
    the position at all is not worth the roundtrip cost).
    """
    if k <= 0:
        raise NonPositiveRisk("risk aversion k must be positive")
    flim = forecast_limit(profile)
    if flim < 0:
        inner = ntz_bounds(mirror_profile(profile), cost, k)
        return NoTradeZone(low=-inner.high, high=-inner.low)
    threshold = cost.c_now + cost.c_mean
    high = cost_free_target(profile, k, 0.0)
    if threshold == 0.0:
        low = high  # zero cost collapses the zone to the cost-free target
    elif flim <= threshold:
        low = 0.0
    else:
        low = inverse_legendre(profile, threshold) / (2.0 * k)
    return NoTradeZone(low=low, high=high)


def initial_trade(p0: float, ntz: NoTradeZone) -> float:
    """Signed delta to the nearest zone boundary; 0 inside the zone."""
    if p0 < ntz.low:
        return ntz.low - p0
    if p0 > ntz.high:
        return ntz.high - p0
    return 0.0


def optimal_path(
    profile: ForecastProfile,
    p0: float,
    cost: CostModel,
    k: float,
    grid,
) -> PositionPath:
    """Sample the optimal position plan on a time grid.

    The plan is: (a) an instantaneous t=0 trade to the nearest no-trade
    zone boundary (none if p0 is inside); (b) a plateau at the post-trade
    level; (c) riding the cost-free target fdot(t)/(2k) from the moment
    it descends to the plateau level. The grid should extend far enough
    that fdot(T)/(2k) is negligible (the path decays toward 0).
    """
    grid = np.asarray(grid, dtype=float)
    flim = forecast_limit(profile)
    if flim < 0:
        inner = optimal_path(mirror_profile(profile), -p0, cost, k, grid)
        return PositionPath(
            times=grid, positions=-inner.positions, initial_position=p0
        )
    zone = ntz_bounds(profile, cost, k)
    p_hold = p0 + initial_trade(p0, zone)

    rate_grid = eval_forecast_rate(profile, grid)
    target_rate = 2.0 * k * p_hold
    if target_rate >= rate_grid[0]:
        t_join = grid[0]  # at or above the cost-free target: ride immediately
    elif target_rate <= rate_grid[-1] or p_hold <= 0.0:
        t_join = math.inf  # curve never descends to the plateau in this window
    else:
        t_join = _find_root(
            lambda t: eval_forecast_rate(profile, t) - target_rate,
            grid[0],
            grid[-1],
        )
    positions = np.where(grid < t_join, p_hold, rate_grid / (2.0 * k))
    return PositionPath(times=grid, positions=positions, initial_position=p0)


def rational_pstar(f_inf: float, gamma: float, c: float, k: float) -> float:
    """Explicit plateau level for the rational profile.

    P* = (gamma / 2k) (sqrt(f_inf) - sqrt(2c))^2, and 0 once f_inf <= 2c.
    """
    if k <= 0:
        raise NonPositiveRisk("risk aversion k must be positive")
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if c < 0:
        raise ValueError("c must be non-negative")
    if f_inf <= 2.0 * c:
        return 0.0
    p = gamma / (2.0 * k) * (math.sqrt(f_inf) - math.sqrt(2.0 * c)) ** 2
    assert (
        abs(p - solve_plateau(ForecastProfile.rational(f_inf, gamma), c, k).p_star)
        <= 1e-10 * max(1.0, abs(p))
    ), "explicit plateau formula disagrees with the tangent solve"
    return p


def ntz_width(f_inf: float, gamma: float, c: float, k: float):
    """Exact and leading-order no-trade-zone width for the rational profile.

    Exact: fdot(0)/(2k) - P* = (gamma/k) (sqrt(2 c f_inf) - c) while a
    tangent exists. Leading order in c: (fdot(0)/k) sqrt(2c / f_inf),
    the square-root scaling law; the difference is O(c).
    """
    target0 = f_inf * gamma / (2.0 * k)
    exact = target0 - rational_pstar(f_inf, gamma, c, k)
    if c == 0.0:
        return 0.0, 0.0
    leading = (f_inf * gamma / k) * math.sqrt(2.0 * c / f_inf)
    return exact, leading
