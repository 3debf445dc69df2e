"""Forecast term-structure curves and their convex-conjugate machinery.

A forecast profile is the expected cumulative return f(t) of a security
from now to horizon t, with f(0) = 0 by construction. Two kinds are
supported:

* Rational: f(t) = f_inf * g t / (1 + g t), a generic smooth saturating
  profile with asymptote f_inf and inverse-time rate g.
* Tabulated: monotone piecewise-cubic interpolation (Fritsch-Carlson
  slopes, via scipy's pchip) through (t, f) knots, extended flat past the
  last knot.

The Legendre transform fhat(s) = max over xi >= 0 of (f(xi) - s xi) is,
geometrically, the t=0 intercept of the tangent of slope s to the curve.
It and its inverse drive the closed-form no-trade-zone solution: the
lower zone boundary is fhat_inverse(cost threshold) / (2k).

Negative profiles (f_inf < 0) are handled upstream by mirror symmetry;
the conjugate machinery here requires a concave profile.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from ntzsolver.errors import (
    InterceptOutOfRange,
    NegativeTime,
    NotConcave,
    SlopeOutOfRange,
)

RATIONAL = "Rational"
TABULATED = "Tabulated"

CONCAVE = "Concave"
SINGLE_INFLECTION = "SingleInflection"
GENERAL = "General"

# second differences with magnitude below this fraction of max|f| are
# treated as zero curvature during classification
CURVATURE_TOL = 1e-10

_ROOT_TOL = 1e-12


@dataclass
class ForecastProfile:
    """Expected cumulative return curve f(t) with f(0) = 0.

    Use the ``rational`` / ``tabulated`` constructors rather than filling
    fields by hand. Instances are value objects: all operations on them
    are pure functions, so profiles may be shared freely across threads.
    """

    kind: str
    f_inf: float | None = None
    gamma: float | None = None
    knots: tuple | None = None
    _interp: object = field(default=None, repr=False, compare=False)
    _dinterp: object = field(default=None, repr=False, compare=False)

    @classmethod
    def rational(cls, f_inf: float, gamma: float) -> "ForecastProfile":
        if gamma <= 0:
            raise ValueError("rational profile requires gamma > 0")
        return cls(kind=RATIONAL, f_inf=float(f_inf), gamma=float(gamma))

    @classmethod
    def tabulated(cls, knots) -> "ForecastProfile":
        pts = tuple((float(t), float(v)) for t, v in knots)
        if len(pts) < 2:
            raise ValueError("tabulated profile needs at least 2 knots")
        if pts[0][0] != 0.0 or pts[0][1] != 0.0:
            raise ValueError("first knot must be (0, 0)")
        times = [t for t, _ in pts]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("knot times must be strictly increasing")
        return cls(kind=TABULATED, knots=pts)

    def _interpolants(self):
        if self._interp is None:
            t = np.array([p[0] for p in self.knots])
            v = np.array([p[1] for p in self.knots])
            interp = PchipInterpolator(t, v, extrapolate=False)
            self._interp = interp
            self._dinterp = interp.derivative()
        return self._interp, self._dinterp

    @property
    def last_knot_time(self) -> float:
        return self.knots[-1][0]


def _check_time(t):
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0):
        raise NegativeTime("forecast evaluated at negative time")
    return arr


def eval_forecast(profile: ForecastProfile, t):
    """Evaluate f(t). Accepts scalars or arrays; t must be >= 0."""
    arr = _check_time(t)
    if profile.kind == RATIONAL:
        g = profile.gamma
        out = profile.f_inf * g * arr / (1.0 + g * arr)
    else:
        interp, _ = profile._interpolants()
        t_last = profile.last_knot_time
        out = np.asarray(interp(np.minimum(arr, t_last)), dtype=float)
    return float(out) if arr.ndim == 0 else out


def eval_forecast_rate(profile: ForecastProfile, t):
    """Evaluate the forecast rate fdot(t). Flat extension gives 0 past the last knot."""
    arr = _check_time(t)
    if profile.kind == RATIONAL:
        g = profile.gamma
        out = profile.f_inf * g / (1.0 + g * arr) ** 2
    else:
        _, dinterp = profile._interpolants()
        t_last = profile.last_knot_time
        inside = np.asarray(dinterp(np.minimum(arr, t_last)), dtype=float)
        out = np.where(arr > t_last, 0.0, inside)
    return float(out) if arr.ndim == 0 else out


def forecast_limit(profile: ForecastProfile) -> float:
    """Asymptotic value f(inf): f_inf for Rational, last knot value for Tabulated."""
    if profile.kind == RATIONAL:
        return profile.f_inf
    return profile.knots[-1][1]


def characteristic_time(profile: ForecastProfile) -> float:
    """Time at which f first reaches half its asymptote (1/gamma for Rational)."""
    if profile.kind == RATIONAL:
        return 1.0 / profile.gamma
    flim = forecast_limit(profile)
    t_last = profile.last_knot_time
    if flim == 0.0:
        return t_last
    half = 0.5 * flim
    ts = np.linspace(0.0, t_last, 1024)
    vals = eval_forecast(profile, ts)
    crossed = np.nonzero(np.abs(vals) >= abs(half))[0]
    if crossed.size == 0:
        return t_last
    i = crossed[0]
    if i == 0:
        return float(ts[0])
    return _find_root(
        lambda t: abs(eval_forecast(profile, t)) - abs(half), ts[i - 1], ts[i]
    )


def mirror_profile(profile: ForecastProfile) -> ForecastProfile:
    """Negate the curve: f -> -f. Exact antisymmetry for negative forecasts."""
    if profile.kind == RATIONAL:
        return ForecastProfile.rational(-profile.f_inf, profile.gamma)
    return ForecastProfile.tabulated([(t, -v) for t, v in profile.knots])


def _find_root(g, lo, hi, tol=_ROOT_TOL):
    """Bracketed bisection refined by secant steps, abs tolerance on the bracket.

    Requires g(lo) and g(hi) of opposite (or zero) sign. Derivative-free,
    so it stays robust on tabulated curves with piecewise interpolants.
    """
    glo = g(lo)
    if glo == 0.0:
        return lo
    ghi = g(hi)
    if ghi == 0.0:
        return hi
    if glo * ghi > 0:
        raise ValueError("root not bracketed")
    bisect_next = False
    for _ in range(500):
        width = hi - lo
        if width <= tol:
            break
        mid = None
        if not bisect_next:
            denom = ghi - glo
            if denom != 0.0:
                cand = lo - glo * (hi - lo) / denom
                if lo < cand < hi:
                    mid = cand
        if mid is None:
            mid = 0.5 * (lo + hi)
        gmid = g(mid)
        if gmid == 0.0:
            return mid
        if glo * gmid < 0:
            hi, ghi = mid, gmid
        else:
            lo, glo = mid, gmid
        # force a bisection whenever the secant step failed to halve the bracket
        bisect_next = (hi - lo) > 0.5 * width
    return 0.5 * (lo + hi)


def _require_concave(profile: ForecastProfile):
    if profile.kind == RATIONAL:
        if profile.f_inf < 0:
            raise NotConcave("rational profile with f_inf < 0 is convex; mirror it first")
        return
    if classify_profile(profile).tag != CONCAVE:
        raise NotConcave("tabulated profile is not concave")


def legendre_transform(profile: ForecastProfile, slope: float) -> float:
    """Convex conjugate fhat(s) = max over xi >= 0 of (f(xi) - s xi).

    Solved by a monotone root find on fdot(xi) = s (fdot is non-increasing
    for concave f), then evaluating the tangent intercept f(xi) - s xi.
    The returned value is the t=0 intercept of the tangent of slope s.
    """
    _require_concave(profile)
    slope = float(slope)
    fdot0 = eval_forecast_rate(profile, 0.0)
    if slope <= 0 or slope > fdot0:
        raise SlopeOutOfRange(
            f"slope {slope} outside (0, {fdot0}] supported by the profile"
        )

    def g(xi):
        return eval_forecast_rate(profile, xi) - slope

    if g(0.0) == 0.0:
        return 0.0
    hi = characteristic_time(profile)
    for _ in range(200):
        if g(hi) <= 0:
            break
        hi *= 2.0
    xi = _find_root(g, 0.0, hi)
    return eval_forecast(profile, xi) - slope * xi


def inverse_legendre(profile: ForecastProfile, intercept: float) -> float:
    """Solve fhat(s) = intercept for the slope s.

    Bisection on s in (0, fdot(0)], exploiting that fhat is strictly
    decreasing there (from f(inf) down to 0). No tangent exists for
    intercept >= f(inf).
    """
    _require_concave(profile)
    intercept = float(intercept)
    flim = forecast_limit(profile)
    if intercept < 0 or intercept >= flim:
        raise InterceptOutOfRange(
            f"intercept {intercept} outside [0, {flim}); no such tangent"
        )
    fdot0 = eval_forecast_rate(profile, 0.0)
    if intercept == 0.0:
        return fdot0

    def h(s):
        return legendre_transform(profile, s) - intercept

    # shrink the lower bracket end until fhat exceeds the target intercept
    lo = 0.5 * fdot0
    for _ in range(200):
        if h(lo) >= 0:
            break
        lo *= 0.5
    return _find_root(h, lo, fdot0)


@dataclass
class ConvexityClass:
    """Best-effort curvature classification from sampled second differences."""

    tag: str
    inflection_times: list


def _classification_grid(profile: ForecastProfile, n_samples: int):
    # union of a linear grid on [0, T] and a geometric grid near 0: the
    # former resolves the asymptote, the latter early curvature
    if profile.kind == RATIONAL:
        T = 10.0 / profile.gamma
    else:
        T = profile.last_knot_time
    linear = np.linspace(0.0, T, n_samples)
    geometric = T * np.logspace(-6, 0, n_samples)
    return np.unique(np.concatenate([linear, geometric]))


def classify_profile(profile: ForecastProfile, n_samples: int = 64) -> ConvexityClass:
    """Classify curvature: Concave, SingleInflection, or General.

    Computes second divided differences and counts sign changes among the
    significant ones. A difference is significant when its raw-scale
    magnitude (curvature times local spacing product) exceeds
    CURVATURE_TOL * max|f|; this ignores float noise from finely spaced
    sample points.

    Rational profiles are sampled on the classification grid. Tabulated
    profiles are classified from their knots directly: the interpolant is
    only C1, so its piecewise curvature flips sign spuriously around a
    genuine inflection, while the knots carry the curve's actual shape.
    """
    if n_samples < 16:
        raise ValueError("n_samples must be >= 16")
    if profile.kind == TABULATED:
        ts = np.array([t for t, _ in profile.knots])
        vals = np.array([v for _, v in profile.knots])
        if ts.size < 3:
            return ConvexityClass(tag=CONCAVE, inflection_times=[])
    else:
        ts = _classification_grid(profile, n_samples)
        vals = eval_forecast(profile, ts)
    maxabs = float(np.max(np.abs(vals)))
    tol = CURVATURE_TOL * maxabs

    h_lo = ts[1:-1] - ts[:-2]
    h_hi = ts[2:] - ts[1:-1]
    slope_lo = (vals[1:-1] - vals[:-2]) / h_lo
    slope_hi = (vals[2:] - vals[1:-1]) / h_hi
    curv = (slope_hi - slope_lo) / (ts[2:] - ts[:-2])  # ~ f''/2
    raw = curv * h_lo * h_hi  # back to raw second-difference scale

    centers = ts[1:-1]
    signs = np.where(raw > tol, 1, np.where(raw < -tol, -1, 0))

    inflections = []
    prev_sign = 0
    prev_t = 0.0
    any_positive = False
    for t, s in zip(centers, signs):
        if s == 0:
            continue
        if s > 0:
            any_positive = True
        if prev_sign != 0 and s != prev_sign:
            inflections.append(0.5 * (prev_t + t))
        prev_sign, prev_t = s, t

    if len(inflections) == 0:
        tag = CONCAVE if not any_positive else GENERAL
    elif len(inflections) == 1:
        tag = SINGLE_INFLECTION
    else:
        tag = GENERAL
    return ConvexityClass(tag=tag, inflection_times=inflections)


def load_profile_csv(path) -> ForecastProfile:
    """Load a tabulated profile from CSV with header ``t,f``, first row 0,0."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip() for c in header] != ["t", "f"]:
            raise ValueError("profile CSV must have header 't,f'")
        knots = [(float(row[0]), float(row[1])) for row in reader if row]
    return ForecastProfile.tabulated(knots)
