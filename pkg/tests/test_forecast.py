"""Forecast curves: evaluation, Legendre transform, classification."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ntzsolver.errors import (
    InterceptOutOfRange,
    NegativeTime,
    NotConcave,
    SlopeOutOfRange,
)
from ntzsolver.forecast import (
    CONCAVE,
    GENERAL,
    SINGLE_INFLECTION,
    ForecastProfile,
    characteristic_time,
    classify_profile,
    eval_forecast,
    eval_forecast_rate,
    forecast_limit,
    inverse_legendre,
    legendre_transform,
    load_profile_csv,
    mirror_profile,
)

STD = ForecastProfile.rational(1.0, 1.0)


def scurve_profile():
    """Tabulated S-curve t^2/(1+t^2): convex early, concave late."""
    ts = np.linspace(0.0, 10.0, 41)
    return ForecastProfile.tabulated([(t, t * t / (1 + t * t)) for t in ts])


def test_rational_eval_known_values():
    assert eval_forecast(STD, 0.0) == 0.0
    assert eval_forecast(STD, 1.0) == pytest.approx(0.5, abs=1e-15)
    assert eval_forecast(STD, 3.0) == pytest.approx(0.75, abs=1e-15)


def test_rational_eval_vectorized():
    ts = np.array([0.0, 1.0, 3.0])
    vals = eval_forecast(STD, ts)
    assert np.allclose(vals, [0.0, 0.5, 0.75], atol=1e-15)


def test_negative_time_rejected():
    with pytest.raises(NegativeTime):
        eval_forecast(STD, -0.1)
    with pytest.raises(NegativeTime):
        eval_forecast_rate(STD, np.array([1.0, -1.0]))


def test_rational_rate_known_values():
    assert eval_forecast_rate(STD, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert eval_forecast_rate(STD, 1.0) == pytest.approx(0.25, abs=1e-15)
    assert eval_forecast_rate(STD, 1e9) == pytest.approx(0.0, abs=1e-15)


def test_rate_matches_finite_differences():
    rng = np.random.default_rng(3)
    h = 1e-6
    for _ in range(100):
        t = float(rng.uniform(h, 20.0))
        fd = (eval_forecast(STD, t + h) - eval_forecast(STD, t - h)) / (2 * h)
        assert eval_forecast_rate(STD, t) == pytest.approx(fd, rel=1e-5)


def test_tabulated_tracks_rational_samples():
    ts = np.linspace(0.0, 40.0, 400)
    tab = ForecastProfile.tabulated(
        [(t, eval_forecast(STD, t)) for t in ts]
    )
    probes = np.linspace(0.0, 40.0, 777)
    # monotone-cubic interpolation error peaks near t=0 where the curve
    # bends fastest relative to the knot spacing 0.1; measured 1.8e-4
    assert np.allclose(
        eval_forecast(tab, probes), eval_forecast(STD, probes), atol=5e-4
    )
    inner = probes[(probes > 0.5) & (probes < 39.0)]
    assert np.allclose(
        eval_forecast_rate(tab, inner), eval_forecast_rate(STD, inner), atol=1e-4
    )


def test_tabulated_flat_extension():
    tab = ForecastProfile.tabulated([(0.0, 0.0), (1.0, 0.3), (2.0, 0.5)])
    assert eval_forecast(tab, 5.0) == 0.5
    assert eval_forecast_rate(tab, 5.0) == 0.0
    assert forecast_limit(tab) == 0.5


def test_tabulated_validation():
    with pytest.raises(ValueError):
        ForecastProfile.tabulated([(0.0, 0.0)])
    with pytest.raises(ValueError):
        ForecastProfile.tabulated([(0.0, 0.1), (1.0, 0.5)])
    with pytest.raises(ValueError):
        ForecastProfile.tabulated([(0.0, 0.0), (1.0, 0.2), (1.0, 0.3)])


def test_rational_validation():
    with pytest.raises(ValueError):
        ForecastProfile.rational(1.0, 0.0)
    with pytest.raises(ValueError):
        ForecastProfile.rational(1.0, -2.0)


def test_forecast_limit_and_characteristic_time():
    assert forecast_limit(STD) == 1.0
    assert characteristic_time(STD) == 1.0
    fast = ForecastProfile.rational(2.0, 4.0)
    assert characteristic_time(fast) == 0.25
    # tabulated: f reaches half of its 0.5 asymptote where 0.3 t = 0.25
    tab = ForecastProfile.tabulated([(0.0, 0.0), (1.0, 0.3), (2.0, 0.5)])
    t_half = characteristic_time(tab)
    assert eval_forecast(tab, t_half) == pytest.approx(0.25, abs=1e-6)


def test_legendre_known_values():
    # conjugate of the rational curve with f_inf = gamma = 1 is (1 - sqrt(s))^2
    assert legendre_transform(STD, 1.0) == pytest.approx(0.0, abs=1e-12)
    assert legendre_transform(STD, 0.25) == pytest.approx(0.25, abs=1e-9)
    assert legendre_transform(STD, 0.04) == pytest.approx(0.64, abs=1e-9)


def test_legendre_matches_grid_search():
    xi = np.linspace(0.0, 400.0, 2_000_001)
    f = eval_forecast(STD, xi)
    for s in (0.9, 0.5, 0.25, 0.04, 0.01):
        brute = float(np.max(f - s * xi))
        assert legendre_transform(STD, s) == pytest.approx(brute, abs=1e-6)


def test_legendre_slope_out_of_range():
    with pytest.raises(SlopeOutOfRange):
        legendre_transform(STD, 1.5)
    with pytest.raises(SlopeOutOfRange):
        legendre_transform(STD, 0.0)
    with pytest.raises(SlopeOutOfRange):
        legendre_transform(STD, -0.1)


def test_legendre_requires_concave():
    with pytest.raises(NotConcave):
        legendre_transform(scurve_profile(), 0.1)
    with pytest.raises(NotConcave):
        inverse_legendre(scurve_profile(), 0.1)


def test_inverse_legendre_known_values():
    assert inverse_legendre(STD, 0.0) == pytest.approx(1.0, abs=1e-12)
    assert inverse_legendre(STD, 0.25) == pytest.approx(0.25, abs=1e-9)
    assert inverse_legendre(STD, 0.04) == pytest.approx(0.64, abs=1e-9)


def test_inverse_legendre_intercept_out_of_range():
    with pytest.raises(InterceptOutOfRange):
        inverse_legendre(STD, 1.0)
    with pytest.raises(InterceptOutOfRange):
        inverse_legendre(STD, 1.5)
    with pytest.raises(InterceptOutOfRange):
        inverse_legendre(STD, -0.01)


@given(s=st.floats(min_value=1e-4, max_value=1.0))
@settings(max_examples=200, deadline=None)
def test_legendre_round_trip(s):
    """inverse_legendre(legendre_transform(s)) = s on (0, fdot(0)]."""
    y = legendre_transform(STD, s)
    if y >= forecast_limit(STD):
        return  # float noise at the s -> 0 end; no tangent to invert
    assert inverse_legendre(STD, y) == pytest.approx(s, abs=1e-8, rel=1e-8)


@given(tau=st.floats(min_value=1e-3, max_value=50.0))
@settings(max_examples=200, deadline=None)
def test_tangency_identity(tau):
    """fhat at slope fdot(tau) equals the tangent intercept f(tau) - tau fdot(tau)."""
    slope = eval_forecast_rate(STD, tau)
    intercept = eval_forecast(STD, tau) - tau * slope
    assert legendre_transform(STD, slope) == pytest.approx(intercept, abs=1e-9)


def test_legendre_monotone_in_slope():
    rng = np.random.default_rng(11)
    slopes = np.sort(rng.uniform(1e-3, 1.0, size=100))
    vals = [legendre_transform(STD, s) for s in slopes]
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


def test_classify_rational_concave():
    out = classify_profile(STD)
    assert out.tag == CONCAVE
    assert out.inflection_times == []


def test_classify_scurve_single_inflection():
    out = classify_profile(scurve_profile())
    assert out.tag == SINGLE_INFLECTION
    assert len(out.inflection_times) == 1
    # analytic inflection of t^2/(1+t^2) sits at 1/sqrt(3)
    assert out.inflection_times[0] == pytest.approx(1 / math.sqrt(3), abs=0.3)


def test_classify_flat_zero_concave():
    flat = ForecastProfile.tabulated([(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)])
    out = classify_profile(flat)
    assert out.tag == CONCAVE
    assert out.inflection_times == []


def test_classify_double_inflection_general():
    # piecewise wave: concave, convex, concave again -> two sign changes
    ts = np.linspace(0.0, 12.0, 61)
    vals = [t + 0.8 * math.sin(t) for t in ts]
    out = classify_profile(ForecastProfile.tabulated(list(zip(ts, vals))))
    assert out.tag == GENERAL


def test_classify_rejects_tiny_sample_count():
    with pytest.raises(ValueError):
        classify_profile(STD, n_samples=8)


def test_mirror_profile_antisymmetry():
    neg = ForecastProfile.rational(-1.0, 1.0)
    mirrored = mirror_profile(neg)
    ts = np.linspace(0.0, 10.0, 50)
    assert np.array_equal(eval_forecast(mirrored, ts), -eval_forecast(neg, ts))
    tab = ForecastProfile.tabulated([(0.0, 0.0), (1.0, -0.3), (2.0, -0.5)])
    mt = mirror_profile(tab)
    assert np.array_equal(eval_forecast(mt, ts), -eval_forecast(tab, ts))


def test_load_profile_csv_round_trip(tmp_path):
    path = tmp_path / "profile.csv"
    path.write_text("t,f\n0.0,0.0\n1.0,0.3\n2.0,0.5\n")
    profile = load_profile_csv(path)
    assert profile.kind == "Tabulated"
    assert eval_forecast(profile, 2.0) == 0.5


def test_load_profile_csv_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time,value\n0.0,0.0\n1.0,0.3\n")
    with pytest.raises(ValueError):
        load_profile_csv(path)
