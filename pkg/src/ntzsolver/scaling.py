"""Log-log scaling fits for no-trade-zone widths."""

from __future__ import annotations

import numpy as np

from ntzsolver.errors import NonPositiveInput


def fit_scaling_exponent(costs, widths):
    """OLS slope of log(width) against log(cost), with its standard error.

    For widths following width ~ A c^s the returned slope estimates s;
    the square-root law corresponds to s = 1/2.
    """
    costs = np.asarray(costs, dtype=float)
    widths = np.asarray(widths, dtype=float)
    if costs.shape != widths.shape or costs.ndim != 1:
        raise ValueError("costs and widths must be 1-D and of equal length")
    if costs.size < 3:
        raise ValueError("need at least 3 points for a slope and its error")
    if np.any(costs <= 0) or np.any(widths <= 0):
        raise NonPositiveInput("log-log fit requires positive costs and widths")
    x = np.log(costs)
    y = np.log(widths)
    xc = x - x.mean()
    sxx = float(xc @ xc)
    if sxx == 0.0:
        raise ValueError("costs must not all be equal")
    slope = float(xc @ y) / sxx
    resid = y - y.mean() - slope * xc
    sigma2 = float(resid @ resid) / (costs.size - 2)
    stderr = float(np.sqrt(sigma2 / sxx))
    return slope, stderr
