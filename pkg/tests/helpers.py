"""Shared test helpers: exact brute-force references and random inputs."""

import itertools

import numpy as np


def reference_dp(z, edge_w, anchor=None, terminal_weight=0.0):
    """Exact minimizer of the anchored weighted-TV proximal problem.

    Minimizes

        1/2 sum (x_i - z_i)^2 + wa |x_0 - pa|
        + sum_i edge_w[i] |x_{i+1} - x_i| + terminal_weight |x_{m-1}|

    by exhaustive pattern enumeration. Every minimizer is constant on
    contiguous blocks, and each absolute-value term is either strictly
    signed or sits exactly at its kink (anchor at pa, terminal at 0).
    Enumerating all block partitions, boundary signs, and kink pins,
    solving the per-block stationarity for each candidate, and keeping
    the candidate with the lowest true objective therefore contains the
    exact optimum. Cost is exponential in len(z): small inputs only.
    """
    z = np.asarray(z, dtype=float)
    m = z.size
    wl = [float(w) for w in edge_w]
    assert len(wl) == m - 1
    if anchor is not None:
        pa, wa = float(anchor[0]), float(anchor[1])
    wt = float(terminal_weight)
    warr = np.asarray(wl)

    def objective(x):
        val = 0.5 * float(np.sum((x - z) ** 2))
        if anchor is not None:
            val += wa * abs(float(x[0]) - pa)
        if m > 1:
            val += float(np.sum(warr * np.abs(np.diff(x))))
        val += wt * abs(float(x[-1]))
        return val

    anchor_choices = [None] if anchor is None else [1, -1, "pin"]
    term_choices = [None] if wt == 0.0 else [1, -1, "pin"]

    best_x = None
    best_val = np.inf
    for mask in range(1 << (m - 1)):
        blocks = []
        start = 0
        for i in range(m - 1):
            if mask & (1 << i):
                blocks.append((start, i))
                start = i + 1
        blocks.append((start, m - 1))
        nb = len(blocks)
        for signs in itertools.product((1, -1), repeat=nb - 1):
            for sa in anchor_choices:
                for stm in term_choices:
                    vals = []
                    feasible = True
                    for b, (lo, hi) in enumerate(blocks):
                        n = hi - lo + 1
                        total = float(np.sum(z[lo : hi + 1]))
                        # stationarity: n*v - total + (signed kink terms) = 0
                        adj = 0.0
                        pin = None
                        if b > 0:
                            adj += wl[blocks[b - 1][1]] * signs[b - 1]
                        if b < nb - 1:
                            adj -= wl[hi] * signs[b]
                        if b == 0 and sa is not None:
                            if sa == "pin":
                                pin = pa
                            else:
                                adj += wa * sa
                        if b == nb - 1 and stm is not None:
                            if stm == "pin":
                                if pin is not None and pin != 0.0:
                                    feasible = False
                                    break
                                pin = 0.0
                            else:
                                adj += wt * stm
                        vals.append(pin if pin is not None else (total - adj) / n)
                    if not feasible:
                        continue
                    x = np.empty(m)
                    for (lo, hi), v in zip(blocks, vals):
                        x[lo : hi + 1] = v
                    val = objective(x)
                    if val < best_val:
                        best_val = val
                        best_x = x
    return best_x


def reference_tv_prox(y, weights, clamp_first=False):
    """Exact reference for tv_prox via pattern enumeration."""
    y = np.asarray(y, dtype=float)
    w = [float(v) for v in weights]
    if y.size == 1:
        return y.copy()
    if clamp_first:
        rest = reference_dp(y[1:], w[1:], anchor=(float(y[0]), w[0]))
        return np.concatenate([[y[0]], rest])
    return reference_dp(y, w)


def random_concave_params(rng):
    """One random (f_inf, gamma, c, k) with a tangent guaranteed (2c < f_inf)."""
    f_inf = float(rng.uniform(0.2, 5.0))
    gamma = float(rng.uniform(0.05, 5.0))
    k = float(rng.uniform(0.05, 5.0))
    c = float(rng.uniform(0.005, 0.45)) * f_inf
    return f_inf, gamma, c, k
