"""Log-log slope fitting for the zone-width scaling law."""

import numpy as np
import pytest

from ntzsolver.errors import NonPositiveInput
from ntzsolver.scaling import fit_scaling_exponent


def test_exact_square_root_law():
    cs = np.logspace(-5, -3, 10)
    slope, stderr = fit_scaling_exponent(cs, np.sqrt(cs))
    assert slope == pytest.approx(0.5, abs=1e-12)
    assert stderr == pytest.approx(0.0, abs=1e-12)


def test_exact_linear_law():
    cs = np.logspace(-4, -1, 8)
    slope, _ = fit_scaling_exponent(cs, cs.copy())
    assert slope == pytest.approx(1.0, abs=1e-12)


def test_noisy_square_root_law():
    rng = np.random.default_rng(11)
    cs = np.logspace(-5, -3, 10)
    deltas = 3.0 * np.sqrt(cs) * (1.0 + 0.01 * rng.standard_normal(10))
    slope, stderr = fit_scaling_exponent(cs, deltas)
    assert slope == pytest.approx(0.5, abs=0.02)
    assert stderr < 0.02


def test_rejects_non_positive_inputs():
    with pytest.raises(NonPositiveInput):
        fit_scaling_exponent([1e-4, 0.0, 1e-2], [1.0, 1.0, 1.0])
    with pytest.raises(NonPositiveInput):
        fit_scaling_exponent([1e-4, 1e-3, 1e-2], [1.0, -1.0, 1.0])


def test_rejects_degenerate_shapes():
    with pytest.raises(ValueError):
        fit_scaling_exponent([1e-4, 1e-3], [1.0, 2.0])
    with pytest.raises(ValueError):
        fit_scaling_exponent([1e-4, 1e-3, 1e-2], [1.0, 2.0])
    with pytest.raises(ValueError):
        fit_scaling_exponent([1e-3, 1e-3, 1e-3], [1.0, 2.0, 3.0])
