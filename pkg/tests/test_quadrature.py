"""Tests for the singular-integral quadrature layer.

The central identity: for lam > 0 and 0 < s < 1,

    (s / Gamma(1-s)) * integral_0^inf (1 - exp(-lam t)) t^(-1-s) dt = lam^s.

Every kernel and killing-term computation reduces to quadratures of this
shape, so the rule is certified against the closed form over the whole
parameter box the package supports.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fraclab.errors import InvalidParameterError, QuadratureError
from fraclab.quadrature import (
    QuadratureResult,
    geometric_edges,
    laplace_integrate,
    mellin_integrate,
    panel_nodes,
    power_identity_residual,
    sigma_prefactor,
)

POWER_IDENTITY_TOL = 5e-12
LAPLACE_TOL = 5e-13
WEIGHT_SUM_TOL = 1e-14

S_GRID = np.linspace(0.05, 0.95, 10)
LAM_GRID = np.array([1e-1, 1.0, 17.3, 4.0e2, 1.6e5])


def test_power_identity_over_parameter_box():
    worst = 0.0
    for s in S_GRID:
        for lam in LAM_GRID:
            worst = max(worst, power_identity_residual(float(s), float(lam)))
    assert worst <= POWER_IDENTITY_TOL


def test_error_estimate_is_honest():
    # the embedded half-node estimate must dominate the true error; the rule
    # returns the bare integral, worth lam^s * Gamma(1-s) / s
    for s in (0.1, 0.5, 0.9):
        for lam in (0.5, 3.0):
            res = mellin_integrate(
                s,
                lambda t: -np.expm1(-lam * t) / t,
                lambda t: -np.expm1(-lam * t),
                T_max=37.0 / lam,
                g_limit=1.0,
            )
            exact = lam ** s / sigma_prefactor(s)
            true_err = abs(res.value - exact)
            assert true_err <= 10.0 * res.error_estimate + 1e-13 * exact


def test_ensure_raises_when_target_unreachable():
    res = QuadratureResult(value=1.0, error_estimate=1e-3, tail_bound=0.0)
    with pytest.raises(QuadratureError):
        res.ensure(1e-9)
    res2 = QuadratureResult(value=1.0, error_estimate=1e-12, tail_bound=0.0)
    res2.ensure(1e-9)


def test_panel_nodes_integrate_constants():
    panels = [(0.0, 0.5), (0.5, 2.0), (2.0, 10.0)]
    t, c = panel_nodes(panels, 16)
    assert abs(c.sum() - 10.0) <= WEIGHT_SUM_TOL * 10.0
    # and linear functions
    assert abs(np.sum(c * t) - 50.0) <= 1e-12 * 50.0


def test_geometric_edges_are_sorted_and_bounded():
    panels = geometric_edges(4.0, 1e-6, math.sqrt(2.0))
    assert panels[0][0] <= 1e-6 and panels[-1][1] == 4.0
    flat = [panels[0][0]] + [hi for _, hi in panels]
    assert np.all(np.diff(flat) > 0)
    # panels tile the interval with no gaps
    for (lo_a, hi_a), (lo_b, hi_b) in zip(panels[:-1], panels[1:]):
        assert hi_a == lo_b


def test_laplace_integrate_against_closed_form():
    # integral_0^inf exp(-alpha t) exp(-beta t) dt = 1 / (alpha + beta)
    for alpha in (0.1, 1.0, 10.0):
        for beta in (0.3, 2.7):
            res = laplace_integrate(
                alpha, lambda t, b=beta: np.exp(-b * t), g_bound=1.0
            )
            exact = 1.0 / (alpha + beta)
            assert abs(res.value - exact) <= LAPLACE_TOL * exact


def test_sigma_prefactor_half_order():
    assert abs(sigma_prefactor(0.5) - 0.5 / math.gamma(0.5)) < 1e-16
    # Gamma(1-s) pole at s -> 1 drives the prefactor to zero smoothly
    assert sigma_prefactor(0.95) < sigma_prefactor(0.5)


def test_order_validation():
    with pytest.raises(InvalidParameterError):
        power_identity_residual(0.0, 1.0)
    with pytest.raises(InvalidParameterError):
        power_identity_residual(1.0, 1.0)


@settings(max_examples=60, deadline=None)
@given(
    s=st.floats(min_value=0.05, max_value=0.95),
    lam=st.floats(min_value=1e-2, max_value=1e4),
)
def test_power_identity_property(s, lam):
    assert power_identity_residual(s, lam) <= 1e-9
