"""Tests for the one-sided stable density and its Laplace transform.

Two fully independent routes pin the density down:
  * the defining Laplace identity int_0^inf e^(-lam tau) eta_t(tau) dtau
    = exp(-t lam^s), checked by numerical transform of the density;
  * the closed form at s = 1/2 (inverse-Gaussian type), checked pointwise
    against the oscillatory-integral branch.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from fraclab.errors import InvalidParameterError
from fraclab.subordinator import (
    half_stable_closed_form,
    laplace_residual,
    laplace_transform,
    laplace_values,
    stable_density,
    tail_envelope,
    tail_mass,
)

LAPLACE_TOL = 1e-7          # transform identity over the full working grid
HALF_ORDER_TOL = 1e-8       # closed form vs integral branch at s = 1/2
BRANCH_MATCH_TOL = 1e-8     # series vs integral branch around the crossover
NORMALIZATION_TOL = 1e-6

S_GRID = np.round(np.arange(0.1, 0.95, 0.1), 10)


def test_laplace_identity_on_working_grid():
    worst = 0.0
    for s in S_GRID:
        for t in (0.1, 1.0, 10.0):
            for lam in (0.0, 0.1, 1.0, 4.0, 10.0, 100.0):
                worst = max(worst, laplace_residual(float(s), t, lam))
    assert worst <= LAPLACE_TOL


def test_laplace_transform_zero_rate_is_total_mass():
    for s in (0.2, 0.5, 0.8):
        assert abs(laplace_transform(s, 1.7, 0.0) - 1.0) <= LAPLACE_TOL


def test_half_order_closed_form_vs_integral():
    taus = np.geomspace(1e-3, 1e3, 61)
    t = 1.0
    closed = half_stable_closed_form(t, taus)
    integral = np.array([
        stable_density(0.5, t, float(tau), method="integral") for tau in taus
    ])
    scale = np.maximum(np.abs(closed), 1e-300)
    assert np.max(np.abs(closed - integral) / scale) <= HALF_ORDER_TOL


def test_branch_agreement_near_crossover():
    # the integral branch serves x < 1 and the series branch x >= 1; both
    # must agree through a band straddling the switch point
    for s in (0.3, 0.6, 0.85):
        for x in np.linspace(0.7, 1.4, 8):
            a = stable_density(s, 1.0, float(x), method="integral")
            b = stable_density(s, 1.0, float(x), method="series")
            assert abs(a - b) <= BRANCH_MATCH_TOL * max(abs(a), 1e-30)


def test_density_normalizes_to_one():
    for s in (0.3, 0.5, 0.7):
        body, _ = quad(
            lambda tau: stable_density(s, 1.0, tau), 0.0, 50.0,
            limit=400, epsabs=1e-12, epsrel=1e-12,
        )
        total = body + tail_mass(s, 50.0)
        assert abs(total - 1.0) <= NORMALIZATION_TOL


def test_scaling_relation_in_time():
    # eta_t(tau) = t^(-1/s) eta_1(tau t^(-1/s))
    for s in (0.25, 0.75):
        for t in (0.2, 5.0):
            for tau in (0.3, 2.0, 9.0):
                lhs = stable_density(s, t, tau)
                scale = t ** (-1.0 / s)
                rhs = scale * stable_density(s, 1.0, tau * scale)
                assert abs(lhs - rhs) <= 1e-12 * max(abs(rhs), 1e-30)


def test_density_is_nonnegative_and_vanishes_at_origin():
    for s in (0.15, 0.5, 0.9):
        taus = np.geomspace(1e-4, 1e3, 40)
        vals = np.array([stable_density(s, 1.0, float(x)) for x in taus])
        assert np.all(vals >= 0.0)
    # decay at 0+ goes like exp(-c tau^(-s/(1-s))), sharp once s >= 1/2
    assert stable_density(0.5, 1.0, 1e-6) <= 1e-50
    assert stable_density(0.9, 1.0, 1e-2) <= 1e-50


def test_laplace_values_vectorized_matches_scalar():
    s = 0.4
    mu = np.array([0.0, 0.5, 3.0, 40.0])
    vec = laplace_values(s, mu)
    for k, m in enumerate(mu):
        assert abs(vec[k] - laplace_values(s, float(m))) <= 1e-14


def test_tail_envelope_dominates_density():
    env = tail_envelope(0.5, 1.0)
    assert env.worst_margin >= 0.0
    taus = np.geomspace(1.0, 100.0, 25)
    dens = np.array([stable_density(0.5, 1.0, float(x)) for x in taus])
    bound = env.constant * taus ** (-1.0 - 0.5)
    assert np.all(dens <= bound * (1.0 + 1e-9))


def test_invalid_order_rejected():
    with pytest.raises(InvalidParameterError):
        stable_density(1.2, 1.0, 1.0)
    with pytest.raises(InvalidParameterError):
        laplace_values(0.0, 1.0)


@settings(max_examples=40, deadline=None)
@given(
    s=st.floats(min_value=0.1, max_value=0.9),
    tau=st.floats(min_value=1e-2, max_value=1e2),
)
def test_density_property_finite_nonnegative(s, tau):
    val = stable_density(s, 1.0, tau)
    assert math.isfinite(val)
    assert val >= 0.0


# analytic tail constant at s = 1/2: sup_tau eta * tau^(3/2) / t is
# (2 sqrt(pi))^(-1), approached as tau -> inf where exp(-t^2/(4 tau)) -> 1
HALF_ENVELOPE_CONSTANT = 0.28209479177387814
HALF_DENSITY_AT_ONE = 0.21969564473386122     # e^(-1/4) / (2 sqrt(pi))
HALF_COMPENSATED_MAX = 0.7668131463818711     # e / (2 sqrt(pi)), at tau = 1/4


def test_half_order_frozen_point_value():
    assert abs(stable_density(0.5, 1.0, 1.0) - HALF_DENSITY_AT_ONE) <= 1e-15
    assert abs(stable_density(0.5, 1.0, 1.0, method="integral")
               - HALF_DENSITY_AT_ONE) <= 1e-9


def test_tail_envelope_constant_is_analytic_and_time_stable():
    env_a = tail_envelope(0.5, 0.5, tau_max=1e7)
    env_b = tail_envelope(0.5, 2.0, tau_max=1e7)
    for env in (env_a, env_b):
        assert env.worst_margin >= 0.0
        assert abs(env.constant - HALF_ENVELOPE_CONSTANT) \
            <= 1e-4 * HALF_ENVELOPE_CONSTANT
        assert env.constant <= HALF_ENVELOPE_CONSTANT * (1.0 + 1e-8)
    # scaling in t makes the fitted constant t-independent
    assert abs(env_a.constant - env_b.constant) <= 1e-6


def test_small_tau_superexponential_regime():
    # eta1(tau) tau^(1+s) e^(tau^-s) stays bounded as tau -> 0 (the density
    # decays faster than any power, beating the compensating exponential)
    for s in (0.3, 0.5, 0.7):
        tau = np.geomspace(1e-3, 0.5, 40)
        dens = np.array([stable_density(s, 1.0, float(x)) for x in tau])
        comp = dens * tau ** (1.0 + s) * np.exp(tau ** (-s))
        assert np.all(np.isfinite(comp))
        if s == 0.5:
            assert np.max(comp) <= HALF_COMPENSATED_MAX * (1.0 + 1e-9)
            at_peak = stable_density(0.5, 1.0, 0.25) * 0.25 ** 1.5 \
                * np.exp(0.25 ** -0.5)
            assert abs(at_peak - HALF_COMPENSATED_MAX) <= 1e-14
