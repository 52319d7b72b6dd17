"""Tests for the subordinate semigroup and resolvent.

Route pairs that must agree without sharing code paths:
  * e^(-t A^s) f by spectral damping vs by averaging e^(-tau A) f against
    the stable density (subordination);
  * (A^s + alpha)^(-1) f by spectral division vs by Laplace-transforming
    the subordinate semigroup in time.
"""

import numpy as np
import pytest

from fraclab.errors import InvalidParameterError
from fraclab.models import random_field
from fraclab.semigroups import (
    conservation_defect,
    contraction_report,
    fractional_eigenvalues,
    resolvent_apply,
    smoothing_constant,
    subordinate_apply,
    subordinate_heat_kernel,
    subordinate_threshold,
    weighted_norm,
)
from fraclab.zoo import default_zoo

ROUTE_TOL = 1e-6
RESOLVENT_IDENTITY_TOL = 1e-10
SEMIGROUP_COMPOSE_TOL = 1e-8
CONSERVATION_EXACT_TOL = 1e-12

S_SAMPLE = (0.1, 0.5, 0.9)
T_SAMPLE = (0.1, 1.0, 10.0)


@pytest.fixture(scope="module")
def zoo():
    return default_zoo()


def test_fractional_eigenvalues_keep_exact_zeros(zoo):
    for name in ("circle", "graph_conservative", "two_site"):
        model = zoo[name]
        frac = fractional_eigenvalues(model, 0.3)
        assert np.count_nonzero(frac == 0.0) == int(model.zero_mode_mask.sum())
        pos = model.eigenvalues[~model.zero_mode_mask]
        np.testing.assert_allclose(
            frac[~model.zero_mode_mask], pos ** 0.3, rtol=1e-14
        )


def test_subordination_route_agrees_with_spectral(zoo):
    rng = np.random.default_rng(23)
    for name, model in zoo.items():
        for s in S_SAMPLE:
            for t in T_SAMPLE:
                f = random_field(model, rng)
                a = subordinate_apply(model, s, t, f, route="spectral")
                b = subordinate_apply(model, s, t, f, route="subordination")
                scale = max(1.0, float(np.max(np.abs(f))))
                assert np.max(np.abs(a - b)) <= ROUTE_TOL * scale, (name, s, t)


def test_resolvent_laplace_route_agrees_with_spectral(zoo):
    rng = np.random.default_rng(29)
    for name, model in zoo.items():
        for s in (0.25, 0.75):
            for alpha in (0.1, 1.0, 10.0):
                f = random_field(model, rng)
                a = resolvent_apply(model, s, alpha, f, route="spectral")
                b = resolvent_apply(model, s, alpha, f, route="laplace")
                scale = max(1.0, float(np.max(np.abs(a))))
                assert np.max(np.abs(a - b)) <= ROUTE_TOL * scale, (name, s, alpha)


def test_resolvent_solves_the_equation(zoo):
    from fraclab.fields import apply_spectral

    rng = np.random.default_rng(31)
    for name in ("graph_killed", "circle"):
        model = zoo[name]
        f = random_field(model, rng)
        u = resolvent_apply(model, 0.6, 0.8, f)
        back = apply_spectral(model, 0.6, u) + 0.8 * u
        assert np.max(np.abs(back - f)) <= RESOLVENT_IDENTITY_TOL, name


def test_subordinate_kernel_compose_through_subordination_route(zoo):
    # Chapman-Kolmogorov with both factors from the stable-density route
    model = zoo["graph_killed"]
    s, t, u = 0.6, 0.8, 1.7
    pt = subordinate_heat_kernel(model, s, t, route="subordination")
    pu = subordinate_heat_kernel(model, s, u, route="subordination")
    direct = subordinate_heat_kernel(model, s, t + u, route="subordination")
    composed = pt @ (pu * model.weights[:, None])
    assert np.max(np.abs(composed - direct)) <= SEMIGROUP_COMPOSE_TOL


def test_conservation_defect_sign(zoo):
    for alpha in (0.3, 2.0):
        v = conservation_defect(zoo["circle"], 0.5, alpha)
        assert np.max(np.abs(v)) <= CONSERVATION_EXACT_TOL
        v = conservation_defect(zoo["graph_killed"], 0.5, alpha)
        assert np.min(v) > 0.0
        v = conservation_defect(zoo["dirichlet_interval"], 0.5, alpha)
        assert np.min(v) > 0.0


def test_contraction_package(zoo):
    for name in ("graph_killed", "circle", "dirichlet_interval"):
        model = zoo[name]
        t0 = max(subordinate_threshold(model, 0.6), 1e-3)
        t_grid = np.array([t0, 2.0 * t0, 8.0 * t0])
        rep = contraction_report(model, 0.6, t_grid, seed=5)
        for p, ratios in rep.norm_ratios.items():
            assert max(ratios) <= 1.0 + 1e-12, (name, p)
        assert np.min(rep.kernel_min) >= -1e-12, name
        assert np.max(rep.mass_max) <= 1.0 + 1e-12, name
        assert np.all(np.diff(rep.continuity) >= -1e-12), name


def test_smoothing_constant_decreases_in_time(zoo):
    model = zoo["graph_killed"]
    c = [smoothing_constant(model, 0.4, t) for t in (0.1, 0.5, 2.0, 8.0)]
    assert all(a >= b for a, b in zip(c, c[1:]))


def test_weighted_norms(zoo):
    model = zoo["two_site"]
    f = np.array([3.0, -4.0])
    w = model.weights
    assert weighted_norm(model, f, 1) == pytest.approx(np.sum(np.abs(f) * w))
    assert weighted_norm(model, f, 2) == pytest.approx(
        np.sqrt(np.sum(f ** 2 * w)))
    assert weighted_norm(model, f, np.inf) == pytest.approx(4.0)
    with pytest.raises(InvalidParameterError):
        weighted_norm(model, f, 3)


def test_route_name_validation(zoo):
    model = zoo["two_site"]
    with pytest.raises(InvalidParameterError):
        subordinate_apply(model, 0.5, 1.0, np.ones(2), route="cayley")
    with pytest.raises(InvalidParameterError):
        resolvent_apply(model, 0.5, -1.0, np.ones(2))
