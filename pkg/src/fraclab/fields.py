"""Fractional powers of the generator: kernels, killing terms, three routes.

For a model with generator A and heat semigroup P_t, the fractional operator
of order s in (0, 1) admits three equivalent computable forms:

* spectral:    A^s f = sum_k lambda_k^s <f, phi_k>_w phi_k
* Bochner:     A^s f = s/Gamma(1-s) int_0^inf (f - P_t f) t^(-1-s) dt
* kernel form: (A^s f)_i = sum_{j != i} (f_i - f_j) K(i, j) w_j + R_i f_i

with the jump kernel and killing term

    K(i, j) = s/Gamma(1-s) int_0^inf p(t, i, j) t^(-1-s) dt       (i != j)
    R_i     = s/Gamma(1-s) int_0^inf (1 - Theta(t, i)) t^(-1-s) dt

where Theta(t, i) is the surviving mass. The kernel integrals only converge
when the off-diagonal heat kernel vanishes as t -> 0, which on a finite model
means the modes must span the whole site space; incomplete models are
rejected. All integrands are evaluated through their cancellation-free
eigen-expansion (expm1 coefficient forms), and quadrature uses the certified
two-part Mellin rule. The killing term short-circuits to exactly zero on
conservative models.

Sign caveat, asserted by the test suite where it is a theorem: K >= 0 holds
on every graph model, but on spectrally complete interval/circle models the
far off-diagonal entries oscillate in sign for s > 1/2 (a Gibbs effect of the
truncated symbol); nearest-neighbor entries stay positive at all orders.

The module also carries the closed-form jump kernel of three-dimensional
hyperbolic space, used as an analytic large-space reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DiagonalPairError,
    InvalidParameterError,
    UnsupportedModelError,
    require_order,
)
from .models import SpectralModel
from .quadrature import (
    QuadratureResult,
    mellin_integrate,
    panel_nodes,
    sigma_prefactor,
)

__all__ = [
    "FractionalField",
    "fractional_field",
    "jump_kernel",
    "jump_kernel_matrix",
    "killing_term",
    "apply_spectral",
    "apply_bochner",
    "apply_jump_part",
    "decomposition_residual",
    "zero_mean_terms",
    "energy_form",
    "sobolev_norm",
    "hyperbolic3_heat_kernel",
    "hyperbolic3_jump_kernel",
    "hyperbolic3_mass",
]

_FIELD_CACHE: dict[tuple[str, float], "FractionalField"] = {}


@dataclass(frozen=True)
class FractionalField:
    """Jump kernel and killing term of A^s on a complete model.

    kernel[i, j] is K(i, j) with zero diagonal; killing[i] is R_i;
    mode_powers[k] holds the per-mode Mellin value (the quadrature's rendering
    of lambda_k^s) from which both are assembled. quadrature_error and
    tail_bound document the certified accuracy of those values.
    """

    model_key: str
    s: float
    kernel: np.ndarray
    killing: np.ndarray
    mode_powers: np.ndarray
    quadrature_error: float
    tail_bound: float


def _mellin_window(model: SpectralModel) -> tuple[float, float]:
    lam = model.eigenvalues[~model.zero_mode_mask]
    if lam.size == 0:
        raise UnsupportedModelError(
            "kernel quadrature needs at least one positive eigenvalue"
        )
    lam_min = float(lam[0])
    return lam_min, max(37.0 / lam_min, 2.0)


def _mode_power_quadrature(model: SpectralModel, s: float) -> QuadratureResult:
    """Per-mode Mellin integrals J_k = int_0^inf (1 - e^(-lambda_k t)) t^(-1-s) dt,
    evaluated jointly by the certified rule. With the s/Gamma(1-s) prefactor
    J_k renders lambda_k^s through the quadrature route."""
    lam = model.eigenvalues.copy()
    lam[model.zero_mode_mask] = 0.0
    lam_min, T_max = _mellin_window(model)

    def g(t: np.ndarray) -> np.ndarray:
        return -np.expm1(-np.outer(t, lam))

    def g_over_t(t: np.ndarray) -> np.ndarray:
        return -np.expm1(-np.outer(t, lam)) / t[:, None]

    g_limit = (lam > 0).astype(float)
    tail = math.exp(-lam_min * T_max) * T_max ** (-s) / s
    return mellin_integrate(
        s, g_over_t, g, T_max=T_max, g_limit=g_limit, tail_bound=tail,
    )


def fractional_field(model: SpectralModel, s: float) -> FractionalField:
    """Build (or fetch from cache) the kernel field of A^s on a complete model.

    The off-diagonal heat kernel p(t, i, j) = sum_k e^(-lambda_k t)
    phi_k(i) phi_k(j) is integrated against t^(-1-s) through its
    cancellation-free regrouping sum_k (e^(-lambda_k t) - 1) phi_k phi_k
    (valid off the diagonal because the complete mode family resolves the
    identity), so the kernel assembles from the per-mode quadrature values.
    The killing term integrates 1 - Theta(t, i) the same way and is exactly
    zero on conservative models.
    """
    s = require_order(s)
    cached = _FIELD_CACHE.get((model.key, s))
    if cached is not None:
        return cached
    if not model.complete:
        raise UnsupportedModelError(
            "kernel quadrature requires a spectrally complete model "
            f"(modes {model.n_modes} < sites {model.n_sites}); the off-diagonal "
            "heat kernel of a truncated family does not vanish at t -> 0"
        )

    pref = sigma_prefactor(s)
    quad = _mode_power_quadrature(model, s)
    mode_powers = pref * np.asarray(quad.value)

    scaled = mode_powers[:, None] * model.modes
    kernel = -(model.modes.T @ scaled)
    np.fill_diagonal(kernel, 0.0)

    if model.conservative:
        killing = np.zeros(model.n_sites)
    else:
        c0 = model.coefficients(np.ones(model.n_sites))
        killing = (c0 * mode_powers) @ model.modes

    field = FractionalField(
        model_key=model.key, s=s, kernel=kernel, killing=killing,
        mode_powers=mode_powers,
        quadrature_error=pref * quad.error_estimate,
        tail_bound=pref * quad.tail_bound,
    )
    if len(_FIELD_CACHE) > 64:
        _FIELD_CACHE.clear()
    _FIELD_CACHE[(model.key, s)] = field
    return field


def jump_kernel(model: SpectralModel, s: float, i: int, j: int) -> float:
    """Jump kernel K(i, j) of A^s; undefined on the diagonal."""
    if int(i) == int(j):
        raise DiagonalPairError(f"jump kernel is undefined on the diagonal, got i=j={i}")
    return float(fractional_field(model, s).kernel[int(i), int(j)])


def jump_kernel_matrix(model: SpectralModel, s: float) -> np.ndarray:
    """Full kernel matrix K with zero diagonal."""
    return fractional_field(model, s).kernel.copy()


def killing_term(model: SpectralModel, s: float) -> np.ndarray:
    """Killing term R of A^s (identically zero on conservative models)."""
    return fractional_field(model, s).killing.copy()


def _coeffs(model: SpectralModel, f: np.ndarray) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape != (model.n_sites,):
        raise InvalidParameterError(
            f"field must have shape ({model.n_sites},), got {f.shape}"
        )
    return model.coefficients(f)


def apply_spectral(model: SpectralModel, s: float, f: np.ndarray) -> np.ndarray:
    """A^s f by the spectral route sum_k lambda_k^s <f, phi_k>_w phi_k."""
    s = require_order(s)
    c = _coeffs(model, f)
    lam = model.eigenvalues
    lp = np.where(lam > 0, lam, 1.0) ** s * (lam > 0)
    return (c * lp) @ model.modes


def apply_bochner(
    model: SpectralModel, s: float, f: np.ndarray, target: float | None = None
) -> np.ndarray:
    """A^s f by the Bochner route, a genuine site-space quadrature of

        s/Gamma(1-s) int_0^inf (f - P_t f) t^(-1-s) dt.

    The integrand vector is synthesized per quadrature node from expm1
    coefficient differences; no lambda^s is ever formed, which makes this an
    independent cross-check of the spectral route. f must lie in the mode
    span, which on complete models is no restriction.
    """
    s = require_order(s)
    c = _coeffs(model, f)
    if not model.complete:
        recon = model.synthesize(c)
        if np.max(np.abs(recon - f)) > 1e-10 * max(1.0, np.max(np.abs(f))):
            raise UnsupportedModelError(
                "Bochner route needs f in the mode span; this incomplete model "
                "does not resolve the given field"
            )
    lam = model.eigenvalues.copy()
    lam[model.zero_mode_mask] = 0.0
    lam_min, T_max = _mellin_window(model)

    def g(t: np.ndarray) -> np.ndarray:
        return (-np.expm1(-np.outer(t, lam)) * c[None, :]) @ model.modes

    def g_over_t(t: np.ndarray) -> np.ndarray:
        return ((-np.expm1(-np.outer(t, lam)) / t[:, None]) * c[None, :]) @ model.modes

    pos = lam > 0
    g_limit = (c * pos) @ model.modes
    amp = float(np.sum(np.abs(c[pos])[:, None] * np.abs(model.modes[pos]), axis=0).max())
    tail = amp * math.exp(-lam_min * T_max) * T_max ** (-s) / s
    quad = mellin_integrate(
        s, g_over_t, g, T_max=T_max, g_limit=g_limit, tail_bound=tail, target=target,
    )
    return sigma_prefactor(s) * np.asarray(quad.value)


def apply_jump_part(model: SpectralModel, s: float, f: np.ndarray) -> np.ndarray:
    """The pure-jump part sum_{j != i} (f_i - f_j) K(i, j) w_j of the kernel
    form (killing term not included)."""
    field = fractional_field(model, s)
    f = np.asarray(f, dtype=float)
    if f.shape != (model.n_sites,):
        raise InvalidParameterError(
            f"field must have shape ({model.n_sites},), got {f.shape}"
        )
    row_mass = field.kernel @ model.weights
    return f * row_mass - field.kernel @ (f * model.weights)


def decomposition_residual(model: SpectralModel, s: float, f: np.ndarray) -> float:
    """Max-abs defect of A^s f = jump part + killing * f across the sites."""
    spectral = apply_spectral(model, s, f)
    field = fractional_field(model, s)
    kernel_form = apply_jump_part(model, s, f) + field.killing * np.asarray(f, dtype=float)
    return float(np.max(np.abs(spectral - kernel_form)))


def zero_mean_terms(model: SpectralModel, s: float, f: np.ndarray) -> tuple[float, float]:
    """Total mass of A^s f against the weights, and the killing pairing.

    Returns (sum_i (A^s f)_i w_i, sum_i R_i f_i w_i); the two agree because
    the jump part is antisymmetric under the weighted sum, so on conservative
    models the total is zero for every field.
    """
    total = float(np.sum(apply_spectral(model, s, f) * model.weights))
    pairing = float(np.sum(killing_term(model, s) * np.asarray(f) * model.weights))
    return total, pairing


def energy_form(model: SpectralModel, s: float, f: np.ndarray, g: np.ndarray) -> float:
    """Dirichlet form of order s: sum_k lambda_k^s <f, phi_k>_w <g, phi_k>_w."""
    s = require_order(s)
    cf = _coeffs(model, f)
    cg = _coeffs(model, g)
    lam = model.eigenvalues
    lp = np.where(lam > 0, lam, 1.0) ** s * (lam > 0)
    return float(np.sum(lp * cf * cg))


def sobolev_norm(model: SpectralModel, s: float, f: np.ndarray) -> float:
    """Fractional Sobolev norm (sum_k (1 + lambda_k^(2s)) |<f, phi_k>_w|^2)^(1/2)."""
    s = require_order(s)
    c = _coeffs(model, f)
    lam = model.eigenvalues
    lp = np.where(lam > 0, lam, 1.0) ** (2.0 * s) * (lam > 0)
    return float(math.sqrt(np.sum((1.0 + lp) * c * c)))


# -- hyperbolic 3-space ------------------------------------------------------


def _check_radius(r: np.ndarray) -> np.ndarray:
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if (r < 0).any() or not np.isfinite(r).all():
        raise InvalidParameterError("radii must be finite and nonnegative")
    return r


def hyperbolic3_heat_kernel(t: float, r: np.ndarray | float) -> np.ndarray | float:
    """Closed-form heat kernel of hyperbolic 3-space,

        p(t, r) = (4 pi t)^(-3/2) * (r / sinh r) * exp(-t - r^2 / (4t)).
    """
    t = float(t)
    if t <= 0:
        raise InvalidParameterError(f"time t must be positive, got {t}")
    rr = _check_radius(r)
    # log form keeps sinh from overflowing at large radii
    safe = np.where(rr > 0, rr, 1.0)
    log_ratio = np.where(
        rr > 0, np.log(safe) - safe - np.log1p(-np.exp(-2.0 * safe)) + math.log(2.0), 0.0
    )
    log_p = -1.5 * math.log(4.0 * math.pi * t) + log_ratio - t - rr * rr / (4.0 * t)
    out = np.where(log_p > -745.0, np.exp(np.clip(log_p, -745.0, 700.0)), 0.0)
    return out if np.ndim(r) else float(out[0])


def hyperbolic3_jump_kernel(s: float, r: np.ndarray | float) -> np.ndarray | float:
    """Jump kernel of the s-fractional Laplacian on hyperbolic 3-space,

        K(r) = s/Gamma(1-s) int_0^inf p(t, r) t^(-1-s) dt,

    singular like r^(-3-2s) at small r and decaying like r^(-1-s) e^(-2r).
    Evaluated by saddle-centered log-time Gauss panels, accurate to about
    1e-12 relative over r in [1e-6, 50].
    """
    s = require_order(s)
    rr = _check_radius(r)
    if (rr == 0).any():
        raise InvalidParameterError("hyperbolic jump kernel diverges at r = 0")
    pref = sigma_prefactor(s)
    out = np.empty_like(rr)
    for idx, radius in enumerate(rr):
        # exponent -t - r^2/(4t) peaks at t0 = r/2 with value -r; keep the
        # window where it is within 80 + algebraic margin of the peak
        reach = radius + 80.0
        t_hi = reach + math.sqrt(max(reach * reach - radius * radius, 0.0))
        t_lo = radius * radius / (4.0 * t_hi)
        t_lo /= 50.0
        t_hi *= 20.0
        n_pan = max(int(math.ceil((math.log(t_hi) - math.log(t_lo)) / 0.5)), 2)
        y_edges = np.linspace(math.log(t_lo), math.log(t_hi), n_pan + 1)
        y, wy = panel_nodes(list(zip(y_edges[:-1], y_edges[1:])), 24)
        t_nodes = np.exp(y)
        vals = hyperbolic3_heat_kernel_vec_t(t_nodes, radius)
        out[idx] = pref * float(np.sum(wy * vals * t_nodes ** (-s)))
    return out if np.ndim(r) else float(out[0])


def hyperbolic3_heat_kernel_vec_t(t: np.ndarray, r: float) -> np.ndarray:
    """p(t, r) vectorized over time at a fixed radius."""
    t = np.asarray(t, dtype=float)
    if (t <= 0).any():
        raise InvalidParameterError("times must be positive")
    if r <= 0:
        raise InvalidParameterError("radius must be positive")
    log_ratio = math.log(r) - r - math.log1p(-math.exp(-2.0 * r)) + math.log(2.0)
    log_p = -1.5 * np.log(4.0 * math.pi * t) + log_ratio - t - r * r / (4.0 * t)
    return np.where(log_p > -745.0, np.exp(np.clip(log_p, -745.0, 700.0)), 0.0)


def hyperbolic3_mass(t: float) -> float:
    """Total heat mass int_0^inf p(t, r) 4 pi sinh(r)^2 dr, equal to 1.

    The product p * sinh^2 is fused in exponent form so no intermediate
    overflows; used as a certification of the closed-form kernel.
    """
    t = float(t)
    if t <= 0:
        raise InvalidParameterError(f"time t must be positive, got {t}")
    # integrand ~ exp(r - r^2/4t) beyond the sinh growth; cut where the
    # exponent falls 60 below its peak at r = 2t
    r_max = 2.0 * t + math.sqrt(4.0 * t * t + 240.0 * t) + 10.0
    n_pan = max(int(math.ceil(r_max / min(math.sqrt(t), 1.0))), 8)
    edges = np.linspace(0.0, r_max, n_pan + 1)
    r, wr = panel_nodes(list(zip(edges[:-1], edges[1:])), 24)
    base = -1.5 * math.log(4.0 * math.pi * t) + math.log(4.0 * math.pi) - t
    common = base + np.log(r) - r * r / (4.0 * t) - math.log(2.0)
    # r * sinh(r) = r (e^r - e^(-r)) / 2, assembled in log space
    plus = np.exp(np.clip(common + r, -745.0, 700.0))
    minus = np.exp(np.clip(common - r, -745.0, 700.0))
    return float(np.sum(wr * (plus - minus)))
