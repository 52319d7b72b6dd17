"""Weighted spectral models: finite site sets carrying a heat semigroup.

A model is a finite site set {x_i} with positive weights w_i, together with an
orthonormal family of modes phi_k (rows of `modes`, orthonormal in the
weighted inner product <f, g>_w = sum_i f_i g_i w_i) and eigenvalues
lambda_k >= 0. The generator A acts by A f = sum_k lambda_k <f, phi_k>_w phi_k
and the heat semigroup by P_t = exp(-t A).

Four kinds are supported:

* "dirichlet-interval": sine modes on the uniform interior grid of (0, L).
  With m = n the discrete sine family is a complete orthogonal basis of the
  site space (exact discrete orthogonality).
* "neumann-interval": cosine modes on the midpoint grid; mode indices
  0..m_index, complete when m_index = n - 1 (DCT-II orthogonality).
* "circle": Fourier modes on the uniform grid of a circle of circumference L;
  frequencies 0..m_index give 2 m_index + 1 modes, complete when
  n = 2 m_index + 1.
* "graph": arbitrary finite weighted graph with optional site-dependent
  killing; modes come from the dense symmetrized eigenproblem.

heat_kernel uses a dual representation on the interval kinds: below the
spectral-reliability threshold t_star the truncated eigenseries is replaced by
the method of images (reflected or wrapped Gaussians, terms dropped once they
fall below 1e-16 relative), above it the eigenseries is used. On graphs the
eigenseries is exact at all times.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh
from scipy.sparse.csgraph import shortest_path

from .errors import InvalidParameterError, UnsupportedModelError

__all__ = [
    "SpectralModel",
    "HeatMassProfile",
    "build_dirichlet_interval",
    "build_neumann_interval",
    "build_circle",
    "build_graph",
    "heat_kernel",
    "mass_profile",
    "theta_infinity",
    "spectral_bottom",
    "model_operator",
    "random_field",
    "model_from_config",
    "model_summary",
]

MODEL_KINDS = ("dirichlet-interval", "neumann-interval", "circle", "graph")
EPS_TRUNC = 1e-8          # documented truncation slack for positivity statements
_INTERVAL_KINDS = ("dirichlet-interval", "neumann-interval", "circle")


@dataclass(frozen=True)
class SpectralModel:
    """Immutable bundle of sites, weights, modes and eigenvalues.

    Attributes
    ----------
    kind : str
        One of MODEL_KINDS.
    points : ndarray, shape (n,)
        Site coordinates (interval kinds) or site indices (graphs).
    weights : ndarray, shape (n,)
        Positive quadrature weights of the sites.
    eigenvalues : ndarray, shape (m,)
        Nonnegative, ascending.
    modes : ndarray, shape (m, n)
        Row k is the mode phi_k, orthonormal in the weighted inner product.
    distances : ndarray, shape (n, n)
        Metric used by off-diagonal diagnostics; geodesic distance on the
        interval kinds, hop distance on graphs (inf across components).
    conservative : bool
        True when the semigroup preserves constants (no killing, no
        Dirichlet boundary).
    length : float or None
        Interval length or circumference; None on graphs.
    key : str
        Content-derived identifier, stable across processes.
    """

    kind: str
    points: np.ndarray
    weights: np.ndarray
    eigenvalues: np.ndarray
    modes: np.ndarray
    distances: np.ndarray
    conservative: bool
    length: float | None
    key: str

    @property
    def n_sites(self) -> int:
        return self.points.shape[0]

    @property
    def n_modes(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def complete(self) -> bool:
        """True when the modes span the whole site space."""
        return self.n_modes == self.n_sites

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])

    @property
    def zero_mode_mask(self) -> np.ndarray:
        tol = 1e-9 * max(1.0, self.lambda_max)
        return self.eigenvalues <= tol

    @property
    def eps_trunc(self) -> float:
        """Declared truncation slack; separation statements must clear 10x this."""
        return EPS_TRUNC

    @property
    def heat_threshold(self) -> float:
        """Crossover time t_star of the dual heat-kernel representation.

        Below t_star the truncated eigenseries on interval kinds is not
        reliable and the method of images is used instead. The classical
        estimate L^2/(pi^2 m) is floored so the dropped eigenseries tail
        exp(-lambda_max t_star) stays below 1e-12 even at small m.
        """
        if self.kind == "graph":
            return 0.0
        m_index = self._top_index()
        return max(self.length**2 / (math.pi**2 * m_index), 28.0 / self.lambda_max)

    def _top_index(self) -> int:
        if self.kind == "circle":
            return (self.n_modes - 1) // 2
        if self.kind == "neumann-interval":
            return self.n_modes - 1
        return self.n_modes

    def inner(self, f: np.ndarray, g: np.ndarray) -> float:
        return float(np.sum(f * g * self.weights))

    def coefficients(self, f: np.ndarray) -> np.ndarray:
        """Mode coefficients <f, phi_k>_w; f may have leading batch axes."""
        return np.asarray(f) @ (self.modes * self.weights).T

    def synthesize(self, coeffs: np.ndarray) -> np.ndarray:
        return np.asarray(coeffs) @ self.modes


@dataclass(frozen=True)
class HeatMassProfile:
    """Heat-content trace: Theta(t, i) = sum_j p(t, i, j) w_j on a time grid."""

    times: np.ndarray
    values: np.ndarray          # shape (len(times), n)
    theta_infinity: np.ndarray  # shape (n,)


def _content_key(kind: str, *arrays: np.ndarray) -> str:
    h = hashlib.sha256(kind.encode())
    for a in arrays:
        h.update(np.ascontiguousarray(a, dtype=float).tobytes())
    return h.hexdigest()[:16]


def _check_interval_args(L: float, m: int, n: int) -> tuple[float, int, int]:
    L = float(L)
    if not (L > 0.0) or not math.isfinite(L):
        raise InvalidParameterError(f"length L must be positive, got {L}")
    m = int(m)
    n = int(n)
    if n < 2:
        raise InvalidParameterError(f"need at least 2 sites, got n={n}")
    if m < 1:
        raise InvalidParameterError(f"need at least 1 mode, got m={m}")
    return L, m, n


def build_dirichlet_interval(L: float, m: int, n: int) -> SpectralModel:
    """Interval (0, L) with absorbing boundary, n interior sites, m sine modes.

    Sites x_i = i L / (n+1), weights L / (n+1). Requires m <= n; at m = n the
    modes form a complete orthogonal basis of the site space.
    """
    L, m, n = _check_interval_args(L, m, n)
    if m > n:
        raise InvalidParameterError(
            f"sine modes are only orthogonal for m <= n, got m={m}, n={n}"
        )
    h = L / (n + 1)
    x = h * np.arange(1, n + 1, dtype=float)
    k = np.arange(1, m + 1, dtype=float)
    lam = (k * math.pi / L) ** 2
    modes = math.sqrt(2.0 / L) * np.sin(np.outer(k, x) * (math.pi / L))
    dist = np.abs(x[:, None] - x[None, :])
    key = _content_key("dirichlet-interval", np.array([L]), x, lam)
    return SpectralModel(
        kind="dirichlet-interval", points=x, weights=np.full(n, h),
        eigenvalues=lam, modes=modes, distances=dist,
        conservative=False, length=L, key=key,
    )


def build_neumann_interval(L: float, m_index: int, n: int) -> SpectralModel:
    """Interval (0, L) with reflecting boundary on the midpoint grid.

    Sites x_i = (i - 1/2) L / n; cosine modes with indices 0..m_index,
    m_index + 1 eigenpairs in total including the constant. Requires
    m_index <= n - 1; complete at equality (DCT-II orthogonality).
    """
    L, m_index, n = _check_interval_args(L, m_index, n)
    if m_index > n - 1:
        raise InvalidParameterError(
            f"cosine modes are only orthogonal for m_index <= n-1, "
            f"got m_index={m_index}, n={n}"
        )
    h = L / n
    x = h * (np.arange(n, dtype=float) + 0.5)
    k = np.arange(0, m_index + 1, dtype=float)
    lam = (k * math.pi / L) ** 2
    modes = math.sqrt(2.0 / L) * np.cos(np.outer(k, x) * (math.pi / L))
    modes[0] = math.sqrt(1.0 / L)
    dist = np.abs(x[:, None] - x[None, :])
    key = _content_key("neumann-interval", np.array([L]), x, lam)
    return SpectralModel(
        kind="neumann-interval", points=x, weights=np.full(n, h),
        eigenvalues=lam, modes=modes, distances=dist,
        conservative=True, length=L, key=key,
    )


def build_circle(L: float, m_index: int, n: int) -> SpectralModel:
    """Circle of circumference L, n equispaced sites, frequencies 0..m_index.

    Carries 2 m_index + 1 modes (constant plus cosine/sine pairs). Requires
    n >= 2 m_index + 1 to avoid aliasing; complete at equality.
    """
    L, m_index, n = _check_interval_args(L, m_index, n)
    if n < 2 * m_index + 1:
        raise InvalidParameterError(
            f"circle modes alias unless n >= 2*m_index+1, got m_index={m_index}, n={n}"
        )
    h = L / n
    x = h * np.arange(n, dtype=float)
    freqs = np.arange(1, m_index + 1, dtype=float)
    lam_pairs = (2.0 * math.pi * freqs / L) ** 2
    lam = np.concatenate([[0.0], np.repeat(lam_pairs, 2)])
    rows = [np.full(n, math.sqrt(1.0 / L))]
    for k in freqs:
        arg = 2.0 * math.pi * k * x / L
        rows.append(math.sqrt(2.0 / L) * np.cos(arg))
        rows.append(math.sqrt(2.0 / L) * np.sin(arg))
    modes = np.vstack(rows)
    diff = np.abs(x[:, None] - x[None, :])
    dist = np.minimum(diff, L - diff)
    key = _content_key("circle", np.array([L]), x, lam)
    return SpectralModel(
        kind="circle", points=x, weights=np.full(n, h),
        eigenvalues=lam, modes=modes, distances=dist,
        conservative=True, length=L, key=key,
    )


def build_graph(
    edge_weights: np.ndarray,
    killing: np.ndarray | float = 0.0,
    site_weights: np.ndarray | None = None,
) -> SpectralModel:
    """Finite weighted graph with optional killing.

    Parameters
    ----------
    edge_weights : ndarray, shape (n, n)
        Symmetric, nonnegative, zero diagonal.
    killing : ndarray or float
        Nonnegative killing rate per site; scalar broadcasts.
    site_weights : ndarray, optional
        Positive site measure w_i; defaults to 1.

    The generator is (A f)_i = (1/w_i) sum_j W_ij (f_i - f_j) + b_i f_i,
    symmetric in the weighted inner product. Modes come from the dense
    eigenproblem of the conjugated matrix; the model is always complete.
    """
    W = np.asarray(edge_weights, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise InvalidParameterError(f"edge_weights must be square, got shape {W.shape}")
    n = W.shape[0]
    if n < 1:
        raise InvalidParameterError("graph needs at least one site")
    if not np.allclose(W, W.T, atol=1e-12):
        raise InvalidParameterError("edge_weights must be symmetric")
    if (W < 0).any():
        raise InvalidParameterError("edge_weights must be nonnegative")
    if np.abs(np.diag(W)).max(initial=0.0) > 0:
        raise InvalidParameterError("edge_weights must have zero diagonal")
    b = np.broadcast_to(np.asarray(killing, dtype=float), (n,)).copy()
    if (b < 0).any():
        raise InvalidParameterError("killing rates must be nonnegative")
    if site_weights is None:
        w = np.ones(n)
    else:
        w = np.asarray(site_weights, dtype=float)
        if w.shape != (n,) or (w <= 0).any():
            raise InvalidParameterError("site_weights must be positive, shape (n,)")

    deg = W.sum(axis=1)
    sqrt_w = np.sqrt(w)
    S = (np.diag(deg) - W) / np.outer(sqrt_w, sqrt_w) + np.diag(b)
    lam, V = eigh(S)
    if lam[0] < -1e-10 * max(1.0, abs(lam[-1])):
        raise InvalidParameterError(f"generator has a negative eigenvalue {lam[0]}")
    lam = np.clip(lam, 0.0, None)
    modes = V.T / sqrt_w[None, :]

    hop = shortest_path((W > 0).astype(float), method="D", unweighted=True)
    key = _content_key("graph", W, b, w)
    return SpectralModel(
        kind="graph", points=np.arange(n, dtype=float), weights=w,
        eigenvalues=lam, modes=modes, distances=hop,
        conservative=bool((b == 0).all()), length=None, key=key,
    )


# -- heat kernel -------------------------------------------------------------


def _gauss_images(model: SpectralModel, t: float) -> np.ndarray:
    """Method-of-images kernel on the interval kinds for small t."""
    L = model.length
    x = model.points
    norm = 1.0 / math.sqrt(4.0 * math.pi * t)
    # images beyond |z| > sqrt(4 t * 45) contribute < 1e-16 relative
    z_max = math.sqrt(4.0 * t * 45.0)
    period = L if model.kind == "circle" else 2.0 * L
    K = int(math.ceil((z_max + period) / period))
    diff = x[:, None] - x[None, :]
    total = np.zeros_like(diff)
    for k in range(-K, K + 1):
        total += np.exp(-((diff - k * period) ** 2) / (4.0 * t))
        if model.kind == "dirichlet-interval":
            total -= np.exp(-((x[:, None] + x[None, :] - k * period) ** 2) / (4.0 * t))
        elif model.kind == "neumann-interval":
            total += np.exp(-((x[:, None] + x[None, :] - k * period) ** 2) / (4.0 * t))
    return norm * total


def _eigenseries_kernel(model: SpectralModel, t: float) -> np.ndarray:
    damp = np.exp(-model.eigenvalues * t)
    return model.modes.T @ (damp[:, None] * model.modes)


def heat_kernel(
    model: SpectralModel, t: float, i: int | None = None, j: int | None = None
) -> np.ndarray | float:
    """Heat kernel p(t, i, j) with respect to the site weights.

    Returns the full (n, n) matrix, or the single entry when both i and j are
    given. Symmetric; sum_j p(t, i, j) w_j is the surviving mass.
    """
    t = float(t)
    if not (t > 0.0) or not math.isfinite(t):
        raise InvalidParameterError(f"time t must be positive, got {t}")
    if model.kind in _INTERVAL_KINDS and t < model.heat_threshold:
        P = _gauss_images(model, t)
    else:
        P = _eigenseries_kernel(model, t)
    if (i is None) != (j is None):
        raise InvalidParameterError("pass both i and j or neither")
    if i is not None:
        return float(P[int(i), int(j)])
    return P


def theta_infinity(model: SpectralModel) -> np.ndarray:
    """Limit of the surviving mass: projection of the constant 1 onto the
    kernel of the generator (all ones when conservative, zero under
    killing-everywhere or Dirichlet boundary)."""
    mask = model.zero_mode_mask
    if not mask.any():
        return np.zeros(model.n_sites)
    c0 = model.coefficients(np.ones(model.n_sites))
    return (c0 * mask) @ model.modes


def mass_profile(model: SpectralModel, t_grid: np.ndarray) -> HeatMassProfile:
    """Surviving-mass trace Theta(t, i) = sum_j p(t, i, j) w_j over t_grid."""
    times = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if (times <= 0).any():
        raise InvalidParameterError("t_grid entries must be positive")
    vals = np.empty((times.size, model.n_sites))
    for a, t in enumerate(times):
        vals[a] = heat_kernel(model, t) @ model.weights
    return HeatMassProfile(times=times, values=vals, theta_infinity=theta_infinity(model))


def spectral_bottom(model: SpectralModel) -> float:
    """Smallest eigenvalue of the generator (0 exactly when conservative)."""
    return float(model.eigenvalues[0])


def model_operator(model: SpectralModel, power: float = 1.0) -> np.ndarray:
    """Dense matrix of A^power acting on site vectors (0^power := 0)."""
    if power < 0:
        raise InvalidParameterError(f"power must be nonnegative, got {power}")
    lam = model.eigenvalues
    lp = np.where(lam > 0, lam, 1.0) ** power * (lam > 0)
    return model.modes.T @ (lp[:, None] * model.modes) * model.weights[None, :]


def random_field(
    model: SpectralModel, rng: np.random.Generator, size: int | None = None
) -> np.ndarray:
    """Gaussian fields drawn in the model's mode span.

    Coefficients are iid standard normals, so on complete models this is a
    nondegenerate distribution over the whole site space.
    """
    count = 1 if size is None else int(size)
    coeffs = rng.standard_normal((count, model.n_modes))
    fields = model.synthesize(coeffs)
    return fields[0] if size is None else fields


# -- configuration -----------------------------------------------------------


def model_from_config(cfg: dict) -> SpectralModel:
    """Build a model from its JSON description.

    Interval kinds: {"kind", "L", "modes", "grid"}. Graphs: {"kind": "graph",
    "sites", "edges": [[i, j, weight], ...], "killing", "weights"} with
    killing and weights optional (scalar or per-site list).
    """
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise InvalidParameterError("model config must be a dict with a 'kind' field")
    kind = cfg["kind"]
    if kind == "dirichlet-interval":
        return build_dirichlet_interval(cfg["L"], cfg["modes"], cfg["grid"])
    if kind == "neumann-interval":
        return build_neumann_interval(cfg["L"], cfg["modes"], cfg["grid"])
    if kind == "circle":
        return build_circle(cfg["L"], cfg["modes"], cfg["grid"])
    if kind == "graph":
        n = int(cfg["sites"])
        W = np.zeros((n, n))
        for i, j, wt in cfg["edges"]:
            W[int(i), int(j)] = float(wt)
            W[int(j), int(i)] = float(wt)
        killing = cfg.get("killing", 0.0)
        if isinstance(killing, list):
            killing = np.asarray(killing, dtype=float)
        weights = cfg.get("weights")
        if weights is not None:
            weights = np.asarray(weights, dtype=float)
        return build_graph(W, killing=killing, site_weights=weights)
    raise InvalidParameterError(f"unknown model kind {kind!r}")


def model_summary(model: SpectralModel) -> dict:
    """JSON-serializable description of a model (used by the CLI)."""
    theta = theta_infinity(model)
    return {
        "kind": model.kind,
        "key": model.key,
        "sites": model.n_sites,
        "modes": model.n_modes,
        "complete": model.complete,
        "conservative": model.conservative,
        "length": model.length,
        "eigenvalue_min": float(model.eigenvalues[0]),
        "eigenvalue_max": float(model.eigenvalues[-1]),
        "eps_trunc": model.eps_trunc,
        "heat_threshold": model.heat_threshold,
        "theta_infinity_range": [float(theta.min()), float(theta.max())],
        "weight_total": float(model.weights.sum()),
    }
