"""Standard model zoo used by the test suite and the example scripts.

All members are spectrally complete, so every route (kernel quadrature,
Bochner, decomposition) is available on each of them. Graph weights and
killing rates are fixed arbitrary-looking values chosen once; nothing in the
package depends on their particular magnitudes.
"""

from __future__ import annotations

import math

import numpy as np

from .models import (
    SpectralModel,
    build_circle,
    build_dirichlet_interval,
    build_graph,
    build_neumann_interval,
)

__all__ = [
    "zoo_circle",
    "zoo_dirichlet_interval",
    "zoo_neumann_interval",
    "zoo_graph_killed",
    "zoo_graph_conservative",
    "zoo_two_site",
    "zoo_single_site_killed",
    "default_zoo",
]


def zoo_circle() -> SpectralModel:
    return build_circle(L=2.0 * math.pi, m_index=16, n=33)


def zoo_dirichlet_interval() -> SpectralModel:
    return build_dirichlet_interval(L=math.pi, m=32, n=32)


def zoo_neumann_interval() -> SpectralModel:
    return build_neumann_interval(L=math.pi, m_index=31, n=32)


def _ring_chord_graph() -> tuple[np.ndarray, np.ndarray]:
    n = 10
    W = np.zeros((n, n))
    ring = [1.0, 0.6, 1.4, 0.9, 1.1, 0.7, 1.3, 0.8, 1.2, 1.0]
    for i in range(n):
        j = (i + 1) % n
        W[i, j] = W[j, i] = ring[i]
    chords = [(0, 4, 0.5), (2, 7, 0.35), (3, 8, 0.8), (1, 6, 0.25)]
    for i, j, wt in chords:
        W[i, j] = W[j, i] = wt
    site_w = np.array([1.0, 1.5, 0.8, 1.2, 1.0, 0.6, 1.1, 0.9, 1.3, 0.7])
    return W, site_w


def zoo_graph_killed() -> SpectralModel:
    W, site_w = _ring_chord_graph()
    killing = np.zeros(10)
    killing[0] = 0.5
    killing[7] = 0.3
    return build_graph(W, killing=killing, site_weights=site_w)


def zoo_graph_conservative() -> SpectralModel:
    W, site_w = _ring_chord_graph()
    return build_graph(W, killing=0.0, site_weights=site_w)


def zoo_two_site() -> SpectralModel:
    W = np.array([[0.0, 1.3], [1.3, 0.0]])
    return build_graph(W, killing=0.0, site_weights=np.array([1.0, 2.0]))


def zoo_single_site_killed() -> SpectralModel:
    return build_graph(np.zeros((1, 1)), killing=np.array([0.7]))


def default_zoo() -> dict:
    """Name -> model map covering every kind and both conservation classes."""
    return {
        "circle": zoo_circle(),
        "dirichlet_interval": zoo_dirichlet_interval(),
        "neumann_interval": zoo_neumann_interval(),
        "graph_killed": zoo_graph_killed(),
        "graph_conservative": zoo_graph_conservative(),
        "two_site": zoo_two_site(),
        "single_site_killed": zoo_single_site_killed(),
    }
