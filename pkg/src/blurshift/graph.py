"""Proximity graph of a configuration and its structural classification.

Vertices are point indices; an edge joins two distinct points whenever the
kernel weight of their difference is nonzero.  For a truncated kernel this
is a unit-ball graph with ball radius ``beta * h`` (closed at the boundary
for non-smoothly truncated kernels under the left-derivative weight
convention, open for smoothly truncated ones).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_array
from scipy.sparse.csgraph import connected_components

from .config import as_configuration, pairwise_sqdist, profile_args
from .kernels import KernelSpec

__all__ = [
    "BmsGraph",
    "GraphClassification",
    "build_graph",
    "classify",
    "component_count_bound",
    "is_fixed_point",
    "graph_to_json",
]


@dataclass(frozen=True)
class BmsGraph:
    """Adjacency plus component partition of a configuration's graph.

    ``labels[i]`` is the component index of vertex ``i``; components are
    numbered contiguously from 0 in order of their smallest vertex index.
    """

    n: int
    adjacency: np.ndarray  # (n, n) bool, symmetric, zero diagonal
    labels: np.ndarray  # (n,) int
    components: tuple[np.ndarray, ...]

    @property
    def M(self) -> int:
        return len(self.components)

    def edge_list(self) -> np.ndarray:
        i, j = np.nonzero(np.triu(self.adjacency, 1))
        return np.column_stack([i, j])


def _canonical_components(labels: np.ndarray) -> tuple[np.ndarray, tuple[np.ndarray, ...]]:
    # renumber component labels by smallest member index for reproducibility
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    remap = np.empty_like(order)
    remap[order] = np.arange(order.size)
    labels = remap[labels]
    comps = tuple(np.flatnonzero(labels == m) for m in range(order.size))
    return labels, comps


def build_graph(cfg, kernel: KernelSpec, h: float) -> BmsGraph:
    """Build the proximity graph of a configuration.

    Edge ``{i, j}`` is present iff ``i != j`` and ``g`` is nonzero at the
    pairwise profile argument.  Components come from a union-find style
    sweep (scipy's connected components) with deterministic ordering.

    Nonzeroness follows the exact sign structure of ``g``: a non-truncated
    kernel joins every pair even where the evaluated weight underflows to
    zero in doubles.
    """
    if not h > 0:
        raise ValueError("bandwidth must be positive")
    cfg = as_configuration(cfg)
    if not kernel.truncated:
        adjacency = np.ones((cfg.n, cfg.n), dtype=bool)
    else:
        w = kernel.g(profile_args(pairwise_sqdist(cfg.points), h))
        adjacency = w != 0.0
    np.fill_diagonal(adjacency, False)
    n_comp, labels = connected_components(csr_array(adjacency), directed=False)
    labels, comps = _canonical_components(labels)
    adjacency.setflags(write=False)
    labels.setflags(write=False)
    return BmsGraph(cfg.n, adjacency, labels, comps)


@dataclass(frozen=True)
class GraphClassification:
    """Structural flags of a graph: see module docstring for definitions.

    ``margin`` is the smallest distance of any pair to the joining radius
    ``beta * h`` (``inf`` for non-truncated kernels); a margin below the
    stability tolerance marks the graph unstable because a vanishing
    perturbation can flip an edge.
    """

    closed: bool
    singular: bool
    stable: bool
    margin: float


def classify(graph: BmsGraph, cfg, kernel: KernelSpec, h: float,
             stability_tol: float | None = None) -> GraphClassification:
    """Classify a graph built from ``(cfg, kernel, h)``.

    closed
        Every component is a clique.
    singular
        Every joined pair of points coincides exactly (coincident points
        are joined but do not break singularity).
    stable
        The graph is unchanged by sufficiently small perturbations of the
        configuration; decided by the margin test with tolerance
        ``stability_tol`` (default ``1e-9 * beta * h``).
    """
    cfg = as_configuration(cfg)
    sqd = pairwise_sqdist(cfg.points)

    sizes = np.array([len(c) for c in graph.components])
    # directed edge counts per component; a clique has size*(size-1)
    i, j = np.nonzero(graph.adjacency)
    per_comp = np.bincount(graph.labels[i], minlength=graph.M)
    closed = bool(np.all(per_comp == sizes * (sizes - 1)))

    singular = not bool(np.any(graph.adjacency & (sqd != 0.0)))

    if not kernel.truncated:
        return GraphClassification(closed, singular, True, math.inf)

    radius = kernel.beta * h
    if stability_tol is None:
        stability_tol = 1e-9 * radius
    iu = np.triu_indices(graph.n, 1)
    if iu[0].size == 0:
        margin = math.inf
    else:
        margin = float(np.min(np.abs(np.sqrt(sqd[iu]) - radius)))
    return GraphClassification(closed, singular, margin > stability_tol, margin)


def component_count_bound(n: int, gamma: float, beta: float, h: float, d: int) -> int:
    """Packing upper bound for the number of components.

    ``min{n, (1 + 2*gamma/(beta*h))^d}`` for truncated kernels, where
    ``gamma`` is the largest pairwise distance; ``n`` when the kernel is
    non-truncated (the bound degenerates).
    """
    if not h > 0:
        raise ValueError("bandwidth must be positive")
    if not math.isfinite(beta):
        return n
    return int(min(n, math.floor((1.0 + 2.0 * gamma / (beta * h)) ** d)))


def is_fixed_point(cfg, kernel: KernelSpec, h: float, tol: float = 0.0) -> bool:
    """Whether no point would move: all weighted moment sums vanish.

    True iff ``|| sum_j (u_i - u_j) * g_ij || <= tol`` for every ``i``,
    which is equivalent to graph singularity (exactly in real arithmetic,
    and up to ``tol`` in floats).
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    cfg = as_configuration(cfg)
    y = cfg.points
    diff = y[:, None, :] - y[None, :, :]
    w = kernel.g(profile_args(np.einsum("ijk,ijk->ij", diff, diff), h))
    # summing weighted differences keeps singular configurations at exactly
    # zero (coincident pairs difference to 0.0, separated pairs have w = 0)
    moments = np.einsum("ij,ijk->ik", w, diff)
    return bool(np.all(np.linalg.norm(moments, axis=1) <= tol))


def graph_to_json(graph: BmsGraph) -> dict:
    """JSON-friendly adjacency-list dump for debugging."""
    return {
        "n": graph.n,
        "edges": [[int(a), int(b)] for a, b in graph.edge_list()],
        "components": [[int(v) for v in comp] for comp in graph.components],
        "labels": [int(l) for l in graph.labels],
    }
