"""Turn terminal blurred configurations into cluster labels and centers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_array
from scipy.sparse.csgraph import connected_components

from .config import as_configuration, pairwise_sqdist
from .diagnostics import diameter
from .engine import BmsRun, IterationRecord, StopRule, objective, run_bms
from .kernels import KernelSpec

__all__ = [
    "ClusterResult",
    "SweepEntry",
    "StandardizeStats",
    "cluster",
    "bandwidth_sweep",
    "standardize",
]


@dataclass(frozen=True)
class ClusterResult:
    """Labels and representatives extracted from a terminal configuration.

    Labels are contiguous ``1..M`` in order of each cluster's smallest
    member index; ``representatives[m-1]`` is the mean terminal position of
    cluster ``m``.  ``T`` is the terminated step count of the underlying
    run and ``trace_summary`` its final iteration record.
    """

    labels: np.ndarray
    representatives: np.ndarray
    T: int
    M: int
    stop_reason: str
    trace_summary: IterationRecord | None
    h: float
    kernel: str

    def to_json_dict(self) -> dict:
        return {
            "labels": [int(l) for l in self.labels],
            "representatives": [[float(x) for x in row] for row in self.representatives],
            "T": self.T,
            "M": self.M,
            "stop_reason": self.stop_reason,
            "h": self.h,
            "kernel": self.kernel,
        }


def _single_linkage_groups(points: np.ndarray, threshold: float) -> np.ndarray:
    """Component labels of the thresholded mutual-distance graph, 0-based,
    numbered by smallest member index."""
    close = pairwise_sqdist(points) <= threshold * threshold
    _, labels = connected_components(csr_array(close), directed=False)
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    remap = np.empty_like(order)
    remap[order] = np.arange(order.size)
    return remap[labels]


def _labels_from_run(run: BmsRun, merge_tol: float) -> tuple[np.ndarray, np.ndarray]:
    terminal = run.final.points
    groups = _single_linkage_groups(terminal, merge_tol)
    m = int(groups.max()) + 1
    reps = np.vstack([terminal[groups == c].mean(axis=0) for c in range(m)])
    return groups + 1, reps


def cluster(points, kernel: KernelSpec, h: float, stop: StopRule | None = None,
            merge_tol: float | None = None) -> ClusterResult:
    """Run the blurring iteration and group the terminal points.

    Terminal points are grouped by single linkage at ``merge_tol``
    (default ``1e-8 *`` initial data diameter): flat-weight truncated
    kernels land clusters on exactly coincident points, while smooth
    kernels only agree to within the stopping tolerance, so grouping by a
    small radius instead of bitwise equality works for both.
    """
    cfg = as_configuration(points)
    if merge_tol is None:
        merge_tol = 1e-8 * diameter(cfg)
    elif merge_tol < 0:
        raise ValueError("merge_tol must be non-negative")
    run = run_bms(cfg, kernel, h, stop=stop)
    labels, reps = _labels_from_run(run, merge_tol)
    return ClusterResult(
        labels=labels,
        representatives=reps,
        T=run.T,
        M=reps.shape[0],
        stop_reason=run.stop_reason,
        trace_summary=run.records[-1] if run.records else None,
        h=float(h),
        kernel=kernel.id,
    )


@dataclass(frozen=True)
class SweepEntry:
    h: float
    M: int
    T: int
    L_final: float


def bandwidth_sweep(points, kernel: KernelSpec, h_grid, stop: StopRule | None = None,
                    merge_tol: float | None = None) -> list[SweepEntry]:
    """One clustering run per bandwidth; no automatic bandwidth selection.

    Returns per-bandwidth summaries ``(h, M, T, L_final)`` where
    ``L_final`` is the objective of the terminal configuration.
    """
    h_grid = [float(h) for h in h_grid]
    if not h_grid:
        raise ValueError("bandwidth grid is empty")
    if any(h <= 0 for h in h_grid):
        raise ValueError("bandwidths must be positive")
    cfg = as_configuration(points)
    if merge_tol is None:
        merge_tol = 1e-8 * diameter(cfg)
    entries = []
    for h in h_grid:
        run = run_bms(cfg, kernel, h, stop=stop)
        _, reps = _labels_from_run(run, merge_tol)
        entries.append(SweepEntry(h=h, M=reps.shape[0], T=run.T,
                                  L_final=objective(run.final, kernel, h)))
    return entries


@dataclass(frozen=True)
class StandardizeStats:
    """Per-axis mean and standard deviation of the original data."""

    mean: np.ndarray
    std: np.ndarray

    def inverse(self, points: np.ndarray) -> np.ndarray:
        """Map standardized coordinates back to the original scale."""
        return np.asarray(points, dtype=float) * self.std + self.mean


def standardize(points) -> tuple[np.ndarray, StandardizeStats]:
    """Z-score each coordinate; fails on constant axes.

    Returns the transformed points and the statistics needed to undo the
    transform (e.g. to map cluster representatives back).
    """
    cfg = as_configuration(points)
    if cfg.n < 2:
        raise ValueError("standardization needs at least 2 points")
    mean = cfg.points.mean(axis=0)
    std = cfg.points.std(axis=0)
    for axis, s in enumerate(std):
        if s == 0.0:
            raise ValueError(f"axis {axis} has zero variance")
    return (cfg.points - mean) / std, StandardizeStats(mean, std)
