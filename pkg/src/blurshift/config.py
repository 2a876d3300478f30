"""Point configurations and pairwise geometry primitives."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Configuration", "as_configuration", "pairwise_sqdist", "profile_args"]


@dataclass(frozen=True)
class Configuration:
    """An ordered list of ``n`` points in R^d, stored as an (n, d) array.

    Instances are immutable: the wrapped array is marked read-only, so a
    configuration can be shared freely across threads.
    """

    points: np.ndarray

    @classmethod
    def from_points(cls, points) -> "Configuration":
        arr = np.array(points, dtype=float, copy=True)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"expected an (n, d) array of points, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("configuration contains non-finite coordinates")
        arr.setflags(write=False)
        return cls(arr)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.n


def as_configuration(obj) -> Configuration:
    """Coerce an array-like (or pass through a Configuration) with validation."""
    if isinstance(obj, Configuration):
        return obj
    return Configuration.from_points(obj)


def pairwise_sqdist(points: np.ndarray) -> np.ndarray:
    """Exact squared pairwise distances, (n, n) with a zero diagonal.

    Computed from coordinate differences (not the expanded dot-product
    identity) so that tiny distances keep full relative precision.
    """
    diff = points[:, None, :] - points[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def profile_args(sqdist: np.ndarray, h: float) -> np.ndarray:
    """Map squared distances to profile arguments ``||v/h||^2 / 2``."""
    return sqdist / (2.0 * h * h)
