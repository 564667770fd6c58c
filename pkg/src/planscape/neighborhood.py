"""Hamming distance, one-option neighborhoods and optima classification."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .space import ConfigurationSpace, EnvironmentLandscape


def hamming_distance(a: Sequence[int], b: Sequence[int]) -> int:
    if len(a) != len(b):
        raise DomainError(f"plans of length {len(a)} and {len(b)} are from different spaces")
    return sum(x != y for x, y in zip(a, b))


def neighbors(space: ConfigurationSpace, plan: Sequence[int]) -> list[tuple[int, ...]]:
    """Plans at Hamming distance exactly one, ordered by option then value."""
    plan = space.check_plan(plan)
    out = []
    for i, m in enumerate(space.shape):
        for w in range(m):
            if w != plan[i]:
                out.append(plan[:i] + (w,) + plan[i + 1:])
    return out


@dataclass(frozen=True)
class OptimaClassification:
    """Partition of the measured plans into global, strictly local and non-optimal.

    Index arrays are sorted ascending. In partial mode unmeasured plans belong
    to none of the three sets.
    """

    global_optima: np.ndarray
    strictly_local_optima: np.ndarray
    non_optimal: np.ndarray
    epsilon: float
    size: int

    @property
    def local_optima(self) -> np.ndarray:
        return np.union1d(self.global_optima, self.strictly_local_optima)

    @property
    def counts(self) -> dict[str, int]:
        return {
            "global": len(self.global_optima),
            "strictly_local": len(self.strictly_local_optima),
            "non_optimal": len(self.non_optimal),
        }


def _neighbor_min(grid: np.ndarray) -> np.ndarray:
    """Minimum over all one-option neighbors, per grid cell (inf if none)."""
    best = np.full(grid.shape, np.inf)
    for axis, m in enumerate(grid.shape):
        for shift in range(1, m):
            np.minimum(best, np.roll(grid, shift, axis=axis), out=best)
    return best


def local_optimum_mask(landscape: EnvironmentLandscape, epsilon: float = 0.0) -> np.ndarray:
    """Plans no worse than every measured neighbor, within ``epsilon``."""
    grid = np.where(landscape.measured, landscape.performance, np.inf).reshape(landscape.space.shape)
    mask = grid <= _neighbor_min(grid) + epsilon
    return mask.ravel() & landscape.measured


def classify_optima(landscape: EnvironmentLandscape, epsilon: float = 0.0) -> OptimaClassification:
    if epsilon < 0:
        raise DomainError("epsilon must be non-negative")
    if landscape.measured_count == 0:
        raise DomainError(f"environment {landscape.environment_id!r} has no measured plans")
    perf = landscape.performance
    measured = landscape.measured
    best = np.min(perf[measured])
    is_global = measured & (perf <= best + epsilon)
    is_local = local_optimum_mask(landscape, epsilon)
    return OptimaClassification(
        global_optima=np.flatnonzero(is_global),
        strictly_local_optima=np.flatnonzero(is_local & ~is_global),
        non_optimal=np.flatnonzero(measured & ~is_local & ~is_global),
        epsilon=float(epsilon),
        size=landscape.space.size,
    )
