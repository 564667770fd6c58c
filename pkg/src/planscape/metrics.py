"""Per-environment landscape metrics.

Fitness-distance correlation, random-walk correlation length, modality and
two-option projections. All functions treat lower performance as better.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ArgumentError, DegenerateError, DomainError
from .neighborhood import OptimaClassification
from .space import EnvironmentLandscape

FDC_BAND = 0.15


@dataclass(frozen=True)
class DistanceField:
    d: np.ndarray  # -1 for unmeasured plans in partial mode


@dataclass(frozen=True)
class FdcResult:
    rho: float
    classification: str
    p_points: int


@dataclass(frozen=True)
class WalkRecord:
    seed: int
    start_index: int
    indices: tuple[int, ...]
    values: tuple[float, ...]

    @property
    def trace(self) -> list[tuple[int, float]]:
        return list(zip(self.indices, self.values))

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class WalkCorrelation:
    r1: float | None  # None when the walk has zero variance
    ell: float | None
    degenerate: bool


@dataclass(frozen=True)
class CorrelationLengthResult:
    per_repeat: tuple[WalkCorrelation, ...]
    mean_ell: float
    std_ell: float
    degenerate_count: int
    walk_length: int
    repeats: int
    seed: int

    @property
    def valid_r1(self) -> list[float]:
        return [w.r1 for w in self.per_repeat if not w.degenerate]


def distance_field(landscape: EnvironmentLandscape, globals_: Sequence[int]) -> DistanceField:
    """Shortest Hamming distance from every plan to the nearest plan in ``globals_``.

    Computed as an exact separable distance transform: one pass per option,
    where a plan's distance is relaxed through any plan differing from it in
    that option alone.
    """
    globals_ = np.asarray(globals_, dtype=int)
    if globals_.size == 0:
        raise DomainError("distance field needs at least one global optimum")
    space = landscape.space
    n = space.n_options
    dist = np.full(space.size, n + 1, dtype=np.int64)
    dist[globals_] = 0
    grid = dist.reshape(space.shape)
    for axis, m in enumerate(space.shape):
        if m > 1:
            grid = np.minimum(grid, grid.min(axis=axis, keepdims=True) + 1)
    d = grid.ravel().copy()
    d[~landscape.measured] = -1
    d.setflags(write=False)
    return DistanceField(d)


def classify_fdc(rho: float) -> str:
    if rho <= -FDC_BAND:
        return "Misleading"
    if rho < FDC_BAND:
        return "Difficult"
    return "Straightforward"


def fdc(landscape: EnvironmentLandscape, field: DistanceField) -> FdcResult:
    """Pearson correlation of performance with distance to the closest global optimum.

    Uses population moments over every (measured) plan in the space.
    """
    mask = landscape.measured
    f = landscape.performance[mask]
    d = field.d[mask].astype(float)
    p = len(f)
    fc = f - f.mean()
    dc = d - d.mean()
    sigma_f = math.sqrt(float(np.dot(fc, fc)) / p)
    sigma_d = math.sqrt(float(np.dot(dc, dc)) / p)
    flat_f = np.all(f == f[0]) or sigma_f == 0
    flat_d = np.all(d == d[0])
    if flat_f or flat_d:
        side = "performance" if flat_f else "distance"
        raise DegenerateError(f"environment {landscape.environment_id!r}: zero variance in {side}; FDC undefined")
    rho = float(np.dot(fc, dc)) / (sigma_f * sigma_d * p)
    rho = min(1.0, max(-1.0, rho))
    return FdcResult(rho, classify_fdc(rho), p)


def random_walk(landscape: EnvironmentLandscape, length: int, rng: np.random.Generator,
                seed: int = -1) -> WalkRecord:
    """Unbiased random walk over one-option neighbors, ``length`` sampled plans including the start."""
    if length < 2:
        raise ArgumentError(f"walk length must be at least 2, got {length}")
    space = landscape.space
    if landscape.partial:
        indices = _partial_walk(landscape, length, rng)
    else:
        if space.neighbor_count == 0:
            raise DomainError("space has a single plan; random walk cannot move")
        # draw k in [0, neighbor_count) picks option i and a shift of 1..m_i-1 on its value
        option_of = [i for i, m in enumerate(space.shape) for _ in range(m - 1)]
        shift_of = [s for m in space.shape for s in range(1, m)]
        start = int(rng.integers(space.size))
        draws = rng.integers(space.neighbor_count, size=length - 1)
        plan = list(space.index_to_plan(start))
        current = start
        indices = [start]
        for k in draws:
            i = option_of[k]
            old = plan[i]
            plan[i] = (old + shift_of[k]) % space.shape[i]
            current += (plan[i] - old) * space.strides[i]
            indices.append(current)
    values = tuple(float(landscape.performance[i]) for i in indices)
    return WalkRecord(seed, indices[0], tuple(int(i) for i in indices), values)


def _partial_walk(landscape: EnvironmentLandscape, length: int, rng: np.random.Generator) -> list[int]:
    space = landscape.space
    measured = landscape.measured
    current = int(rng.choice(np.flatnonzero(measured)))
    indices = [current]
    for _ in range(length - 1):
        nbrs = [j for j in space.neighbor_indices(current) if measured[j]]
        if not nbrs:
            raise DomainError(f"plan {current} has no measured neighbors; random walk cannot move")
        current = nbrs[int(rng.integers(len(nbrs)))]
        indices.append(current)
    return indices


def lag_autocorrelation(values: Sequence[float], s: int = 1) -> float | None:
    """Lag-``s`` autocorrelation normalised by the series' own population variance.

    Returns None when the series is constant.
    """
    f = np.asarray(values, dtype=float)
    p = len(f)
    if p <= s:
        raise ArgumentError(f"series length {p} must exceed lag {s}")
    if np.all(f == f[0]):
        return None
    fc = f - f.mean()
    var = float(np.dot(fc, fc)) / p
    if var == 0:  # spread below the float range
        return None
    return float(np.dot(fc[:-s], fc[s:])) / (var * (p - s))


def correlation_length(walk: WalkRecord | Sequence[float], s: int = 1) -> WalkCorrelation:
    values = walk.values if isinstance(walk, WalkRecord) else walk
    r1 = lag_autocorrelation(values, s)
    if r1 is None or r1 == 0:
        return WalkCorrelation(r1, None, True)
    if abs(r1) >= 1:
        return WalkCorrelation(r1, math.inf, False)
    return WalkCorrelation(r1, -1.0 / math.log(abs(r1)), False)


def repeat_rng(seed: int, repeat: int) -> np.random.Generator:
    """Generator for repeat ``repeat`` of a study seeded with ``seed``.

    PCG64 fed by ``SeedSequence(seed, spawn_key=(repeat,))``; this is the same
    stream ``SeedSequence(seed).spawn(...)[repeat]`` yields, and both pieces
    are covered by NumPy's stream-compatibility policy.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(repeat,))))


def correlation_length_study(landscape: EnvironmentLandscape, length: int = 50, repeats: int = 50,
                             seed: int = 0) -> CorrelationLengthResult:
    if repeats < 1:
        raise ArgumentError("repeats must be at least 1")
    per_repeat = tuple(
        correlation_length(random_walk(landscape, length, repeat_rng(seed, k), seed=seed))
        for k in range(repeats)
    )
    ells = [w.ell for w in per_repeat if not w.degenerate]
    if not ells:
        raise DegenerateError(f"environment {landscape.environment_id!r}: all {repeats} walks were degenerate")
    if any(math.isinf(e) for e in ells):
        mean_ell = std_ell = math.inf
    else:
        arr = np.array(ells)
        mean_ell = float(arr.mean())
        std_ell = float(arr.std())
    return CorrelationLengthResult(per_repeat, mean_ell, std_ell, repeats - len(ells), length, repeats, seed)


def modality_percentage(classification: OptimaClassification, size: int) -> float:
    """Share of the space that is a global or strictly local optimum, in percent."""
    n_opt = len(classification.global_optima) + len(classification.strictly_local_optima)
    return 100.0 * n_opt / size


@dataclass(frozen=True)
class ProjectionCell:
    value_a: str
    value_b: str
    aggregate: float


def project(landscape: EnvironmentLandscape, option_a: str, option_b: str,
            aggregator: str = "mean") -> list[ProjectionCell]:
    """Aggregate performance over all plans sharing each pair of values of two options."""
    space = landscape.space
    if option_a == option_b:
        raise ArgumentError("projection needs two distinct options")
    try:
        ia, ib = space.option_position(option_a), space.option_position(option_b)
    except DomainError as exc:
        raise ArgumentError(str(exc)) from None
    if aggregator not in ("mean", "min"):
        raise ArgumentError(f"aggregator must be 'mean' or 'min', got {aggregator!r}")
    grid = np.moveaxis(landscape.grid(), (ia, ib), (0, 1))
    flat = grid.reshape(grid.shape[0], grid.shape[1], -1)
    cells = []
    for va, la in enumerate(space.options[ia].values):
        for vb, lb in enumerate(space.options[ib].values):
            vals = flat[va, vb]
            vals = vals[~np.isnan(vals)]
            if vals.size == 0:
                agg = math.nan
            else:
                agg = float(vals.mean() if aggregator == "mean" else vals.min())
            cells.append(ProjectionCell(la, lb, agg))
    return cells
