"""How optima carry over when the environment changes."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .metrics import DistanceField
from .neighborhood import OptimaClassification
from .space import EnvironmentLandscape


@dataclass(frozen=True)
class OverlapResult:
    """Optima overlap when moving from ``source`` to ``target``.

    a1: some source global optimum is also a target global optimum.
    a2: some source strictly local optimum is a target global optimum.
    a3: percent of source optima (global or strictly local) that are optima
    of either kind in the target.
    """

    source: str
    target: str
    a1: bool
    a1_witnesses: tuple[int, ...]
    a2: bool
    a2_witnesses: tuple[int, ...]
    a3: float


def optima_overlap(source: EnvironmentLandscape, source_opt: OptimaClassification,
                   target: EnvironmentLandscape, target_opt: OptimaClassification) -> OverlapResult:
    if source.space != target.space:
        raise DomainError(
            f"environments {source.environment_id!r} and {target.environment_id!r} have different spaces"
        )
    a1 = np.intersect1d(source_opt.global_optima, target_opt.global_optima)
    a2 = np.intersect1d(source_opt.strictly_local_optima, target_opt.global_optima)
    src_all = source_opt.local_optima
    shared = np.intersect1d(src_all, target_opt.local_optima)
    return OverlapResult(
        source=source.environment_id,
        target=target.environment_id,
        a1=a1.size > 0,
        a1_witnesses=tuple(int(i) for i in a1),
        a2=a2.size > 0,
        a2_witnesses=tuple(int(i) for i in a2),
        a3=100.0 * shared.size / src_all.size,
    )


@dataclass(frozen=True)
class DistanceGroups:
    d_local: np.ndarray
    d_others: np.ndarray

    @staticmethod
    def _summary(values: np.ndarray) -> tuple[float, float] | None:
        if values.size == 0:
            return None
        return float(values.mean()), float(values.std())

    @property
    def local_summary(self):
        return self._summary(self.d_local)

    @property
    def others_summary(self):
        return self._summary(self.d_others)


def distance_groups(landscape: EnvironmentLandscape, classification: OptimaClassification,
                    field: DistanceField) -> DistanceGroups:
    """Distances to the closest global optimum, split into strictly local optima and the rest."""
    if field.d.shape != (landscape.space.size,):
        raise DomainError("distance field does not match the landscape")
    return DistanceGroups(
        d_local=field.d[classification.strictly_local_optima].copy(),
        d_others=field.d[classification.non_optimal].copy(),
    )
