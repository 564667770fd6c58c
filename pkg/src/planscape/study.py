"""Multi-environment analysis: loading, per-environment metrics, comparisons, report tree."""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Sequence

import numpy as np

from . import __version__
from .crossenv import DistanceGroups, OverlapResult, distance_groups, optima_overlap
from .errors import DegenerateError, DomainError, PlanscapeError
from .metrics import (CorrelationLengthResult, FdcResult, correlation_length_study, distance_field, fdc,
                      modality_percentage)
from .neighborhood import OptimaClassification, classify_optima
from .space import EnvironmentLandscape, load_study
from .stats import (CorrelationTestResult, RankSumResult, correlation_diff_test, pooled_correlation_test,
                    significance_marker, wilcoxon_rank_sum)

CORRELATION_LENGTH_METHOD = (
    "per-repeat lag-1 autocorrelation Fisher-transformed with n = walk_length - 1; "
    "group statistic is the mean z; variance (1/(n-3))/repeats per side"
)
SUB_SEED_METHOD = "numpy PCG64 seeded by SeedSequence(seed, spawn_key=(repeat,))"


class StageError(PlanscapeError):
    def __init__(self, environment_id: str, stage: str, cause: Exception):
        self.environment_id = environment_id
        self.stage = stage
        self.cause = cause
        super().__init__(f"environment {environment_id!r}, stage {stage!r}: {cause}")


@dataclass
class StudyConfig:
    environments: dict[str, str] = field(default_factory=dict)
    perf_col: str = "performance"
    ignore_cols: tuple[str, ...] = ()
    delimiter: str | None = None
    aggregation: str = "mean"
    epsilon: float = 0.0
    walk_length: int = 50
    repeats: int = 50
    seed: int = 0
    alpha: float = 0.05
    partial: bool = False
    domains: dict[str, list[str]] | None = None
    reference_lengths: dict[str, float] = field(default_factory=dict)
    jobs: int = 1

    def validate(self):
        if not self.environments:
            raise DomainError("a study needs at least one environment")
        if self.walk_length < 2 or self.repeats < 1:
            raise DomainError("walk length must be >= 2 and repeats >= 1")
        if self.epsilon < 0:
            raise DomainError("epsilon must be non-negative")


@dataclass
class EnvironmentAnalysis:
    landscape: EnvironmentLandscape
    optima: OptimaClassification
    modality: float
    fdc: FdcResult | None
    fdc_note: str | None
    corr: CorrelationLengthResult | None
    corr_note: str | None
    groups: DistanceGroups
    rank_sum: RankSumResult | None


def analyze_environment(landscape: EnvironmentLandscape, config: StudyConfig) -> EnvironmentAnalysis:
    env = landscape.environment_id
    stage = "classify"
    try:
        optima = classify_optima(landscape, config.epsilon)
        stage = "metrics"
        field_ = distance_field(landscape, optima.global_optima)
        fdc_result = fdc_note = None
        try:
            fdc_result = fdc(landscape, field_)
        except DegenerateError as exc:
            fdc_note = str(exc)
        corr = corr_note = None
        try:
            corr = correlation_length_study(landscape, config.walk_length, config.repeats, config.seed)
        except DegenerateError as exc:
            corr_note = str(exc)
        stage = "crossenv"
        groups = distance_groups(landscape, optima, field_)
        stage = "stats"
        rank_sum = None
        if groups.d_local.size and groups.d_others.size:
            rank_sum = wilcoxon_rank_sum(groups.d_local, groups.d_others)
    except PlanscapeError as exc:
        raise StageError(env, stage, exc) from exc
    return EnvironmentAnalysis(landscape, optima, modality_percentage(optima, landscape.space.size),
                               fdc_result, fdc_note, corr, corr_note, groups, rank_sum)


@dataclass
class StudyResult:
    config: StudyConfig
    analyses: list[EnvironmentAnalysis]
    fdc_tests: dict[tuple[str, str], CorrelationTestResult | None]
    corr_tests: dict[tuple[str, str], CorrelationTestResult | None]
    overlaps: list[OverlapResult]


def _fdc_test(a: EnvironmentAnalysis, b: EnvironmentAnalysis, alpha: float):
    if a.fdc is None or b.fdc is None or abs(a.fdc.rho) >= 1 or abs(b.fdc.rho) >= 1:
        return None
    return correlation_diff_test(a.fdc.rho, a.fdc.p_points, b.fdc.rho, b.fdc.p_points, alpha)


def _corr_test(a: EnvironmentAnalysis, b: EnvironmentAnalysis, alpha: float):
    if a.corr is None or b.corr is None:
        return None
    rs_a = [r for r in a.corr.valid_r1 if abs(r) < 1]
    rs_b = [r for r in b.corr.valid_r1 if abs(r) < 1]
    n_a, n_b = a.corr.walk_length - 1, b.corr.walk_length - 1
    if not rs_a or not rs_b or n_a <= 3 or n_b <= 3:
        return None
    return pooled_correlation_test(rs_a, n_a, rs_b, n_b, alpha)


def run_study(config: StudyConfig, landscapes: Sequence[EnvironmentLandscape] | None = None) -> StudyResult:
    """Load, classify, measure, test and compare every environment of a study."""
    config.validate()
    if landscapes is None:
        try:
            landscapes = load_study(config.environments, config.perf_col, config.aggregation,
                                    config.ignore_cols, config.delimiter, config.domains, config.partial)
        except PlanscapeError as exc:
            env = getattr(exc, "environment_id", ",".join(config.environments))
            raise StageError(env, "load", exc) from exc
        except OSError as exc:
            raise StageError(",".join(config.environments), "load", exc) from exc
    landscapes = sorted(landscapes, key=lambda ls: ls.environment_id)
    if config.jobs > 1:
        with ThreadPoolExecutor(config.jobs) as pool:
            analyses = list(pool.map(lambda ls: analyze_environment(ls, config), landscapes))
    else:
        analyses = [analyze_environment(ls, config) for ls in landscapes]

    fdc_tests, corr_tests = {}, {}
    for a, b in itertools.combinations(analyses, 2):
        key = (a.landscape.environment_id, b.landscape.environment_id)
        fdc_tests[key] = _fdc_test(a, b, config.alpha)
        corr_tests[key] = _corr_test(a, b, config.alpha)
    overlaps = []
    for a, b in itertools.permutations(analyses, 2):
        try:
            overlaps.append(optima_overlap(a.landscape, a.optima, b.landscape, b.optima))
        except PlanscapeError as exc:
            raise StageError(f"{a.landscape.environment_id}->{b.landscape.environment_id}", "crossenv", exc) from exc
    return StudyResult(config, analyses, fdc_tests, corr_tests, overlaps)


# --- report tree -----------------------------------------------------------

def _num(x: float | None):
    if x is None:
        return "degenerate"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return float(x)


def _group_block(values: np.ndarray):
    if values.size == 0:
        return {"n": 0, "mean": "not applicable", "std": "not applicable"}
    return {"n": int(values.size), "mean": float(values.mean()), "std": float(values.std())}


def _test_block(t: CorrelationTestResult | None):
    if t is None:
        return "not applicable"
    return {
        "r1": t.r1, "r2": t.r2, "n1": t.n1, "n2": t.n2,
        "z_stat": t.z_stat, "p_value": t.p_value,
        "zou_interval": [t.zou_interval[0], t.zou_interval[1]],
        "significant": t.significant,
        "interval_significant": t.interval_significant,
        "verdicts_agree": t.verdicts_agree,
        "marker": significance_marker(t.p_value),
    }


def _plans(space, indices):
    return [list(space.labels(space.index_to_plan(i))) for i in indices]


def environment_block(a: EnvironmentAnalysis) -> dict[str, Any]:
    ls = a.landscape
    counts = a.optima.counts
    block: dict[str, Any] = {
        "id": ls.environment_id,
        "status": "partial" if ls.partial else "complete",
        "size": ls.space.size,
        "measured_count": ls.measured_count,
        "duplicate_count": ls.duplicate_count,
        "optima": {**counts, "epsilon": a.optima.epsilon,
                   "global_plans": _plans(ls.space, a.optima.global_optima[:10])},
        "modality_percent": a.modality,
    }
    if a.fdc is None:
        block["fdc"] = {"rho": "degenerate", "reason": a.fdc_note}
    else:
        block["fdc"] = {"rho": a.fdc.rho, "classification": a.fdc.classification, "p_points": a.fdc.p_points}
    if a.corr is None:
        block["correlation_length"] = {"mean_ell": "degenerate", "reason": a.corr_note}
    else:
        c = a.corr
        block["correlation_length"] = {
            "mean_ell": _num(c.mean_ell), "std_ell": _num(c.std_ell),
            "degenerate_count": c.degenerate_count, "walk_length": c.walk_length,
            "repeats": c.repeats, "seed": c.seed,
            "per_repeat": [{"r1": _num(w.r1), "ell": _num(w.ell)} for w in c.per_repeat],
        }
    rs = a.rank_sum
    block["distance_groups"] = {
        "d_local": _group_block(a.groups.d_local),
        "d_others": _group_block(a.groups.d_others),
        "rank_sum": "not applicable" if rs is None else {
            "u_stat": rs.u_stat, "z_stat": rs.z_stat, "p_value": rs.p_value,
            "n1": rs.n1, "n2": rs.n2, "tie_corrected": rs.tie_corrected,
            "reliable": rs.reliable, "marker": significance_marker(rs.p_value),
        },
    }
    return block


def report_tree(result: StudyResult) -> dict[str, Any]:
    cfg = result.config
    space = result.analyses[0].landscape.space
    config_echo = asdict(cfg)
    config_echo.pop("jobs")
    config_echo["ignore_cols"] = list(cfg.ignore_cols)
    return {
        "status": "partial" if cfg.partial else "complete",
        "provenance": {
            "tool": "planscape",
            "version": __version__,
            "seed": cfg.seed,
            "config": config_echo,
            "methods": {
                "correlation_length_test": CORRELATION_LENGTH_METHOD,
                "sub_seeds": SUB_SEED_METHOD,
                "fdc_test": "two-sample Fisher z test; Zou interval for rho1 - rho2",
                "a3_denominator": "source optima (global and strictly local)",
            },
        },
        "space": {"options": [{"name": o.name, "values": list(o.values)} for o in space.options],
                  "size": space.size},
        "reference_correlation_lengths": dict(sorted(cfg.reference_lengths.items())),
        "environments": [environment_block(a) for a in result.analyses],
        "pairwise": [
            {"pair": list(key), "fdc": _test_block(result.fdc_tests[key]),
             "correlation_length": _test_block(result.corr_tests[key])}
            for key in result.fdc_tests
        ],
        "cross_environment": [
            {"source": o.source, "target": o.target, "a1": o.a1, "a1_witnesses": _plans(space, o.a1_witnesses[:10]),
             "a2": o.a2, "a2_witnesses": _plans(space, o.a2_witnesses[:10]), "a3_percent": o.a3}
            for o in result.overlaps
        ],
    }


def _fmt_p(p: float) -> str:
    return "<0.0001" if p < 1e-4 else f"{p:.4f}"


def summary_text(result: StudyResult) -> str:
    """Plain-text tables: per-environment metrics, pairwise tests, optima overlap."""
    lines = ["Per-environment metrics", ""]
    header = f"{'env':<16}{'size':>8}{'global':>8}{'local':>8}{'optima%':>10}{'FDC':>9}  {'class':<16}{'ell':>9}" \
             f"{'d_local':>14}{'d_others':>14}"
    lines.append(header)
    lines.append("-" * len(header))
    for a in result.analyses:
        c = a.optima.counts
        rho = "degen." if a.fdc is None else f"{a.fdc.rho:.4f}"
        cls = "-" if a.fdc is None else a.fdc.classification
        ell = "degen." if a.corr is None else (
            "inf" if math.isinf(a.corr.mean_ell) else f"{a.corr.mean_ell:.3f}")
        marker = "" if a.rank_sum is None else significance_marker(a.rank_sum.p_value)
        dl = "n/a" if not a.groups.d_local.size else f"{a.groups.d_local.mean():.2f}({a.groups.d_local.std():.2f}){marker}"
        do = "n/a" if not a.groups.d_others.size else f"{a.groups.d_others.mean():.2f}({a.groups.d_others.std():.2f})"
        lines.append(f"{a.landscape.environment_id:<16}{a.landscape.space.size:>8}{c['global']:>8}"
                     f"{c['strictly_local']:>8}{a.modality:>10.2f}{rho:>9}  {cls:<16}{ell:>9}{dl:>14}{do:>14}")
    if result.config.reference_lengths:
        refs = ", ".join(f"{k}={v}" for k, v in sorted(result.config.reference_lengths.items()))
        lines.append(f"reference correlation lengths: {refs}")

    lines += ["", "Pairwise tests (p-value; * = significant at alpha)", ""]
    header = f"{'pair':<24}{'FDC p':>12}{'ell p':>12}"
    lines += [header, "-" * len(header)]
    for key in result.fdc_tests:
        cells = []
        for t in (result.fdc_tests[key], result.corr_tests[key]):
            cells.append("n/a" if t is None else _fmt_p(t.p_value) + ("*" if t.significant else ""))
        lines.append(f"{key[0] + ' : ' + key[1]:<24}{cells[0]:>12}{cells[1]:>12}")
    if not result.fdc_tests:
        lines.append("(single environment)")

    lines += ["", "Optima overlap", ""]
    header = f"{'change':<24}{'A1':>4}{'A2':>4}{'A3':>10}"
    lines += [header, "-" * len(header)]
    for o in result.overlaps:
        lines.append(f"{o.source + ' -> ' + o.target:<24}{'✓' if o.a1 else '✗':>4}{'✓' if o.a2 else '✗':>4}"
                     f"{o.a3:>9.1f}%")
    if not result.overlaps:
        lines.append("(single environment)")
    return "\n".join(lines) + "\n"
