"""Exit criteria for the package, one test per criterion.

Each test records a PASS/FAIL line that the conftest prints at the end of the
session. Criterion 8 needs the public datasets: point ``PLANSCAPE_DATASETS`` at
a directory holding ``storm/``, ``keras/``, ``x264/`` and ``spear/``
subdirectories with one table per environment (``PLANSCAPE_PERF_COL`` names
the performance column, default ``performance``).
"""
import json
import math
import os
import time
from pathlib import Path

import numpy as np
import pytest
from scipy.optimize import brentq

from conftest import EX, make_landscape, write_table
from oracles import (bfs_distances, brute_classify, brute_overlap, random_shape, random_values,
                     reference_fisher_test, reference_rank_sum_p, substituted_neighbors)
from planscape.cli import main
from planscape.crossenv import distance_groups, optima_overlap
from planscape.metrics import (correlation_length, correlation_length_study, distance_field, fdc,
                               lag_autocorrelation)
from planscape.neighborhood import classify_optima, hamming_distance, neighbors
from planscape.space import ConfigurationSpace, EnvironmentLandscape, load_study
from planscape.stats import correlation_diff_test, wilcoxon_rank_sum

RESULTS: dict[str, str] = {}


def record(name, ok, detail=""):
    RESULTS[name] = f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else "")
    assert ok, detail


def test_1_optima_oracle_equivalence():
    rng = np.random.default_rng(20240601)
    cases = []
    for _ in range(100):
        shape = random_shape(rng, 2, 5, 2, 4, 1024)
        size = int(np.prod(shape))
        cases.append((shape, random_values(rng, size), random_values(rng, size)))

    start = time.perf_counter()
    results = []
    for shape, fx, fy in cases:
        x = make_landscape(fx, shape=list(shape), env="x")
        y = make_landscape(fy, shape=list(shape), env="y")
        cx, cy = classify_optima(x), classify_optima(y)
        field = distance_field(x, cx.global_optima)
        results.append((cx, field, distance_groups(x, cx, field), optima_overlap(x, cx, y, cy)))
    elapsed = time.perf_counter() - start

    mismatches = 0
    for (shape, fx, fy), (cx, field, groups, ov) in zip(cases, results):
        space = ConfigurationSpace.from_sizes(shape)
        to_plans = lambda idx: {space.index_to_plan(i) for i in idx}  # noqa: E731
        g, local, rest = brute_classify(shape, fx)
        d = bfs_distances(shape, sorted(g))
        by_plan = {space.index_to_plan(i): d[i] for i in range(space.size)}
        ok = (to_plans(cx.global_optima) == g and to_plans(cx.strictly_local_optima) == local
              and to_plans(cx.non_optimal) == rest
              and field.d.tolist() == d
              and sorted(groups.d_local.tolist()) == sorted(by_plan[p] for p in local)
              and sorted(groups.d_others.tolist()) == sorted(by_plan[p] for p in rest)
              and (ov.a1, ov.a2, ov.a3) == brute_overlap(shape, fx, fy))
        mismatches += not ok
    record("1 optima oracle equivalence", mismatches == 0 and elapsed < 10,
           f"{100 - mismatches}/100 agree, library time {elapsed:.2f}s < 10s")


def test_2_fdc_exactness():
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(20):
        shape = random_shape(rng, 1, 5, 2, 4, 1024)
        space = ConfigurationSpace.from_sizes(shape)
        k = int(rng.integers(1, 4))
        targets = [space.index_to_plan(i) for i in rng.choice(space.size, k, replace=False)]
        d = [min(hamming_distance(space.index_to_plan(i), t) for t in targets) for i in range(space.size)]
        ls = EnvironmentLandscape("e", space, d, space.size)
        res = fdc(ls, distance_field(ls, classify_optima(ls).global_optima))
        worst = max(worst, abs(res.rho - 1.0))
        assert res.classification == "Straightforward"
    ex = make_landscape(EX)
    rho = fdc(ex, distance_field(ex, [0])).rho
    record("2 FDC exactness", worst < 1e-9 and abs(rho - 0.3162) < 1e-4,
           f"max |rho-1| = {worst:.1e}, worked example rho = {rho:.6f}")


def test_3_fdc_affine_invariance():
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(50):
        shape = random_shape(rng, 2, 5, 2, 4, 1024)
        values = random_values(rng, int(np.prod(shape)), "float")
        ls = make_landscape(values, shape=list(shape))
        field = distance_field(ls, classify_optima(ls).global_optima)
        a, b = rng.uniform(0.01, 100), rng.uniform(-1000, 1000)
        worst = max(worst, abs(fdc(ls.with_performance(a * values + b), field).rho - fdc(ls, field).rho))
    record("3 FDC affine invariance", worst < 1e-9, f"max deviation {worst:.1e}")


def test_4_correlation_length():
    trend = np.arange(50, dtype=float)
    zigzag = np.where(np.arange(50) % 2, 1.0, -1.0)
    errors = []
    for target, ell in ((math.exp(-1), 1.0), (math.exp(-0.5), 2.0)):
        t = brentq(lambda t: lag_autocorrelation(trend + t * zigzag) - target, 0, 1e3, xtol=1e-15, rtol=1e-15)
        errors.append(abs(correlation_length(trend + t * zigzag).ell - ell))
    constant_degenerate = correlation_length(np.full(50, 4.2)).degenerate

    space = ConfigurationSpace.from_sizes([4, 4, 4])
    smooth = EnvironmentLandscape("smooth", space, space.codes().sum(axis=1).astype(float), space.size)
    wins = 0
    for trial in range(200):
        shuffled = smooth.with_performance(np.random.default_rng(trial).permutation(smooth.performance))
        a = correlation_length_study(smooth, 50, 50, seed=trial).mean_ell
        b = correlation_length_study(shuffled, 50, 50, seed=10_000 + trial).mean_ell
        wins += a > b
    record("4 correlation length", max(errors) < 1e-9 and constant_degenerate and wins >= 190,
           f"closed-form error {max(errors):.1e}, constant degenerate={constant_degenerate}, "
           f"smooth wins {wins}/200 (need >= 190)")


def test_5_statistics_oracle_equivalence():
    rng = np.random.default_rng(5)
    worst_corr = worst_rank = 0.0
    for _ in range(50):
        r1, r2 = rng.uniform(-0.95, 0.95, 2)
        n1, n2 = rng.integers(4, 5000, 2)
        worst_corr = max(worst_corr, abs(correlation_diff_test(r1, n1, r2, n2).p_value
                                         - reference_fisher_test(r1, n1, r2, n2)[1]))
        xs = rng.integers(0, 8, rng.integers(3, 60)).astype(float)
        ys = rng.integers(0, 8, rng.integers(3, 60)).astype(float) + rng.integers(0, 3)
        worst_rank = max(worst_rank, abs(wilcoxon_rank_sum(xs, ys).p_value - reference_rank_sum_p(xs, ys)))
    equal = correlation_diff_test(0.4, 200, 0.4, 200).p_value
    same = wilcoxon_rank_sum([1, 2, 3], [1, 2, 3]).p_value
    record("5 statistics oracle equivalence",
           worst_corr < 1e-6 and worst_rank < 1e-6 and equal == 1.0 and same == 1.0,
           f"max p deviation: correlation {worst_corr:.1e}, rank-sum {worst_rank:.1e}; trivial p = {equal}, {same}")


def test_6_determinism(tmp_path):
    rng = np.random.default_rng(6)
    shape = [3, 2, 4, 2, 2]
    base = rng.normal(size=int(np.prod(shape)))
    envs = []
    for k in range(3):
        values = np.round(base + 0.5 * rng.normal(size=base.size), 2)
        envs += ["--env", f"E{k + 1}=" + str(write_table(tmp_path / f"E{k + 1}.csv", shape, values))]
    outputs = []
    for run, jobs in enumerate(["1", "1", "3"]):
        out = tmp_path / f"run{run}.json"
        assert main(["analyze", *envs, "--seed", "77", "--jobs", jobs, "--out", str(out)]) == 0
        outputs.append(out.read_bytes())
    report = json.loads(outputs[0])
    record("6 determinism", outputs[0] == outputs[1] == outputs[2] and len(report["cross_environment"]) == 6,
           "byte-identical across 2 runs and jobs=1 vs jobs=3")


def test_7_neighborhood_cardinality():
    rng = np.random.default_rng(7)
    bad = 0
    for _ in range(1000):
        shape = tuple(int(m) for m in rng.integers(1, 6, rng.integers(1, 7)))
        space = ConfigurationSpace.from_sizes(shape)
        x = tuple(int(rng.integers(m)) for m in shape)
        y = tuple(int(rng.integers(m)) for m in shape)
        nx, ny = set(neighbors(space, x)), set(neighbors(space, y))
        bad += len(nx) != sum(m - 1 for m in shape)
        bad += nx != set(substituted_neighbors(shape, x))
        bad += (y in nx) != (x in ny)
        z = next(iter(nx), None)
        if z is not None:
            bad += x not in set(neighbors(space, z))
    record("7 neighborhood cardinality", bad == 0, f"{bad} violations over 1000 random plans")


TABLE1 = {"storm": 2048, "keras": 4096, "x264": 4000, "spear": 16384}


@pytest.mark.skipif(not os.environ.get("PLANSCAPE_DATASETS"), reason="PLANSCAPE_DATASETS not set")
def test_8_dataset_reproduction():
    root = Path(os.environ["PLANSCAPE_DATASETS"])
    perf_col = os.environ.get("PLANSCAPE_PERF_COL", "performance")
    notes, ok = [], True
    studies = {}
    for system, size in TABLE1.items():
        files = sorted((root / system).glob("*.csv"))
        landscapes = load_study({f.stem: f for f in files}, perf_col)
        studies[system] = landscapes
        ok &= all(ls.space.size == size for ls in landscapes)
        for ls in landscapes:
            c = classify_optima(ls)
            res = fdc(ls, distance_field(ls, c.global_optima))
            ok &= res.classification == "Straightforward"
            notes.append(f"{system}/{ls.environment_id} rho={res.rho:.3f}")
    storm = studies["storm"]
    rhos = [fdc(ls, distance_field(ls, classify_optima(ls).global_optima)) for ls in storm]
    e12 = correlation_diff_test(rhos[0].rho, rhos[0].p_points, rhos[1].rho, rhos[1].p_points)
    e13 = correlation_diff_test(rhos[0].rho, rhos[0].p_points, rhos[2].rho, rhos[2].p_points)
    ok &= not e12.significant and e13.significant
    notes.append(f"storm E1:E2 p={e12.p_value:.4f}, E1:E3 p={e13.p_value:.2g}")
    record("8 dataset reproduction (optional)", ok, "; ".join(notes))

