import numpy as np
import pytest

from conftest import EX, EY, make_landscape
from oracles import bfs_distances, brute_classify, brute_overlap, random_shape, random_values
from planscape.crossenv import distance_groups, optima_overlap
from planscape.errors import DomainError
from planscape.metrics import distance_field
from planscape.neighborhood import classify_optima, hamming_distance
from planscape.space import ConfigurationSpace


def overlap(a, b):
    return optima_overlap(a, classify_optima(a), b, classify_optima(b))


def groups(ls):
    c = classify_optima(ls)
    return distance_groups(ls, c, distance_field(ls, c.global_optima))


def test_worked_pair(ex, ey):
    res = overlap(ex, ey)
    assert (res.source, res.target) == ("Ex", "Ey")
    assert res.a1 is False and res.a1_witnesses == ()
    assert res.a2 is True and res.a2_witnesses == (3,)
    assert res.a3 == 50.0


def test_self_overlap(ex):
    res = overlap(ex, ex)
    assert res.a1 and not res.a2 and res.a3 == 100.0


def test_constant_target(ex):
    flat = make_landscape(np.full(4, 7.0), env="flat")
    res = overlap(ex, flat)
    assert res.a1 and res.a2 == (len(classify_optima(ex).strictly_local_optima) > 0)
    assert res.a3 == 100.0


def test_mismatched_spaces(ex):
    other = make_landscape(np.arange(6.0), shape=[2, 3])
    with pytest.raises(DomainError):
        overlap(ex, other)


def test_witnesses_reverify():
    rng = np.random.default_rng(17)
    for _ in range(50):
        shape = random_shape(rng, max_size=128)
        size = int(np.prod(shape))
        a = make_landscape(random_values(rng, size, "coarse"), shape=list(shape))
        b = make_landscape(random_values(rng, size, "coarse"), shape=list(shape))
        ca, cb = classify_optima(a), classify_optima(b)
        res = optima_overlap(a, ca, b, cb)
        for w in res.a1_witnesses:
            assert w in ca.global_optima and w in cb.global_optima
        for w in res.a2_witnesses:
            assert w in ca.strictly_local_optima and w in cb.global_optima
        assert 0 <= res.a3 <= 100


def test_overlap_matches_brute_force():
    rng = np.random.default_rng(99)
    for _ in range(100):
        shape = random_shape(rng)
        size = int(np.prod(shape))
        fx, fy = random_values(rng, size), random_values(rng, size)
        res = overlap(make_landscape(fx, shape=list(shape)), make_landscape(fy, shape=list(shape)))
        a1, a2, a3 = brute_overlap(shape, fx, fy)
        assert (res.a1, res.a2) == (a1, a2)
        assert res.a3 == pytest.approx(a3, abs=1e-12)


def test_distance_groups_worked(ex):
    g = groups(ex)
    assert g.d_local.tolist() == [2]
    assert sorted(g.d_others.tolist()) == [1, 1]
    assert g.local_summary == (2.0, 0.0)


def test_distance_groups_unimodal_and_constant():
    space = ConfigurationSpace.from_sizes([2, 2, 2])
    uni = make_landscape([hamming_distance(space.index_to_plan(i), (0, 1, 1)) for i in range(8)])
    assert groups(uni).d_local.size == 0
    g = groups(make_landscape(np.ones(8)))
    assert g.d_local.size == 0 and g.d_others.size == 0
    assert g.local_summary is None


def test_distance_groups_match_brute_force():
    rng = np.random.default_rng(123)
    for _ in range(40):
        shape = random_shape(rng, max_size=256)
        values = random_values(rng, int(np.prod(shape)))
        g = groups(make_landscape(values, shape=list(shape)))
        glob, local, rest = brute_classify(shape, values)
        plans = sorted(glob | local | rest)
        d = dict(zip(plans, bfs_distances(shape, sorted(glob))))
        assert sorted(g.d_local.tolist()) == sorted(d[p] for p in local)
        assert sorted(g.d_others.tolist()) == sorted(d[p] for p in rest)
        assert all(v >= 1 for v in g.d_local)


def test_ey_reverse_direction(ex, ey):
    res = overlap(ey, ex)
    # Ey has only its global {11}, which is strictly local in Ex
    assert not res.a1 and not res.a2
    assert res.a3 == 100.0
    assert EY[3] == min(EY) and EX[0] == min(EX)
