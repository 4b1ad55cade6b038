import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_partition, random_spec
from leakage_lab.confusion import build, lemma1_holds, theorem1_bound
from leakage_lab.greedy import candidates, merge_gain, run_algorithm1, theta
from leakage_lab.mechanism import (
    PartitionMechanism,
    constant_mechanism,
    identity_mechanism,
    max_leakage,
    satisfies_constraints,
)
from leakage_lab.polymatroid import theorem2_bound


def merged(mech, a, b):
    """Partition with the cells whose smallest members are ``a`` and ``b`` joined."""
    cells = [c for c in mech.cells if c[0] not in (a, b)]
    joined = tuple(sorted(next(c for c in mech.cells if c[0] == a)
                          + next(c for c in mech.cells if c[0] == b)))
    return PartitionMechanism(tuple(cells) + (joined,), mech.size)


def feasible(spec, mech):
    return lemma1_holds(spec, mech) and satisfies_constraints(spec, mech).ok


class TestTheta:
    def test_t1_has_no_admissible_merge(self, T1):
        assert len(theta(T1, identity_mechanism(T1))) == 0

    def test_t2_identity(self, T2):
        # 00-10 and 01-11 share x2 but differ in x1; every other pair merges with gain 1
        got = theta(T2, identity_mechanism(T2))
        assert got.pairs == {(0, 1), (0, 3), (1, 2), (2, 3)}
        assert {c.gain for c in got} == {1.0}

    def test_candidates_cover_every_pair(self, T2):
        assert len(candidates(T2, identity_mechanism(T2))) == 6


class TestMergeGain:
    def test_disjoint_projections(self, T1):
        assert merge_gain(T1, identity_mechanism(T1), 0, 1) == 0.0

    def test_nothing_known_to_adversary(self, T2):
        assert merge_gain(T2, identity_mechanism(T2), 0, 3) == pytest.approx(1.0)

    def test_t3_first_pair(self, T3):
        assert merge_gain(T3, identity_mechanism(T3), 0, 1) == pytest.approx(0.5)

    def test_same_output_rejected(self, T3):
        with pytest.raises(ValueError):
            merge_gain(T3, identity_mechanism(T3), 2, 2)


class TestRunAlgorithm1:
    def test_t1(self, T1):
        res = run_algorithm1(T1)
        assert res.mechanism == identity_mechanism(T1)
        assert res.leakage == pytest.approx(1.0)
        assert res.trace == ()

    def test_t2(self, T2):
        res = run_algorithm1(T2)
        assert set(res.mechanism.cells) == {(0, 1), (2, 3)}
        assert [s.merged for s in res.trace] == [(0, 1), (2, 3)]
        np.testing.assert_allclose(res.leakage_path, [2.0, math.log2(3), 1.0], atol=1e-12)

    def test_t3(self, T3):
        res = run_algorithm1(T3)
        assert set(res.mechanism.cells) == {(0, 1), (2,), (3,)}
        assert res.leakage == pytest.approx(math.log2(1.5), abs=1e-12)
        assert res.trace[0].per_user_D == (pytest.approx(0.5),)

    def test_infeasible_start_rejected(self, T3):
        with pytest.raises(ValueError):
            run_algorithm1(T3, start=constant_mechanism(T3))

    def test_feasible_start(self, T2):
        start = PartitionMechanism(((0, 1), (2,), (3,)), 4)
        res = run_algorithm1(T2, start=start)
        assert set(res.mechanism.cells) == {(0, 1), (2, 3)}

    def test_trace_serializes(self, T2):
        step = run_algorithm1(T2).trace[0].to_dict()
        assert step["iteration"] == 1
        assert step["merged"] == [0, 1]


seeds = st.integers(0, 2 ** 32 - 1)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_every_step_stays_feasible_and_reduces_leakage(seed):
    rng = np.random.default_rng(seed)
    spec = random_spec(rng, n_max=4)
    graph = build(spec)
    res = run_algorithm1(spec, graph=graph)
    mech = identity_mechanism(spec)
    previous = max_leakage(spec, mech)
    assert res.initial_leakage == pytest.approx(previous, abs=1e-9)
    for step in res.trace:
        gain = merge_gain(spec, mech, *[next(y for y, c in enumerate(mech.cells) if c[0] == v)
                                         for v in step.merged])
        mech = merged(mech, *step.merged)
        now = max_leakage(spec, mech)
        assert feasible(spec, mech)
        assert now < previous
        assert 2 ** previous - 2 ** now == pytest.approx(gain, abs=1e-9)
        assert step.leakage_bits == pytest.approx(now, abs=1e-9)
        previous = now
    assert set(mech.cells) == set(res.mechanism.cells)
    assert len(theta(spec, res.mechanism, graph)) == 0
    assert len(res.trace) < spec.sources.size


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_merge_gain_matches_leakage_difference(seed):
    rng = np.random.default_rng(seed)
    spec = random_spec(rng, n_max=4)
    mech = random_partition(rng, spec.sources.size)
    if mech.n_outputs < 2:
        return
    y1, y2 = (int(v) for v in rng.choice(mech.n_outputs, size=2, replace=False))
    after = merged(mech, mech.cells[y1][0], mech.cells[y2][0])
    drop = 2 ** max_leakage(spec, mech) - 2 ** max_leakage(spec, after)
    assert merge_gain(spec, mech, y1, y2) == pytest.approx(drop, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_result_between_bounds_and_identity(seed):
    rng = np.random.default_rng(seed)
    spec = random_spec(rng, n_max=4)
    res = run_algorithm1(spec)
    lower = max(theorem1_bound(spec), theorem2_bound(spec))
    assert lower - 1e-6 <= res.leakage <= res.initial_leakage + 1e-12


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1:]
        yield [[first]] + part


def test_never_beats_exhaustive_optimum():
    rng = np.random.default_rng(17)
    done = 0
    while done < 15:
        spec = random_spec(rng, n_max=3, max_alphabet=2)
        size = spec.sources.size
        if size > 8:
            continue
        best = math.inf
        for part in _set_partitions(list(range(size))):
            mech = PartitionMechanism(tuple(tuple(sorted(c)) for c in part), size)
            if feasible(spec, mech):
                best = min(best, max_leakage(spec, mech))
        res = run_algorithm1(spec)
        assert res.leakage >= best - 1e-9
        assert best >= max(theorem1_bound(spec), theorem2_bound(spec)) - 1e-6
        done += 1
