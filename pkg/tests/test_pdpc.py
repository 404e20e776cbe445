import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liftroute.core import Instance, Mode, is_lifo, plan_cost, validate_plan
from liftroute.oracle import exact_pdpc
from liftroute.pdpc import (
    UndefinedRatioError, group_plan, lemma1_bound, ratio_upper_bound, rotation_costs,
    rotation_groupings, solve_pdpc,
)
from liftroute.tsp import MstDouble, NnTwoOpt, Strip, build_tour, edge_lengths

from conftest import random_instance

BACKENDS = [MstDouble(), NnTwoOpt(max_passes=3)]


def test_rotation_groupings_example():
    gs = rotation_groupings([1, 2, 3, 4], 2)
    assert [g.as_lists() for g in gs] == [[[1, 2], [3, 4]], [[2, 3], [4, 1]]]
    assert [g.rotation for g in gs] == [0, 1]


def test_rotation_groupings_extremes():
    (g,) = rotation_groupings([3, 1, 2], 1)
    assert g.as_lists() == [[3], [1], [2]]
    gs = rotation_groupings([0, 1, 2], 3)
    assert [g.as_lists() for g in gs] == [[[0, 1, 2]], [[1, 2, 0]], [[2, 0, 1]]]
    with pytest.raises(ValueError):
        rotation_groupings([0, 1], 3)


def test_group_plan_instance_a(inst_a):
    (g, _) = rotation_groupings([0, 1], 2)
    p = group_plan(inst_a, g)
    assert [repr(a) for a in p] == ["P0", "P1", "D1", "D0"]
    assert plan_cost(inst_a, p).loaded == 3.0


def test_group_plan_singletons():
    rng = np.random.default_rng(1)
    inst = random_instance(rng, 5, 2)
    (g,) = rotation_groupings([4, 2, 0, 1, 3], 1)
    p = group_plan(inst, g)
    assert plan_cost(inst, p).loaded == pytest.approx(inst.sum_loaded(), abs=1e-15)


def test_group_plan_near_duplicates():
    inst = Instance([[0.0], [0.05]], [[0.5], [0.55]])
    (g, _) = rotation_groupings([0, 1], 2)
    assert plan_cost(inst, group_plan(inst, g)).loaded == pytest.approx(0.6, abs=1e-15)
    (single,) = rotation_groupings([0, 1], 1)
    assert plan_cost(inst, group_plan(inst, single)).loaded == pytest.approx(1.0, abs=1e-15)


def test_lemma1_bound_examples():
    assert lemma1_bound(2.0, 2, 2 * math.sqrt(2)) == pytest.approx(3.0, abs=1e-12)
    assert lemma1_bound(1.7, 1, 123.0) == 1.7
    assert lemma1_bound(0.0, 4, 2.0) == pytest.approx(math.sqrt(2) * 0.75 * 2.0)


def test_ratio_upper_bound_examples():
    assert ratio_upper_bound(2.0, 2, 2 * math.sqrt(2)) == pytest.approx(3.0, abs=1e-12)
    assert ratio_upper_bound(5.0, 1, 9.0) == 1.0
    with pytest.raises(UndefinedRatioError):
        ratio_upper_bound(0.0, 2, 1.0)


@pytest.mark.parametrize("backend", [Strip(), MstDouble(), NnTwoOpt()])
def test_solve_instance_a(inst_a, backend):
    sol = solve_pdpc(inst_a, 2, backend)
    assert sol.sol == 3.0
    assert sol.lower_bound == 1.0
    assert sol.lemma1_rhs == pytest.approx(3.0, abs=1e-12)
    assert sol.ratio_ub == pytest.approx(3.0, abs=1e-12)
    assert sol.tour_len == pytest.approx(2 * math.sqrt(2), abs=1e-15)


def test_capacity_one_is_exact():
    rng = np.random.default_rng(4)
    for n, d in [(1, 1), (7, 2), (30, 3)]:
        inst = random_instance(rng, n, d)
        sol = solve_pdpc(inst, 1, MstDouble())
        assert sol.sol == inst.sum_loaded()
        assert sol.lemma1_rhs == sol.sol
        assert sol.ratio_ub == 1.0


def test_zero_loaded_length_ratio_is_an_error():
    inst = Instance([[0.2], [0.7]], [[0.2], [0.7]])
    sol = solve_pdpc(inst, 2, MstDouble())
    assert sol.sum_loaded == 0.0
    assert sol.lower_bound == 0.0
    with pytest.raises(UndefinedRatioError):
        sol.ratio_ub


def test_not_worse_than_oracle_small():
    rng = np.random.default_rng(12)
    for _ in range(10):
        inst = random_instance(rng, 4, 1)
        sol = solve_pdpc(inst, 2, Strip())
        assert sol.sol >= exact_pdpc(inst, 2)[0] - 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 60), st.sampled_from([1, 2, 3, 4, 5, 8]), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_rotation_sum_decomposition(n, c, d, seed):
    """Summed over all rotations: every loaded leg once, every chain edge c-1 times."""
    n = max(c, n - n % c)
    inst = random_instance(np.random.default_rng(seed), n, d)
    tour = build_tour(inst.lifted(), MstDouble())
    total = 0.0
    for g in rotation_groupings(tour, c):
        p = group_plan(inst, g)
        assert validate_plan(inst, p).ok and is_lifo(p)
        total += plan_cost(inst, p).loaded
    origin_chain = sum(edge_lengths(inst.origins, tour))
    dest_chain = sum(edge_lengths(inst.destinations, tour))
    expected = inst.sum_loaded() + (c - 1) * (origin_chain + dest_chain)
    assert total == pytest.approx(expected, abs=1e-6)
    costs = rotation_costs(inst, tour, c)
    assert costs.sum() == pytest.approx(total, abs=1e-6)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 80), st.sampled_from([1, 2, 3, 4, 8]), st.integers(1, 3),
       st.sampled_from(BACKENDS), st.integers(0, 2**32 - 1))
def test_solution_invariants(n, c, d, backend, seed):
    inst = random_instance(np.random.default_rng(seed), n, d)
    sol = solve_pdpc(inst, c, backend, seed)
    assert validate_plan(inst, sol.plan).ok
    assert is_lifo(sol.plan)
    assert sol.sol <= sol.lemma1_rhs + 1e-9
    assert sol.ratio_ub >= 1.0
    if n % c == 0:
        assert sol.lemma1_rhs == lemma1_bound(sol.sum_loaded, c, sol.tour_len)
        assert sol.ratio_ub == ratio_upper_bound(sol.sum_loaded, c, sol.tour_len)
        # best-of-c never exceeds the average of the c candidates
        assert sol.sol <= sol.rotation_costs.mean() + 1e-9
        assert sol.sol == pytest.approx(sol.rotation_costs.min(), abs=1e-9)


def test_leftovers_served_alone():
    rng = np.random.default_rng(6)
    inst = random_instance(rng, 11, 2)
    sol = solve_pdpc(inst, 4, MstDouble())
    assert len(sol.leftovers) == 3
    assert sol.chosen.groups.shape == (2, 4)
    tail = [repr(a) for a in sol.plan.actions[-6:]]
    expected = []
    for i in sol.leftovers.tolist():
        expected += [f"P{i}", f"D{i}"]
    assert tail == expected
    # leftovers are the shortest requests
    e = inst.loaded_lengths()
    assert e[sol.leftovers].max() <= np.delete(e, sol.leftovers).min()


def test_capacity_above_n_serves_everyone_alone():
    inst = random_instance(np.random.default_rng(9), 3, 1)
    sol = solve_pdpc(inst, 5, MstDouble())
    assert sol.chosen is None
    assert sol.sol == pytest.approx(inst.sum_loaded(), abs=1e-15)
    assert sol.sol <= sol.lemma1_rhs


def test_tie_breaks_to_lowest_rotation(inst_a):
    sol = solve_pdpc(inst_a, 2, MstDouble())
    assert sol.chosen.rotation == 0
    assert sol.rotation_costs.tolist() == [3.0, 3.0]


def test_precomputed_tour_is_used():
    inst = random_instance(np.random.default_rng(3), 12, 2)
    tour = np.arange(12)[::-1]
    sol = solve_pdpc(inst, 3, tour=tour)
    assert sol.tour.tolist() == tour.tolist()
    with pytest.raises(ValueError):
        solve_pdpc(inst, 3, tour=[0, 1, 2])
