import time

import numpy as np
import pytest

from helpers import random_small_instance
from qram.core import (Allocation, ConfigSpace, DEFAULT_CONFIG_SPACE,
                       ResourceBounds, resource_of)
from qram.exact import (CapacityError, MultiResourceError, optimal_allocation,
                        optimal_allocation_dp)
from qram.perf import generate_scenario, task_utility
from qram.problem import build_tracking_instance, is_feasible, system_utility

SMALL_SPACE = ConfigSpace((100.0, 500.0, 1100.0), (2.0, 6.0, 10.0), (1.0, 4.0))


def _instance(n, seed, bounds, space=SMALL_SPACE):
    return build_tracking_instance(generate_scenario(n, seed), bounds, space)


def test_single_task_is_argmax_over_feasible_configs():
    bounds = ResourceBounds(bounds=(0.05, 0.2), compound_weights=(1.0, 1.0))
    inst = _instance(1, 3, bounds)
    target = inst.target_for(inst.tasks[0])
    alloc, best = optimal_allocation(inst)
    utilities = [(task_utility(c, target), c) for c in SMALL_SPACE
                 if np.all(resource_of(c) <= np.asarray(bounds.bounds))]
    expected_u = max(u for u, _ in utilities)
    assert best == expected_u
    assert alloc.assignment[0] == max(utilities)[1]


def test_starved_bound_drops_everything():
    # A bound below any configuration's requirement forces the empty answer.
    bounds = ResourceBounds(bounds=(1e-9, 5.0), compound_weights=(1.0, 1.0))
    inst = _instance(3, 4, bounds)
    alloc, best = optimal_allocation(inst)
    assert len(alloc.assignment) == 0
    assert best == 0.0


def test_capacity_cap_raises_with_product():
    inst = _instance(6, 1, ResourceBounds((0.5, 5.0), (1.0, 1.0)),
                     space=DEFAULT_CONFIG_SPACE)
    with pytest.raises(CapacityError) as err:
        optimal_allocation(inst, cap=10**6)
    assert err.value.product == 90**6


def test_restriction_narrows_the_search():
    bounds = ResourceBounds(bounds=(0.08, 0.3), compound_weights=(1.0, 1.0))
    inst = _instance(2, 5, bounds)
    only = [SMALL_SPACE.config_at(0), SMALL_SPACE.config_at(3)]
    alloc, _ = optimal_allocation(inst, per_task_configs={0: only, 1: only})
    for config in alloc.assignment.values():
        assert config in only


def test_optimal_result_is_feasible_and_deterministic():
    for seed in range(10):
        inst = random_small_instance(seed)
        a1, u1 = optimal_allocation(inst)
        a2, u2 = optimal_allocation(inst)
        assert u1 == u2 and a1.assignment == a2.assignment
        assert is_feasible(a1, inst)
        assert u1 == system_utility(a1, inst)


# ------------------------------------------------------------------ knapsack

def _single_resource_instance(n, seed, r1, space=SMALL_SPACE):
    bounds = ResourceBounds(bounds=(r1, 1000.0), compound_weights=(1.0, 0.0))
    return _instance(n, seed, bounds, space)


def test_dp_rejects_multi_resource():
    inst = _instance(2, 1, ResourceBounds((0.1, 0.2), (1.0, 1.0)))
    with pytest.raises(MultiResourceError):
        optimal_allocation_dp(inst)


def test_dp_matches_exhaustive_on_grid_aligned_costs():
    # Single dwell keeps occupancy on an exact 0.004 lattice, so quantisation
    # with that step is lossless and the oracles must agree exactly.
    space = ConfigSpace((500.0,), (2.0, 4.0, 6.0, 8.0, 10.0), (1.0, 2.0, 4.0))
    step = (2.0 / 500.0) / 0.05  # occupancy lattice / bound, in compound units
    for seed in range(8):
        inst = _single_resource_instance(3, seed, 0.05, space=space)
        _, brute = optimal_allocation(inst)
        _, dp = optimal_allocation_dp(inst, resource_grid_step=step)
        assert dp == brute


def test_dp_refinement_never_decreases():
    inst = _single_resource_instance(4, 9, 0.06)
    budget = 1.0  # compound of the bounds under unit weight
    values = []
    for cells in (200, 400, 800, 1600):
        _, u = optimal_allocation_dp(inst, resource_grid_step=budget / cells)
        values.append(u)
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
    assert all(b >= a for a, b in zip(values, values[1:]))


def test_dp_never_exceeds_exhaustive():
    for seed in range(8):
        inst = _single_resource_instance(3, seed, 0.05)
        _, brute = optimal_allocation(inst)
        _, dp = optimal_allocation_dp(inst)
        assert dp <= brute + 1e-12


def test_dp_compound_relaxation_bounds_the_optimum():
    for seed in range(5):
        inst = random_small_instance(seed)
        _, brute = optimal_allocation(inst)
        _, dp = optimal_allocation_dp(inst, compound_only=True)
        assert dp >= brute - 1e-12


def test_dp_desk_scale_timing():
    # Informational: 10 tasks x 90 configs at the default quantisation.
    inst = build_tracking_instance(
        generate_scenario(10, 2),
        ResourceBounds(bounds=(0.3, 1000.0), compound_weights=(1.0, 0.0)),
        DEFAULT_CONFIG_SPACE)
    start = time.perf_counter()
    optimal_allocation_dp(inst)
    elapsed = time.perf_counter() - start
    print(f"dp 10x90 @ default step: {elapsed*1e3:.1f} ms")
    assert elapsed < 5.0
