"""Exact oracles: exhaustive search and a quantised knapsack program.

The exhaustive search enumerates every combination of configurations (each
task may also be dropped) and is the ground truth the heuristics are measured
against.  The knapsack program is a faster cross-check for instances whose
feasibility is governed by a single scalar resource; with one resource the
global problem is exactly a multiple-choice knapsack.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .core import Allocation, Configuration, expanded_grids
from .perf import SNR_CONST, TYPE_UTILITY_WEIGHT
from .problem import ProblemInstance

#: Refuse exhaustive enumeration above this many combined configuration states.
ENUMERATION_CAP = 10**8

#: Default knapsack quantisation: this many cells across the compound budget.
DP_DEFAULT_CELLS = 2000


class CapacityError(RuntimeError):
    """Instance too large to enumerate; carries the offending product."""

    def __init__(self, product: int, cap: int):
        super().__init__(f"{product} combined configuration states exceed the "
                         f"enumeration cap of {cap}")
        self.product = product
        self.cap = cap


class MultiResourceError(ValueError):
    """The knapsack oracle needs a single effective resource dimension."""


def _metric_rows(instance: ProblemInstance, per_task_configs=None):
    """Per-task padded metric arrays (utility, compound, occupancy, power).

    Row i follows the task's grid order, or the given restricted config list.
    """
    bounds = instance.bounds
    rows = []
    for task in instance.tasks:
        target = instance.target_for(task)
        if per_task_configs is not None and task.id in per_task_configs:
            configs = list(per_task_configs[task.id])
            for c in configs:
                if c not in task.config_space:
                    raise ValueError(f"restricted config {c} not on task "
                                     f"{task.id}'s grid")
            dwell = np.array([c.dwell_length for c in configs])
            tx = np.array([c.transmit_duration for c in configs])
            pw = np.array([c.transmit_power for c in configs])
        else:
            configs = list(task.config_space)
            dwell, tx, pw = expanded_grids(task.config_space)
        util, comp, occ, avg_pw = kernels.config_metrics(
            dwell, tx, pw, target.range_km, target.speed_mps,
            TYPE_UTILITY_WEIGHT[target.ttype], SNR_CONST,
            bounds.bounds[0], bounds.bounds[1],
            bounds.compound_weights[0], bounds.compound_weights[1])
        rows.append((task.id, configs, util, comp, occ, avg_pw))
    return rows


def _pad(arrays, fill=0.0):
    width = max(len(a) for a in arrays)
    out = np.full((len(arrays), width), fill, dtype=np.float64)
    for i, a in enumerate(arrays):
        out[i, :len(a)] = a
    return out


def optimal_allocation(instance: ProblemInstance, per_task_configs=None,
                       cap: int = ENUMERATION_CAP) -> tuple[Allocation, float]:
    """Exhaustive utility-maximal feasible allocation.

    ``per_task_configs`` optionally restricts tasks to configuration subsets.
    Ties go to the lexicographically smallest assignment vector (task 0 digit
    first; dropping sorts after every configuration).  Raises
    :class:`CapacityError` when the combined state count exceeds ``cap``.
    """
    rows = _metric_rows(instance, per_task_configs)
    product = 1
    for _, configs, *_ in rows:
        product *= len(configs)
    if product > cap:
        raise CapacityError(product, cap)

    util = _pad([r[2] for r in rows])
    occ = _pad([r[4] for r in rows])
    pw = _pad([r[5] for r in rows])
    ncfg = np.array([len(r[1]) for r in rows], dtype=np.int64)
    best_u, best_code, strides = kernels.scan_best_feasible(
        util, occ, pw, ncfg, instance.bounds.bounds[0], instance.bounds.bounds[1])

    assignment: dict[int, Configuration] = {}
    rem = best_code
    for i, (tid, configs, *_rest) in enumerate(rows):
        digit = rem // int(strides[i])
        rem -= digit * int(strides[i])
        if digit < len(configs):
            assignment[tid] = configs[digit]
    return Allocation(assignment=assignment), best_u


def optimal_allocation_dp(instance: ProblemInstance,
                          resource_grid_step: float | None = None,
                          compound_only: bool = False) -> tuple[Allocation, float]:
    """Knapsack oracle over the quantised compound resource.

    Exact for instances whose compound weights single out one component (the
    other bound is the caller's responsibility); with several active weights
    it optimises the compound relaxation and must be requested explicitly via
    ``compound_only``.  Costs are rounded up to the grid, so the result never
    overshoots the compound budget; the reported optimum can only grow as the
    step shrinks.
    """
    bounds = instance.bounds
    active_weights = sum(1 for w in bounds.compound_weights if w != 0.0)
    if active_weights > 1 and not compound_only:
        raise MultiResourceError(
            "instance has several active resource components; pass "
            "compound_only=True to optimise the compound relaxation")
    budget_value = sum(bounds.compound_weights)  # compound of the bounds
    if resource_grid_step is None:
        resource_grid_step = budget_value / DP_DEFAULT_CELLS
    if resource_grid_step <= 0:
        raise ValueError("resource grid step must be positive")

    rows = _metric_rows(instance)
    budget = int(np.floor(budget_value / resource_grid_step + 1e-9))
    util = _pad([r[2] for r in rows])
    cost = np.zeros_like(util, dtype=np.int64)
    for i, (_, configs, _, comp, _, _) in enumerate(rows):
        cost[i, :len(configs)] = np.ceil(
            np.asarray(comp) / resource_grid_step - 1e-9).astype(np.int64)
    ncfg = np.array([len(r[1]) for r in rows], dtype=np.int64)

    dp, choice = kernels.fill_knapsack_table(util, cost, ncfg, budget)

    assignment: dict[int, Configuration] = {}
    j = budget
    for i in range(len(rows) - 1, -1, -1):
        c = int(choice[i, j])
        tid, configs = rows[i][0], rows[i][1]
        if c < len(configs):
            assignment[tid] = configs[c]
            j -= int(cost[i, c])
    # Recompute the utility from the chosen digits in task order so the value
    # matches system_utility bit for bit.
    total = 0.0
    for i, (tid, configs, util_row, *_rest) in enumerate(rows):
        config = assignment.get(tid)
        if config is not None:
            total += float(util_row[configs.index(config)])
    return Allocation(assignment=assignment), total
