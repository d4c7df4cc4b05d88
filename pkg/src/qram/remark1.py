"""Frozen instance where refining the grid *hurts* the greedy solver.

Because the greedy pass only walks hull points, enlarging a task's
configuration set can strictly decrease its result even though the true
optimum can only grow.  This module pins one such instance, found once by a
scripted sweep over scenario seeds and power bounds and kept as a regression
anchor: with the transmit-power grid refined from 2 to 3 values, the greedy
utility drops while the exhaustive optimum stays put.

The effect needs the power bound to bind: refining the power grid inserts
high-ratio intermediate upgrades that fragment the power budget.
"""

from __future__ import annotations

from .classic import solve_classic
from .core import ConfigSpace, ResourceBounds
from .exact import optimal_allocation
from .perf import generate_scenario
from .problem import build_tracking_instance, system_utility

#: Scenario: 4 targets drawn with this seed.
SCENARIO_SEED = 5
N_TARGETS = 4

#: Tight average-power bound (kW); occupancy is loose here on purpose.
BOUNDS = ResourceBounds(bounds=(0.30, 0.14), compound_weights=(1.0, 1.0))

DWELL_GRID = (100.0, 300.0, 500.0, 700.0)
TX_DURATION_GRID = (2.0, 6.0, 10.0)

#: Nested transmit-power grids: 24, 36 and 60 configurations per task.
POWER_GRID_CHAIN = (
    (1.0, 4.0),
    (1.0, 2.0, 4.0),
    (1.0, 1.5, 2.0, 3.0, 4.0),
)

#: Index pair (i, j) in the chain with greedy(j) < greedy(i) despite i ⊂ j.
NON_MONOTONE_PAIR = (0, 1)


def config_space_chain() -> list[ConfigSpace]:
    return [ConfigSpace(DWELL_GRID, TX_DURATION_GRID, power_grid)
            for power_grid in POWER_GRID_CHAIN]


def demo_rows() -> list[dict]:
    """Greedy and exhaustive utility per nested configuration-set size."""
    scenario = generate_scenario(N_TARGETS, SCENARIO_SEED)
    rows = []
    for space in config_space_chain():
        instance = build_tracking_instance(scenario, BOUNDS, space)
        alloc, _ = solve_classic(instance)
        _, optimum = optimal_allocation(instance)
        rows.append({"configs_per_task": space.size,
                     "greedy_utility": system_utility(alloc, instance),
                     "optimal_utility": optimum})
    return rows
