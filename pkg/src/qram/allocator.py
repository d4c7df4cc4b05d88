"""Agent-driven global allocation: greedy upgrades without job lists.

The greedy pass only ever needs "the next desirable configuration from the
current one", which is exactly what the trained network proposes.  So the
whole allocation runs in one module: start every task at its cheapest
configuration, ask the proposer for each task's next configuration, and keep
applying the feasible upgrade with the best (optionally priority-weighted)
utility-to-resource quotient, re-querying a task after each accepted upgrade.

Unlike the job-list pass, proposals come from an arbitrary function, so the
loop protects itself: a stationary or non-improving proposal retires the
task, and a per-task upgrade budget of the grid size bounds the loop even
under adversarial proposers.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .agent import AgentParams, forward, greedy_action
from .classic import (AllocationTrace, UpgradeStep, UsageLedger,
                      _drop_until_feasible, base_configuration, job_list_for)
from .core import Allocation, Configuration, Task, resource_of
from .env import encode_state, raw_quotient
from .perf import Target
from .problem import ProblemInstance

#: propose(task, target, current_config) -> next configuration
Proposer = Callable[[Task, Target, Configuration], Configuration]


def next_config(params: AgentParams, task: Task, target: Target,
                current: Configuration) -> Configuration:
    """Greedy network proposal for the task's next configuration."""
    space = task.config_space
    if params.n_actions != space.size:
        raise ValueError(f"network has {params.n_actions} actions but the grid "
                         f"has {space.size} configurations")
    logits, _ = forward(params, encode_state(space, current, target))
    return space.config_at(greedy_action(logits))


def network_proposer(params: AgentParams) -> Proposer:
    def propose(task: Task, target: Target, current: Configuration) -> Configuration:
        return next_config(params, task, target, current)
    return propose


def frontier_proposer(instance: ProblemInstance) -> Proposer:
    """Perfect proposer: the next job-list point (itself when exhausted).

    Driving the allocation loop with this oracle reproduces the classical
    greedy result exactly; it pins down the loop's semantics in tests.
    """
    lists = {task.id: job_list_for(task, instance.target_for(task), instance.bounds)
             for task in instance.tasks}

    def propose(task: Task, target: Target, current: Configuration) -> Configuration:
        points = lists[task.id].points
        for i, p in enumerate(points):
            if p.config == current:
                return points[i + 1].config if i + 1 < len(points) else current
        raise ValueError(f"task {task.id}: {current} is not on its frontier")
    return propose


def allocate_with_proposals(propose: Proposer, instance: ProblemInstance,
                            priority_weights: dict[int, float] | None = None
                            ) -> tuple[Allocation, AllocationTrace]:
    """Greedy upgrade loop over proposals; never returns an infeasible result."""
    weights = priority_weights or {}
    tasks = {t.id: t for t in instance.tasks}
    targets = {t.id: instance.target_for(t) for t in instance.tasks}

    current = {tid: base_configuration(tasks[tid].config_space, targets[tid],
                                       instance.bounds)
               for tid in tasks}
    ledger = UsageLedger(instance)
    active = sorted(tasks)
    for tid in active:
        ledger.set_row(tid, resource_of(current[tid]))
    dropped = _drop_until_feasible(ledger, active)

    candidates: dict[int, tuple[Configuration, np.ndarray, float]] = {}
    upgrade_count = {tid: 0 for tid in active}

    def refresh(tid: int) -> None:
        proposal = propose(tasks[tid], targets[tid], current[tid])
        quotient = raw_quotient(current[tid], proposal, targets[tid],
                                instance.bounds)
        if proposal == current[tid] or quotient <= 0.0:
            candidates.pop(tid, None)  # stationary or non-improving: retire
        else:
            candidates[tid] = (proposal, resource_of(proposal),
                               weights.get(tid, 1.0) * quotient)

    for tid in active:
        refresh(tid)

    upgrades: list[UpgradeStep] = []
    while candidates:
        order = sorted(candidates, key=lambda tid: (-candidates[tid][2], tid))
        for tid in order:
            proposal, vec, ratio = candidates[tid]
            if ledger.fits(tid, vec):
                ledger.set_row(tid, vec)
                current[tid] = proposal
                upgrades.append(UpgradeStep(task_id=tid, config=proposal,
                                            ratio=ratio))
                upgrade_count[tid] += 1
                if upgrade_count[tid] > tasks[tid].config_space.size:
                    candidates.pop(tid, None)  # cycle guard for bad proposers
                else:
                    refresh(tid)
                break
        else:
            break  # nothing feasible anywhere

    assignment = {tid: current[tid] for tid in active}
    return (Allocation(assignment=assignment),
            AllocationTrace(dropped=tuple(dropped), upgrades=tuple(upgrades)))


def allocate_with_agent(params: AgentParams, instance: ProblemInstance,
                        priority_weights: dict[int, float] | None = None
                        ) -> tuple[Allocation, AllocationTrace]:
    return allocate_with_proposals(network_proposer(params), instance,
                                   priority_weights)
