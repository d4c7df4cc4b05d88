"""Problem instances: tasks plus bounds plus the scenario they track.

The instance is the object every solver consumes.  It serialises to a
versioned JSON document (``"format": 1``) whose field names mirror the type
fields, so instances round-trip between the CLI tools and the library.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (Allocation, Configuration, ConfigSpace, ResourceBounds,
                   Task, resource_of)
from .perf import Scenario, Target, task_utility


@dataclass(frozen=True)
class ProblemInstance:
    tasks: tuple[Task, ...]
    bounds: ResourceBounds
    scenario: Scenario

    def __post_init__(self):
        ids = [t.id for t in self.tasks]
        if len(set(ids)) != len(ids):
            raise ValueError("task ids must be unique")
        for task in self.tasks:
            self.scenario.target_by_id(task.target_ref)  # raises if missing

    def task_by_id(self, task_id: int) -> Task:
        for t in self.tasks:
            if t.id == task_id:
                return t
        raise KeyError(f"no task with id {task_id}")

    def target_for(self, task: Task) -> Target:
        return self.scenario.target_by_id(task.target_ref)

    def to_dict(self) -> dict:
        return {"format": 1,
                "tasks": [t.to_dict() for t in self.tasks],
                "bounds": self.bounds.to_dict(),
                "scenario": self.scenario.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "ProblemInstance":
        if d.get("format") != 1:
            raise ValueError(f"unsupported instance format {d.get('format')!r}")
        return cls(tasks=tuple(Task.from_dict(t) for t in d["tasks"]),
                   bounds=ResourceBounds.from_dict(d["bounds"]),
                   scenario=Scenario.from_dict(d["scenario"]))


def build_tracking_instance(scenario: Scenario, bounds: ResourceBounds,
                            space: ConfigSpace) -> ProblemInstance:
    """One tracking task per target, task id equal to target id."""
    tasks = tuple(Task(id=t.id, target_ref=t.id, config_space=space)
                  for t in scenario.targets)
    return ProblemInstance(tasks=tasks, bounds=bounds, scenario=scenario)


def default_bounds(n_targets: int) -> ResourceBounds:
    """Default benchmark bounds: occupancy budget grows with the scenario but
    is capped at 1.0 (one radar timeline); 5 kW average power; unit weights.

    Chosen so that mid-size scenarios are resource constrained rather than
    trivially saturated.
    """
    return ResourceBounds(bounds=(min(0.03 * n_targets, 1.0), 5.0),
                          compound_weights=(1.0, 1.0))


def _check_assignment(alloc: Allocation, instance: ProblemInstance) -> None:
    for tid, config in alloc.assignment.items():
        task = instance.task_by_id(tid)  # raises KeyError on unknown ids
        if config not in task.config_space:
            raise ValueError(f"task {tid}: {config} is not on its grid")


def system_utility(alloc: Allocation, instance: ProblemInstance) -> float:
    """Sum of per-task utilities over assigned tasks, in task order."""
    _check_assignment(alloc, instance)
    total = 0.0
    for task in instance.tasks:
        config = alloc.assignment.get(task.id)
        if config is not None:
            total += task_utility(config, instance.target_for(task))
    return total


def is_feasible(alloc: Allocation, instance: ProblemInstance) -> bool:
    """True iff the summed resource vector stays within bounds (inclusive)."""
    _check_assignment(alloc, instance)
    usage = np.zeros(len(instance.bounds.bounds), dtype=np.float64)
    for task in instance.tasks:
        config = alloc.assignment.get(task.id)
        if config is not None:
            usage += resource_of(config)
    return bool(np.all(usage <= np.asarray(instance.bounds.bounds)))
