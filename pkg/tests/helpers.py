"""Shared test utilities: independent oracles and instance generators."""

import numpy as np

from qram.classic import JobPoint
from qram.core import Configuration, ConfigSpace, ResourceBounds, resource_of
from qram.perf import generate_scenario
from qram.problem import build_tracking_instance
from qram.rng import PortableRng


def gift_wrap_frontier(points):
    """Exhaustive frontier oracle, algorithmically independent of the
    monotone chain: keep the best point per resource level, then repeatedly
    walk to the maximum-slope strictly-improving point (slope ties resolved
    to the farthest point, which skips collinear interiors)."""
    best = {}
    for p in points:
        held = best.get(p.resource)
        if held is None or (-p.utility, p.config) < (-held.utility, held.config):
            best[p.resource] = p
    start = min(best.values(), key=lambda p: (p.resource, -p.utility, p.config))
    chain = [start]
    while True:
        cur = chain[-1]
        cands = [p for p in best.values()
                 if p.resource > cur.resource and p.utility > cur.utility]
        if not cands:
            return chain
        slope = lambda p: (p.utility - cur.utility) / (p.resource - cur.resource)
        chain.append(max(cands, key=lambda p: (slope(p), p.resource)))


def synthetic_points(values):
    """JobPoints from (resource, utility) pairs; configs are distinct grid
    cells whose lexicographic order follows the input order."""
    return [JobPoint(config=Configuration(100.0 + i, 1.0, 1.0),
                     resource=float(r), utility=float(u))
            for i, (r, u) in enumerate(values)]


def random_point_cloud(rng: PortableRng, max_points: int = 40):
    """Random cloud on a coarse quarter-grid: duplicates and collinear runs
    are common on purpose."""
    n = 1 + rng.randint(max_points)
    return synthetic_points([(rng.randint(21) / 4.0, rng.randint(21) / 4.0)
                             for _ in range(n)])


def random_small_space(rng: PortableRng) -> ConfigSpace:
    """Random sub-grid of the default operating grid, at most 24 cells."""
    dwell_pool = (100.0, 300.0, 500.0, 700.0, 900.0, 1100.0)
    tx_pool = (2.0, 4.0, 6.0, 8.0, 10.0)
    pw_pool = (1.0, 2.0, 4.0)

    def pick(pool, k):
        chosen = set()
        while len(chosen) < k:
            chosen.add(pool[rng.randint(len(pool))])
        return tuple(sorted(chosen))

    return ConfigSpace(dwell_grid=pick(dwell_pool, 1 + rng.randint(4)),
                       tx_duration_grid=pick(tx_pool, 1 + rng.randint(3)),
                       tx_power_grid=pick(pw_pool, 1 + rng.randint(2)))


def random_small_instance(seed: int, max_tasks: int = 5):
    """Random constrained instance small enough for exhaustive search."""
    rng = PortableRng(seed)
    n_tasks = 1 + rng.randint(max_tasks)
    scenario = generate_scenario(n_tasks, seed)
    space = random_small_space(rng)
    # Scale the occupancy bound between starvation and near-saturation.
    occs = [resource_of(c)[0] for c in space]
    lo = min(occs) * n_tasks * 0.5
    hi = max(occs) * n_tasks * 1.2
    r1 = rng.uniform(lo, hi)
    r2 = rng.uniform(0.01, 0.5)
    bounds = ResourceBounds(bounds=(r1, r2), compound_weights=(1.0, 1.0))
    return build_tracking_instance(scenario, bounds, space)
