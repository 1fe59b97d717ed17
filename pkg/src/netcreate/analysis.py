"""Metrics of final configurations and batch summaries."""

from __future__ import annotations

from dataclasses import dataclass, fields
from itertools import combinations
from typing import Iterable

import numpy as np

from .cost import total_cost
from .graph import UNREACHABLE, GraphError, OwnedGraph, all_pairs_distances, is_connected


@dataclass(frozen=True)
class Classification:
    is_tree: bool
    is_star: bool
    is_complete: bool


@dataclass(frozen=True)
class RunMetrics:
    edges: int
    avg_distance: float
    diameter: int
    is_tree: bool
    is_star: bool
    is_complete: bool
    steps: int
    total_cost: float
    connected: bool = True


@dataclass(frozen=True)
class Summary:
    min: float
    mean: float
    max: float


@dataclass(frozen=True)
class AggregateStats:
    steps: Summary
    edges: Summary
    avg_distance: Summary
    tree_probability: float
    star_probability: float
    run_count: int
    # runs whose final graph was disconnected; kept out of the distance summary
    invalid_runs: int = 0


def classify(g: OwnedGraph) -> Classification:
    n, e = g.n, g.edge_count
    tree = e == n - 1 and is_connected(g)
    star = tree and any(g.degree(v) == n - 1 for v in range(n))
    return Classification(tree, star, e == n * (n - 1) // 2)


def _connected_table(g: OwnedGraph) -> np.ndarray:
    d = all_pairs_distances(g)
    if (d == UNREACHABLE).any():
        raise GraphError("graph is disconnected")
    return d


def average_distance(g: OwnedGraph, dist: np.ndarray | None = None) -> float:
    """Mean hop count over ordered pairs of distinct nodes."""
    d = _connected_table(g) if dist is None else dist
    return float(d.sum()) / (g.n * (g.n - 1))


def diameter(g: OwnedGraph, dist: np.ndarray | None = None) -> int:
    d = _connected_table(g) if dist is None else dist
    return int(d.max())


def three_centre_structure_check(g: OwnedGraph) -> bool:
    """Three hubs with exactly two edges among them, every other node tied to two hubs.

    This is the ``2(n - 3) + 2``-edge graph of diameter two.
    """
    n = g.n
    if n < 4 or g.edge_count != 2 * (n - 3) + 2:
        return False
    # every node of degree other than 2 must be a hub
    forced = [v for v in range(n) if g.degree(v) != 2]
    if len(forced) > 3:
        return False
    rest = [v for v in range(n) if g.degree(v) == 2]
    for extra in combinations(rest, 3 - len(forced)):
        hubs = set(forced) | set(extra)
        inner = sum(1 for a, b in combinations(sorted(hubs), 2) if g.has_edge(a, b))
        if inner == 2 and all(
            g.neighbors(v) <= hubs for v in range(n) if v not in hubs
        ):
            return True
    return False


def metrics(g: OwnedGraph, alpha: float, steps: int = 0) -> RunMetrics:
    d = all_pairs_distances(g)
    connected = not (d == UNREACHABLE).any()
    cls = classify(g)
    return RunMetrics(
        edges=g.edge_count,
        avg_distance=average_distance(g, d) if connected else float("nan"),
        diameter=diameter(g, d) if connected else -1,
        is_tree=cls.is_tree,
        is_star=cls.is_star,
        is_complete=cls.is_complete,
        steps=steps,
        total_cost=total_cost(g, d, alpha),
        connected=connected,
    )


def _summary(values: list[float]) -> Summary:
    if not values:
        return Summary(float("nan"), float("nan"), float("nan"))
    return Summary(min(values), sum(values) / len(values), max(values))


def aggregate(batch: Iterable[RunMetrics]) -> AggregateStats:
    runs = list(batch)
    if not runs:
        raise ValueError("cannot aggregate an empty batch")
    valid = [r for r in runs if r.connected]
    count = len(runs)
    return AggregateStats(
        steps=_summary([r.steps for r in runs]),
        edges=_summary([r.edges for r in runs]),
        avg_distance=_summary([r.avg_distance for r in valid]),
        tree_probability=sum(r.is_tree for r in runs) / count,
        star_probability=sum(r.is_star for r in runs) / count,
        run_count=count,
        invalid_runs=count - len(valid),
    )


METRIC_FIELDS = tuple(f.name for f in fields(RunMetrics))
