"""Agent and system cost functions.

Edges cost ``alpha`` each and every hop costs 1. A pair that cannot reach
each other is charged ``sentinel(alpha, n) = alpha + n``, which exceeds both
the edge price and the longest possible path, so connecting is always
worthwhile.

Deltas are compared against :data:`TOL`. All costs are of the form
``a * alpha + b`` with small integers ``a`` and ``b``, so two distinct
values on the decimal alpha grid differ by far more than the tolerance
while float rounding stays far below it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .graph import UNREACHABLE, OwnedGraph

TOL = 1e-9


class Behaviour(enum.Enum):
    SELFISH = "selfish"
    UNSELFISH = "unselfish"


@dataclass(frozen=True)
class CostView:
    behaviour: Behaviour
    alpha: float
    n: int

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")


def sentinel(alpha: float, n: int) -> float:
    return alpha + n


def effective_distance(raw: int, alpha: float, n: int) -> float:
    return sentinel(alpha, n) if raw == UNREACHABLE else float(raw)


def _effective_sum(d: np.ndarray, alpha: float, n: int) -> float:
    """Sum of effective distances over the entries of ``d`` (zeros add nothing)."""
    unreachable = int(np.count_nonzero(d == UNREACHABLE))
    finite = int(d[d != UNREACHABLE].sum())
    return finite + unreachable * sentinel(alpha, n)


def selfish_cost(g: OwnedGraph, dist: np.ndarray, i: int, view: CostView) -> float:
    """Own edge spend plus own distances to everybody else.

    ``dist`` may be the full table or just row ``i``.
    """
    row = dist[i] if dist.ndim == 2 else dist
    return view.alpha * g.owned_count(i) + _effective_sum(row, view.alpha, g.n)


def unselfish_cost(g: OwnedGraph, dist: np.ndarray, i: int, view: CostView) -> float:
    """Own edge spend plus the distance sum over all ordered pairs."""
    return view.alpha * g.owned_count(i) + _effective_sum(dist, view.alpha, g.n)


def agent_cost(g: OwnedGraph, dist: np.ndarray, i: int, view: CostView) -> float:
    if view.behaviour is Behaviour.SELFISH:
        return selfish_cost(g, dist, i, view)
    return unselfish_cost(g, dist, i, view)


def total_cost(g: OwnedGraph, dist: np.ndarray, alpha: float) -> float:
    return alpha * g.edge_count + _effective_sum(dist, alpha, g.n)


def is_zero(delta: float) -> bool:
    return abs(delta) <= TOL


def non_worsening(delta: float) -> bool:
    return delta <= TOL


def strictly_improving(delta: float) -> bool:
    return delta < -TOL
