"""Exact ground truth for small instances.

The social optimum is found by enumerating every labelled graph on ``n``
nodes (``2 ** (n(n-1)/2)`` edge subsets) with a self-contained bitmask BFS,
so it shares no code with the graph and cost modules it is used to check.
Equilibrium checks evaluate every available move with the plain-Python
reference evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numba as nb
import numpy as np

from .cost import TOL, Behaviour, CostView, agent_cost, is_zero, strictly_improving
from .graph import OwnedGraph, all_pairs_distances, bfs_distances
from .moves import MoveProposal, MoveSet, all_moves, apply

MAX_ORACLE_N = 7


@dataclass(frozen=True)
class OptimumReport:
    optimal_total_cost: float
    optimizer_count: int
    one_optimizer: OwnedGraph


def _edge_slots(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


@nb.njit(cache=True)
def _scan(n, slot_i, slot_j, alpha, tol):
    m = slot_i.shape[0]
    best = np.inf
    best_mask = -1
    count = 0
    adj = np.zeros(n, dtype=np.int64)
    full = (1 << n) - 1
    for mask in range(1 << m):
        for v in range(n):
            adj[v] = 0
        edges = 0
        for s in range(m):
            if (mask >> s) & 1:
                adj[slot_i[s]] |= 1 << slot_j[s]
                adj[slot_j[s]] |= 1 << slot_i[s]
                edges += 1
        finite = 0
        unreachable = 0
        for src in range(n):
            seen = 1 << src
            frontier = seen
            level = 0
            while frontier:
                level += 1
                nxt = 0
                for v in range(n):
                    if (frontier >> v) & 1:
                        nxt |= adj[v]
                nxt &= ~seen
                # popcount of the newly reached layer
                x = nxt
                c = 0
                while x:
                    x &= x - 1
                    c += 1
                finite += c * level
                seen |= nxt
                frontier = nxt
            x = full & ~seen
            while x:
                x &= x - 1
                unreachable += 1
        cost = alpha * (edges + unreachable) + finite + unreachable * n
        if cost < best - tol:
            best = cost
            best_mask = mask
            count = 1
        elif cost <= best + tol:
            count += 1
    return best, best_mask, count


def brute_force_social_optimum(n: int, alpha: float) -> OptimumReport:
    """Minimum total cost over all labelled graphs on ``n <= 7`` nodes."""
    if not 2 <= n <= MAX_ORACLE_N:
        raise ValueError(f"exhaustive scan supports 2 <= n <= {MAX_ORACLE_N}, got {n}")
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    slots = _edge_slots(n)
    si = np.array([a for a, _ in slots], dtype=np.int64)
    sj = np.array([b for _, b in slots], dtype=np.int64)
    best, mask, count = _scan(n, si, sj, float(alpha), TOL)
    g = OwnedGraph(n)
    for s, (i, j) in enumerate(slots):
        if (mask >> s) & 1:
            g.add_edge(i, j)
    return OptimumReport(float(best), int(count), g)


def move_deltas(g: OwnedGraph, alpha: float, behaviour: Behaviour,
                move_set: MoveSet) -> Iterator[tuple[MoveProposal, float]]:
    """Every available move with the deciding agent's cost change."""
    view = CostView(behaviour, float(alpha), g.n)
    selfish = behaviour is Behaviour.SELFISH

    def cost(h: OwnedGraph, agent: int) -> float:
        d = bfs_distances(h, agent) if selfish else all_pairs_distances(h)
        return agent_cost(h, d, agent, view)

    before: dict[int, float] = {}
    for m in all_moves(g, move_set):
        if m.agent not in before:
            before[m.agent] = cost(g, m.agent)
        after = g.copy()
        apply(after, m)
        yield m, cost(after, m.agent) - before[m.agent]


def verify_nash(g: OwnedGraph, alpha: float, behaviour: Behaviour = Behaviour.SELFISH,
                move_set: MoveSet = MoveSet.BS) -> bool:
    """True iff no agent has a strictly improving move."""
    return not any(strictly_improving(d) for _, d in move_deltas(g, alpha, behaviour, move_set))


def degeneracy_scan(g: OwnedGraph, alpha: float, behaviour: Behaviour = Behaviour.SELFISH,
                    move_set: MoveSet = MoveSet.BS) -> int:
    """Number of moves that leave the deciding agent's cost exactly unchanged."""
    return sum(1 for _, d in move_deltas(g, alpha, behaviour, move_set) if is_zero(d))
