"""Buy/sell and switch moves: proposal, evaluation, acceptance, application.

This is the straightforward reference path. It evaluates a move by copying
the graph, applying the move and recomputing the deciding agent's cost from
scratch. The compiled kernel in :mod:`netcreate._kernel` must agree with it
move for move, and it draws from the random stream in the same order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np

from .cost import Behaviour, CostView, agent_cost, non_worsening, strictly_improving
from .graph import GraphError, OwnedGraph, all_pairs_distances, bfs_distances


class MoveSet(enum.Enum):
    BS = "bs"
    BS_SW = "bs+sw"

    @property
    def with_switch(self) -> bool:
        return self is MoveSet.BS_SW


@dataclass(frozen=True)
class BuySell:
    """Buy edge ``{i, j}`` for ``i`` or, if it exists, offer it to its owner for sale."""

    i: int
    j: int
    agent: int
    buy: bool


@dataclass(frozen=True)
class Switch:
    """Agent ``i`` swaps its edge to ``j`` for a new edge to ``k``."""

    i: int
    j: int
    k: int

    @property
    def agent(self) -> int:
        return self.i


MoveProposal = Union[BuySell, Switch]


def buysell(g: OwnedGraph, i: int, j: int) -> BuySell:
    owner = g.owner(i, j)
    if owner is None:
        return BuySell(i, j, agent=i, buy=True)
    return BuySell(i, j, agent=owner, buy=False)


def switch_count(g: OwnedGraph) -> int:
    """Number of valid switch triples ``(i, j, k)``."""
    return sum(g.owned_count(i) * (g.n - 1 - g.degree(i)) for i in range(g.n))


def switch_at(g: OwnedGraph, t: int) -> Switch:
    """The ``t``-th switch triple in canonical order (node, owned rank, free rank)."""
    for i in range(g.n):
        free = g.n - 1 - g.degree(i)
        block = g.owned_count(i) * free
        if t < block:
            jr, kr = divmod(t, free)
            return Switch(i, g.owned_by(i)[jr], g.non_neighbors(i)[kr])
        t -= block
    raise IndexError("switch index out of range")


def move_at(g: OwnedGraph, idx: int) -> MoveProposal:
    """Decode a move index: ordered pairs first, then switch triples."""
    n = g.n
    npairs = n * (n - 1)
    if idx < npairs:
        i, r = divmod(idx, n - 1)
        return buysell(g, i, r + (r >= i))
    return switch_at(g, idx - npairs)


def propose_random_buysell(g: OwnedGraph, rng) -> BuySell:
    i = rng.below(g.n)
    j = rng.below(g.n - 1)
    if j >= i:
        j += 1
    return buysell(g, i, j)


def propose_random_switch(g: OwnedGraph, rng) -> Switch | None:
    """Uniform valid switch triple, or ``None`` when none exists (no draw is made)."""
    total = switch_count(g)
    if total == 0:
        return None
    return switch_at(g, rng.below(total))


def propose_random(g: OwnedGraph, move_set: MoveSet, rng) -> MoveProposal | None:
    if move_set.with_switch and rng.below(2) == 1:
        return propose_random_switch(g, rng)
    return propose_random_buysell(g, rng)


def is_valid(g: OwnedGraph, m: MoveProposal) -> bool:
    if isinstance(m, BuySell):
        if m.i == m.j:
            return False
        owner = g.owner(m.i, m.j)
        if m.buy:
            return owner is None and m.agent == m.i
        return owner is not None and owner == m.agent
    return (
        len({m.i, m.j, m.k}) == 3
        and g.owner(m.i, m.j) == m.i
        and not g.has_edge(m.i, m.k)
    )


def apply(g: OwnedGraph, m: MoveProposal) -> None:
    """Apply ``m`` to ``g`` in place; stale proposals raise :class:`GraphError`."""
    if not is_valid(g, m):
        raise GraphError(f"move {m} is not valid on this graph")
    if isinstance(m, BuySell):
        if m.buy:
            g.add_edge(m.i, m.j)
        else:
            g.remove_edge(m.agent, m.i + m.j - m.agent)
    else:
        g.remove_edge(m.i, m.j)
        g.add_edge(m.i, m.k)


def inverse(m: MoveProposal) -> MoveProposal:
    if isinstance(m, BuySell):
        if m.buy:
            return BuySell(m.i, m.j, agent=m.agent, buy=False)
        other = m.i + m.j - m.agent
        return BuySell(m.agent, other, agent=m.agent, buy=True)
    return Switch(m.i, m.k, m.j)


def _cost(g: OwnedGraph, agent: int, view: CostView) -> float:
    if view.behaviour is Behaviour.SELFISH:
        return agent_cost(g, bfs_distances(g, agent), agent, view)
    return agent_cost(g, all_pairs_distances(g), agent, view)


def evaluate(g: OwnedGraph, m: MoveProposal, view: CostView) -> float:
    """Change in the deciding agent's cost if ``m`` were applied."""
    after = g.copy()
    apply(after, m)
    return _cost(after, m.agent, view) - _cost(g, m.agent, view)


def accept(delta: float, m: MoveProposal | None = None, switch_equal: bool = True) -> bool:
    """Non-worsening acceptance; ``switch_equal=False`` demands strict gain for switches."""
    if isinstance(m, Switch) and not switch_equal:
        return strictly_improving(delta)
    return non_worsening(delta)


def move_count(g: OwnedGraph, move_set: MoveSet) -> int:
    total = g.n * (g.n - 1)
    if move_set.with_switch:
        total += switch_count(g)
    return total


def enumerate_all_moves(g: OwnedGraph, move_set: MoveSet, rng) -> Iterator[MoveProposal]:
    """Every candidate move in uniformly random order.

    The shuffle is an incremental Fisher-Yates, so random draws are only
    consumed for the moves actually pulled from the iterator. The graph must
    not be modified while iterating.
    """
    total = move_count(g, move_set)
    perm = np.arange(total)
    for p in range(total):
        r = p + rng.below(total - p)
        perm[p], perm[r] = perm[r], perm[p]
        yield move_at(g, int(perm[p]))


def all_moves(g: OwnedGraph, move_set: MoveSet) -> list[MoveProposal]:
    """Every candidate move in canonical index order."""
    return [move_at(g, idx) for idx in range(move_count(g, move_set))]
