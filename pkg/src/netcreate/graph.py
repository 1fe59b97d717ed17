"""Owned-edge graphs and hop-count distances.

Every undirected edge is paid for by exactly one of its endpoints (its
owner) but can be routed over by anybody. Ownership only matters when an
agent wants to delete an edge.

Distances use :data:`UNREACHABLE` (``-1``) for pairs in different
components. The numeric stand-in used in cost evaluation is applied later,
in :mod:`netcreate.cost`.
"""

from __future__ import annotations

from collections import deque
from pathlib import Path
from typing import Iterator

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

UNREACHABLE = -1


class GraphError(ValueError):
    """Invalid graph operation (self-loop, duplicate or missing edge)."""


class OwnershipError(GraphError):
    """An agent tried to delete an edge it does not own."""


class InvalidConfigError(ValueError):
    """Parameters outside their legal range."""


def _check_n(n: int) -> int:
    n = int(n)
    if n < 2:
        raise InvalidConfigError(f"need at least 2 nodes, got n={n}")
    return n


class OwnedGraph:
    """Undirected simple graph whose edges each carry an owning endpoint."""

    __slots__ = ("n", "_adj", "_owner")

    def __init__(self, n: int):
        self.n = _check_n(n)
        self._adj: list[set[int]] = [set() for _ in range(self.n)]
        self._owner: dict[tuple[int, int], int] = {}

    # construction -----------------------------------------------------

    @classmethod
    def empty(cls, n: int) -> "OwnedGraph":
        return cls(n)

    @classmethod
    def complete(cls, n: int, rng) -> "OwnedGraph":
        """Complete graph; each edge's owner is a fair coin between its ends.

        Coins are drawn from ``rng`` in lexicographic order of ``(i, j)``
        with ``i < j``: a draw of 0 gives the edge to ``i``.
        """
        g = cls(n)
        for i in range(g.n):
            for j in range(i + 1, g.n):
                g._insert(i, j, i if rng.below(2) == 0 else j)
        return g

    @classmethod
    def from_edges(cls, n: int, edges) -> "OwnedGraph":
        """Build from ``(i, j, owner)`` triples."""
        g = cls(n)
        for i, j, owner in edges:
            i, j, owner = int(i), int(j), int(owner)
            if owner not in (i, j):
                raise OwnershipError(f"owner {owner} is not an endpoint of ({i}, {j})")
            g.add_edge(owner, j if owner == i else i)
        return g

    @classmethod
    def from_owner_matrix(cls, own: np.ndarray) -> "OwnedGraph":
        """Inverse of :meth:`owner_matrix`."""
        n = own.shape[0]
        g = cls(n)
        ii, jj = np.nonzero(np.triu(own >= 0, 1))
        for i, j in zip(ii.tolist(), jj.tolist()):
            g._insert(i, j, int(own[i, j]))
        return g

    def copy(self) -> "OwnedGraph":
        g = OwnedGraph(self.n)
        g._adj = [set(s) for s in self._adj]
        g._owner = dict(self._owner)
        return g

    # mutation ---------------------------------------------------------

    def _check_node(self, v: int) -> int:
        v = int(v)
        if not 0 <= v < self.n:
            raise GraphError(f"node {v} out of range for n={self.n}")
        return v

    def _insert(self, i: int, j: int, owner: int) -> None:
        self._adj[i].add(j)
        self._adj[j].add(i)
        self._owner[(i, j) if i < j else (j, i)] = owner

    def add_edge(self, buyer: int, other: int) -> None:
        """``buyer`` buys an edge to ``other`` and becomes its owner."""
        buyer, other = self._check_node(buyer), self._check_node(other)
        if buyer == other:
            raise GraphError(f"self-loop at node {buyer}")
        if other in self._adj[buyer]:
            raise GraphError(f"edge ({buyer}, {other}) already present")
        self._insert(buyer, other, buyer)

    def remove_edge(self, requester: int, other: int) -> None:
        """Delete edge ``{requester, other}``; only its owner may do this."""
        requester, other = self._check_node(requester), self._check_node(other)
        key = (requester, other) if requester < other else (other, requester)
        owner = self._owner.get(key)
        if owner is None:
            raise GraphError(f"edge ({requester}, {other}) not present")
        if owner != requester:
            raise OwnershipError(
                f"node {requester} cannot delete edge ({requester}, {other}) owned by {owner}"
            )
        del self._owner[key]
        self._adj[requester].discard(other)
        self._adj[other].discard(requester)

    # queries ----------------------------------------------------------

    def has_edge(self, i: int, j: int) -> bool:
        return j in self._adj[i]

    def owner(self, i: int, j: int) -> int | None:
        return self._owner.get((i, j) if i < j else (j, i))

    def neighbors(self, v: int) -> set[int]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def owned_by(self, v: int) -> list[int]:
        """Neighbours of ``v`` over edges that ``v`` owns, ascending."""
        return sorted(u for u in self._adj[v] if self.owner(v, u) == v)

    def owned_count(self, v: int) -> int:
        return sum(1 for u in self._adj[v] if self.owner(v, u) == v)

    def non_neighbors(self, v: int) -> list[int]:
        """Nodes other than ``v`` not adjacent to it, ascending."""
        adj = self._adj[v]
        return [u for u in range(self.n) if u != v and u not in adj]

    @property
    def edge_count(self) -> int:
        return len(self._owner)

    def edges(self) -> Iterator[tuple[int, int, int]]:
        """Yield ``(i, j, owner)`` with ``i < j`` in lexicographic order."""
        for (i, j) in sorted(self._owner):
            yield i, j, self._owner[(i, j)]

    def owner_matrix(self) -> np.ndarray:
        """``n x n`` int32 matrix: owner id on both ``[i, j]`` and ``[j, i]``, -1 if absent."""
        own = np.full((self.n, self.n), -1, dtype=np.int32)
        for (i, j), o in self._owner.items():
            own[i, j] = own[j, i] = o
        return own

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OwnedGraph):
            return NotImplemented
        return self.n == other.n and self._owner == other._owner

    def __repr__(self) -> str:
        return f"OwnedGraph(n={self.n}, edges={self.edge_count})"


def new_empty(n: int) -> OwnedGraph:
    return OwnedGraph.empty(n)


def new_complete(n: int, rng) -> OwnedGraph:
    return OwnedGraph.complete(n, rng)


def bfs_distances(g: OwnedGraph, source: int) -> np.ndarray:
    """Hop counts from ``source``; :data:`UNREACHABLE` where no path exists."""
    dist = np.full(g.n, UNREACHABLE, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    while queue:
        v = queue.popleft()
        dv = dist[v] + 1
        for u in g.neighbors(v):
            if dist[u] == UNREACHABLE:
                dist[u] = dv
                queue.append(u)
    return dist


def all_pairs_distances(g: OwnedGraph) -> np.ndarray:
    """Full ``n x n`` hop-count table, :data:`UNREACHABLE` between components."""
    if g.edge_count == 0:
        d = np.full((g.n, g.n), UNREACHABLE, dtype=np.int64)
        np.fill_diagonal(d, 0)
        return d
    rows, cols = [], []
    for i, j, _ in g.edges():
        rows += (i, j)
        cols += (j, i)
    m = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(g.n, g.n))
    d = shortest_path(m, method="D", directed=False, unweighted=True)
    out = np.full(d.shape, UNREACHABLE, dtype=np.int64)
    finite = np.isfinite(d)
    out[finite] = d[finite].astype(np.int64)
    return out


def is_connected(g: OwnedGraph) -> bool:
    return bool((bfs_distances(g, 0) != UNREACHABLE).all())


# edge-list persistence ----------------------------------------------------

def format_edge_list(g: OwnedGraph) -> str:
    lines = [f"N {g.n}"]
    lines += [f"{i} {j} {o}" for i, j, o in g.edges()]
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> OwnedGraph:
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0][0] != "N" or len(lines[0]) != 2:
        raise GraphError("edge list must start with a line 'N <n>'")
    n = int(lines[0][1])
    edges = []
    for k, parts in enumerate(lines[1:], start=2):
        if len(parts) != 3:
            raise GraphError(f"line {k}: expected '<i> <j> <owner>'")
        edges.append(tuple(int(p) for p in parts))
    return OwnedGraph.from_edges(n, edges)


def save_edge_list(g: OwnedGraph, path: str | Path) -> None:
    Path(path).write_text(format_edge_list(g))


def load_edge_list(path: str | Path) -> OwnedGraph:
    return parse_edge_list(Path(path).read_text())
