"""Compiled inner loop of the simulation.

The graph is held as flat arrays so numba can work on it:

* ``own[i, j]``  owner of edge {i, j} (stored symmetrically), -1 if absent
* ``nbr[v, :deg[v]]``  neighbour list of v, ``pos[v, u]`` index of u in it
* ``owned[v]``  number of edges v owns

Distances use -1 for unreachable pairs. Every delta is assembled as
``a * alpha + b`` with integer ``a`` and ``b`` where an unreachable pair
contributes ``alpha + n``.

Move indices: ``0 <= idx < n(n-1)`` is the ordered pair ``(idx // (n-1), r)``
with ``r = idx % (n-1)`` shifted past the first node; larger indices are
switch triples counted node by node as ``owned[i] * (n - 1 - deg[i])``
blocks, each block laid out as ``j_rank * non_neighbours + k_rank`` over
ascending node ids.
"""

import numba as nb
import numpy as np

from .rng import below

BUY = 0
SELL = 1
SWITCH = 2

LOCAL_MINIMUM = 0
STEP_CAP = 1


# graph arrays ---------------------------------------------------------------

@nb.njit(cache=True)
def build_lists(own):
    n = own.shape[0]
    nbr = np.zeros((n, n), dtype=np.int32)
    pos = np.full((n, n), -1, dtype=np.int32)
    deg = np.zeros(n, dtype=np.int32)
    owned = np.zeros(n, dtype=np.int32)
    for v in range(n):
        for u in range(n):
            if own[v, u] >= 0:
                pos[v, u] = deg[v]
                nbr[v, deg[v]] = u
                deg[v] += 1
                if own[v, u] == v:
                    owned[v] += 1
    return nbr, pos, deg, owned


@nb.njit(cache=True)
def insert_edge(own, nbr, pos, deg, owned, i, j, owner):
    own[i, j] = owner
    own[j, i] = owner
    pos[i, j] = deg[i]
    nbr[i, deg[i]] = j
    deg[i] += 1
    pos[j, i] = deg[j]
    nbr[j, deg[j]] = i
    deg[j] += 1
    owned[owner] += 1


@nb.njit(cache=True)
def _unlink(nbr, pos, deg, v, u):
    p = pos[v, u]
    last = nbr[v, deg[v] - 1]
    nbr[v, p] = last
    pos[v, last] = p
    pos[v, u] = -1
    deg[v] -= 1


@nb.njit(cache=True)
def delete_edge(own, nbr, pos, deg, owned, i, j):
    owned[own[i, j]] -= 1
    own[i, j] = -1
    own[j, i] = -1
    _unlink(nbr, pos, deg, i, j)
    _unlink(nbr, pos, deg, j, i)


@nb.njit(cache=True)
def bfs(nbr, deg, src, row, queue):
    n = row.shape[0]
    for v in range(n):
        row[v] = -1
    row[src] = 0
    head = 0
    tail = 1
    queue[0] = src
    while head < tail:
        v = queue[head]
        head += 1
        dv = row[v] + 1
        for p in range(deg[v]):
            u = nbr[v, p]
            if row[u] < 0:
                row[u] = dv
                queue[tail] = u
                tail += 1


@nb.njit(cache=True)
def apsp(nbr, deg, dist, queue):
    for v in range(dist.shape[0]):
        bfs(nbr, deg, v, dist[v], queue)


@nb.njit(cache=True)
def _row_terms(old, new, skip):
    """(unreachable-count change, finite-sum change) between two rows."""
    n = old.shape[0]
    du = 0
    db = 0
    for k in range(n):
        if k == skip:
            continue
        o = old[k]
        w = new[k]
        if o < 0:
            du -= 1
        else:
            db -= o
        if w < 0:
            du += 1
        else:
            db += w
    return du, db


@nb.njit(cache=True)
def _table_terms(dist):
    n = dist.shape[0]
    cu = 0
    cb = 0
    for a in range(n):
        for b in range(n):
            if a != b:
                d = dist[a, b]
                if d < 0:
                    cu += 1
                else:
                    cb += d
    return cu, cb


# switch-triple bookkeeping ----------------------------------------------------

@nb.njit(cache=True)
def switch_count(deg, owned):
    n = deg.shape[0]
    t = 0
    for i in range(n):
        t += owned[i] * (n - 1 - deg[i])
    return t


@nb.njit(cache=True)
def decode_switch(own, deg, owned, t):
    n = deg.shape[0]
    for i in range(n):
        free = n - 1 - deg[i]
        c = owned[i] * free
        if t < c:
            jr = t // free
            kr = t % free
            j = -1
            k = -1
            for m in range(n):
                if own[i, m] == i:
                    if jr == 0:
                        j = m
                    jr -= 1
                elif m != i and own[i, m] < 0:
                    if kr == 0:
                        k = m
                    kr -= 1
            return i, j, k
        t -= c
    return -1, -1, -1


@nb.njit(cache=True)
def decode_move(own, deg, owned, idx):
    """Return ``(kind, agent, other, target)`` for a move index."""
    n = deg.shape[0]
    npairs = n * (n - 1)
    if idx < npairs:
        i = idx // (n - 1)
        j = idx % (n - 1)
        if j >= i:
            j += 1
        o = own[i, j]
        if o < 0:
            return BUY, i, j, -1
        return SELL, o, i + j - o, -1
    i, j, k = decode_switch(own, deg, owned, idx - npairs)
    return SWITCH, i, j, k


# evaluation --------------------------------------------------------------------

@nb.njit(cache=True)
def _ensure_row(nbr, deg, rows, rowver, version, v, queue):
    if rowver[v] != version:
        bfs(nbr, deg, v, rows[v], queue)
        rowver[v] = version
    return rows[v]


@nb.njit(cache=True)
def selfish_delta(own, nbr, pos, deg, owned, rows, rowver, version,
                  scratch, queue, alpha, kind, a, b, c):
    n = deg.shape[0]
    da = _ensure_row(nbr, deg, rows, rowver, version, a, queue)
    if kind == BUY:
        db_row = _ensure_row(nbr, deg, rows, rowver, version, b, queue)
        for k in range(n):
            o = da[k]
            w = o
            if db_row[k] >= 0:
                cand = db_row[k] + 1
                if o < 0 or cand < o:
                    w = cand
            scratch[k] = w
        scratch[a] = 0
        coef = 1
    elif kind == SELL:
        delete_edge(own, nbr, pos, deg, owned, a, b)
        bfs(nbr, deg, a, scratch, queue)
        insert_edge(own, nbr, pos, deg, owned, a, b, a)
        coef = -1
    else:
        delete_edge(own, nbr, pos, deg, owned, a, b)
        insert_edge(own, nbr, pos, deg, owned, a, c, a)
        bfs(nbr, deg, a, scratch, queue)
        delete_edge(own, nbr, pos, deg, owned, a, c)
        insert_edge(own, nbr, pos, deg, owned, a, b, a)
        coef = 0
    du, dfin = _row_terms(da, scratch, a)
    return (coef + du) * alpha + (dfin + du * n)


@nb.njit(cache=True)
def _buy_update(dist, a, b):
    n = dist.shape[0]
    ra = dist[a].copy()
    rb = dist[b].copy()
    for x in range(n):
        for y in range(n):
            w = dist[x, y]
            if ra[x] >= 0 and rb[y] >= 0:
                cand = ra[x] + 1 + rb[y]
                if w < 0 or cand < w:
                    w = cand
            if rb[x] >= 0 and ra[y] >= 0:
                cand = rb[x] + 1 + ra[y]
                if w < 0 or cand < w:
                    w = cand
            dist[x, y] = w


@nb.njit(cache=True)
def _table_without_edge(own, nbr, pos, deg, owned, dist, dist2, queue, a, b):
    """Fill ``dist2`` with the table of the graph minus owned edge {a, b}.

    An edge whose endpoints sit at equal depth from x lies on no shortest
    path from x, so only sources with ``|d(x,a) - d(x,b)| == 1`` are redone.
    """
    n = deg.shape[0]
    delete_edge(own, nbr, pos, deg, owned, a, b)
    for x in range(n):
        dxa = dist[x, a]
        dxb = dist[x, b]
        if dxa >= 0 and (dxa - dxb == 1 or dxb - dxa == 1):
            bfs(nbr, deg, x, dist2[x], queue)
        else:
            for y in range(n):
                dist2[x, y] = dist[x, y]
    insert_edge(own, nbr, pos, deg, owned, a, b, a)


@nb.njit(cache=True)
def unselfish_delta(own, nbr, pos, deg, owned, dist, dist_terms, dist2,
                    queue, alpha, kind, a, b, c):
    """Delta of the all-pairs objective; sell/switch leave the new table in ``dist2``."""
    n = deg.shape[0]
    cu0 = dist_terms[0]
    cb0 = dist_terms[1]
    if kind == BUY:
        cu = 0
        cb = 0
        for x in range(n):
            dxa = dist[x, a]
            dxb = dist[x, b]
            for y in range(n):
                if x == y:
                    continue
                w = dist[x, y]
                if dxa >= 0 and dist[b, y] >= 0:
                    cand = dxa + 1 + dist[b, y]
                    if w < 0 or cand < w:
                        w = cand
                if dxb >= 0 and dist[a, y] >= 0:
                    cand = dxb + 1 + dist[a, y]
                    if w < 0 or cand < w:
                        w = cand
                if w < 0:
                    cu += 1
                else:
                    cb += w
        coef = 1
    else:
        _table_without_edge(own, nbr, pos, deg, owned, dist, dist2, queue, a, b)
        if kind == SELL:
            coef = -1
        else:
            _buy_update(dist2, a, c)
            coef = 0
        cu, cb = _table_terms(dist2)
    du = cu - cu0
    return (coef + du) * alpha + (cb - cb0 + du * n)


@nb.njit(cache=True)
def _evaluate(own, nbr, pos, deg, owned, unselfish, rows, rowver, version,
              dist, dist_terms, dist2, scratch, queue, alpha, kind, a, b, c):
    if unselfish:
        return unselfish_delta(own, nbr, pos, deg, owned, dist, dist_terms, dist2,
                               queue, alpha, kind, a, b, c)
    return selfish_delta(own, nbr, pos, deg, owned, rows, rowver, version,
                         scratch, queue, alpha, kind, a, b, c)


@nb.njit(cache=True)
def _apply(own, nbr, pos, deg, owned, unselfish, dist, dist_terms, dist2, kind, a, b, c):
    if kind == BUY:
        insert_edge(own, nbr, pos, deg, owned, a, b, a)
        if unselfish:
            _buy_update(dist, a, b)
    elif kind == SELL:
        delete_edge(own, nbr, pos, deg, owned, a, b)
        if unselfish:
            dist[:, :] = dist2
    else:
        delete_edge(own, nbr, pos, deg, owned, a, b)
        insert_edge(own, nbr, pos, deg, owned, a, c, a)
        if unselfish:
            dist[:, :] = dist2
    if unselfish:
        cu, cb = _table_terms(dist)
        dist_terms[0] = cu
        dist_terms[1] = cb


@nb.njit(cache=True)
def _acceptable(delta, kind, switch_equal, tol):
    if kind == SWITCH and not switch_equal:
        return delta < -tol
    return delta <= tol


@nb.njit(cache=True)
def run_loop(own, alpha, unselfish, with_switch, max_steps, tries, stop_first,
             switch_equal, tol, state):
    """Simulate in place on ``own``; returns ``(steps, termination, accepted)``.

    Per random try the stream is consumed as: one coin ``below(2)`` when
    switches are enabled (1 means switch), then either ``below(n)``,
    ``below(n - 1)`` for an ordered pair or a single ``below(T)`` over the
    ``T`` valid switch triples (no draw when ``T == 0``). The fallback scan
    draws ``below(M - p)`` at position ``p`` of an incremental Fisher-Yates
    shuffle over all ``M`` move indices.
    """
    n = own.shape[0]
    nbr, pos, deg, owned = build_lists(own)
    queue = np.empty(n, dtype=np.int32)
    scratch = np.empty(n, dtype=np.int32)
    rows = np.empty((n, n), dtype=np.int32)
    rowver = np.full(n, -1, dtype=np.int64)
    version = 0
    dist = np.empty((n, n), dtype=np.int32)
    dist2 = np.empty((n, n), dtype=np.int32)
    dist_terms = np.zeros(2, dtype=np.int64)
    if unselfish:
        apsp(nbr, deg, dist, queue)
        cu, cb = _table_terms(dist)
        dist_terms[0] = cu
        dist_terms[1] = cb
    accepted = 0
    npairs = n * (n - 1)

    for step in range(1, max_steps + 1):
        step_accepted = False
        for _t in range(tries):
            kind = BUY
            a = -1
            b = -1
            c = -1
            if with_switch and below(state, 2) == 1:
                total = switch_count(deg, owned)
                if total == 0:
                    continue
                a, b, c = decode_switch(own, deg, owned, below(state, total))
                kind = SWITCH
            else:
                i = below(state, n)
                j = below(state, n - 1)
                if j >= i:
                    j += 1
                o = own[i, j]
                if o < 0:
                    a = i
                    b = j
                else:
                    kind = SELL
                    a = o
                    b = i + j - o
            delta = _evaluate(own, nbr, pos, deg, owned, unselfish, rows, rowver, version,
                              dist, dist_terms, dist2, scratch, queue, alpha, kind, a, b, c)
            if _acceptable(delta, kind, switch_equal, tol):
                _apply(own, nbr, pos, deg, owned, unselfish, dist, dist_terms, dist2,
                       kind, a, b, c)
                version += 1
                accepted += 1
                step_accepted = True
                if stop_first:
                    break
        if step_accepted:
            continue

        total = npairs
        if with_switch:
            total += switch_count(deg, owned)
        perm = np.arange(total)
        found = False
        for p in range(total):
            r = p + below(state, total - p)
            idx = perm[r]
            perm[r] = perm[p]
            perm[p] = idx
            kind, a, b, c = decode_move(own, deg, owned, idx)
            delta = _evaluate(own, nbr, pos, deg, owned, unselfish, rows, rowver, version,
                              dist, dist_terms, dist2, scratch, queue, alpha, kind, a, b, c)
            if _acceptable(delta, kind, switch_equal, tol):
                _apply(own, nbr, pos, deg, owned, unselfish, dist, dist_terms, dist2,
                       kind, a, b, c)
                version += 1
                accepted += 1
                found = True
                break
        if not found:
            return step, LOCAL_MINIMUM, accepted
    return max_steps, STEP_CAP, accepted


@nb.njit(cache=True)
def all_deltas(own, alpha, unselfish, with_switch):
    """Delta of every move index in order, plus the decoded moves."""
    n = own.shape[0]
    nbr, pos, deg, owned = build_lists(own)
    queue = np.empty(n, dtype=np.int32)
    scratch = np.empty(n, dtype=np.int32)
    rows = np.empty((n, n), dtype=np.int32)
    rowver = np.full(n, -1, dtype=np.int64)
    dist = np.empty((n, n), dtype=np.int32)
    dist2 = np.empty((n, n), dtype=np.int32)
    dist_terms = np.zeros(2, dtype=np.int64)
    if unselfish:
        apsp(nbr, deg, dist, queue)
        cu, cb = _table_terms(dist)
        dist_terms[0] = cu
        dist_terms[1] = cb
    total = n * (n - 1)
    if with_switch:
        total += switch_count(deg, owned)
    deltas = np.empty(total, dtype=np.float64)
    moves = np.empty((total, 4), dtype=np.int64)
    for idx in range(total):
        kind, a, b, c = decode_move(own, deg, owned, idx)
        moves[idx, 0] = kind
        moves[idx, 1] = a
        moves[idx, 2] = b
        moves[idx, 3] = c
        deltas[idx] = _evaluate(own, nbr, pos, deg, owned, unselfish, rows, rowver, 0,
                                dist, dist_terms, dist2, scratch, queue, alpha, kind, a, b, c)
    return deltas, moves


@nb.njit(cache=True)
def all_pairs(own):
    n = own.shape[0]
    nbr, pos, deg, owned = build_lists(own)
    dist = np.empty((n, n), dtype=np.int32)
    apsp(nbr, deg, dist, np.empty(n, dtype=np.int32))
    return dist
