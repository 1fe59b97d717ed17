from collections import Counter

import numpy as np
import pytest

from conftest import complete, random_graph, star
from netcreate import _kernel
from netcreate.cost import TOL, Behaviour, CostView, total_cost
from netcreate.graph import GraphError, OwnedGraph, all_pairs_distances
from netcreate.moves import (
    BuySell,
    MoveSet,
    Switch,
    accept,
    all_moves,
    apply,
    enumerate_all_moves,
    evaluate,
    inverse,
    is_valid,
    move_count,
    propose_random_buysell,
    propose_random_switch,
    switch_count,
)
from netcreate.rng import Rng


def brute_switch_triples(g):
    return [
        (i, j, k)
        for i in range(g.n)
        for j in range(g.n)
        for k in range(g.n)
        if len({i, j, k}) == 3 and g.owner(i, j) == i and not g.has_edge(i, k)
    ]


class TestProposals:
    def test_buysell_on_empty_is_buy_for_first_node(self):
        g = OwnedGraph(5)
        m = propose_random_buysell(g, Rng(0))
        assert m.buy and m.agent == m.i and m.i != m.j

    def test_sell_goes_to_owner_whatever_the_order(self):
        g = OwnedGraph(2)
        g.add_edge(1, 0)
        for seed in range(10):
            m = propose_random_buysell(g, Rng(seed))
            assert not m.buy and m.agent == 1

    def test_buysell_pairs_are_uniform_over_ordered_pairs(self):
        g = OwnedGraph(4)
        rng = Rng(11)
        counts = Counter((m.i, m.j) for m in (propose_random_buysell(g, rng) for _ in range(6000)))
        assert len(counts) == 12
        assert min(counts.values()) > 400 and max(counts.values()) < 600

    def test_switch_none_on_empty(self):
        assert propose_random_switch(OwnedGraph(4), Rng(0)) is None

    def test_switch_none_on_complete(self):
        assert propose_random_switch(complete(5), Rng(0)) is None

    def test_switch_star_only_from_centre(self):
        # full star: leaves own nothing and the centre has no free partner
        assert propose_random_switch(star(4), Rng(0)) is None
        g = star(4)
        g.remove_edge(0, 3)
        rng = Rng(2)
        for _ in range(50):
            assert propose_random_switch(g, rng).i == 0

    @pytest.mark.parametrize("seed", range(6))
    def test_switch_count_and_uniformity(self, seed):
        g = random_graph(6, 0.3, seed)
        triples = brute_switch_triples(g)
        assert switch_count(g) == len(triples)
        if not triples:
            return
        rng = Rng(seed)
        draws = 200 * len(triples)
        counts = Counter(
            (m.i, m.j, m.k) for m in (propose_random_switch(g, rng) for _ in range(draws))
        )
        assert set(counts) == set(triples)
        expected = draws / len(triples)
        chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
        dof = len(triples) - 1
        assert chi2 < dof + 6 * np.sqrt(2 * dof) + 10


class TestEvaluate:
    def test_buy_on_two_isolated(self):
        g = OwnedGraph(2)
        m = BuySell(0, 1, agent=0, buy=True)
        assert evaluate(g, m, CostView(Behaviour.SELFISH, 3, 2)) == pytest.approx(-1)

    def test_sell_single_edge(self):
        g = OwnedGraph(2)
        g.add_edge(0, 1)
        m = BuySell(0, 1, agent=0, buy=False)
        assert evaluate(g, m, CostView(Behaviour.SELFISH, 0.5, 2)) == pytest.approx(1.0)

    def test_repeatable(self):
        g = random_graph(8, 0.3, 1)
        view = CostView(Behaviour.UNSELFISH, 2.0, 8)
        for m in all_moves(g, MoveSet.BS_SW)[:40]:
            assert evaluate(g, m, view) == evaluate(g, m, view)

    def test_does_not_touch_graph(self):
        g = random_graph(8, 0.3, 2)
        before = g.copy()
        for m in all_moves(g, MoveSet.BS_SW):
            evaluate(g, m, CostView(Behaviour.SELFISH, 2.0, 8))
        assert g == before


@pytest.mark.parametrize("delta,expected", [(-2.0, True), (0.0, True), (0.5, False), (TOL / 2, True)])
def test_accept(delta, expected):
    assert accept(delta) is expected


def test_strict_switch_policy():
    sw = Switch(0, 1, 2)
    assert accept(0.0, sw, switch_equal=True)
    assert not accept(0.0, sw, switch_equal=False)
    assert accept(-1.0, sw, switch_equal=False)
    assert accept(0.0, BuySell(0, 1, 0, True), switch_equal=False)


class TestApply:
    @pytest.mark.parametrize("seed", range(8))
    def test_inverse_restores(self, seed):
        g = random_graph(9, 0.3, seed)
        for m in all_moves(g, MoveSet.BS_SW):
            h = g.copy()
            apply(h, m)
            assert h != g
            apply(h, inverse(m))
            assert h == g

    def test_switch_is_atomic(self):
        g = OwnedGraph(3)
        g.add_edge(0, 1)
        apply(g, Switch(0, 1, 2))
        assert not g.has_edge(0, 1) and g.owner(0, 2) == 0

    def test_stale_proposal(self):
        g = OwnedGraph(3)
        m = BuySell(0, 1, agent=0, buy=True)
        apply(g, m)
        with pytest.raises(GraphError):
            apply(g, m)
        with pytest.raises(GraphError):
            apply(g, Switch(1, 0, 2))  # 1 does not own {0, 1}


class TestEnumeration:
    @pytest.mark.parametrize("seed", range(6))
    @pytest.mark.parametrize("move_set", list(MoveSet))
    def test_covers_move_space(self, seed, move_set):
        g = random_graph(7, 0.35, seed)
        moves = list(enumerate_all_moves(g, move_set, Rng(seed)))
        extra = len(brute_switch_triples(g)) if move_set.with_switch else 0
        assert len(moves) == 7 * 6 + extra == move_count(g, move_set)
        assert Counter(moves) == Counter(all_moves(g, move_set))
        assert all(is_valid(g, m) for m in moves)
        switches = {(m.i, m.j, m.k) for m in moves if isinstance(m, Switch)}
        if move_set.with_switch:
            assert switches == set(brute_switch_triples(g))
        else:
            assert not switches

    def test_order_is_random_but_seeded(self):
        g = random_graph(7, 0.3, 0)
        a = list(enumerate_all_moves(g, MoveSet.BS_SW, Rng(1)))
        b = list(enumerate_all_moves(g, MoveSet.BS_SW, Rng(1)))
        c = list(enumerate_all_moves(g, MoveSet.BS_SW, Rng(2)))
        assert a == b and a != c


GRAPHS = [(n, p, s) for n, p in [(4, 0.5), (6, 0.2), (7, 0.5), (9, 0.15), (10, 0.3), (12, 0.12), (12, 0.3)]
          for s in range(2)]


@pytest.mark.parametrize("n,p,seed", GRAPHS)
@pytest.mark.parametrize("behaviour", list(Behaviour))
@pytest.mark.parametrize("alpha", [0.7, 2.0, 5.0])
def test_kernel_deltas_equal_full_recomputation(n, p, seed, behaviour, alpha):
    g = random_graph(n, p, seed + 100)
    view = CostView(behaviour, alpha, n)
    deltas, kmoves = _kernel.all_deltas(g.owner_matrix(), alpha,
                                        behaviour is Behaviour.UNSELFISH, True)
    moves = all_moves(g, MoveSet.BS_SW)
    assert len(moves) == len(deltas)
    for m, km, kd in zip(moves, kmoves.tolist(), deltas.tolist()):
        if isinstance(m, Switch):
            assert km == [_kernel.SWITCH, m.i, m.j, m.k]
        else:
            assert km[1] == m.agent
            assert km[0] == (_kernel.BUY if m.buy else _kernel.SELL)
        assert kd == pytest.approx(evaluate(g, m, view), abs=1e-9)


@pytest.mark.parametrize("n,p,seed", GRAPHS[:8])
def test_unselfish_delta_equals_total_delta(n, p, seed):
    g = random_graph(n, p, seed + 200)
    alpha = 3.0
    t0 = total_cost(g, all_pairs_distances(g), alpha)
    view = CostView(Behaviour.UNSELFISH, alpha, n)
    for m in all_moves(g, MoveSet.BS_SW):
        h = g.copy()
        apply(h, m)
        assert evaluate(g, m, view) == pytest.approx(
            total_cost(h, all_pairs_distances(h), alpha) - t0, abs=1e-9)
