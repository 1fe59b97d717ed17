import itertools

import pytest

from netcreate.analysis import classify
from netcreate.cost import Behaviour, CostView
from netcreate.engine import (
    ScenarioConfig,
    Start,
    Termination,
    initial_graph,
    is_local_minimum,
    run,
    run_reference,
)
from netcreate.graph import InvalidConfigError, is_connected
from netcreate.moves import MoveSet, accept, all_moves, evaluate
from netcreate.oracle import verify_nash
from netcreate.rng import Rng

from conftest import random_graph


def same(a, b):
    return (
        a.final_graph == b.final_graph
        and a.steps == b.steps
        and a.termination == b.termination
        and a.accepted_moves == b.accepted_moves
        and a.final_total_cost == pytest.approx(b.final_total_cost, abs=1e-9)
    )


class TestConfig:
    @pytest.mark.parametrize("kwargs", [
        dict(n=1, alpha=1.0),
        dict(n=5, alpha=0.0),
        dict(n=5, alpha=1.0, max_steps=0),
        dict(n=5, alpha=1.0, tries_per_step=0),
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidConfigError):
            ScenarioConfig(**kwargs)

    def test_defaults(self):
        c = ScenarioConfig(n=10, alpha=2)
        assert c.max_steps == 10000 and c.tries_per_step == 100

    def test_initial_graphs(self):
        assert initial_graph(ScenarioConfig(n=6, alpha=1), Rng(0)).edge_count == 0
        g = initial_graph(ScenarioConfig(n=6, alpha=1, start=Start.COMPLETE), Rng(0))
        assert g.edge_count == 15


COMBOS = list(itertools.product(Behaviour, MoveSet))


@pytest.mark.parametrize("behaviour,move_set", COMBOS)
@pytest.mark.parametrize("alpha", [0.5, 0.7])
def test_complete_start_is_fixed_point_below_one(behaviour, move_set, alpha):
    out = run(ScenarioConfig(n=12, alpha=alpha, behaviour=behaviour, start=Start.COMPLETE,
                             move_set=move_set, seed=5))
    assert out.steps == 1
    assert out.termination is Termination.LOCAL_MINIMUM
    assert classify(out.final_graph).is_complete
    assert out.accepted_moves == 0


def test_two_nodes_from_scratch():
    out = run(ScenarioConfig(n=2, alpha=3, seed=0))
    assert out.termination is Termination.LOCAL_MINIMUM
    assert out.final_graph.edge_count == 1
    assert out.steps <= 2
    assert out.final_total_cost == pytest.approx(3 + 2)


def test_determinism():
    c = ScenarioConfig(n=25, alpha=4, move_set=MoveSet.BS_SW, seed=77)
    a, b = run(c), run(c)
    assert same(a, b)
    assert list(a.final_graph.edges()) == list(b.final_graph.edges())


def test_seeds_differ():
    a = run(ScenarioConfig(n=25, alpha=1.5, seed=1))
    b = run(ScenarioConfig(n=25, alpha=1.5, seed=2))
    assert a.final_graph != b.final_graph


def test_selfish_alpha_one_hits_the_cap():
    out = run(ScenarioConfig(n=30, alpha=1, max_steps=300, seed=3))
    assert out.termination is Termination.STEP_CAP
    assert out.steps == 300


REFERENCE_CASES = [
    dict(n=n, alpha=a, behaviour=b, start=s, move_set=m, seed=seed)
    for n, a in [(3, 1.5), (5, 0.7), (5, 2), (6, 3), (6, 4.5), (7, 10)]
    for b, s, m in itertools.product(Behaviour, Start, MoveSet)
    for seed in (1,)
]


@pytest.mark.parametrize("case", REFERENCE_CASES,
                         ids=lambda c: "-".join(str(v.value if hasattr(v, "value") else v)
                                                for v in c.values()))
def test_kernel_matches_python_reference(case):
    c = ScenarioConfig(max_steps=40, tries_per_step=6, **case)
    assert same(run(c), run_reference(c))


@pytest.mark.parametrize("switch_equal,stop_first", [(False, False), (True, True), (False, True)])
@pytest.mark.parametrize("behaviour", list(Behaviour))
def test_kernel_matches_reference_under_alternative_policies(switch_equal, stop_first, behaviour):
    for seed, alpha in [(1, 2.0), (2, 4.0), (3, 1.3)]:
        c = ScenarioConfig(n=7, alpha=alpha, behaviour=behaviour, move_set=MoveSet.BS_SW,
                           seed=seed, max_steps=40, tries_per_step=8,
                           switch_equal=switch_equal, stop_at_first_accept=stop_first)
        assert same(run(c), run_reference(c))


def test_kernel_matches_reference_at_larger_n():
    c = ScenarioConfig(n=12, alpha=3, behaviour=Behaviour.UNSELFISH, move_set=MoveSet.BS_SW,
                       seed=9, max_steps=25, tries_per_step=20)
    assert same(run(c), run_reference(c))


def brute_local_minimum(g, view, move_set):
    return not any(accept(evaluate(g, m, view)) for m in all_moves(g, move_set))


@pytest.mark.parametrize("seed", range(10))
def test_is_local_minimum_matches_brute_force(seed):
    g = random_graph(6, 0.3, seed, ensure_connected=True)
    for behaviour, move_set, alpha in itertools.product(Behaviour, MoveSet, [0.5, 2.0, 9.0]):
        view = CostView(behaviour, alpha, 6)
        assert is_local_minimum(g, view, move_set) == brute_local_minimum(g, view, move_set)


@pytest.mark.parametrize("behaviour,move_set", COMBOS)
@pytest.mark.parametrize("alpha", [0.5, 1.5, 3, 7])
@pytest.mark.parametrize("start", list(Start))
def test_local_minimum_finals_are_equilibria(behaviour, move_set, alpha, start):
    for seed in range(3):
        c = ScenarioConfig(n=7, alpha=alpha, behaviour=behaviour, start=start,
                           move_set=move_set, seed=seed, max_steps=2000)
        out = run(c)
        g = out.final_graph
        assert is_connected(g)
        assert 6 <= g.edge_count <= 21
        assert out.steps >= 1
        if out.termination is Termination.LOCAL_MINIMUM:
            assert is_local_minimum(g, c.view, move_set)
            assert verify_nash(g, alpha, behaviour, move_set)


def test_stop_at_first_accept_accepts_at_most_one_random_move_per_step():
    out = run(ScenarioConfig(n=20, alpha=5, seed=4, stop_at_first_accept=True))
    assert is_connected(out.final_graph)
    assert out.accepted_moves <= out.steps
