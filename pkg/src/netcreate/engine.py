"""Single simulation runs.

A step makes ``tries_per_step`` random move attempts, applying each accepted
move immediately. If none was accepted, all moves are scanned in random
order and the first acceptable one is applied; if there is none the run has
reached a local minimum and stops, counting the current step.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from . import _kernel
from .cost import TOL, Behaviour, CostView, total_cost
from .graph import InvalidConfigError, OwnedGraph, all_pairs_distances
from .moves import (
    MoveSet,
    accept,
    apply,
    enumerate_all_moves,
    evaluate,
    propose_random,
)
from .rng import Rng


class Start(enum.Enum):
    SCRATCH = "scratch"
    COMPLETE = "complete"


class Termination(enum.Enum):
    LOCAL_MINIMUM = "local_min"
    STEP_CAP = "step_cap"


@dataclass(frozen=True)
class ScenarioConfig:
    n: int
    alpha: float
    behaviour: Behaviour = Behaviour.SELFISH
    start: Start = Start.SCRATCH
    move_set: MoveSet = MoveSet.BS
    max_steps: int = 10000
    tries_per_step: int = 100
    seed: int = 0
    # end a step at its first accepted random try instead of finishing all tries
    stop_at_first_accept: bool = False
    # accept switch moves that leave the agent's cost unchanged
    switch_equal: bool = True

    def __post_init__(self):
        if self.n < 2:
            raise InvalidConfigError(f"need at least 2 nodes, got n={self.n}")
        if not self.alpha > 0:
            raise InvalidConfigError(f"alpha must be positive, got {self.alpha}")
        if self.max_steps < 1:
            raise InvalidConfigError("max_steps must be >= 1")
        if self.tries_per_step < 1:
            raise InvalidConfigError("tries_per_step must be >= 1")

    @property
    def view(self) -> CostView:
        return CostView(self.behaviour, float(self.alpha), self.n)


@dataclass
class RunOutcome:
    final_graph: OwnedGraph
    steps: int
    termination: Termination
    accepted_moves: int
    final_total_cost: float


def initial_graph(config: ScenarioConfig, rng: Rng) -> OwnedGraph:
    if config.start is Start.COMPLETE:
        return OwnedGraph.complete(config.n, rng)
    return OwnedGraph.empty(config.n)


def _outcome(g: OwnedGraph, steps: int, term: Termination, accepted: int, alpha: float) -> RunOutcome:
    cost = total_cost(g, all_pairs_distances(g), alpha)
    return RunOutcome(g, steps, term, accepted, cost)


def run(config: ScenarioConfig) -> RunOutcome:
    """Simulate one run with the compiled kernel."""
    rng = Rng(config.seed)
    own = initial_graph(config, rng).owner_matrix()
    steps, term, accepted = _kernel.run_loop(
        own,
        float(config.alpha),
        config.behaviour is Behaviour.UNSELFISH,
        config.move_set.with_switch,
        config.max_steps,
        config.tries_per_step,
        config.stop_at_first_accept,
        config.switch_equal,
        TOL,
        rng.state,
    )
    termination = Termination.LOCAL_MINIMUM if term == _kernel.LOCAL_MINIMUM else Termination.STEP_CAP
    return _outcome(OwnedGraph.from_owner_matrix(own), int(steps), termination, int(accepted),
                    float(config.alpha))


def run_reference(config: ScenarioConfig) -> RunOutcome:
    """Same protocol as :func:`run` in plain Python; slow, for cross-checking."""
    rng = Rng(config.seed)
    g = initial_graph(config, rng)
    view = config.view
    accepted = 0
    for step in range(1, config.max_steps + 1):
        step_accepted = False
        for _ in range(config.tries_per_step):
            m = propose_random(g, config.move_set, rng)
            if m is None:
                continue
            if accept(evaluate(g, m, view), m, config.switch_equal):
                apply(g, m)
                accepted += 1
                step_accepted = True
                if config.stop_at_first_accept:
                    break
        if step_accepted:
            continue
        for m in enumerate_all_moves(g, config.move_set, rng):
            if accept(evaluate(g, m, view), m, config.switch_equal):
                apply(g, m)
                accepted += 1
                break
        else:
            return _outcome(g, step, Termination.LOCAL_MINIMUM, accepted, view.alpha)
    return _outcome(g, config.max_steps, Termination.STEP_CAP, accepted, view.alpha)


def is_local_minimum(g: OwnedGraph, view: CostView, move_set: MoveSet,
                     switch_equal: bool = True) -> bool:
    """True iff no move in the full move space is acceptable."""
    deltas, moves = _kernel.all_deltas(
        g.owner_matrix(), float(view.alpha), view.behaviour is Behaviour.UNSELFISH,
        move_set.with_switch,
    )
    for delta, kind in zip(deltas.tolist(), moves[:, 0].tolist()):
        if kind == _kernel.SWITCH and not switch_equal:
            if delta < -TOL:
                return False
        elif delta <= TOL:
            return False
    return True
