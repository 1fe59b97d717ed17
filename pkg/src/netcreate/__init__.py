"""Simulator for the network creation game with selfish and unselfish agents."""

from .cost import Behaviour, CostView
from .engine import RunOutcome, ScenarioConfig, Start, Termination, run
from .graph import OwnedGraph
from .moves import MoveSet

__all__ = [
    "Behaviour",
    "CostView",
    "MoveSet",
    "OwnedGraph",
    "RunOutcome",
    "ScenarioConfig",
    "Start",
    "Termination",
    "run",
]

__version__ = "0.1.0"
