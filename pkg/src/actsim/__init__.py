"""Synchronous LOCAL/CONGEST simulator with node- and edge-activation accounting."""

from .engine import (ActivationLedger, Actions, NodeBehavior, RunResult, Simulation,
                     check_activation_inequalities, replay, run)
from .model import Graph, Instance, Model, SimParams, Status, make_instance, max_degree, validate_instance

__version__ = "0.1.0"

__all__ = [
    "ActivationLedger", "Actions", "Graph", "Instance", "Model", "NodeBehavior", "RunResult",
    "SimParams", "Simulation", "Status", "check_activation_inequalities", "make_instance",
    "max_degree", "replay", "run", "validate_instance",
]
