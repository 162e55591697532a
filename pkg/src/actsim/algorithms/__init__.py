"""Algorithm library and name registry."""

from __future__ import annotations

from ..engine import NodeBehavior
from .cycle import AtLeastOneLeader, BroadcastCycle
from .dfpc import (DfpcEdgeFrugal, DfpcInput, InvalidDfsOrder, decode_dfpc_input,
                   dfs_order_violations, encode_dfpc_input)
from .greedy import GreedyById, coloring_rule, greedy_coloring, greedy_mis, mis_rule
from .leader import BfsInfo, LeaderBFS, decode_bfs_output
from .solvers import SOLVERS
from .transforms import LocalToCongest, PaddedPayloads, RankOverflow, RoundDilation, beep_round
from .universal import GatheredInstance, UniversalLocal


class UnknownAlgorithm(KeyError):
    pass


def broadcast_cycle() -> NodeBehavior:
    return BroadcastCycle()


def at_least_one_leader() -> NodeBehavior:
    return AtLeastOneLeader()


def leader_bfs() -> NodeBehavior:
    return LeaderBFS()


def universal_local(solver, len_bits: int = 16) -> NodeBehavior:
    if isinstance(solver, str):
        solver = SOLVERS[solver]
    return UniversalLocal(solver, len_bits)


def local_to_congest(behavior: NodeBehavior, M: int, R: int | None = None) -> NodeBehavior:
    return LocalToCongest(behavior, M, R)


def greedy_by_id(rule, name: str = "greedy", linger: bool = False) -> NodeBehavior:
    return GreedyById(rule, name, linger)


def dfpc_edge_frugal() -> NodeBehavior:
    return DfpcEdgeFrugal()


def round_dilation(behavior: NodeBehavior) -> NodeBehavior:
    return RoundDilation(behavior)


ALGORITHMS = {
    "broadcast-cycle": broadcast_cycle,
    "one-leader": at_least_one_leader,
    "leader-bfs": leader_bfs,
    "universal-local": lambda: universal_local("node-count"),
    "greedy-mis": greedy_mis,
    "greedy-coloring": greedy_coloring,
    "dfpc": dfpc_edge_frugal,
}


def build(name: str, M: int = 1) -> NodeBehavior:
    """Resolve a registry name such as ``"greedy-mis"``,
    ``"universal-local:c4"`` or ``"local-to-congest:broadcast-cycle"``."""
    if name.startswith("local-to-congest:"):
        inner = name.split(":", 1)[1]
        if inner in ("greedy-mis", "greedy-coloring"):
            # the beep schedule needs the last send strictly before termination
            inner_b = greedy_mis(linger=True) if inner == "greedy-mis" else greedy_coloring(linger=True)
            return local_to_congest(inner_b, M)
        return local_to_congest(build(inner, M), M)
    if name.startswith("dilated:"):
        return round_dilation(build(name.split(":", 1)[1], M))
    if name.startswith("universal-local:"):
        solver = name.split(":", 1)[1]
        if solver not in SOLVERS:
            raise UnknownAlgorithm(name)
        return universal_local(solver)
    if name not in ALGORITHMS:
        raise UnknownAlgorithm(name)
    return ALGORITHMS[name]()


__all__ = [
    "ALGORITHMS", "AtLeastOneLeader", "BfsInfo", "BroadcastCycle", "DfpcEdgeFrugal", "DfpcInput",
    "GatheredInstance", "GreedyById", "InvalidDfsOrder", "LeaderBFS", "LocalToCongest",
    "PaddedPayloads", "RankOverflow", "RoundDilation", "SOLVERS", "UniversalLocal",
    "UnknownAlgorithm", "at_least_one_leader", "beep_round", "broadcast_cycle", "build",
    "coloring_rule", "decode_bfs_output", "decode_dfpc_input", "dfpc_edge_frugal",
    "dfs_order_violations", "encode_dfpc_input", "greedy_by_id", "greedy_coloring", "greedy_mis",
    "leader_bfs", "local_to_congest", "mis_rule", "round_dilation", "universal_local",
]
