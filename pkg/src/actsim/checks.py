"""Contract checks for runs of the shipped algorithms.

Every check compares a :class:`RunResult` against an oracle from
:mod:`actsim.oracles` or against a bound the algorithm promises.  A check
is a ``(name, passed, detail)`` triple.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

from .algorithms import SOLVERS, GatheredInstance, decode_bfs_output, decode_dfpc_input
from .algorithms.cycle import ACCEPT
from .bits import to_int
from .engine import RunResult, check_activation_inequalities, replay
from .instances import fig4_layout
from .model import Instance, max_degree
from . import oracles


class Check(NamedTuple):
    name: str
    passed: bool
    detail: str = ""


def generic_checks(inst: Instance, res: RunResult) -> list[Check]:
    bad = check_activation_inequalities(res, inst.graph)
    out = [Check("terminated", res.terminated),
           Check("inequalities", not bad, "; ".join(bad[:3]))]
    if res.trace is not None:
        same = replay(res.trace, inst).message_counters() == res.ledger.message_counters()
        out.append(Check("replay", same))
    awake_ok = all(a >= s for a, s in zip(res.ledger.awake, res.ledger.node_act))
    out.append(Check("awake", awake_ok))
    return out


def check_leader_bfs(inst: Instance, res: RunResult) -> list[Check]:
    g, N = inst.graph, inst.params.N
    infos = [decode_bfs_output(res.outputs[v], N) for v in range(g.n)]
    lo = min(inst.ids)
    root = inst.node_of_id(lo)
    dist = oracles.bfs_distances(g, root)
    parents_ok = all(
        (v == root and i.parent == 0)
        or (i.parent in inst.ids and g.has_edge(v, inst.node_of_id(i.parent))
            and dist[inst.node_of_id(i.parent)] == dist[v] - 1)
        for v, i in enumerate(infos))
    return [
        Check("leader", all(i.leader == lo for i in infos)),
        Check("distances", [i.dist for i in infos] == dist),
        Check("parents", parents_ok),
        Check("frugal", res.ledger.nact == 1, f"nact={res.ledger.nact}"),
        Check("rounds", res.ledger.rounds_used <= lo * N + N + 2,
              f"{res.ledger.rounds_used} vs {lo * N + N + 2}"),
    ]


def gathered(inst: Instance) -> GatheredInstance:
    ids = tuple(sorted(inst.ids))
    edges = frozenset((min(inst.ids[u], inst.ids[v]), max(inst.ids[u], inst.ids[v]))
                      for u, v in inst.graph.edges)
    return GatheredInstance(ids, edges, {inst.ids[v]: inst.inputs[v] for v in range(inst.n)})


def _solver_oracle(solver: str, inst: Instance, res: RunResult) -> bool:
    g = inst.graph
    out = [res.outputs[v] for v in range(g.n)]
    if solver == "mis":
        return oracles.verify_mis(g, [v for v in range(g.n) if out[v] == "1"])
    if solver == "coloring":
        return oracles.verify_coloring(g, [to_int(c) for c in out], max_degree(g) + 1)
    if solver == "node-count":
        return all(to_int(y) == g.n for y in out)
    if solver == "c4":
        want = "0" if oracles.has_c4(g) else "1"
        return all(y == want for y in out)
    if solver == "symmetry":
        n = g.n // 2
        left = [(u + 1, v + 1) for u, v in g.edges if v < n]
        right = [(u + 1 - n, v + 1 - n) for u, v in g.edges if u >= n]
        want = "1" if oracles.labeled_equal(left, right) else "0"
        return all(y == want for y in out)
    if solver == "identity":
        return out == list(inst.inputs)
    direct = SOLVERS[solver](gathered(inst))
    return all(out[v] == direct[inst.ids[v]] for v in range(g.n))


def universal_checker(solver: str) -> Callable:
    def check(inst: Instance, res: RunResult) -> list[Check]:
        return [Check("oracle", _solver_oracle(solver, inst, res)),
                Check("frugal", res.ledger.nact <= 3, f"nact={res.ledger.nact}")]
    return check


def _greedy(kind: str) -> Callable:
    def check(inst: Instance, res: RunResult) -> list[Check]:
        g = inst.graph
        got = [to_int(res.outputs[v]) for v in range(g.n)]
        want = (oracles.greedy_mis_oracle if kind == "mis" else oracles.greedy_coloring_oracle)(g, inst.ids)
        return [Check("oracle", got == want),
                Check("frugal", all(c == 1 for c in res.ledger.node_act)),
                Check("rounds", res.ledger.rounds_used <= inst.params.N,
                      f"{res.ledger.rounds_used} vs N={inst.params.N}")]
    return check


def dfpc_expected(inst: Instance) -> int:
    decoded = sorted((decode_dfpc_input(x, inst.params.N) for x in inst.inputs),
                     key=lambda d: d.dfs_index)
    return oracles.compose_dfpc([d.f for d in decoded], decoded[0].x0)


def fig4_k(inst: Instance) -> int | None:
    """``k`` when ``inst`` has the pointer-chasing tree shape, else None."""
    n = inst.n
    deg = max_degree(inst.graph)
    k = (deg - 1) // 2
    if k < 1 or 2 * k + 1 != deg or n - 2 * k < 1:
        return None
    centre, _ = fig4_layout(n, k)
    return k if inst.graph.degree(centre) == deg else None


def check_dfpc(inst: Instance, res: RunResult) -> list[Check]:
    root = [decode_dfpc_input(x, inst.params.N).dfs_index for x in inst.inputs].index(1)
    out = [Check("oracle", to_int(res.outputs[root]) == dfpc_expected(inst)),
           Check("edge-frugal", res.ledger.eact <= 3, f"eact={res.ledger.eact}")]
    k = fig4_k(inst)
    if k is not None:
        centre, _ = fig4_layout(inst.n, k)
        c = res.ledger.node_act[centre]
        out.append(Check("centre", c >= 2 * k, f"centre={c} k={k}"))
    return out


def check_broadcast(inst: Instance, res: RunResult) -> list[Check]:
    led = res.ledger
    return [Check("oracle", all(res.outputs[v] == "1" for v in range(inst.n))),
            Check("frugal", led.nact == 1 and led.eact == 1),
            Check("rounds", led.rounds_used <= inst.n + 2)]


def check_one_leader(inst: Instance, res: RunResult) -> list[Check]:
    want = ACCEPT if "1" in inst.inputs else "0"
    return [Check("oracle", all(res.outputs[v] == want for v in range(inst.n))),
            Check("frugal", res.ledger.nact <= 1)]


CHECKERS: dict[str, Callable[[Instance, RunResult], list[Check]]] = {
    "leader-bfs": check_leader_bfs,
    "universal-local": universal_checker("node-count"),
    "greedy-mis": _greedy("mis"),
    "greedy-coloring": _greedy("coloring"),
    "dfpc": check_dfpc,
    "broadcast-cycle": check_broadcast,
    "one-leader": check_one_leader,
}


def checker_for(name: str) -> Callable[[Instance, RunResult], list[Check]] | None:
    if name.startswith("universal-local:"):
        return universal_checker(name.split(":", 1)[1])
    return CHECKERS.get(name)


def check_transform(local_res: RunResult, congest_res: RunResult, M: int) -> list[Check]:
    """Beep transform against the LOCAL run it encodes."""
    R = local_res.ledger.rounds_used
    return [
        Check("same-outputs", congest_res.outputs == local_res.outputs),
        Check("same-activation", congest_res.ledger.node_act == local_res.ledger.node_act),
        Check("rounds", congest_res.ledger.rounds_used <= R * 2 ** M,
              f"{congest_res.ledger.rounds_used} vs {R * 2 ** M}"),
    ]
