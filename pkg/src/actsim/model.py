"""Graphs, instances and simulation parameters."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Sequence

from .bits import id_width

DEFAULT_BUDGET_C = 4


class Model(str, Enum):
    LOCAL = "local"
    CONGEST = "congest"


class Status(str, Enum):
    ACTIVE = "active"
    PASSIVE = "passive"
    TERMINATED = "terminated"


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on nodes ``0..n-1``.

    Neighbour tuples are sorted ascending; port ``p`` of node ``v`` is
    ``neighbors[v][p]``.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    neighbors: tuple[tuple[int, ...], ...] = field(repr=False, compare=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        if n < 1:
            raise ValueError("graph needs at least one node")
        canon = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge {(u, v)} out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at {u}")
            e = (min(u, v), max(u, v))
            if e in canon:
                raise ValueError(f"duplicate edge {e}")
            canon.add(e)
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in canon:
            adj[u].append(v)
            adj[v].append(u)
        return cls(n, tuple(sorted(canon)), tuple(tuple(sorted(a)) for a in adj))

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.neighbors[v])

    def port(self, v: int, u: int) -> int:
        """Port at ``v`` leading to neighbour ``u``."""
        return self.neighbors[v].index(u)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.neighbors[u]

    def is_connected(self) -> bool:
        seen = {0}
        todo = deque([0])
        while todo:
            v = todo.popleft()
            for u in self.neighbors[v]:
                if u not in seen:
                    seen.add(u)
                    todo.append(u)
        return len(seen) == self.n


def max_degree(g: Graph) -> int:
    return max((len(a) for a in g.neighbors), default=0)


def default_N(n: int, ids: Sequence[int]) -> int:
    """Smallest power of two that is at least ``max(n, max id)``."""
    bound = max([n, *ids])
    N = 1
    while N < bound:
        N *= 2
    return N


@dataclass(frozen=True)
class SimParams:
    N: int
    model: Model = Model.CONGEST
    bit_budget_c: int = DEFAULT_BUDGET_C
    round_cap: int | None = None
    seed: int = 0

    @property
    def bit_budget(self) -> int | None:
        """Per-edge per-round payload limit; ``None`` means unlimited (LOCAL)."""
        if self.model is Model.LOCAL:
            return None
        return self.bit_budget_c * id_width(self.N)

    @property
    def cap(self) -> int:
        return self.round_cap if self.round_cap is not None else 64 * self.N * self.N


@dataclass(frozen=True)
class Instance:
    graph: Graph
    ids: tuple[int, ...]
    inputs: tuple[str, ...]
    params: SimParams

    @property
    def n(self) -> int:
        return self.graph.n

    def with_params(self, **changes) -> "Instance":
        return replace(self, params=replace(self.params, **changes))

    def with_inputs(self, inputs: Sequence[str]) -> "Instance":
        return replace(self, inputs=tuple(inputs))

    def node_of_id(self, ident: int) -> int:
        return self.ids.index(ident)

    # JSON ----------------------------------------------------------------

    def to_dict(self) -> dict:
        p = self.params
        return {
            "n": self.n,
            "edges": [list(e) for e in self.graph.edges],
            "ids": list(self.ids),
            "inputs": list(self.inputs),
            "params": {
                "N": p.N,
                "model": p.model.value,
                "bit_budget_c": p.bit_budget_c,
                "round_cap": p.round_cap,
                "seed": p.seed,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "Instance":
        p = d.get("params", {})
        graph = Graph.from_edges(d["n"], d["edges"])
        ids = tuple(int(i) for i in d["ids"])
        params = SimParams(
            N=int(p["N"]) if p.get("N") else default_N(graph.n, ids),
            model=Model(p.get("model", "congest")),
            bit_budget_c=int(p.get("bit_budget_c", DEFAULT_BUDGET_C)),
            round_cap=p.get("round_cap"),
            seed=int(p.get("seed", 0)),
        )
        inputs = tuple(d.get("inputs") or [""] * graph.n)
        return cls(graph, ids, inputs, params)

    @classmethod
    def from_json(cls, text: str) -> "Instance":
        return cls.from_dict(json.loads(text))


def make_instance(
    graph: Graph,
    ids: Sequence[int] | None = None,
    inputs: Sequence[str] | None = None,
    *,
    N: int | None = None,
    model: Model | str = Model.CONGEST,
    bit_budget_c: int = DEFAULT_BUDGET_C,
    round_cap: int | None = None,
    seed: int = 0,
) -> Instance:
    """Build an instance; ids default to ``1..n`` and N to :func:`default_N`."""
    ids = tuple(ids) if ids is not None else tuple(range(1, graph.n + 1))
    inputs = tuple(inputs) if inputs is not None else ("",) * graph.n
    params = SimParams(
        N=N if N is not None else default_N(graph.n, ids),
        model=Model(model),
        bit_budget_c=bit_budget_c,
        round_cap=round_cap,
        seed=seed,
    )
    return Instance(graph, ids, inputs, params)


def validate_instance(inst: Instance) -> list[str]:
    """Every violated invariant, as a list of messages; empty means ok."""
    g = inst.graph
    problems = []
    if len(inst.ids) != g.n:
        problems.append(f"expected {g.n} identifiers, got {len(inst.ids)}")
    if len(inst.inputs) != g.n:
        problems.append(f"expected {g.n} inputs, got {len(inst.inputs)}")
    if len(set(inst.ids)) != len(inst.ids):
        problems.append("duplicate identifier")
    if any(i < 1 for i in inst.ids):
        problems.append("identifier below 1")
    if inst.ids and max(inst.ids) > inst.params.N:
        problems.append("identifier exceeds N")
    if g.n > inst.params.N:
        problems.append("n exceeds N")
    if any(u == v for u, v in g.edges):
        problems.append("self-loop")
    if len(set(g.edges)) != len(g.edges):
        problems.append("duplicate edge")
    if any(set(x) - {"0", "1"} for x in inst.inputs):
        problems.append("input is not a bit-string")
    if inst.params.bit_budget_c < 1:
        problems.append("bit budget constant below 1")
    if not g.is_connected():
        problems.append("graph not connected")
    return problems
