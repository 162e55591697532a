"""Seeded instance generators, including the two-party reduction graphs."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .algorithms.dfpc import DfpcInput, encode_dfpc_input
from .model import Graph, Instance, Model, default_N, make_instance
from .oracles import pointer_chase


class UnknownGenerator(KeyError):
    pass


def gen_cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 nodes")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def gen_path(n: int) -> Graph:
    if n < 2:
        raise ValueError("a path needs at least 2 nodes")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def gen_star(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def gen_complete(n: int) -> Graph:
    return Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def gen_random_connected(n: int, edge_prob: float, seed: int) -> Graph:
    """Random spanning tree (random attachment order) plus independent
    extra edges with probability ``edge_prob``."""
    if n < 2:
        raise ValueError("need n >= 2")
    if not 0 < edge_prob <= 1:
        raise ValueError("edge_prob must lie in (0, 1]")
    rng = random.Random(seed)
    order = list(range(n))
    rng.shuffle(order)
    edges = set()
    for i in range(1, n):
        u, v = order[i], order[rng.randrange(i)]
        edges.add((min(u, v), max(u, v)))
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) not in edges and rng.random() < edge_prob:
                edges.add((u, v))
    return Graph.from_edges(n, sorted(edges))


def random_ids(n: int, N: int, seed: int) -> list[int]:
    """``n`` distinct identifiers drawn from ``1..N``."""
    return random.Random(seed).sample(range(1, N + 1), n)


def random_instance(n: int, seed: int, *, edge_prob: float | None = None, id_space: int = 4,
                    model: Model = Model.CONGEST, inputs: Sequence[str] | None = None,
                    bit_budget_c: int = 4) -> Instance:
    """Connected random graph with random ids from ``1..id_space*n``."""
    p = edge_prob if edge_prob is not None else min(1.0, 3.0 / n)
    g = gen_random_connected(n, p, seed)
    ids = random_ids(n, id_space * n, seed + 1)
    return make_instance(g, ids, inputs, N=default_N(n, ids), model=model,
                         bit_budget_c=bit_budget_c, seed=seed)


# -- pointer chasing ------------------------------------------------------


@dataclass(frozen=True)
class PointerChasingSpec:
    n: int
    k: int
    f_a: tuple[int, ...]
    f_b: tuple[int, ...]
    x0: int

    def __post_init__(self):
        if not 2 * self.k < self.n:
            raise ValueError("need 2k < n")
        for f in (self.f_a, self.f_b):
            if len(f) != self.n or any(not 1 <= y <= self.n for y in f):
                raise ValueError("tables must map [1..n] into [1..n]")
        if not 1 <= self.x0 <= self.n:
            raise ValueError("x0 outside [1..n]")

    @classmethod
    def random(cls, k: int, seed: int, n: int | None = None) -> "PointerChasingSpec":
        n = n if n is not None else 4 * k + 3
        rng = random.Random(seed)
        f_a = tuple(rng.randint(1, n) for _ in range(n))
        f_b = tuple(rng.randint(1, n) for _ in range(n))
        return cls(n, k, f_a, f_b, rng.randint(1, n))

    def ground_truth(self) -> int:
        return pointer_chase(self.f_a, self.f_b, self.k, self.x0)


def fig4_layout(n: int, k: int) -> tuple[int, list[str]]:
    """Index of the central node and the role of each node.

    Nodes ``0..p-1`` (``p = n - 2k``) form the path, node ``p-1`` being the
    centre; leaf ``p + 2j - 2`` gets ``f_B`` and ``p + 2j - 1`` gets
    ``f_A`` for ``j = 1..k``, so DFS order applies ``f_B`` then ``f_A``.
    """
    p = n - 2 * k
    roles = ["path"] * p + ["B" if i % 2 == 0 else "A" for i in range(2 * k)]
    return p - 1, roles


def gen_dfpc_instance(spec: PointerChasingSpec, N: int | None = None,
                      model: Model = Model.CONGEST) -> Instance:
    n, k = spec.n, spec.k
    centre, roles = fig4_layout(n, k)
    edges = [(i, i + 1) for i in range(centre)] + [(centre, j) for j in range(centre + 1, n)]
    g = Graph.from_edges(n, edges)
    N = N if N is not None else default_N(n, [n])
    ident = tuple(range(1, n + 1))
    inputs = []
    for v in range(n):
        f = {"path": ident, "A": spec.f_a, "B": spec.f_b}[roles[v]]
        inputs.append(encode_dfpc_input(DfpcInput(v + 1, f, spec.x0 if v == 0 else None), N))
    return make_instance(g, list(range(1, n + 1)), inputs, N=N, model=model)


def gen_dfpc_from_tables(g: Graph, order: Sequence[int], tables: Sequence[Sequence[int]],
                         x0: int, N: int | None = None) -> Instance:
    """DFPC instance on any graph: ``order[v]`` is the DFS index of ``v``
    and ``tables[i-1]`` the function held by index ``i``."""
    n = g.n
    N = N if N is not None else default_N(n, [n])
    inputs = [encode_dfpc_input(DfpcInput(order[v], tuple(tables[order[v] - 1]),
                                          x0 if order[v] == 1 else None), N) for v in range(n)]
    return make_instance(g, list(range(1, n + 1)), inputs, N=N)


def dfs_preorder(g: Graph, root: int = 0) -> list[int]:
    """DFS index (1-based) of each node, visiting neighbours in port order."""
    index = [0] * g.n
    nxt = 1
    stack = [root]
    while stack:
        v = stack.pop()
        if index[v]:
            continue
        index[v] = nxt
        nxt += 1
        stack.extend(u for u in reversed(g.neighbors[v]) if not index[u])
    return index


# -- set disjointness to C4-freeness --------------------------------------


def _closes_c4(adj: list[set[int]], u: int, v: int) -> bool:
    for a in adj[u]:
        if a != v and adj[a] & (adj[v] - {u, a}):
            return True
    return False


def gen_c4free_host(n: int, seed: int) -> Graph:
    """Maximal C4-free graph by greedy insertion in seeded random order."""
    if n < 2:
        raise ValueError("need n >= 2")
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    random.Random(seed).shuffle(pairs)
    adj: list[set[int]] = [set() for _ in range(n)]
    for u, v in pairs:
        if not _closes_c4(adj, u, v):
            adj[u].add(v)
            adj[v].add(u)
    return Graph.from_edges(n, [(u, v) for u in range(n) for v in adj[u] if u < v])


@dataclass(frozen=True)
class DisjointnessSpec:
    host: Graph
    x_a: tuple[bool, ...]
    x_b: tuple[bool, ...]

    def __post_init__(self):
        m = self.host.m
        if len(self.x_a) != m or len(self.x_b) != m:
            raise ValueError(f"vectors must have one entry per host edge ({m})")

    def intersect(self) -> bool:
        return any(a and b for a, b in zip(self.x_a, self.x_b))


def gen_c4_disjointness_instance(spec: DisjointnessSpec, *, connect: bool = False,
                                 model: Model = Model.CONGEST) -> Instance:
    """Two copies of the host carrying ``x_a`` and ``x_b`` edges, joined by
    the matching ``{i, i+n}``.  Identifiers are ``index + 1``.

    The result can be disconnected.  ``connect=True`` attaches every node
    to a fresh hub through its own 2-path; any cycle through the hub then
    has length at least 5, so 4-cycles are unaffected.
    """
    h = spec.host
    n = h.n
    edges = [(i, i + n) for i in range(n)]
    for e, a, b in zip(h.edges, spec.x_a, spec.x_b):
        if a:
            edges.append(e)
        if b:
            edges.append((e[0] + n, e[1] + n))
    total = 2 * n
    if connect:
        hub = total
        for v in range(2 * n):
            edges += [(v, hub + 1 + v), (hub + 1 + v, hub)]
        total = 4 * n + 1
    g = Graph.from_edges(total, edges)
    return make_instance(g, list(range(1, total + 1)), N=default_N(total, [total]), model=model)


def random_disjointness(host: Graph, seed: int, density: float = 0.5) -> DisjointnessSpec:
    rng = random.Random(seed)
    m = host.m
    return DisjointnessSpec(host, tuple(rng.random() < density for _ in range(m)),
                            tuple(rng.random() < density for _ in range(m)))


# -- symmetry -------------------------------------------------------------


def gen_symmetry_instance(adj_a: Iterable[Sequence[int]], adj_b: Iterable[Sequence[int]], n: int,
                          *, model: Model = Model.LOCAL) -> Instance:
    """Vertices ``1..2n`` (node ``i-1``, identifier ``i``): ``adj_a`` on
    ``1..n``, ``adj_b`` shifted by ``n``, and the single bridge ``{1, n+1}``."""
    if n < 1:
        raise ValueError("need n >= 1")
    edges = [(0, n)]
    for a, b in adj_a:
        edges.append((a - 1, b - 1))
    for a, b in adj_b:
        edges.append((a - 1 + n, b - 1 + n))
    g = Graph.from_edges(2 * n, edges)
    return make_instance(g, list(range(1, 2 * n + 1)), N=default_N(2 * n, [2 * n]), model=model)


def random_labeled_connected(n: int, seed: int, edge_prob: float = 0.4) -> list[tuple[int, int]]:
    """Edges over ``1..n`` of a seeded connected graph."""
    if n == 1:
        return []
    g = gen_random_connected(n, edge_prob, seed)
    return [(u + 1, v + 1) for u, v in g.edges]


GENERATORS = {
    "cycle": lambda n, seed=0, **kw: gen_cycle(n),
    "path": lambda n, seed=0, **kw: gen_path(n),
    "star": lambda n, seed=0, **kw: gen_star(n - 1),
    "complete": lambda n, seed=0, **kw: gen_complete(n),
    "random": lambda n, seed=0, edge_prob=0.2, **kw: gen_random_connected(n, edge_prob, seed),
    "c4free": lambda n, seed=0, **kw: gen_c4free_host(n, seed),
}


def generate(name: str, n: int, seed: int = 0, **kw) -> Graph:
    if name not in GENERATORS:
        raise UnknownGenerator(name)
    return GENERATORS[name](n, seed=seed, **kw)
