"""Reference answers computed directly from the graph.

Nothing here touches the engine or the behaviours; these are the ground
truth the simulated runs are checked against.
"""

from __future__ import annotations

from collections import deque
from itertools import combinations
from typing import Callable, Iterable, Sequence

from .model import Graph


def has_c4(g: Graph) -> bool:
    """True iff ``g`` contains a 4-cycle (as a subgraph).

    Two distinct vertices with two common neighbours close a 4-cycle.
    """
    adj = [set(nb) for nb in g.neighbors]
    for a, b in combinations(range(g.n), 2):
        if len(adj[a] & adj[b]) >= 2:
            return True
    return False


def verify_c4_free(g: Graph) -> bool:
    return not has_c4(g)


def has_c4_bruteforce(g: Graph) -> bool:
    """Exhaustive search over all walks ``a-b-c-d-a`` with four distinct
    vertices."""
    nb = g.neighbors
    for a in range(g.n):
        for b in nb[a]:
            for c in nb[b]:
                if c == a:
                    continue
                for d in nb[c]:
                    if d != a and d != b and g.has_edge(d, a):
                        return True
    return False


def verify_mis(g: Graph, members: Iterable[int]) -> bool:
    s = set(members)
    for u, v in g.edges:
        if u in s and v in s:
            return False
    return all(v in s or any(u in s for u in g.neighbors[v]) for v in range(g.n))


def verify_coloring(g: Graph, colors: Sequence[int], max_colors: int | None = None) -> bool:
    if any(colors[u] == colors[v] for u, v in g.edges):
        return False
    return max_colors is None or all(0 <= c < max_colors for c in colors)


def bfs_distances(g: Graph, root: int) -> list[int]:
    dist = [-1] * g.n
    dist[root] = 0
    q = deque([root])
    while q:
        v = q.popleft()
        for u in g.neighbors[v]:
            if dist[u] < 0:
                dist[u] = dist[v] + 1
                q.append(u)
    return dist


def compose_dfpc(f_tables: Sequence[Sequence[int]], x0: int) -> int:
    """``f_n(...f_2(f_1(x0)))`` where ``f_tables[i-1]`` is ``f_i`` (1-indexed values)."""
    x = x0
    for f in f_tables:
        x = f[x - 1]
    return x


def pointer_chase(f_a: Sequence[int], f_b: Sequence[int], k: int, x0: int) -> int:
    """``(f_A o f_B)^k (x0)``."""
    x = x0
    for _ in range(k):
        x = f_a[f_b[x - 1] - 1]
    return x


def sequential_greedy(g: Graph, ids: Sequence[int], rule: Callable) -> list:
    """Visit nodes by increasing id; ``rule(v, decided)`` gets the list of
    ``(neighbour, value)`` already fixed and returns ``v``'s value."""
    value: dict[int, object] = {}
    for v in sorted(range(g.n), key=lambda v: ids[v]):
        decided = [(u, value[u]) for u in g.neighbors[v] if u in value]
        value[v] = rule(v, decided)
    return [value[v] for v in range(g.n)]


def greedy_mis_oracle(g: Graph, ids: Sequence[int]) -> list[int]:
    return sequential_greedy(g, ids, lambda v, dec: int(not any(x for _, x in dec)))


def greedy_coloring_oracle(g: Graph, ids: Sequence[int]) -> list[int]:
    def first_free(v, dec):
        used = {x for _, x in dec}
        c = 0
        while c in used:
            c += 1
        return c
    return sequential_greedy(g, ids, first_free)


def labeled_equal(edges_a: Iterable[Sequence[int]], edges_b: Iterable[Sequence[int]]) -> bool:
    norm = lambda es: {(min(e), max(e)) for e in es}
    return norm(edges_a) == norm(edges_b)
