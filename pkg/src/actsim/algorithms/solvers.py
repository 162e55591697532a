"""Central solvers for the universal algorithm.

Each maps a :class:`GatheredInstance` to an output per identifier.
"""

from __future__ import annotations

from collections import Counter
from itertools import combinations

from ..bits import uint
from .universal import GatheredInstance


def _adjacency(gi: GatheredInstance) -> dict[int, set[int]]:
    adj = {i: set() for i in gi.ids}
    for a, b in gi.edges:
        adj[a].add(b)
        adj[b].add(a)
    return adj


def mis_solver(gi: GatheredInstance) -> dict[int, str]:
    """Lexicographically first maximal independent set, ``'1'`` = member."""
    adj = _adjacency(gi)
    chosen: set[int] = set()
    for i in gi.ids:
        if not adj[i] & chosen:
            chosen.add(i)
    return {i: "1" if i in chosen else "0" for i in gi.ids}


def coloring_solver(gi: GatheredInstance) -> dict[int, str]:
    """First-fit colouring in identifier order; at most Δ+1 colours."""
    adj = _adjacency(gi)
    width = max(1, len(gi.ids).bit_length())
    color: dict[int, int] = {}
    for i in gi.ids:
        used = {color[j] for j in adj[i] if j in color}
        c = 0
        while c in used:
            c += 1
        color[i] = c
    return {i: uint(color[i], width) for i in gi.ids}


def node_count_solver(gi: GatheredInstance) -> dict[int, str]:
    n = len(gi.ids)
    return {i: format(n, "b") for i in gi.ids}


def c4_solver(gi: GatheredInstance) -> dict[int, str]:
    """Accept (``'1'``) everywhere iff the graph has no 4-cycle.

    Two distinct length-2 paths with the same end pair close a 4-cycle.
    """
    adj = _adjacency(gi)
    ends = Counter()
    for v in gi.ids:
        for a, b in combinations(sorted(adj[v]), 2):
            ends[a, b] += 1
    verdict = "0" if any(c >= 2 for c in ends.values()) else "1"
    return {i: verdict for i in gi.ids}


def symmetry_solver(gi: GatheredInstance) -> dict[int, str]:
    """Accept iff ``x -> x + n`` maps G[1..n] onto G[n+1..2n] (ids 1..2n)."""
    total = len(gi.ids)
    ok = total % 2 == 0 and gi.ids == tuple(range(1, total + 1))
    if ok:
        n = total // 2
        left = {(a, b) for a, b in gi.edges if b <= n}
        right = {(a - n, b - n) for a, b in gi.edges if a > n}
        ok = left == right
    verdict = "1" if ok else "0"
    return {i: verdict for i in gi.ids}


def identity_solver(gi: GatheredInstance) -> dict[int, str]:
    """Every node outputs its own input."""
    return {i: gi.inputs[i] for i in gi.ids}


SOLVERS = {
    "mis": mis_solver,
    "coloring": coloring_solver,
    "node-count": node_count_solver,
    "c4": c4_solver,
    "symmetry": symmetry_solver,
    "identity": identity_solver,
}
