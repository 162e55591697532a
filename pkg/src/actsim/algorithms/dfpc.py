"""Depth-first pointer chasing with constant edge activation.

Node with DFS index ``i`` holds a table ``f_i`` over ``[1..n]``; the root
(index 1) also holds ``x``.  The root must output ``f_n(...f_1(x))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ..bits import BitReader, id_width, uint
from ..engine import Actions, InvalidInstance, NodeBehavior, NodeContext
from ..model import Graph, Status


class InvalidDfsOrder(InvalidInstance):
    pass


@dataclass(frozen=True)
class DfpcInput:
    dfs_index: int
    f: tuple[int, ...]  # f[j - 1] is the image of j
    x0: int | None = None

    @property
    def n(self) -> int:
        return len(self.f)


def encode_dfpc_input(inp: DfpcInput, N: int) -> str:
    w = id_width(N)
    bits = uint(inp.dfs_index, w) + uint(inp.n, w) + "".join(uint(y, w) for y in inp.f)
    if inp.x0 is None:
        return bits + "0"
    return bits + "1" + uint(inp.x0, w)


def decode_dfpc_input(bits: str, N: int) -> DfpcInput:
    w = id_width(N)
    r = BitReader(bits)
    idx = r.uint(w)
    n = r.uint(w)
    f = tuple(r.uint(w) for _ in range(n))
    x0 = r.uint(w) if r.flag() else None
    return DfpcInput(idx, f, x0)


def dfs_parents(g: Graph, index: Sequence[int]) -> list[int | None]:
    """Parent of each node: its neighbour with the largest smaller index."""
    parents = []
    for v in range(g.n):
        smaller = [u for u in g.neighbors[v] if index[u] < index[v]]
        parents.append(max(smaller, key=lambda u: index[u]) if smaller else None)
    return parents


def dfs_order_violations(g: Graph, index: Sequence[int]) -> list[str]:
    """Why ``index`` is not a depth-first numbering of ``g`` (empty if it is).

    The numbering must be a preorder of the tree given by
    :func:`dfs_parents` with children visited by increasing index (so each
    child starts right after its previous sibling's subtree), and every
    other edge must join an ancestor to a descendant.
    """
    n = g.n
    if sorted(index) != list(range(1, n + 1)):
        return ["indices are not a permutation of 1..n"]
    parents = dfs_parents(g, index)
    problems = [f"node {v} (index {index[v]}) has no smaller-index neighbour"
                for v in range(n) if index[v] != 1 and parents[v] is None]
    if problems:
        return problems
    children: list[list[int]] = [[] for _ in range(n)]
    for v, p in enumerate(parents):
        if p is not None:
            children[p].append(v)
    root = index.index(1)
    order = []
    maxdfs = [0] * n
    stack = [(root, False)]
    while stack:
        v, closing = stack.pop()
        if closing:
            maxdfs[v] = max([index[v]] + [maxdfs[c] for c in children[v]])
            continue
        order.append(v)
        stack.append((v, True))
        for c in sorted(children[v], key=lambda u: -index[u]):
            stack.append((c, False))
    if [index[v] for v in order] != list(range(1, n + 1)):
        problems.append("indices are not a preorder of the implied tree")
        return problems
    for u, v in g.edges:
        if parents[u] == v or parents[v] == u:
            continue
        a, d = (u, v) if index[u] < index[v] else (v, u)
        if not index[a] <= index[d] <= maxdfs[a]:
            problems.append(f"edge {u}-{v} is a cross edge")
    return problems


@dataclass
class _DfpcState:
    ctx: NodeContext
    inp: DfpcInput
    w: int
    by_index: dict[int, int] = field(default_factory=dict)  # index -> port
    port_index: dict[int, int] = field(default_factory=dict)
    parent_port: int | None = None
    result: int | None = None
    finishing: bool = False


class DfpcEdgeFrugal(NodeBehavior):
    """Round 1: every node tells its neighbours its DFS index.  From round 2
    the partial value travels down and back up the DFS tree: a node of
    index ``i`` receiving ``m(i-1)`` from its parent applies ``f_i`` and
    calls its children in index order (the next child is the neighbour
    indexed one past the subtree maximum reported by the previous child),
    then returns ``(m(MaxDFS), MaxDFS)`` to its parent.

    Each tree edge carries one message down and one up after round 1, so
    no edge is active in more than three rounds.
    """

    name = "dfpc"

    def validate(self, inst):
        N = inst.params.N
        try:
            index = [decode_dfpc_input(x, N).dfs_index for x in inst.inputs]
        except ValueError as exc:
            raise InvalidDfsOrder(f"undecodable DFPC input: {exc}") from exc
        problems = dfs_order_violations(inst.graph, index)
        if problems:
            raise InvalidDfsOrder("; ".join(problems))

    def start(self, ctx):
        inp = decode_dfpc_input(ctx.input, ctx.N)
        st = _DfpcState(ctx, inp, id_width(ctx.N))
        if ctx.degree == 0:
            return st, Actions.terminate(uint(inp.f[inp.x0 - 1], st.w))
        return st, Actions.broadcast(ctx.degree, uint(inp.dfs_index, st.w), status=Status.PASSIVE)

    def _apply_f(self, st: _DfpcState, x: int) -> int:
        return st.inp.f[x - 1]

    def _dispatch(self, st: _DfpcState, value: int, next_index: int, rnd: int) -> Actions:
        port = st.by_index.get(next_index)
        if port is not None:
            return Actions(sends=[(port, uint(value, st.w))], status=Status.PASSIVE)
        if st.parent_port is None:
            return Actions.terminate(uint(value, st.w))
        st.result = value
        st.finishing = True
        payload = uint(value, st.w) + uint(next_index - 1, st.w)
        return Actions(sends=[(st.parent_port, payload)], status=Status.PASSIVE, wake_at=rnd + 1)

    def on_messages(self, st, rnd, msgs):
        i = st.inp.dfs_index
        if not st.port_index:
            for port, payload in msgs:
                j = BitReader(payload).uint(st.w)
                st.port_index[port] = j
                st.by_index[j] = port
            smaller = [j for j in st.by_index if j < i]
            if smaller:
                st.parent_port = st.by_index[max(smaller)]
            if i == 1:
                return self._dispatch(st, self._apply_f(st, st.inp.x0), 2, rnd)
            return Actions(status=Status.PASSIVE)
        (port, payload), = msgs
        r = BitReader(payload)
        if port == st.parent_port:
            value = self._apply_f(st, r.uint(st.w))
            return self._dispatch(st, value, i + 1, rnd)
        value, top = r.uint(st.w), r.uint(st.w)
        return self._dispatch(st, value, top + 1, rnd)

    def on_clock(self, st, rnd):
        if st.finishing:
            return Actions.terminate(uint(st.result, st.w))
        return Actions(status=Status.PASSIVE)
