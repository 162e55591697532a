"""Gather the whole instance at the BFS root, solve centrally, broadcast.

Each node sends at most three times: its BFS hello, its gathered edge set
towards the root, and the solution towards its children.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from ..bits import BitReader, uint
from ..engine import Actions, InvalidInstance
from ..model import Graph, Model, Status
from .leader import BfsState, LeaderBFS

HELLO, GATHER, RESULT = "01", "10", "11"


@dataclass(frozen=True)
class GatheredInstance:
    """What the root reconstructs: identifiers, edges between
    identifiers, and each identifier's input."""

    ids: tuple[int, ...]
    edges: frozenset[tuple[int, int]]
    inputs: dict[int, str]

    def graph(self) -> Graph:
        index = {i: k for k, i in enumerate(self.ids)}
        return Graph.from_edges(len(self.ids), [(index[a], index[b]) for a, b in self.edges])


CentralSolver = Callable[[GatheredInstance], dict[int, str]]


def encode_table(values: dict[int, str], N: int, len_bits: int) -> str:
    """N slots indexed by identifier: presence bit, length prefix, bits."""
    out = []
    for ident in range(1, N + 1):
        val = values.get(ident)
        if val is None:
            out.append("0")
        else:
            out.append("1" + uint(len(val), len_bits) + val)
    return "".join(out)


def decode_table(reader: BitReader, N: int, len_bits: int) -> dict[int, str]:
    values = {}
    for ident in range(1, N + 1):
        if reader.flag():
            values[ident] = reader.read(reader.uint(len_bits))
    return values


@dataclass
class _UniState(BfsState):
    adj: int = 0
    inputs: dict[int, str] = field(default_factory=dict)
    reported: set[int] = field(default_factory=set)
    gathered: bool = False
    finished: bool = False
    result: str = ""


class UniversalLocal(LeaderBFS):
    """Solve any problem given a central solver, in the LOCAL model.

    The gathered set travels as an ``N x N`` adjacency bitmap over the
    identifier space followed by an N-slot input table; the solution is an
    N-slot output table.  ``len_bits`` is the width of the length prefixes
    in both tables.
    """

    name = "universal-local"
    tag = HELLO

    def __init__(self, solver: CentralSolver, len_bits: int = 16):
        self.solver = solver
        self.len_bits = len_bits

    def validate(self, inst):
        if inst.params.model is not Model.LOCAL:
            raise InvalidInstance("universal-local needs unbounded messages (LOCAL model)")
        if any(len(x) >= 1 << self.len_bits for x in inst.inputs):
            raise InvalidInstance("input longer than the length prefix allows")

    def new_state(self, ctx):
        st = _UniState(ctx, max(1, ctx.N.bit_length()))
        st.inputs[ctx.id] = ctx.input
        return st

    def _edge_bit(self, a: int, b: int, N: int) -> int:
        a, b = min(a, b), max(a, b)
        return 1 << ((a - 1) * N + (b - 1))

    def on_messages(self, st, rnd, msgs):
        hellos = [(p, m) for p, m in msgs if m.startswith(HELLO)]
        acts = Actions()
        if hellos:
            acts = self.handle_hellos(st, rnd, hellos)
        N = st.ctx.N
        for port, payload in msgs:
            tag = payload[:2]
            if tag == GATHER:
                r = BitReader(payload[2:])
                st.adj |= int(r.read(N * N) or "0", 2)
                st.inputs.update(decode_table(r, N, self.len_bits))
                st.reported.add(port)
            elif tag == RESULT:
                return self._deliver(st, rnd, payload)
        if st.tree_done and not acts.sends and acts.output is None:
            return self._try_gather(st, rnd)
        return acts

    def tree_ready(self, st, rnd):
        for ident in st.neighbor_ids.values():
            st.adj |= self._edge_bit(st.ctx.id, ident, st.ctx.N)
        return self._try_gather(st, rnd)

    def _try_gather(self, st: _UniState, rnd: int) -> Actions:
        if st.gathered or not st.tree_done or not set(st.children) <= st.reported:
            return Actions(status=Status.PASSIVE)
        st.gathered = True
        N = st.ctx.N
        if st.is_root:
            return self._solve_and_send(st, rnd)
        payload = GATHER + uint(st.adj, N * N) + encode_table(st.inputs, N, self.len_bits)
        return Actions(sends=[(st.parent_port, payload)], status=Status.PASSIVE)

    def _solve_and_send(self, st: _UniState, rnd: int) -> Actions:
        N = st.ctx.N
        edges = set()
        bitmap = format(st.adj, f"0{N * N}b")[::-1]
        k = bitmap.find("1")
        while k >= 0:
            edges.add((k // N + 1, k % N + 1))
            k = bitmap.find("1", k + 1)
        gi = GatheredInstance(tuple(sorted(st.inputs)), frozenset(edges), dict(st.inputs))
        y = self.solver(gi)
        payload = RESULT + encode_table(y, N, self.len_bits)
        return self._deliver(st, rnd, payload)

    def _deliver(self, st: _UniState, rnd: int, payload: str) -> Actions:
        y = decode_table(BitReader(payload[2:]), st.ctx.N, self.len_bits)
        mine = y[st.ctx.id]
        kids = st.children
        if not kids:
            return Actions.terminate(mine)
        st.finished = True
        st.result = mine
        return Actions(sends=[(p, payload) for p in kids], status=Status.PASSIVE, wake_at=rnd + 1)

    def on_clock(self, st, rnd):
        if st.finished:
            return Actions.terminate(st.result)
        return super().on_clock(st, rnd)
