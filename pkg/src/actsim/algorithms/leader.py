"""Leader election by minimum identifier plus BFS tree, one send per node."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

from ..bits import BitReader, id_width, uint
from ..engine import Actions, NodeBehavior, NodeContext
from ..model import Status


class BfsInfo(NamedTuple):
    leader: int
    parent: int  # 0 stands for "no parent"
    dist: int


class _Hello(NamedTuple):
    leader: int
    sender: int
    parent: int
    dist: int


@dataclass
class BfsState:
    ctx: NodeContext
    width: int
    heard: dict[int, _Hello] = field(default_factory=dict)
    info: BfsInfo | None = None
    parent_port: int | None = None
    sent_round: int | None = None
    tree_done: bool = False

    @property
    def children(self) -> list[int]:
        return sorted(p for p, h in self.heard.items() if h.parent == self.ctx.id)

    @property
    def neighbor_ids(self) -> dict[int, int]:
        return {p: h.sender for p, h in self.heard.items()}

    @property
    def is_root(self) -> bool:
        return self.info is not None and self.info.parent == 0


def encode_bfs_output(info: BfsInfo, N: int) -> str:
    w = id_width(N)
    return uint(info.leader, w) + uint(info.parent, w) + uint(info.dist, w)


def decode_bfs_output(bits: str, N: int) -> BfsInfo:
    r = BitReader(bits)
    w = id_width(N)
    return BfsInfo(r.uint(w), r.uint(w), r.uint(w))


class LeaderBFS(NodeBehavior):
    """Min-id leader election with a BFS tree rooted at the leader.

    A node that has heard nothing by round ``id * N`` becomes the leader
    and sends ``(leader, self, parent=0, dist=0)``.  A node first reached
    at round ``r`` adopts the smallest-id sender of that round as parent
    and sends ``(leader, self, parent, d + 1)`` to every neighbour in the
    same round.  Every node thus sends in exactly one round.  A node is
    done once it has sent and heard from all of its neighbours; the
    ``parent`` field tells it which neighbours are its children.

    Messages are four ``ceil(log2(N+1))``-bit fields, within the default
    CONGEST budget.  Subclasses prepend ``tag`` and override
    :meth:`tree_ready`.
    """

    name = "leader-bfs"
    tag = ""

    def start(self, ctx):
        st = self.new_state(ctx)
        alarm = ctx.id * ctx.N
        if alarm <= 1:
            return st, self._elect(st, 1)
        return st, Actions(status=Status.PASSIVE, wake_at=alarm)

    def new_state(self, ctx) -> BfsState:
        return BfsState(ctx, id_width(ctx.N))

    # protocol ---------------------------------------------------------

    def _hello(self, st: BfsState) -> str:
        w = st.width
        i = st.info
        return self.tag + uint(i.leader, w) + uint(st.ctx.id, w) + uint(i.parent, w) + uint(i.dist, w)

    def _elect(self, st: BfsState, rnd: int) -> Actions:
        st.info = BfsInfo(st.ctx.id, 0, 0)
        return self._send_hello(st, rnd)

    def _send_hello(self, st: BfsState, rnd: int) -> Actions:
        st.sent_round = rnd
        acts = Actions.broadcast(st.ctx.degree, self._hello(st), status=Status.PASSIVE)
        return self._maybe_ready(st, rnd, acts)

    def _maybe_ready(self, st: BfsState, rnd: int, acts: Actions) -> Actions:
        if st.tree_done or st.sent_round is None or len(st.heard) < st.ctx.degree:
            return acts
        if rnd > st.sent_round:
            st.tree_done = True
            return self.tree_ready(st, rnd)
        acts.wake_at = rnd + 1
        return acts

    def handle_hellos(self, st: BfsState, rnd: int, msgs: list[tuple[int, str]]) -> Actions:
        w = st.width
        fresh = []
        for port, payload in msgs:
            r = BitReader(payload[len(self.tag):])
            h = _Hello(r.uint(w), r.uint(w), r.uint(w), r.uint(w))
            st.heard[port] = h
            fresh.append((h.sender, port, h))
        if st.info is None and fresh:
            sender, port, h = min(fresh)
            st.info = BfsInfo(h.leader, sender, h.dist + 1)
            st.parent_port = port
            return self._send_hello(st, rnd)
        return self._maybe_ready(st, rnd, Actions())

    def on_messages(self, st, rnd, msgs):
        return self.handle_hellos(st, rnd, msgs)

    def on_clock(self, st, rnd):
        if st.info is None:
            return self._elect(st, rnd)
        return self._maybe_ready(st, rnd, Actions())

    def tree_ready(self, st: BfsState, rnd: int) -> Actions:
        """Called once, strictly after the node's send round, when all
        neighbours have been heard."""
        return Actions.terminate(encode_bfs_output(st.info, st.ctx.N))
