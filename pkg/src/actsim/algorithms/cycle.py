"""The two cycle warm-ups: token broadcast and at-least-one-leader."""

from __future__ import annotations

from dataclasses import dataclass

from ..engine import Actions, InvalidInstance, NodeBehavior, NodeContext
from ..model import Instance, Status

ACCEPT = "1"
REJECT = "0"


def require_cycle(inst: Instance) -> None:
    g = inst.graph
    if g.n < 3 or g.m != g.n or any(g.degree(v) != 2 for v in range(g.n)):
        raise InvalidInstance("graph is not a cycle")


@dataclass
class _TokenState:
    ctx: NodeContext
    holder: bool
    forwarded: bool = False


class BroadcastCycle(NodeBehavior):
    """Token broadcast on a cycle; the holder's input bit is ``'1'``.

    The holder sends on port 0 at round 1 and sleeps.  Every other node
    sleeps until the token shows up, forwards it on its other port, and
    terminates at the following round.  The token coming back home
    terminates the holder.  Output is the token bit.
    """

    name = "broadcast-cycle"

    def validate(self, inst):
        require_cycle(inst)
        if sum(x == "1" for x in inst.inputs) != 1:
            raise InvalidInstance("exactly one node must hold the token")

    def start(self, ctx):
        st = _TokenState(ctx, ctx.input == "1")
        if st.holder:
            st.forwarded = True
            return st, Actions(sends=[(0, "1")], status=Status.PASSIVE)
        return st, Actions(status=Status.PASSIVE)

    def on_messages(self, st, rnd, msgs):
        if st.holder:
            return Actions.terminate("1")
        if st.forwarded:
            return Actions()
        st.forwarded = True
        port = msgs[0][0]
        return Actions(sends=[(1 - port, msgs[0][1])], status=Status.ACTIVE)

    def on_clock(self, st, rnd):
        if st.forwarded and not st.holder:
            return Actions.terminate("1")
        return Actions(status=Status.PASSIVE)


@dataclass
class _LeaderState:
    ctx: NodeContext
    leader: bool
    forwarded: bool = False


class AtLeastOneLeader(NodeBehavior):
    """Decide whether some node of a cycle has leader bit ``'1'``.

    Leaders send a token to both neighbours at round 1 and accept at round 2.  A
    non-leader sleeps with an alarm at round N; a token processed before
    the alarm (message handling precedes the clock within a round) makes it
    forward and accept one round later, otherwise it rejects at round N.
    """

    name = "one-leader"

    def validate(self, inst):
        require_cycle(inst)

    def start(self, ctx):
        st = _LeaderState(ctx, ctx.input == "1")
        if st.leader:
            return st, Actions.broadcast(ctx.degree, "1", status=Status.PASSIVE, wake_at=2)
        return st, Actions(status=Status.PASSIVE, wake_at=max(2, ctx.N))

    def on_messages(self, st, rnd, msgs):
        if st.leader or st.forwarded:
            return Actions()
        st.forwarded = True
        ports = {p for p, _ in msgs}
        sends = [(1 - p, "1") for p in ports if 1 - p not in ports]
        return Actions(sends=sends, status=Status.PASSIVE, wake_at=rnd + 1)

    def on_clock(self, st, rnd):
        if st.leader or st.forwarded:
            return Actions.terminate(ACCEPT)
        return Actions.terminate(REJECT)
