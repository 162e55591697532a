"""Sequential-greedy problems solved by deciding in identifier order."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

from ..bits import BitReader, id_width, to_int, uint
from ..engine import Actions, InvalidInstance, NodeBehavior, NodeContext
from ..model import Status

# (own id, own input, decided neighbours as (id, output) pairs, N) -> output
GreedyRule = Callable[[int, str, Iterable[tuple[int, str]], int], str]


def mis_rule(ident, inp, decided, N):
    return "0" if any(out == "1" for _, out in decided) else "1"


def coloring_rule(ident, inp, decided, N):
    used = {to_int(out) for _, out in decided}
    c = 0
    while c in used:
        c += 1
    return uint(c, id_width(N))


@dataclass
class _GreedyState:
    ctx: NodeContext
    decided: list[tuple[int, str]] = field(default_factory=list)
    output: str | None = None


class GreedyById(NodeBehavior):
    """Node ``v`` sleeps until round ``id(v)``, applies ``rule`` to the
    neighbours decided so far, and announces ``id || output`` to every
    neighbour in that single round.

    With ``linger=False`` the node terminates in the round it announces;
    with ``linger=True`` it terminates one round later (useful when the
    behaviour is wrapped by a timing transform).
    """

    def __init__(self, rule: GreedyRule, name: str = "greedy", linger: bool = False):
        self.rule = rule
        self.name = name
        self.linger = linger

    def validate(self, inst):
        if inst.params.model.value != "congest":
            return
        budget = inst.params.bit_budget
        if id_width(inst.params.N) >= budget:
            raise InvalidInstance("bit budget leaves no room for the greedy output")

    def start(self, ctx):
        st = _GreedyState(ctx)
        if ctx.id <= 1:
            return st, self._decide(st, 1)
        return st, Actions(status=Status.PASSIVE, wake_at=ctx.id)

    def _decide(self, st: _GreedyState, rnd: int) -> Actions:
        ctx = st.ctx
        st.output = self.rule(ctx.id, ctx.input, list(st.decided), ctx.N)
        payload = uint(ctx.id, id_width(ctx.N)) + st.output
        acts = Actions.broadcast(ctx.degree, payload)
        if self.linger:
            acts.status, acts.wake_at = Status.PASSIVE, rnd + 1
        else:
            acts.output = st.output
        return acts

    def on_messages(self, st, rnd, msgs):
        w = id_width(st.ctx.N)
        for _, payload in msgs:
            r = BitReader(payload)
            ident = r.uint(w)
            st.decided.append((ident, r.read(r.remaining())))
        return Actions()

    def on_clock(self, st, rnd):
        if st.output is not None:
            return Actions.terminate(st.output)
        return self._decide(st, rnd)


def greedy_mis(linger: bool = False) -> GreedyById:
    return GreedyById(mis_rule, "greedy-mis", linger)


def greedy_coloring(linger: bool = False) -> GreedyById:
    return GreedyById(coloring_rule, "greedy-coloring", linger)
