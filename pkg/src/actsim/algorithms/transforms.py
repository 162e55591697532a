"""Timing transforms that stretch each round of an inner behaviour into a
window of physical rounds.

Virtual round ``r`` of the inner behaviour occupies physical rounds
``[r*W, r*W + W - 1]``.  A send of virtual round ``r`` goes out at physical
round ``r*W + slot`` and the receiver hands it to the inner behaviour at
the start of the next window, so the inner behaviour sees exactly the
message pattern it would see without the transform.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Any

from ..engine import Actions, NodeBehavior, NodeContext, SimulationError
from ..model import Model, Status

DEFAULT_MAX_M = 16


class RankOverflow(SimulationError):
    pass


@dataclass
class _WinState:
    ctx: NodeContext
    inner: Any = None
    status: Status = Status.ACTIVE
    wake: int | None = None  # virtual round
    output: str | None = None
    inbox: list[tuple[int, str]] = field(default_factory=list)
    pending: dict[int, list[tuple[int, str]]] = field(default_factory=lambda: defaultdict(list))
    processed: int = 1  # last virtual round handed to the inner behaviour


class _Windowed(NodeBehavior):
    width: int

    def __init__(self, inner: NodeBehavior):
        self.inner = inner

    # hooks ------------------------------------------------------------
    def window(self, ctx: NodeContext) -> int:
        raise NotImplementedError

    def slot(self, st: _WinState, payload: str) -> int:
        raise NotImplementedError

    def wire(self, payload: str) -> str:
        return payload

    def unwire(self, st: _WinState, payload: str, send_round: int) -> str:
        return payload

    def inner_ctx(self, ctx: NodeContext) -> NodeContext:
        return ctx

    # plumbing ---------------------------------------------------------
    def validate(self, inst):
        self.inner.validate(inst)

    def _absorb(self, st: _WinState, vr: int, a: Actions) -> None:
        W = self.window(st.ctx)
        for port, payload in a.sends:
            st.pending[vr * W + self.slot(st, payload)].append((port, self.wire(payload)))
        if a.wake_at is not None:
            st.wake = a.wake_at
        if a.status is not None:
            st.status = a.status
        if a.output is not None:
            st.output = a.output
            st.status = Status.TERMINATED

    def start(self, ctx):
        st = _WinState(ctx)
        st.inner, a = self.inner.start(self.inner_ctx(ctx))
        self._absorb(st, 1, a)
        return st, self._emit(st, 1)

    def _run_window(self, st: _WinState, rnd: int) -> None:
        W = self.window(st.ctx)
        if rnd % W or rnd // W <= st.processed:
            return
        vr = rnd // W
        st.processed = vr
        if st.status is Status.TERMINATED:
            st.inbox.clear()
            return
        was_active = st.status is Status.ACTIVE
        msgs, st.inbox = sorted(st.inbox), []
        if msgs:
            self._absorb(st, vr, self.inner.on_messages(st.inner, vr, msgs))
        if st.status is not Status.TERMINATED and (was_active or st.wake == vr):
            self._absorb(st, vr, self.inner.on_clock(st.inner, vr))

    def _emit(self, st: _WinState, rnd: int) -> Actions:
        W = self.window(st.ctx)
        acts = Actions(sends=st.pending.pop(rnd, []), status=Status.PASSIVE)
        if st.status is Status.TERMINATED and not st.pending:
            acts.output = st.output
            return acts
        wakes = [r for r in st.pending if r > rnd]
        nxt_window = (rnd // W + 1) * W
        if st.status is Status.ACTIVE or st.inbox:
            wakes.append(nxt_window)
        if st.status is Status.PASSIVE and st.wake is not None and st.wake * W > rnd:
            wakes.append(st.wake * W)
        acts.wake_at = min(wakes) if wakes else None
        return acts

    def on_messages(self, st, rnd, msgs):
        for port, payload in msgs:
            st.inbox.append((port, self.unwire(st, payload, rnd - 1)))
        self._run_window(st, rnd)
        return self._emit(st, rnd)

    def on_clock(self, st, rnd):
        self._run_window(st, rnd)
        return self._emit(st, rnd)


class LocalToCongest(_Windowed):
    """Replace every ``M``-bit LOCAL message by a one-bit beep whose timing
    encodes it: virtual round ``r``, payload rank ``t`` goes out at physical
    round ``r * 2**M + t``, where ``t`` is the payload read as a big-endian
    ``M``-bit number.  Payloads of any other length raise
    :class:`RankOverflow`.

    Node activation is preserved when the inner behaviour sends one payload
    per round; the physical run lasts at most ``R * 2**M`` rounds when the
    inner one lasts ``R`` and sends nothing in its final round.
    """

    def __init__(self, inner: NodeBehavior, M: int, R: int | None = None, max_M: int = DEFAULT_MAX_M):
        if not 0 <= M <= max_M:
            raise ValueError(f"M={M} outside [0, {max_M}]")
        super().__init__(inner)
        self.M = M
        self.R = R
        self.name = f"local-to-congest:{inner.name}"

    def window(self, ctx):
        return 1 << self.M

    def slot(self, st, payload):
        if len(payload) != self.M:
            raise RankOverflow(f"node {st.ctx.node}: payload of {len(payload)} bits, M={self.M}")
        return int(payload, 2) if payload else 0

    def wire(self, payload):
        return "1"

    def unwire(self, st, payload, send_round):
        t = send_round % (1 << self.M)
        return format(t, f"0{self.M}b") if self.M else ""

    def inner_ctx(self, ctx):
        return replace(ctx, model=Model.LOCAL, bit_budget=None)

    def validate(self, inst):
        self.inner.validate(inst.with_params(model=Model.LOCAL))


def beep_round(r: int, t: int, M: int) -> int:
    """Physical round carrying rank ``t`` of virtual round ``r``."""
    return r * (1 << M) + t


class RoundDilation(_Windowed):
    """Stretch each round to ``N`` rounds; node ``v`` only ever sends in the
    slot ``id(v) - 1`` of a window, so no two nodes send in the same
    physical round.  Outputs and per-node activation counts are unchanged.
    """

    def __init__(self, inner: NodeBehavior):
        super().__init__(inner)
        self.name = f"dilated:{inner.name}"

    def window(self, ctx):
        return ctx.N

    def slot(self, st, payload):
        return st.ctx.id - 1


class PaddedPayloads(NodeBehavior):
    """Pad every payload to exactly ``M`` bits (``p + '1' + '0'*k``) so that
    variable-length behaviours can be fed to :class:`LocalToCongest`."""

    def __init__(self, inner: NodeBehavior, M: int):
        self.inner = inner
        self.M = M
        self.name = f"padded:{inner.name}"

    def validate(self, inst):
        self.inner.validate(inst)

    def _pad(self, a: Actions) -> Actions:
        sends = []
        for port, p in a.sends:
            if len(p) >= self.M:
                raise RankOverflow(f"payload of {len(p)} bits cannot be padded to {self.M}")
            sends.append((port, p + "1" + "0" * (self.M - len(p) - 1)))
        return replace(a, sends=sends)

    @staticmethod
    def _strip(p: str) -> str:
        return p[:p.rindex("1")]

    def start(self, ctx):
        st, a = self.inner.start(ctx)
        return st, self._pad(a)

    def on_clock(self, st, rnd):
        return self._pad(self.inner.on_clock(st, rnd))

    def on_messages(self, st, rnd, msgs):
        return self._pad(self.inner.on_messages(st, rnd, [(p, self._strip(m)) for p, m in msgs]))
