"""Lock-step synchronous execution with activation accounting.

Round ``r`` is processed as follows.  Every live node first handles the
messages sent to it during round ``r - 1`` (``on_messages``), then its clock
event (``on_clock``) if it was Active when the round began or had asked to
be woken at ``r``.  All sends returned by either handler are transmitted
during round ``r``; they are charged to round ``r`` and reach their
recipients at the start of round ``r + 1``.  Round 1 is the ``start``
event.  Receiving never charges activation.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Iterable, NamedTuple

from .bits import to_hex
from .model import Graph, Instance, Model, Status, validate_instance


class SimulationError(Exception):
    pass


class InvalidInstance(SimulationError):
    pass


class BudgetExceeded(SimulationError):
    def __init__(self, node: int, rnd: int, bits: int, budget: int):
        super().__init__(f"node {node} sent {bits} bits at round {rnd} (budget {budget})")
        self.node, self.round, self.bits, self.budget = node, rnd, bits, budget


class BehaviorViolation(SimulationError):
    pass


class MismatchedTrace(SimulationError):
    pass


@dataclass(frozen=True)
class NodeContext:
    """What a node knows at start-up.  ``node`` is the engine index and is
    only meant for wrappers and diagnostics."""

    node: int
    id: int
    degree: int
    input: str
    N: int
    model: Model
    bit_budget: int | None


@dataclass
class Actions:
    sends: list[tuple[int, str]] = field(default_factory=list)
    status: Status | None = None
    wake_at: int | None = None
    output: str | None = None

    @classmethod
    def broadcast(cls, degree: int, payload: str, **kw) -> "Actions":
        return cls(sends=[(p, payload) for p in range(degree)], **kw)

    @classmethod
    def terminate(cls, output: str) -> "Actions":
        return cls(output=output)



class NodeBehavior:
    """Base class for algorithms.

    ``start`` returns ``(state, actions)``; the two handlers receive the
    engine-owned per-node ``state`` and return :class:`Actions`.  Handlers
    must be deterministic functions of (state, round, messages).  Messages
    arrive as ``(port, payload)`` pairs sorted by port.
    """

    name = "behavior"

    def validate(self, inst: Instance) -> None:
        """Raise :class:`InvalidInstance` when the behaviour cannot run on ``inst``."""

    def start(self, ctx: NodeContext) -> tuple[Any, Actions]:
        raise NotImplementedError

    def on_clock(self, state: Any, rnd: int) -> Actions:
        return Actions()

    def on_messages(self, state: Any, rnd: int, msgs: list[tuple[int, str]]) -> Actions:
        return Actions()


class TraceEvent(NamedTuple):
    round: int
    src: int
    dst: int
    payload: str

    def to_dict(self) -> dict:
        return {"round": self.round, "src": self.src, "dst": self.dst,
                "bits": len(self.payload), "payload_hex": to_hex(self.payload)}


@dataclass
class ActivationLedger:
    node_act: list[int]
    edge_act: dict[tuple[int, int], int]
    awake: list[int]
    rounds_used: int = 0
    bits_sent: int = 0
    messages_sent: int = 0

    @classmethod
    def empty(cls, g: Graph) -> "ActivationLedger":
        return cls([0] * g.n, {e: 0 for e in g.edges}, [0] * g.n)

    @property
    def nact(self) -> int:
        return max(self.node_act, default=0)

    @property
    def eact(self) -> int:
        return max(self.edge_act.values(), default=0)

    @property
    def awake_max(self) -> int:
        return max(self.awake, default=0)

    def message_counters(self) -> tuple:
        """The fields that a message trace alone determines."""
        return (tuple(self.node_act), tuple(sorted(self.edge_act.items())),
                self.bits_sent, self.messages_sent)

    def to_dict(self) -> dict:
        return {
            "node_act": self.node_act,
            "edge_act": {f"{u}-{v}": c for (u, v), c in sorted(self.edge_act.items())},
            "awake": self.awake,
            "nact": self.nact,
            "eact": self.eact,
            "rounds_used": self.rounds_used,
            "bits_sent": self.bits_sent,
        }


@dataclass
class RunResult:
    outputs: dict[int, str]
    ledger: ActivationLedger
    terminated: bool
    trace: list[TraceEvent] | None = None

    @property
    def cap_reached(self) -> bool:
        return not self.terminated

    def output_list(self, n: int) -> list[str | None]:
        return [self.outputs.get(v) for v in range(n)]


class _Node:
    __slots__ = ("ctx", "state", "status", "wake_at", "output")

    def __init__(self, ctx: NodeContext):
        self.ctx = ctx
        self.state = None
        self.status = Status.ACTIVE
        self.wake_at: int | None = None
        self.output: str | None = None


class Simulation:
    """Round-by-round driver; :func:`run` is the usual entry point.

    ``controlled`` restricts execution to a subset of nodes (the others are
    never scheduled); sends towards uncontrolled nodes are recorded in
    ``cross_sends`` instead of being delivered.  ``injected`` supplies
    messages from uncontrolled nodes as ``TraceEvent`` records, filtered by
    ``inject_until`` (latest send round accepted).
    """

    def __init__(self, inst: Instance, behavior: NodeBehavior, *, trace: bool = False,
                 controlled: Iterable[int] | None = None,
                 injected: Iterable[TraceEvent] = (), inject_until: int | None = None):
        self.inst = inst
        self.g = inst.graph
        self.behavior = behavior
        self.budget = inst.params.bit_budget
        self.cap = inst.params.cap
        self.controlled = sorted(controlled) if controlled is not None else list(range(self.g.n))
        self.is_controlled = [False] * self.g.n
        for v in self.controlled:
            self.is_controlled[v] = True
        p = inst.params
        self.nodes = {
            v: _Node(NodeContext(v, inst.ids[v], self.g.degree(v), inst.inputs[v],
                                 p.N, p.model, self.budget))
            for v in self.controlled
        }
        self.ledger = ActivationLedger.empty(self.g)
        self.trace: list[TraceEvent] | None = [] if trace else None
        self.cross_sends: list[TraceEvent] = []
        self.inbox: dict[int, dict[int, list[tuple[int, str]]]] = defaultdict(lambda: defaultdict(list))
        self.injected: dict[int, list[TraceEvent]] = defaultdict(list)
        for ev in injected:
            if self.is_controlled[ev.dst] and not self.is_controlled[ev.src]:
                self.injected[ev.round].append(ev)
        self.inject_until = inject_until
        self.round = 0
        self.live = len(self.controlled)
        self.last_termination = 0
        self.termination_round: dict[int, int] = {}

    # -- scheduling -------------------------------------------------------

    @property
    def done(self) -> bool:
        return self.live == 0

    def terminated_at(self, v: int) -> int | None:
        return self.termination_round.get(v)

    def _injection_rounds(self) -> list[int]:
        lim = self.inject_until
        return [r for r, evs in self.injected.items() if evs and (lim is None or r <= lim)]

    def next_round(self) -> int | None:
        """Next round at which anything can happen, or None when quiescent."""
        nxt = self.round + 1
        if self.round == 0:
            return 1
        if any(n.status is Status.ACTIVE for n in self.nodes.values()):
            return nxt
        candidates = [r for r, box in self.inbox.items() if box and r >= nxt]
        candidates += [r + 1 for r in self._injection_rounds() if r + 1 >= nxt]
        candidates += [n.wake_at for n in self.nodes.values()
                       if n.status is Status.PASSIVE and n.wake_at is not None and n.wake_at >= nxt]
        return min(candidates) if candidates else None

    def step(self) -> list[TraceEvent] | None:
        """Execute the next eventful round; returns its sends, or None if
        quiescent, finished, or past the round cap."""
        if self.done:
            return None
        r = self.next_round()
        if r is None or r > self.cap:
            return None
        self.round = r
        deliveries = self.inbox.pop(r, {})
        lim = self.inject_until
        if lim is None or r - 1 <= lim:
            for ev in self.injected.pop(r - 1, []):
                deliveries.setdefault(ev.dst, []).append((self.g.port(ev.dst, ev.src), ev.payload))
        sends: list[tuple[int, int, str]] = []
        awake_now = set()
        for v in self.controlled:
            node = self.nodes[v]
            if node.status is Status.TERMINATED:
                continue
            if r == 1:
                node.state, a = self.behavior.start(node.ctx)
                awake_now.add(v)
                self._apply(v, a, sends, awake_now)
            else:
                was_active = node.status is Status.ACTIVE
                if was_active:
                    awake_now.add(v)
                msgs = deliveries.get(v)
                if msgs:
                    msgs.sort()
                    self._apply(v, self.behavior.on_messages(node.state, r, msgs), sends, awake_now)
                if node.status is not Status.TERMINATED and (was_active or node.wake_at == r):
                    self._apply(v, self.behavior.on_clock(node.state, r), sends, awake_now)
        for v in awake_now:
            self.ledger.awake[v] += 1
        return self._transmit(r, sends)

    def _apply(self, v: int, a: Actions, sends: list, awake_now: set) -> Actions:
        node = self.nodes[v]
        if node.status is Status.TERMINATED:
            if a.sends or a.output is not None:
                raise BehaviorViolation(f"terminated node {v} attempted an action")
            return a
        for port, payload in a.sends:
            if not 0 <= port < node.ctx.degree:
                raise BehaviorViolation(f"node {v} sent on invalid port {port}")
            sends.append((v, port, payload))
        if a.wake_at is not None:
            node.wake_at = a.wake_at
        if a.status is not None:
            if a.status is Status.TERMINATED:
                raise BehaviorViolation("terminate via Actions.output, not status")
            node.status = a.status
        if a.sends or node.status is Status.ACTIVE:
            awake_now.add(v)
        if a.output is not None:
            node.output = a.output
            node.status = Status.TERMINATED
            self.live -= 1
            self.last_termination = self.round
            self.termination_round[v] = self.round
            awake_now.add(v)
        return a

    def _transmit(self, r: int, sends: list[tuple[int, int, str]]) -> list[TraceEvent]:
        led = self.ledger
        senders = set()
        edges = set()
        seen_ports = set()
        events = []
        for v, port, payload in sends:
            if (v, port) in seen_ports:
                raise BehaviorViolation(f"node {v} sent twice on port {port} in round {r}")
            seen_ports.add((v, port))
            if self.budget is not None and len(payload) > self.budget:
                raise BudgetExceeded(v, r, len(payload), self.budget)
            u = self.g.neighbors[v][port]
            ev = TraceEvent(r, v, u, payload)
            events.append(ev)
            senders.add(v)
            edges.add((min(u, v), max(u, v)))
            led.bits_sent += len(payload)
            led.messages_sent += 1
            if self.trace is not None:
                self.trace.append(ev)
            if self.is_controlled[u]:
                self.inbox[r + 1][u].append((self.g.port(u, v), payload))
            else:
                self.cross_sends.append(ev)
        for v in senders:
            led.node_act[v] += 1
        for e in edges:
            led.edge_act[e] += 1
        return events

    def run_to_end(self) -> None:
        while self.step() is not None:
            pass

    def outputs(self) -> dict[int, str]:
        return {v: n.output for v, n in self.nodes.items() if n.output is not None}

    def result(self) -> RunResult:
        self.ledger.rounds_used = self.last_termination if self.done else self.cap
        return RunResult(self.outputs(), self.ledger, self.done, self.trace)


def run(inst: Instance, behavior: NodeBehavior, trace: bool = False) -> RunResult:
    """Execute ``behavior`` on ``inst`` until every node terminates or the
    round cap is hit (``terminated=False`` in the latter case)."""
    problems = validate_instance(inst)
    if problems:
        raise InvalidInstance("; ".join(problems))
    behavior.validate(inst)
    sim = Simulation(inst, behavior, trace=trace)
    sim.run_to_end()
    return sim.result()


def check_activation_inequalities(result: RunResult, g: Graph) -> list[str]:
    """Per-run form of ``eact <= 2 nact`` and ``nact <= Δ eact``.

    Returns the violations (empty list when the run is consistent).
    """
    led = result.ledger
    bad = []
    for (u, v), c in led.edge_act.items():
        if c > led.node_act[u] + led.node_act[v]:
            bad.append(f"edge {u}-{v}: edge_act {c} > node_act {led.node_act[u]}+{led.node_act[v]}")
    for v in range(g.n):
        incident = sum(led.edge_act[(min(u, v), max(u, v))] for u in g.neighbors[v])
        if led.node_act[v] > incident:
            bad.append(f"node {v}: node_act {led.node_act[v]} > incident edge_act {incident}")
    return bad


def replay(trace: Iterable[TraceEvent], inst: Instance) -> ActivationLedger:
    """Rebuild the message-derived ledger fields from a trace.

    ``awake`` is left at zero and ``rounds_used`` is the last send round,
    since neither is recorded by message events.
    """
    g = inst.graph
    led = ActivationLedger.empty(g)
    senders: dict[int, set[int]] = defaultdict(set)
    crossed: dict[int, set[tuple[int, int]]] = defaultdict(set)
    for ev in trace:
        ev = TraceEvent(*ev)
        if not (0 <= ev.src < g.n and 0 <= ev.dst < g.n) or not g.has_edge(ev.src, ev.dst):
            raise MismatchedTrace(f"event {ev} references unknown edge")
        senders[ev.round].add(ev.src)
        crossed[ev.round].add((min(ev.src, ev.dst), max(ev.src, ev.dst)))
        led.bits_sent += len(ev.payload)
        led.messages_sent += 1
        led.rounds_used = max(led.rounds_used, ev.round)
    for vs in senders.values():
        for v in vs:
            led.node_act[v] += 1
    for es in crossed.values():
        for e in es:
            led.edge_act[e] += 1
    return led


def trace_to_jsonl(trace: Iterable[TraceEvent]) -> str:
    return "".join(json.dumps(ev.to_dict()) + "\n" for ev in trace)


def trace_from_jsonl(text: str) -> list[TraceEvent]:
    events = []
    for line in text.splitlines():
        if not line.strip():
            continue
        d = json.loads(line)
        nbits = d["bits"]
        payload = format(int(d["payload_hex"], 16), f"0{nbits}b") if nbits else ""
        events.append(TraceEvent(d["round"], d["src"], d["dst"], payload))
    return events
