"""Two players jointly re-running a distributed algorithm across a cut.

Alice controls the nodes on side ``A`` and Bob those on side ``B``.  Each
player advances only its own nodes with the ordinary engine; messages
coming over the cut are injected from what the players have told each
other.  Two protocols are provided:

* :func:`simulate_cut` works in phases.  In each phase both players run
  obliviously from the agreed round ``t`` and report their first cut send
  after ``t``; the earliest report (or both, on a tie) is accepted and
  becomes the new ``t``.
* :func:`simulate_cut_round_efficient` alternates speakers.  The speaker
  replays the listener's list, finds its own first cut send ``r``, keeps
  going obliviously from there and ships everything it would send over
  the cut from ``r`` on.

Both check the reconstruction against a direct traced run.
"""

from __future__ import annotations

import math

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .algorithms.transforms import RoundDilation
from .engine import NodeBehavior, RunResult, Simulation, SimulationError, TraceEvent, run
from .model import Graph, Instance

A, B = "A", "B"


class Divergence(SimulationError):
    pass


class NonTermination(SimulationError):
    pass


@dataclass(frozen=True)
class PartitionSpec:
    side_of: tuple[str, ...]

    def __post_init__(self):
        if set(self.side_of) - {A, B}:
            raise ValueError("sides must be 'A' or 'B'")
        if A not in self.side_of or B not in self.side_of:
            raise ValueError("both sides must be non-empty")

    @classmethod
    def from_side_a(cls, n: int, side_a: Iterable[int]) -> "PartitionSpec":
        sa = set(side_a)
        return cls(tuple(A if v in sa else B for v in range(n)))

    def nodes(self, side: str) -> list[int]:
        return [v for v, s in enumerate(self.side_of) if s == side]

    def cut_edges(self, g: Graph) -> list[tuple[int, int]]:
        return [(u, v) for u, v in g.edges if self.side_of[u] != self.side_of[v]]

    def boundary(self, g: Graph, side: str) -> int:
        """Number of nodes of ``side`` with a neighbour on the other side."""
        return len({w for e in self.cut_edges(g) for w in e if self.side_of[w] == side})

    def summary(self, g: Graph) -> dict:
        cut = self.cut_edges(g)
        return {
            "side_a": self.nodes(A),
            "side_b": self.nodes(B),
            "e_cut": len(cut),
            "n_cut": len({w for e in cut for w in e}),
            "boundary_a": self.boundary(g, A),
            "boundary_b": self.boundary(g, B),
        }


@dataclass
class PhaseRecord:
    index: int
    speaker: str
    watermark: int
    messages: list[TraceEvent]
    case: str
    bits: int

    def to_dict(self) -> dict:
        return {"index": self.index, "speaker": self.speaker, "watermark": self.watermark,
                "case": self.case, "bits": self.bits,
                "messages": [list(ev) for ev in self.messages]}


@dataclass
class CutSession:
    protocol: str
    instance: Instance
    behavior: str
    partition: PartitionSpec
    phases: list[PhaseRecord] = field(default_factory=list)
    outputs: dict[int, str] = field(default_factory=dict)
    cut_log: list[TraceEvent] = field(default_factory=list)
    nact: int = 0
    eact: int = 0
    nact_bound: int | None = None
    bounds: dict = field(default_factory=dict)

    @property
    def rounds(self) -> int:
        """Two-party rounds: one per phase for the phase protocol, one per
        speaker turn for the alternating one."""
        return len(self.phases)

    @property
    def total_bits(self) -> int:
        return sum(p.bits for p in self.phases)

    @property
    def shipped_messages(self) -> int:
        return sum(len(p.messages) for p in self.phases)

    def outputs_of(self, side: str) -> dict[int, str]:
        return {v: y for v, y in self.outputs.items() if self.partition.side_of[v] == side}

    def to_dict(self) -> dict:
        g = self.instance.graph
        return {
            "protocol": self.protocol,
            "behavior": self.behavior,
            "partition": self.partition.summary(g),
            "phases": [p.to_dict() for p in self.phases],
            "rounds": self.rounds,
            "total_bits": self.total_bits,
            "shipped_messages": self.shipped_messages,
            "nact": self.nact,
            "eact": self.eact,
            "nact_bound": self.nact_bound,
            "bounds": self.bounds,
            "outputs": {str(v): y for v, y in sorted(self.outputs.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


# -- shared helpers --------------------------------------------------------


def _width(x: int) -> int:
    return max(1, x.bit_length())


class _Costs:
    """Bit prices of the two-party messages."""

    def __init__(self, inst: Instance):
        self.stamp = _width(inst.params.cap)             # ceil(log2(cap + 1))
        self.node = _width(max(1, inst.graph.n - 1))     # ceil(log2 n)

    def record(self, ev: TraceEvent) -> int:
        return self.stamp + 2 * self.node + len(ev.payload)

    def listing(self, events: Sequence[TraceEvent]) -> int:
        # watermark, message count, then the records
        return 2 * self.stamp + sum(self.record(ev) for ev in events)


def _direct(inst: Instance, behavior: NodeBehavior) -> RunResult:
    res = run(inst, behavior, trace=True)
    if not res.terminated:
        raise NonTermination("direct run did not terminate within the round cap")
    return res


def _cut_events(trace: Iterable[TraceEvent], part: PartitionSpec) -> list[TraceEvent]:
    return sorted(ev for ev in trace if part.side_of[ev.src] != part.side_of[ev.dst])


def _side_sim(inst, behavior, part, side, known, until=None) -> Simulation:
    return Simulation(inst, behavior, controlled=part.nodes(side), injected=known, inject_until=until)


def _advance_to_cut_send(sim: Simulation, after: int) -> list[TraceEvent]:
    """Step until a round later than ``after`` with cut sends; return them
    (empty when the side finishes or goes quiet first)."""
    seen = len(sim.cross_sends)
    while sim.step() is not None:
        fresh = sim.cross_sends[seen:]
        seen = len(sim.cross_sends)
        if fresh and fresh[0].round > after:
            return list(fresh)
    return []


def _check_prefix(sim: Simulation, upto: int, agreed: set[TraceEvent], side: str) -> None:
    for ev in sim.cross_sends:
        if ev.round <= upto and ev not in agreed:
            raise Divergence(f"side {side} produced unagreed cut message {ev}")


def _finish(session: CutSession, direct: RunResult, cut_log: list[TraceEvent]) -> CutSession:
    session.cut_log = sorted(cut_log)
    expected = _cut_events(direct.trace, session.partition)
    if session.cut_log != expected:
        raise Divergence("cut message log differs from the direct run")
    if session.outputs != direct.outputs:
        bad = sorted(v for v in range(session.instance.n)
                     if session.outputs.get(v) != direct.outputs.get(v))
        raise Divergence(f"reconstructed outputs differ at nodes {bad}")
    return session


def _collect_outputs(sims: Iterable[Simulation]) -> dict[int, str]:
    out: dict[int, str] = {}
    for sim in sims:
        out.update(sim.outputs())
    return out


# -- phase protocol --------------------------------------------------------


def simulate_cut(inst: Instance, behavior: NodeBehavior, partition: PartitionSpec) -> CutSession:
    """Phase protocol with the six-case resolution.

    Case labels: 1 both quiet (finish); 2 only Bob sends; 3 only Alice
    sends; 4 Bob sends first; 5 Alice sends first; 6 both at the same round.
    """
    direct = _direct(inst, behavior)
    g = inst.graph
    session = CutSession("phases", inst, behavior.name, partition,
                         nact=direct.ledger.nact, eact=direct.ledger.eact)
    summ = partition.summary(g)
    session.bounds = {
        "phase_bound": 2 * min(summ["n_cut"] * session.nact, summ["e_cut"] * session.eact),
    }
    cost = _Costs(inst)
    agreed: list[TraceEvent] = []
    t = 0
    for p in range(1, inst.params.cap + 2):
        known = set(agreed)
        sims, firsts = {}, {}
        for side in (A, B):
            sim = _side_sim(inst, behavior, partition, side, agreed, until=t)
            firsts[side] = _advance_to_cut_send(sim, t)
            _check_prefix(sim, t, known, side)
            sims[side] = sim
        fa, fb = firsts[A], firsts[B]
        ra = fa[0].round if fa else None
        rb = fb[0].round if fb else None
        alice_bits = 1 + (cost.listing(fa) if fa else 0)
        bob_bits = 3
        if ra is None and rb is None:
            case, shipped, new_t = "1", [], t
        elif ra is None:
            case, shipped, new_t = "2", fb, rb
        elif rb is None:
            case, shipped, new_t = "3", fa, ra
        elif rb < ra:
            case, shipped, new_t = "4", fb, rb
        elif ra < rb:
            case, shipped, new_t = "5", fa, ra
        else:
            case, shipped, new_t = "6", fa + fb, ra
        if case in ("2", "4", "6"):
            bob_bits += cost.listing(fb)
        session.phases.append(PhaseRecord(p, "AB", new_t, list(shipped), case,
                                          alice_bits + bob_bits))
        if case == "1":
            for side, sim in sims.items():
                if not sim.done:
                    raise NonTermination(f"side {side} is stuck with live nodes at round {sim.round}")
            session.outputs = _collect_outputs(sims.values())
            return _finish(session, direct, agreed)
        if new_t <= t:
            raise NonTermination(f"watermark stalled at {t}")
        agreed.extend(shipped)
        t = new_t
    raise NonTermination("phase limit exceeded")


# -- alternating-speaker protocol ------------------------------------------


def _trim(events: list[TraceEvent], groups: int) -> tuple[list[TraceEvent], float]:
    """Keep the earliest ``groups`` distinct (sender, round) activations.

    Also returns the horizon: every event up to that round is in the kept
    list (infinite when nothing was dropped).
    """
    kept, seen = [], set()
    for ev in sorted(events):
        key = (ev.src, ev.round)
        if key not in seen:
            if len(seen) >= groups:
                return kept, ev.round - 1
            seen.add(key)
        kept.append(ev)
    return kept, math.inf


def _exact_if_cut_off(sim: Simulation, boundary: Sequence[int], after: int) -> bool:
    """True when every boundary node of ``sim``'s side terminated by round
    ``after + 1``: cut messages sent after ``after`` can no longer matter."""
    return all(sim.terminated_at(v) is not None and sim.terminated_at(v) <= after + 1
               for v in boundary)


def simulate_cut_round_efficient(inst: Instance, behavior: NodeBehavior, partition: PartitionSpec,
                                 nact_bound: int | None = None, *, dilate: bool = False) -> CutSession:
    """Alternating protocol between a shipper and a confirmer.

    The confirmer is the side with the smaller boundary (Alice on a tie);
    the shipper speaks first.  Both sides agree on every cut message up
    to round ``T``.  Each side's list names its cut sends after ``T``
    assuming the other side stays silent after ``T``, cut down to
    ``nact_bound`` times its boundary many (sender, round) groups.

    On its turn a side simulates with the other's list and finds its own
    first new cut send ``a``.  The list is right up to ``a``, so
    everything up to ``a`` becomes agreed and ``T`` moves to ``a``.  If
    the list was cut down before ``a``, its kept groups already use up
    the other side's activation budget, so that side never sends again.
    The turn ends the protocol when the speaker's run is then exact:
    ``final`` (the other side is exhausted, or the speaker's boundary
    nodes all terminated by ``a + 1``) or ``finish`` (no new send, all
    nodes terminated).  The shipper's first turn has no list to work
    with and only ships.

    Every confirmer turn except the last agrees at least one new
    activation of its boundary, so at most ``2 * min boundary *
    nact_bound + 2`` turns are used.  ``dilate`` first spreads every
    node's sends over distinct rounds.
    """
    if dilate:
        inst = inst.with_params(round_cap=inst.params.cap * inst.params.N)
        behavior = RoundDilation(behavior)
    direct = _direct(inst, behavior)
    g = inst.graph
    if nact_bound is None:
        nact_bound = direct.ledger.nact
    session = CutSession("alternating", inst, behavior.name, partition,
                         nact=direct.ledger.nact, eact=direct.ledger.eact, nact_bound=nact_bound)
    bnd = {A: partition.boundary(g, A), B: partition.boundary(g, B)}
    session.bounds = {
        "round_bound": min(bnd[A], bnd[B]) * nact_bound,
        "alternation_bound": 2 * min(bnd[A], bnd[B]) * nact_bound + 2,
    }
    conf = A if bnd[A] <= bnd[B] else B
    ship = B if conf == A else A
    edge_nodes = {side: [v for v in partition.nodes(side)
                         if any(partition.side_of[u] != side for u in g.neighbors[v])]
                  for side in (A, B)}
    cost = _Costs(inst)
    confirmed: list[TraceEvent] = []
    tail: list[TraceEvent] | None = None     # confirmer's prediction after T
    tail_reach: float = math.inf
    T = 0

    def done(p, side, case, shipped, sims, log):
        session.phases.append(PhaseRecord(p, side, T, list(shipped), case,
                                          2 + (cost.listing(shipped) if shipped else 0)))
        for other_side, sim in sims.items():
            if not sim.done:
                raise NonTermination(f"side {other_side} is stuck with live nodes at round {sim.round}")
        session.outputs = _collect_outputs(sims.values())
        return _finish(session, direct, set(log) | {ev for s in sims.values() for ev in s.cross_sends})

    p = 0
    while p <= inst.params.cap + 1:
        # shipper
        p += 1
        sim = _side_sim(inst, behavior, partition, ship, confirmed + (tail or []))
        first = _advance_to_cut_send(sim, T)
        _check_prefix(sim, T, set(confirmed), ship)
        if not first and sim.done and (tail is not None or _exact_if_cut_off(sim, edge_nodes[ship], T)):
            other = _side_sim(inst, behavior, partition, conf, confirmed + (tail or []))
            other.run_to_end()
            return done(p, ship, "finish", [], {ship: sim, conf: other}, confirmed + (tail or []))
        if first and tail is not None and first[0].round > tail_reach:
            # the confirmer's kept groups exhaust it: the shipper's run is exact
            confirmed.extend(tail)
            sim.run_to_end()
            mine = [ev for ev in sim.cross_sends if ev.round > T]
            peer = _side_sim(inst, behavior, partition, conf, confirmed + mine)
            peer.run_to_end()
            return done(p, ship, "final", mine, {ship: sim, conf: peer}, confirmed + mine)
        if first and tail is not None:
            # the confirmer's tail is right up to the shipper's first send
            s_round = first[0].round
            confirmed.extend(ev for ev in tail if ev.round <= s_round)
            confirmed.extend(first)
            T = s_round
            sim.inject_until = s_round
            sim.run_to_end()
            if _exact_if_cut_off(sim, edge_nodes[ship], T):
                mine = [ev for ev in sim.cross_sends if ev.round > T]
                peer = _side_sim(inst, behavior, partition, conf, confirmed + mine)
                peer.run_to_end()
                return done(p, ship, "final", first + mine, {ship: sim, conf: peer}, confirmed + mine)
            head = list(first)
        else:
            sim = _side_sim(inst, behavior, partition, ship, confirmed, until=T)
            sim.run_to_end()
            head = []
        listed, reach = _trim([ev for ev in sim.cross_sends if ev.round > T], nact_bound * bnd[ship])
        session.phases.append(PhaseRecord(p, ship, T, head + listed, "ship",
                                          2 + cost.listing(head + listed)))

        # confirmer
        p += 1
        sim = _side_sim(inst, behavior, partition, conf, confirmed + listed)
        first = _advance_to_cut_send(sim, T)
        _check_prefix(sim, T, set(confirmed), conf)
        a = first[0].round if first else math.inf
        if a > reach:
            # the kept groups exhaust the shipper, which is silent from here on
            confirmed.extend(listed)
            sim.run_to_end()
            mine = [ev for ev in sim.cross_sends if ev.round > T]
            peer = _side_sim(inst, behavior, partition, ship, confirmed + mine)
            peer.run_to_end()
            return done(p, conf, "final" if mine else "finish", mine, {conf: sim, ship: peer},
                        confirmed + mine)
        if not first:
            sim.run_to_end()
            peer = _side_sim(inst, behavior, partition, ship, confirmed + listed, until=T)
            peer.run_to_end()
            return done(p, conf, "finish", [], {conf: sim, ship: peer}, confirmed + listed)
        confirmed.extend(ev for ev in listed if ev.round <= a)
        confirmed.extend(first)
        T = a
        sim.inject_until = a
        sim.run_to_end()
        if _exact_if_cut_off(sim, edge_nodes[conf], a):
            mine = [ev for ev in sim.cross_sends if ev.round > T]
            peer = _side_sim(inst, behavior, partition, ship, confirmed + mine)
            peer.run_to_end()
            return done(p, conf, "final", first + mine, {conf: sim, ship: peer}, confirmed + mine)
        tail, tail_reach = _trim([ev for ev in sim.cross_sends if ev.round > T], nact_bound * bnd[conf])
        session.phases.append(PhaseRecord(p, conf, T, first + tail, "ship",
                                          2 + cost.listing(first + tail)))
    raise NonTermination("turn limit exceeded")


def round_dilation(behavior: NodeBehavior) -> NodeBehavior:
    return RoundDilation(behavior)


def fig4_partition(n: int, k: int) -> PartitionSpec:
    """Alice: the path and the ``f_A`` leaves; Bob: the ``f_B`` leaves."""
    from .instances import fig4_layout
    _, roles = fig4_layout(n, k)
    return PartitionSpec(tuple(B if r == "B" else A for r in roles))
