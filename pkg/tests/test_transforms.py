import pytest

from actsim import Actions, NodeBehavior, Status, make_instance, run
from actsim.algorithms import (LocalToCongest, PaddedPayloads, RankOverflow, RoundDilation, beep_round,
                               broadcast_cycle, greedy_mis, universal_local)
from actsim.instances import gen_complete, gen_cycle, gen_path
from actsim.model import Model


class Say(NodeBehavior):
    """Node with input '1' says ``word`` at round ``at``; the other node
    outputs what it heard.  Both finish the round after."""

    def __init__(self, word, at=2):
        self.word, self.at = word, at

    def start(self, ctx):
        if ctx.input == "1":
            return ctx, Actions(status=Status.PASSIVE, wake_at=self.at)
        return ctx, Actions(status=Status.PASSIVE)

    def on_clock(self, ctx, rnd):
        if rnd == self.at:
            return Actions(sends=[(0, self.word)], status=Status.PASSIVE, wake_at=rnd + 1)
        return Actions.terminate("1")

    def on_messages(self, ctx, rnd, msgs):
        return Actions.terminate(msgs[0][1] or "1")


class Quit(NodeBehavior):
    def start(self, ctx):
        return None, Actions.terminate("0")


def p2(model=Model.LOCAL):
    return make_instance(gen_path(2), inputs=["1", "0"], model=model)


def test_beep_round_formula():
    assert beep_round(2, 1, 2) == 9


def test_beep_lands_on_encoded_round():
    res = run(p2(Model.CONGEST), LocalToCongest(Say("01"), 2), trace=True)
    assert [(ev.round, ev.payload) for ev in res.trace] == [(9, "1")]
    assert res.outputs[1] == "01"


def test_transform_broadcast_c4():
    inst = make_instance(gen_cycle(4), inputs=["0", "1", "0", "0"], model=Model.LOCAL)
    local = run(inst, broadcast_cycle())
    beeped = run(inst.with_params(model=Model.CONGEST), LocalToCongest(broadcast_cycle(), 1))
    assert beeped.outputs == local.outputs
    assert beeped.ledger.node_act == local.ledger.node_act
    assert beeped.ledger.rounds_used <= 2 * local.ledger.rounds_used


def test_transform_zero_bits_is_pure_timing():
    local = run(p2(), Say(""))
    beeped = run(p2(Model.CONGEST), LocalToCongest(Say(""), 0))
    assert beeped.ledger.rounds_used == local.ledger.rounds_used
    assert beeped.outputs == local.outputs


def test_rank_overflow():
    with pytest.raises(RankOverflow):
        run(p2(Model.CONGEST), LocalToCongest(Say("111"), 2))


def test_M_above_cap_rejected():
    with pytest.raises(ValueError):
        LocalToCongest(Say("1"), 17)


def test_padded_universal_on_toy_instance():
    inst = make_instance(gen_path(2), model=Model.LOCAL)
    inner = universal_local("node-count", len_bits=2)
    local = run(inst, inner)
    beeped = run(inst.with_params(model=Model.CONGEST, round_cap=10**7),
                 LocalToCongest(PaddedPayloads(universal_local("node-count", len_bits=2), 13), 13))
    assert beeped.terminated
    assert beeped.outputs == local.outputs
    assert beeped.ledger.node_act == local.ledger.node_act


def test_dilation_keeps_mis():
    inst = make_instance(gen_complete(3), ids=[1, 2, 3])
    plain = run(inst, greedy_mis())
    dil = run(inst, RoundDilation(greedy_mis()), trace=True)
    assert dil.outputs == plain.outputs
    assert dil.ledger.node_act == plain.ledger.node_act
    senders = {}
    for ev in dil.trace:
        senders.setdefault(ev.round, set()).add(ev.src)
    assert all(len(s) == 1 for s in senders.values())


def test_dilation_zero_messages():
    inst = make_instance(gen_cycle(5))
    assert run(inst, RoundDilation(Quit())).ledger == run(inst, Quit()).ledger


def test_dilation_broadcast_c3():
    inst = make_instance(gen_cycle(3), inputs=["0", "0", "1"])
    plain = run(inst, broadcast_cycle())
    dil = run(inst, RoundDilation(broadcast_cycle()))
    assert dil.ledger.node_act == plain.ledger.node_act
    assert dil.outputs == plain.outputs
    assert dil.ledger.rounds_used <= inst.params.N * plain.ledger.rounds_used
