import random

import pytest
from hypothesis import given, strategies as st

from actsim import check_activation_inequalities, make_instance, run
from actsim.algorithms import (SOLVERS, InvalidDfsOrder, at_least_one_leader, broadcast_cycle,
                               decode_bfs_output, decode_dfpc_input, dfpc_edge_frugal, greedy_coloring,
                               greedy_mis, leader_bfs, universal_local)
from actsim.algorithms.greedy import GreedyById
from actsim.bits import to_int
from actsim.checks import dfpc_expected, gathered
from actsim.engine import BudgetExceeded, InvalidInstance
from actsim.instances import (PointerChasingSpec, dfs_preorder, fig4_layout, gen_complete, gen_cycle,
                              gen_dfpc_from_tables, gen_dfpc_instance, gen_path, gen_random_connected,
                              random_instance)
from actsim.model import Model
from actsim import oracles


def token_at(n, holder):
    return make_instance(gen_cycle(n), inputs=["1" if v == holder else "0" for v in range(n)])


# -- cycle examples -------------------------------------------------------


def test_broadcast_c3():
    res = run(token_at(3, 2), broadcast_cycle())
    assert res.outputs == {0: "1", 1: "1", 2: "1"}
    assert (res.ledger.nact, res.ledger.eact) == (1, 1)


@pytest.mark.parametrize("n", [3, 4, 7, 12])
def test_broadcast_round_bound(n):
    res = run(token_at(n, n // 2), broadcast_cycle())
    assert res.ledger.rounds_used <= n + 2


def test_broadcast_c4_repeatable():
    a = run(token_at(4, 1), broadcast_cycle(), trace=True)
    b = run(token_at(4, 1), broadcast_cycle(), trace=True)
    assert a.trace == b.trace


def test_broadcast_rejects_non_cycle():
    with pytest.raises(InvalidInstance):
        run(make_instance(gen_path(4), inputs=["1", "0", "0", "0"]), broadcast_cycle())
    with pytest.raises(InvalidInstance):
        run(make_instance(gen_cycle(4), inputs=["1", "1", "0", "0"]), broadcast_cycle())


def leaders(*flags):
    return make_instance(gen_cycle(len(flags)), inputs=[str(f) for f in flags])


def test_one_leader_accepts():
    res = run(leaders(1, 0, 0, 0, 0), at_least_one_leader())
    assert set(res.outputs.values()) == {"1"}
    assert res.ledger.nact == 1


def test_no_leader_rejects_at_N():
    inst = leaders(0, 0, 0, 0, 0)
    res = run(inst, at_least_one_leader())
    assert set(res.outputs.values()) == {"0"}
    assert res.ledger.rounds_used == inst.params.N
    assert res.ledger.nact == 0


def test_two_leaders_accept():
    res = run(leaders(1, 0, 1, 0, 0), at_least_one_leader())
    assert set(res.outputs.values()) == {"1"}
    assert res.ledger.nact <= 1


@given(st.lists(st.booleans(), min_size=3, max_size=40))
def test_one_leader_matches_any(flags):
    res = run(leaders(*map(int, flags)), at_least_one_leader())
    want = "1" if any(flags) else "0"
    assert set(res.outputs.values()) == {want}
    assert res.ledger.nact <= 1


# -- leader + BFS ---------------------------------------------------------


def test_leader_bfs_k3():
    inst = make_instance(gen_complete(3), ids=[1, 2, 3], N=4)
    res = run(inst, leader_bfs(), trace=True)
    assert min(ev.round for ev in res.trace) == 4
    infos = [decode_bfs_output(res.outputs[v], 4) for v in range(3)]
    assert all(i.leader == 1 and i.dist <= 1 for i in infos)


@given(st.integers(2, 80), st.integers(0, 10**6))
def test_leader_bfs_against_bfs_oracle(n, seed):
    inst = random_instance(n, seed)
    res = run(inst, leader_bfs())
    N, lo = inst.params.N, min(inst.ids)
    infos = [decode_bfs_output(res.outputs[v], N) for v in range(n)]
    assert [i.dist for i in infos] == oracles.bfs_distances(inst.graph, inst.node_of_id(lo))
    assert {i.leader for i in infos} == {lo}
    assert res.ledger.nact == 1
    assert res.ledger.rounds_used <= lo * N + N + 2


# -- universal ------------------------------------------------------------


def test_universal_node_count_c4():
    inst = make_instance(gen_cycle(4), model=Model.LOCAL)
    res = run(inst, universal_local("node-count"))
    assert {to_int(y) for y in res.outputs.values()} == {4}
    assert res.ledger.nact <= 3


def test_universal_identity_p2():
    inst = make_instance(gen_path(2), inputs=["101", "0"], model=Model.LOCAL)
    res = run(inst, universal_local("identity"))
    assert res.outputs == {0: "101", 1: "0"}


def test_universal_mis_random():
    inst = random_instance(20, 7, model=Model.LOCAL)
    res = run(inst, universal_local("mis"))
    members = [v for v in range(20) if res.outputs[v] == "1"]
    assert oracles.verify_mis(inst.graph, members)
    assert res.ledger.nact <= 3


@pytest.mark.parametrize("solver", sorted(SOLVERS))
def test_universal_equals_central_solver(solver):
    inst = random_instance(12, 5, model=Model.LOCAL)
    if solver == "identity":
        inst = inst.with_inputs([format(v, "b") for v in range(12)])
    res = run(inst, universal_local(solver))
    want = SOLVERS[solver](gathered(inst))
    assert all(res.outputs[v] == want[inst.ids[v]] for v in range(12))


def test_universal_requires_local():
    with pytest.raises(InvalidInstance):
        run(make_instance(gen_cycle(4)), universal_local("node-count"))


# -- greedy ---------------------------------------------------------------


def test_greedy_mis_triangle():
    res = run(make_instance(gen_complete(3), ids=[1, 2, 3]), greedy_mis())
    assert [res.outputs[v] for v in range(3)] == ["1", "0", "0"]


def test_greedy_coloring_p3():
    res = run(make_instance(gen_path(3), ids=[1, 2, 3]), greedy_coloring())
    assert [to_int(res.outputs[v]) for v in range(3)] == [0, 1, 0]


def test_greedy_mis_c4_ids_around():
    res = run(make_instance(gen_cycle(4), ids=[1, 2, 3, 4]), greedy_mis())
    assert {v + 1 for v in range(4) if res.outputs[v] == "1"} == {1, 3}


@given(st.integers(2, 60), st.integers(0, 10**6))
def test_greedy_against_sequential_oracle(n, seed):
    inst = random_instance(n, seed)
    mis = run(inst, greedy_mis())
    col = run(inst, greedy_coloring())
    assert [int(mis.outputs[v]) for v in range(n)] == oracles.greedy_mis_oracle(inst.graph, inst.ids)
    assert [to_int(col.outputs[v]) for v in range(n)] == oracles.greedy_coloring_oracle(inst.graph, inst.ids)
    for res in (mis, col):
        assert res.ledger.node_act == [1] * n
        assert res.ledger.rounds_used <= inst.params.N


def test_greedy_output_too_long():
    wide = GreedyById(lambda i, x, d, N: "1" * 40, "wide")
    with pytest.raises(BudgetExceeded):
        run(make_instance(gen_path(3)), wide)


def test_greedy_linger_adds_one_round():
    inst = make_instance(gen_path(3), ids=[1, 2, 3])
    assert run(inst, greedy_mis(linger=True)).ledger.rounds_used == 4
    assert run(inst, greedy_mis()).ledger.rounds_used == 3


# -- DFPC -----------------------------------------------------------------


def path_dfpc(tables, x0):
    return gen_dfpc_from_tables(gen_path(3), [1, 2, 3], tables, x0)


def test_dfpc_identity_path():
    ident = [1, 2, 3, 4]
    inst = gen_dfpc_from_tables(gen_path(3), [1, 2, 3], [ident[:3]] * 3, 3)
    res = run(inst, dfpc_edge_frugal())
    assert to_int(res.outputs[0]) == 3


def test_dfpc_identity_path_x4():
    # values live in [1..n]; x = 4 needs n >= 4, so the tables are over [1..4]
    g = gen_path(4)
    ident = [1, 2, 3, 4]
    inst = gen_dfpc_from_tables(g, [1, 2, 3, 4], [ident] * 4, 4)
    assert to_int(run(inst, dfpc_edge_frugal()).outputs[0]) == 4


def test_dfpc_cyclic_shift():
    shift = [(x % 3) + 1 for x in range(1, 4)]
    res = run(path_dfpc([shift] * 3, 1), dfpc_edge_frugal())
    # derived: 1 -> 2 -> 3 -> 1
    assert to_int(res.outputs[0]) == 1 == oracles.compose_dfpc([shift] * 3, 1)


def test_dfpc_fig4_k2():
    spec = PointerChasingSpec(7, 2, tuple(min(x + 1, 7) for x in range(1, 8)), tuple(range(1, 8)), 1)
    inst = gen_dfpc_instance(spec)
    res = run(inst, dfpc_edge_frugal())
    assert to_int(res.outputs[0]) == 3 == spec.ground_truth()
    assert res.ledger.eact <= 3
    centre, _ = fig4_layout(7, 2)
    assert res.ledger.node_act[centre] >= 5
    assert check_activation_inequalities(res, inst.graph) == []


def test_dfpc_activation_per_children():
    spec = PointerChasingSpec.random(3, 1)
    inst = gen_dfpc_instance(spec)
    res = run(inst, dfpc_edge_frugal())
    g = inst.graph
    children = [sum(1 for u in g.neighbors[v] if u > v) for v in range(g.n)]
    for v in range(g.n):
        assert res.ledger.node_act[v] == children[v] + (1 if v == 0 else 2)


@given(st.integers(2, 40), st.integers(0, 10**6))
def test_dfpc_random_graphs(n, seed):
    g = gen_random_connected(n, 0.15, seed)
    rng = random.Random(seed)
    tables = [[rng.randint(1, n) for _ in range(n)] for _ in range(n)]
    inst = gen_dfpc_from_tables(g, dfs_preorder(g, rng.randrange(n)), tables, rng.randint(1, n))
    res = run(inst, dfpc_edge_frugal())
    root = next(v for v in range(n) if decode_dfpc_input(inst.inputs[v], inst.params.N).dfs_index == 1)
    assert to_int(res.outputs[root]) == dfpc_expected(inst)
    assert res.ledger.eact <= 3
    assert check_activation_inequalities(res, g) == []


def test_dfpc_rejects_bad_order():
    g = gen_cycle(4)
    ident = [1, 2, 3, 4]
    ok = gen_dfpc_from_tables(g, [1, 2, 3, 4], [ident] * 4, 1)
    run(ok, dfpc_edge_frugal())
    # the edge between indices 2 and 4 would be a cross edge
    cross = gen_dfpc_from_tables(g, [1, 2, 4, 3], [ident] * 4, 1)
    with pytest.raises(InvalidDfsOrder):
        run(cross, dfpc_edge_frugal())
    # index 2 has no smaller neighbour on the path
    orphan = gen_dfpc_from_tables(gen_path(3), [1, 3, 2], [ident[:3]] * 3, 1)
    with pytest.raises(InvalidDfsOrder):
        run(orphan, dfpc_edge_frugal())
