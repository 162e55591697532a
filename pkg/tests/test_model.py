import json

import pytest
from hypothesis import given, strategies as st

from actsim import Graph, Instance, Model, SimParams, make_instance, max_degree, validate_instance
from actsim.instances import PointerChasingSpec, gen_cycle, gen_dfpc_instance, gen_random_connected, gen_star
from actsim.model import default_N


def test_p3_with_sparse_ids_is_valid():
    g = Graph.from_edges(3, [(0, 1), (1, 2)])
    assert validate_instance(make_instance(g, ids=[5, 2, 9], N=10)) == []


def test_duplicate_identifier_reported():
    g = Graph.from_edges(2, [(0, 1)])
    assert "duplicate identifier" in validate_instance(make_instance(g, ids=[4, 4], N=8))


def test_disconnected_reported():
    g = Graph.from_edges(2, [])
    assert "graph not connected" in validate_instance(make_instance(g))


def test_id_above_N_and_n_above_N():
    g = Graph.from_edges(3, [(0, 1), (1, 2)])
    probs = validate_instance(make_instance(g, ids=[1, 2, 9], N=2))
    assert "identifier exceeds N" in probs
    assert "n exceeds N" in probs


def test_graph_rejects_self_loops_and_duplicates():
    with pytest.raises(ValueError):
        Graph.from_edges(2, [(0, 0)])
    with pytest.raises(ValueError):
        Graph.from_edges(2, [(0, 1), (1, 0)])


def test_neighbours_sorted():
    g = Graph.from_edges(4, [(0, 3), (0, 1), (2, 0)])
    assert g.neighbors[0] == (1, 2, 3)
    assert g.port(0, 2) == 1


def test_max_degree_examples():
    assert max_degree(gen_cycle(5)) == 2
    assert max_degree(gen_star(4)) == 4
    spec = PointerChasingSpec(7, 2, tuple(range(1, 8)), tuple(range(1, 8)), 1)
    # centre of the k=2 tree: four leaves plus one path neighbour
    assert max_degree(gen_dfpc_instance(spec).graph) == 5


def test_default_N_is_power_of_two():
    assert default_N(5, [3]) == 8
    assert default_N(3, [5, 2, 9]) == 16
    assert default_N(4, [1, 2, 3, 4]) == 4


def test_budget_only_in_congest():
    assert SimParams(N=10, model=Model.CONGEST).bit_budget == 4 * 4
    assert SimParams(N=10, model=Model.LOCAL).bit_budget is None
    assert SimParams(N=10, bit_budget_c=2).bit_budget == 8
    assert SimParams(N=10).cap == 6400


def test_json_field_order_and_sorted_edges():
    g = Graph.from_edges(3, [(2, 1), (1, 0)])
    d = json.loads(make_instance(g, ids=[3, 1, 2], inputs=["1", "", "01"]).to_json())
    assert list(d) == ["n", "edges", "ids", "inputs", "params"]
    assert d["edges"] == [[0, 1], [1, 2]]
    assert list(d["params"]) == ["N", "model", "bit_budget_c", "round_cap", "seed"]


@given(st.integers(2, 30), st.integers(0, 10_000), st.sampled_from(list(Model)))
def test_json_roundtrip(n, seed, model):
    g = gen_random_connected(n, 0.3, seed)
    inst = make_instance(g, inputs=[format(v, "b") for v in range(n)], model=model, round_cap=99, seed=seed)
    again = Instance.from_json(inst.to_json())
    assert again == inst
    assert validate_instance(again) == []
