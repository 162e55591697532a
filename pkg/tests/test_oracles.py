from actsim import oracles
from actsim.instances import gen_complete, gen_cycle, gen_path, gen_random_connected


def test_mis_oracle():
    assert oracles.verify_mis(gen_cycle(4), {0, 2})
    assert not oracles.verify_mis(gen_cycle(4), {0})       # not maximal
    assert not oracles.verify_mis(gen_cycle(4), {0, 1})    # not independent


def test_coloring_oracle():
    assert not oracles.verify_coloring(gen_complete(3), (0, 1, 1))
    assert oracles.verify_coloring(gen_complete(3), (0, 1, 2))
    assert not oracles.verify_coloring(gen_complete(3), (0, 1, 3), max_colors=3)


def test_bfs_oracle():
    assert oracles.bfs_distances(gen_path(3), 1) == [1, 0, 1]


def test_c4_oracles_agree():
    for seed in range(30):
        g = gen_random_connected(9, 0.25, seed)
        assert oracles.has_c4(g) == oracles.has_c4_bruteforce(g)
    assert oracles.has_c4(gen_cycle(4))
    assert not oracles.has_c4(gen_cycle(5))
    assert not oracles.has_c4(gen_complete(3))
    assert oracles.has_c4(gen_complete(4))


def test_compose_and_chase():
    f = [[2, 3, 1]] * 3
    assert oracles.compose_dfpc(f, 1) == 1
    assert oracles.pointer_chase([2, 3, 3], [1, 2, 3], 2, 1) == 3


def test_sequential_greedy_orders_by_id():
    g = gen_path(3)
    assert oracles.greedy_mis_oracle(g, [2, 1, 3]) == [0, 1, 0]
    assert oracles.greedy_coloring_oracle(g, [1, 2, 3]) == [0, 1, 0]
