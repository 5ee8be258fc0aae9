import itertools
import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import graphs, to_nx
from edgecolor.graph import GeneratorSpec, Graph, cycle, generate, path
from edgecolor.sim import run_sync
from edgecolor.symmetry import (
    LINIAL_C,
    LinialProgram,
    ListTooSmall,
    PowerOracle,
    SparseOracle,
    SweepMISProgram,
    ValidityCheckFailed,
    det_ruling_set_log_delta,
    greedy_list_edge_coloring,
    linial_coloring,
    maximal_matching,
    mis,
    power_ruling_set,
    rand_ruling_set,
    ruling_set_from_coloring,
    two_edge_ruling_set,
)
from edgecolor.verify import check_matching, check_proper_coloring, check_ruling_set, check_two_edge_ruling


def proper_vertex_coloring(g, colors):
    return all(colors[u] != colors[v] for u, v in g.edges)


def regular(n, d, seed=0):
    return generate(GeneratorSpec("regular-random", n=n, d=d, seed=seed))


class TestLinial:
    def test_single_vertex(self):
        col = linial_coloring(Graph(1, []))
        assert col.colors.tolist() == [0] and col.rounds == 0

    def test_k4(self):
        g = Graph(4, itertools.combinations(range(4), 2))
        col = linial_coloring(g)
        assert len(set(col.colors.tolist())) == 4 and col.palette <= LINIAL_C * 9

    def test_cubic_1000(self):
        g = regular(1000, 3, seed=1)
        col = linial_coloring(g)
        assert proper_vertex_coloring(g, col.colors)
        assert col.palette <= LINIAL_C * 9 and col.colors.max() < col.palette
        assert col.rounds <= 10

    @given(graphs(max_n=14))
    def test_always_proper(self, g):
        col = linial_coloring(g)
        assert proper_vertex_coloring(g, col.colors)
        assert col.colors.max(initial=0) < max(col.palette, 1)

    @given(graphs(min_n=2, max_n=12))
    def test_node_program_matches_kernel(self, g):
        col = linial_coloring(g)
        outs, tr = run_sync(g, LinialProgram(g.n, g.max_degree()), max_rounds=20)
        assert outs == col.colors.tolist()
        assert tr.total == col.rounds


class TestRulingSets:
    def test_empty_w(self):
        g = cycle(5)
        rs = ruling_set_from_coloring(SparseOracle(g), np.arange(5), 5, [], 1)
        assert rs.members == ()

    def test_triangle_min_colour(self):
        g = cycle(3)
        rs = ruling_set_from_coloring(SparseOracle(g), np.array([2, 0, 1]), 3, None, 1)
        assert rs.members == (1,)

    def test_cubic_512_log_palette(self):
        g = regular(512, 3, seed=2)
        col = linial_coloring(g)
        palette = LINIAL_C * 9
        c = math.ceil(math.log2(palette))
        rs = ruling_set_from_coloring(SparseOracle(g), col.colors, palette, None, c)
        assert check_ruling_set(g, rs.members, 2, c)

    @given(graphs(max_n=14), st.integers(1, 4))
    def test_from_coloring_valid(self, g, c):
        col = linial_coloring(g)
        rs = ruling_set_from_coloring(SparseOracle(g), col.colors, max(col.palette, 1), None, c)
        assert check_ruling_set(g, rs.members, 2, c)

    @given(graphs(max_n=14), st.integers(1, 3), st.data())
    def test_restricted_to_w(self, g, c, data):
        W = data.draw(st.lists(st.integers(0, g.n - 1), unique=True))
        rs = ruling_set_from_coloring(SparseOracle(g), np.arange(g.n), g.n, W, c)
        assert set(rs.members) <= set(W)
        # domination of W is measured in G (paths may leave W)
        assert check_ruling_set(g, rs.members, 2, c, W)

    def test_c5_det(self):
        rs = det_ruling_set_log_delta(cycle(5))
        assert rs.beta <= 1 and check_ruling_set(cycle(5), rs.members, 2, 1)

    def test_singleton(self):
        assert det_ruling_set_log_delta(Graph(1, [])).members == (0,)

    def test_det_8_regular_4096(self):
        g = regular(4096, 8, seed=3)
        rs = det_ruling_set_log_delta(g)
        assert check_ruling_set(g, rs.members, 2, rs.beta)
        # c * b sub-rounds after the Linial stage; b = 2 for the 25Δ² palette
        assert rs.rounds <= 4 * (math.log2(8) + 4) * 2

    def test_rand_empty(self):
        assert rand_ruling_set(SparseOracle(Graph(0, [])), seed=1).members == ()

    @pytest.mark.parametrize("seed", range(5))
    def test_rand_valid(self, seed):
        g = regular(256, 3, seed=seed)
        oracle = PowerOracle(g, 8)
        rs = rand_ruling_set(oracle, seed=seed)
        assert check_ruling_set(g, rs.members, 9, 8 * rs.beta)

    def test_rand_fault_injection(self):
        g = regular(64, 3)
        with pytest.raises(ValidityCheckFailed):
            rand_ruling_set(PowerOracle(g, 8), seed=0, fail_first=1)
        with pytest.raises(ValidityCheckFailed):
            rand_ruling_set(SparseOracle(cycle(8)), seed=0, fail_first=1)

    @pytest.mark.parametrize("kind", ["mis", "det", "rand"])
    def test_power_ruling_set_checked_in_base_graph(self, kind):
        g = generate(GeneratorSpec("regular-high-girth", n=256, d=8, girth_min=6, seed=1))
        rs = power_ruling_set(PowerOracle(g, 8), kind, seed=3)
        assert check_ruling_set(g, rs.members, 9, 8 * rs.beta)
        assert rs.rounds % 8 == 0

    def test_power_ruling_set_unknown_kind(self):
        with pytest.raises(ValueError):
            power_ruling_set(PowerOracle(cycle(4), 8), "fast")


class TestMIS:
    def test_edgeless(self):
        assert mis(Graph(5, [])).members == (0, 1, 2, 3, 4)

    @pytest.mark.parametrize("n", [2, 3, 6])
    def test_clique(self, n):
        assert len(mis(Graph(n, itertools.combinations(range(n), 2))).members) == 1

    def test_c6_sizes(self):
        rs = mis(cycle(6))
        assert len(rs.members) in (2, 3) and check_ruling_set(cycle(6), rs.members, 2, 1)

    @given(graphs(max_n=14))
    def test_maximal_independent(self, g):
        S = set(mis(g).members)
        h = to_nx(g)
        assert nx.is_dominating_set(h, S) if g.n else S == set()
        assert all(not (u in S and v in S) for u, v in g.edges)

    @given(graphs(min_n=1, max_n=12))
    def test_sweep_program_matches_kernel(self, g):
        col = linial_coloring(g)
        outs, _ = run_sync(g, SweepMISProgram(col.colors.tolist()), max_rounds=10**4)
        kernel = ruling_set_from_coloring(SparseOracle(g), col.colors, max(col.palette, 1), None, 1)
        assert [v for v, joined in enumerate(outs) if joined] == list(kernel.members)


class TestEdgeSets:
    def test_perfect_matching_input(self):
        g = Graph(6, [(0, 1), (2, 3), (4, 5)])
        assert set(maximal_matching(g).edges) == set(g.edges)

    def test_triangle(self):
        assert len(maximal_matching(cycle(3)).edges) == 1

    def test_p4(self):
        M = set(maximal_matching(path(4)).edges)
        assert M in ({(1, 2)}, {(0, 1), (2, 3)})

    @given(graphs(max_n=12))
    def test_matching_valid(self, g):
        assert check_matching(g, maximal_matching(g).edges)

    def test_two_edge_single(self):
        assert two_edge_ruling_set(Graph(2, [(0, 1)])).edges == ((0, 1),)

    def test_two_edge_p5(self):
        assert check_two_edge_ruling(path(5), two_edge_ruling_set(path(5)).edges)

    def test_two_edge_cubic(self):
        g = regular(256, 3, seed=4)
        assert check_two_edge_ruling(g, two_edge_ruling_set(g).edges)

    @given(graphs(max_n=12))
    def test_two_edge_valid(self, g):
        assert check_two_edge_ruling(g, two_edge_ruling_set(g).edges)


class TestGreedy:
    def test_single_edge_list(self):
        phi, _ = greedy_list_edge_coloring(Graph(2, [(0, 1)]), {(0, 1): [7]})
        assert phi == {(0, 1): 7}

    def test_triangle_lists_of_three(self):
        g = cycle(3)
        phi, _ = greedy_list_edge_coloring(g, {e: [1, 2, 3] for e in g.edges})
        assert len(set(phi.values())) == 3 and check_proper_coloring(g, phi)

    def test_list_too_small(self):
        with pytest.raises(ListTooSmall):
            greedy_list_edge_coloring(path(3), {(0, 1): [1], (1, 2): [1, 2]})

    @pytest.mark.parametrize("delta", [3, 5, 8])
    def test_degree_minus_one_palette(self, delta):
        # a (Δ-1)-regular graph gets a proper colouring from [2Δ-3]
        g = regular(60, delta - 1, seed=delta)
        phi, rounds = greedy_list_edge_coloring(g, palette=2 * delta - 3)
        assert check_proper_coloring(g, phi, 2 * delta - 3)
        assert rounds > 0

    @given(graphs(max_n=10), st.data())
    def test_random_lists(self, g, data):
        lists = {e: data.draw(st.lists(st.integers(1, 30), min_size=g.edge_degree(e) + 1,
                                       max_size=g.edge_degree(e) + 3, unique=True)) for e in g.edges}
        phi, _ = greedy_list_edge_coloring(g, lists)
        assert check_proper_coloring(g, phi)
        assert all(phi[e] in lists[e] for e in g.edges)

    def test_rounds_flat_in_n(self):
        rounds = [greedy_list_edge_coloring(regular(n, 7, seed=1), palette=13)[1] for n in (256, 1024, 4096)]
        assert max(rounds) - min(rounds) <= 2
