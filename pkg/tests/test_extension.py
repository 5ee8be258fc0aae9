import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from edgecolor.extension import (
    BudgetExceeded,
    InvariantBroken,
    LayerView,
    NoExtension,
    PartialEdgeColoring,
    PreconditionViolation,
    available_colors,
    boundary_colors,
    brute_force_extension_exists,
    color_even_cycle,
    extend_easy_component,
    extend_star,
    extend_tree,
    extend_tree_exact,
    saturating_matching,
    switch_colors,
    switch_decision,
)
from edgecolor.graph import Graph, cycle, path, star_gadget

STAR = star_gadget(3)
ROOT_EDGES = [(0, 1), (0, 2), (0, 3)]


def star_phi(*leaf_pairs):
    return PartialEdgeColoring(4, oracles.star_configuration(leaf_pairs))


class TestAvailable:
    def test_isolated_edge_full_palette(self):
        g = Graph(2, [(0, 1)])
        assert available_colors(g, PartialEdgeColoring(6), (0, 1)) == set(range(1, 7))

    def test_three_neighbours(self):
        g = Graph(4, [(0, 1), (0, 2), (0, 3), (1, 3)])
        phi = PartialEdgeColoring(4, {(0, 2): 1, (0, 3): 2, (1, 3): 3})
        assert available_colors(g, phi, (0, 1)) == {4}

    def test_surrounded(self):
        g = star_gadget(3)
        phi = PartialEdgeColoring(4, {(0, 2): 1, (0, 3): 2, (1, 4): 3, (1, 5): 4})
        assert available_colors(g, phi, (0, 1)) == set()


class TestMatching:
    def test_hall_violation(self):
        assert saturating_matching(["a", "b"], {"a": [1], "b": [1]}) is None

    def test_needs_augmenting_path(self):
        m = saturating_matching(["a", "b"], {"a": [1, 2], "b": [1]})
        assert m == {"a": 2, "b": 1}

    def test_empty(self):
        assert saturating_matching([], {}) == {}


class TestStar:
    def test_forbidden_configuration(self):
        phi = star_phi((1, 2), (1, 2), (1, 2))
        with pytest.raises(NoExtension):
            extend_star(STAR, phi, 0)
        assert brute_force_extension_exists(STAR, phi, ROOT_EDGES)[0] is False
        assert oracles.extension_exists(STAR, phi.colors, ROOT_EDGES, 4) is None

    def test_three_outside_colours_extend(self):
        phi = star_phi((1, 2), (1, 2), (1, 3))
        out = extend_star(STAR, phi, 0)
        assert oracles.is_proper(STAR, out.colors)
        assert all(e in out.colors for e in ROOT_EDGES)
        assert {e: c for e, c in out.colors.items() if e in phi.colors} == phi.colors

    def test_nothing_to_colour(self):
        phi = PartialEdgeColoring(4, {(0, 1): 1, (0, 2): 2, (0, 3): 3})
        assert extend_star(STAR, phi, 0) == phi

    @given(st.tuples(*[st.sampled_from(oracles.star_leaf_options())] * 3))
    def test_agrees_with_oracle(self, choice):
        phi = PartialEdgeColoring(4, oracles.star_configuration(choice))
        expect = oracles.extension_exists(STAR, phi.colors, ROOT_EDGES, 4) is not None
        try:
            out = extend_star(STAR, phi, 0)
        except NoExtension:
            assert not expect
        else:
            assert expect and oracles.is_proper(STAR, out.colors)

    def test_colourful_boundary_always_extends(self):
        # |phi(N_E(V_T))| >= Δ makes Hall's condition hold
        for choice in [((1, 2), (3, 4), (None, None)), ((1, 2), (1, 3), (2, 3))]:
            phi = PartialEdgeColoring(4, oracles.star_configuration(choice))
            assert len(boundary_colors(STAR, phi, [0, 1, 2, 3])) >= 3
            extend_star(STAR, phi, 0)


class TestBruteForce:
    def test_empty_target(self):
        assert brute_force_extension_exists(cycle(5), PartialEdgeColoring(2), []) == (True, {})

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            brute_force_extension_exists(path(20), PartialEdgeColoring(3), path(20).edges, budget=5)

    def test_odd_cycle_two_colours(self):
        assert brute_force_extension_exists(cycle(5), PartialEdgeColoring(2), cycle(5).edges)[0] is False

    def test_witness_is_proper(self):
        ok, wit = brute_force_extension_exists(cycle(6), PartialEdgeColoring(2), cycle(6).edges)
        assert ok and oracles.is_proper(cycle(6), wit)


def spider(legs: int, length: int, extra: int = 0) -> Graph:
    """Root 0 with ``legs`` paths of ``length`` edges; each far end gets ``extra`` pendants."""
    edges, nxt = [], 1
    ends = []
    for _ in range(legs):
        prev = 0
        for _ in range(length):
            edges.append((prev, nxt))
            prev, nxt = nxt, nxt + 1
        ends.append(prev)
    for x in ends:
        for _ in range(extra):
            edges.append((x, nxt))
            nxt += 1
    return Graph(nxt, edges)


class TestTree:
    def test_layer_view(self):
        view = LayerView.build(0, [(0, 1), (1, 2), (0, 3)])
        assert view.layers == {0: [0], 1: [1, 3], 2: [2]}
        assert view.edge_layers == {0: [(0, 1), (0, 3)], 1: [(1, 2)]}
        assert view.child_end((1, 2)) == 2

    def test_disconnected_tree_rejected(self):
        with pytest.raises(PreconditionViolation):
            LayerView.build(0, [(0, 1), (2, 3)])

    def test_ell_one_reduces_to_star(self):
        phi = star_phi((1, 2), (1, 2), (1, 3))
        out, info = extend_tree(STAR, phi, 0, ROOT_EDGES, delta=3)
        assert info == {"ell": 1, "fallback": False}
        assert out == extend_star(STAR, phi, 0)

    def test_tree_not_colourful(self):
        phi = star_phi((1, 2), (1, 2), (1, 2))
        with pytest.raises(PreconditionViolation):
            extend_tree(STAR, phi, 0, ROOT_EDGES, delta=3)

    def test_coloured_tree_edge_rejected(self):
        phi = star_phi((1, 2), (1, 3), (2, 3))
        phi[(0, 1)] = 4
        with pytest.raises(PreconditionViolation):
            extend_tree(STAR, phi, 0, ROOT_EDGES, delta=3)

    def test_depth_two_tree_cubic(self):
        # three legs of length 2; the depth-2 leaves carry the colourful condition
        g = spider(3, 2, extra=2)
        tree = [e for e in g.edges if max(e) <= 6]
        leaves = [2, 4, 6]
        colors = {}
        for leaf, pair in zip(leaves, [(1, 2), (1, 3), (2, 3)]):
            for f, c in zip([e for e in g.edges if leaf in e and e not in tree], pair):
                colors[f] = c
        phi = PartialEdgeColoring(4, colors)
        out, info = extend_tree(g, phi, 0, tree, delta=3)
        assert info["ell"] == 2
        assert oracles.is_proper(g, out.colors) and all(e in out.colors for e in tree)
        assert len({out.colors[e] for e in tree}) >= 3

    @pytest.mark.parametrize("seed", range(40))
    @pytest.mark.parametrize("delta", [4, 5])
    def test_random_instances_agree_with_oracle(self, delta, seed):
        rng = oracles.rng_for(1000 * delta + seed)
        for _ in range(200):
            inst = oracles.tree_instance(rng, delta)
            if inst and oracles.colorful_layer_exists(inst[0], inst[1], inst[2], inst[3], delta):
                break
        else:
            pytest.skip("no colourful draw")
        g, colors, root, tree = inst
        phi = PartialEdgeColoring(2 * delta - 2, colors)
        out, _ = extend_tree(g, phi, root, tree, delta)
        assert oracles.is_proper(g, out.colors)
        assert all(out.colors.get(e) == c for e, c in colors.items())
        assert oracles.extension_exists(g, colors, tree, 2 * delta - 2) is not None

    @pytest.mark.parametrize("seed", range(20))
    def test_exact_matches_oracle(self, seed):
        rng = oracles.rng_for(seed)
        inst = None
        while inst is None:
            inst = oracles.tree_instance(rng, 4, max_edges=10)
        g, colors, root, tree = inst
        phi = PartialEdgeColoring(6, colors)
        expect = oracles.extension_exists(g, colors, tree, 6) is not None
        try:
            out = extend_tree_exact(g, phi, root, tree)
        except NoExtension:
            assert not expect
        else:
            assert expect and oracles.is_proper(g, out.colors)


class TestEvenCycle:
    C4 = [(0, 1), (1, 2), (2, 3), (0, 3)]

    def test_equal_lists_alternate(self):
        out = color_even_cycle(self.C4, {e: [1, 2] for e in self.C4})
        assert [out[e] for e in self.C4] == [1, 2, 1, 2]

    def test_one_private_colour(self):
        lists = {e: [1, 2] for e in self.C4}
        lists[(1, 2)] = [1, 3]
        out = color_even_cycle(self.C4, lists)
        assert out[(1, 2)] == 3
        assert all(out[e] in lists[e] for e in self.C4)
        assert all(out[self.C4[i]] != out[self.C4[(i + 1) % 4]] for i in range(4))

    def test_odd_cycle_rejected(self):
        tri = [(0, 1), (1, 2), (0, 2)]
        with pytest.raises(PreconditionViolation):
            color_even_cycle(tri, {e: [1, 2] for e in tri})

    def test_short_list_rejected(self):
        with pytest.raises(PreconditionViolation):
            color_even_cycle(self.C4, {e: [1] for e in self.C4})

    @given(st.integers(2, 5), st.data())
    def test_random_lists(self, half, data):
        L = 2 * half
        edges = [(i, (i + 1) % L) for i in range(L)]
        lists = {e: data.draw(st.lists(st.integers(1, 4), min_size=2, max_size=3, unique=True)) for e in edges}
        out = color_even_cycle(edges, lists)
        assert all(out[e] in lists[e] for e in edges)
        assert all(out[edges[i]] != out[edges[(i + 1) % L]] for i in range(L))


class TestEasyComponent:
    def test_path_component(self):
        g = path(6)
        out, info = extend_easy_component(g, PartialEdgeColoring(2), range(6), delta=2)
        assert info["case"] == "low-degree" and oracles.is_proper(g, out.colors) and len(out.colors) == 5

    def test_c6_palette_two(self):
        g = cycle(6)
        out, info = extend_easy_component(g, PartialEdgeColoring(2), range(6), delta=2)
        assert info == {"case": "even-cycle", "cycle": 6} and oracles.is_proper(g, out.colors)

    def test_odd_cycle_rejected(self):
        with pytest.raises(PreconditionViolation):
            extend_easy_component(cycle(5), PartialEdgeColoring(2), range(5), delta=2)

    def test_nothing_uncoloured(self):
        phi = PartialEdgeColoring(2, {(0, 1): 1})
        assert extend_easy_component(path(2), phi, [0, 1])[1] == {"case": "empty"}

    def test_cube_with_coloured_boundary(self):
        # Q3 plus one pendant per vertex; pendants pre-coloured, cube edges extend from [2Δ-2]
        cube = [(a, b) for a in range(8) for b in range(8) if a < b and bin(a ^ b).count("1") == 1]
        g = Graph(16, cube + [(v, v + 8) for v in range(8)])
        phi = PartialEdgeColoring(6, {(v, v + 8): 1 + v % 3 for v in range(8)})
        out, info = extend_easy_component(g, phi, range(8), edges=cube, delta=4)
        assert info["case"] == "even-cycle"
        assert oracles.is_proper(g, out.colors) and all(e in out.colors for e in cube)


def flip_example():
    leaf_edges = {1: [(1, 4), (1, 5)], 2: [(2, 6), (2, 7)], 3: [(3, 8), (3, 9)]}
    colors = {es[0]: 1 for es in leaf_edges.values()} | {es[1]: 2 for es in leaf_edges.values()}
    return PartialEdgeColoring(4, colors), [1, 2, 3], ((1, 4), (2, 6))


class TestSwitch:
    def test_flip_figure(self):
        phi, layer, pair = flip_example()
        assert boundary_colors(STAR, phi, layer) == {1, 2}
        out, e = switch_colors(STAR, phi, layer, pair, delta=3)
        assert e == (1, 4) and out[(1, 4)] == 4
        assert boundary_colors(STAR, out, layer) == {1, 2, 4}
        extend_star(STAR, out, 0)

    def test_already_colourful(self):
        phi, layer, pair = flip_example()
        phi[(3, 9)] = 3
        out, e = switch_colors(STAR, phi, layer, pair, delta=3)
        assert e is None and out == phi

    def test_adjacent_pair_rejected(self):
        phi, layer, _ = flip_example()
        with pytest.raises(PreconditionViolation):
            switch_colors(STAR, phi, layer, ((1, 4), (1, 5)), delta=3)

    def test_wrong_depth_rejected(self):
        phi, _, pair = flip_example()
        with pytest.raises(PreconditionViolation):
            switch_colors(STAR, phi, [0], pair, delta=3)

    def test_top_colour_present_rejected(self):
        phi, layer, pair = flip_example()
        phi[(3, 9)] = 4
        with pytest.raises(PreconditionViolation):
            switch_colors(STAR, phi, layer, pair, delta=3)

    def test_decision_matches(self):
        phi, layer, pair = flip_example()
        assert switch_decision(STAR, phi, layer, pair, 3) == (1, 4)

    @pytest.mark.parametrize("seed", range(30))
    @pytest.mark.parametrize("tight", [True, False])
    def test_random_instances(self, seed, tight):
        rng = oracles.rng_for(seed)
        delta = 4 + seed % 3
        inst = None
        while inst is None:
            inst = oracles.switch_instance(rng, delta, tight)
        g, colors, layer, pair = inst
        phi = PartialEdgeColoring(2 * delta - 2, colors)
        out, e = switch_colors(g, phi, layer, pair, delta)
        changed = {f for f in set(colors) | set(out.colors) if colors.get(f) != out.colors.get(f)}
        assert len(changed) <= 1 and changed <= set(pair)
        assert oracles.is_proper(g, out.colors)
        assert len(oracles.crossing_colors(g, out.colors, layer)) >= delta
        if tight:
            assert e is not None


def test_invariant_check_catches_conflict():
    from edgecolor.extension import _assert_extension

    g = path(3)
    with pytest.raises(InvariantBroken):
        _assert_extension(g, PartialEdgeColoring(2), PartialEdgeColoring(2, {(0, 1): 1, (1, 2): 1}), g.edges)
