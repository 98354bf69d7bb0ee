import pytest

from mopdom.dual_tree import (
    L1, L2, L5, T_DOUBLE, T_PRIME, TREE_PATTERNS, LeafWalk, NoBranchNodeError,
    PatternAnomaly, bracket_codes, build_dual, iter_pattern_matches, leaf_context,
    leg_code, long_leg_class, long_region_shape, match_maximal_subtree, name_walk,
    node_code, root_at_diametrical_leaf, rooted_short_shape, tree_diameter,
)
from mopdom.generators import enumerate_triangulations, family
from mopdom.mop_core import InvalidMopError, Mop, MopError, internal_triangles

SNOWFLAKE = Mop(6, frozenset({(0, 2), (2, 4), (0, 4)}))

# Branch triangle (0,3,5) with legs of one and two triangles beside a fan on 5..0.
# The two-triangle leg ends in a triangle holding the apex 3 when 0..3 is split by (1,3).
H9_REGION = Mop(10, frozenset({(0, 3), (0, 5), (3, 5), (1, 3), (0, 6), (0, 7), (0, 8)}))
H10_REGION = Mop(10, frozenset({(0, 3), (0, 5), (3, 5), (0, 2), (0, 6), (0, 7), (0, 8)}))


def two_short_legs(first: tuple, second: tuple) -> Mop:
    """Branch triangle (0,3,6) with two-triangle legs on 0..3 and 3..6 and a fan on 6..0."""
    return Mop(11, frozenset({(0, 3), (3, 6), (0, 6), (0, 7), (0, 8), (0, 9), first, second}))


class TestBuildDual:
    def test_fan_is_a_path(self):
        t = build_dual(family('fan', 7))

        assert len(t.nodes) == 5
        assert t.is_path
        assert t.leaves == [0, 4]
        assert len(t.edges) == 4

    def test_serpentine_is_a_path(self):
        t = build_dual(family('serpentine', 8))

        assert len(t.nodes) == 6
        assert t.is_path

    def test_snowflake_is_a_star(self):
        t = build_dual(SNOWFLAKE)

        assert t.nodes == [(0, 1, 2), (0, 2, 4), (0, 4, 5), (2, 3, 4)]
        assert t.branch_nodes == [1]
        assert t.shared_edge(0, 1) == (0, 2)

    def test_internal_triangles_are_branch_nodes(self):
        for m in enumerate_triangulations(9):
            t = build_dual(m)
            internal = {t.nodes.index(tri) for tri in internal_triangles(m)}
            assert internal == set(t.branch_nodes)
            assert max(t.degree(v) for v in range(len(t.nodes))) <= 3

    def test_rejects_invalid(self):
        with pytest.raises(InvalidMopError):
            build_dual(Mop(7, frozenset({(0, 2)})))

    def test_not_adjacent(self):
        t = build_dual(family('fan', 7))

        with pytest.raises(MopError):
            t.shared_edge(0, 4)


class TestRooting:
    def test_root_is_smallest_diametrical_leaf(self):
        t = root_at_diametrical_leaf(build_dual(SNOWFLAKE))

        assert t.root == 0
        assert t.children[0] == [1]
        assert t.children[1] == [2, 3]
        assert t.depth[3] == 2
        assert t.parent[1] == 0

    def test_root_lies_on_a_diameter(self):
        for m in enumerate_triangulations(10):
            t = root_at_diametrical_leaf(build_dual(m))
            assert max(t.depth.values()) == tree_diameter(t)
            assert t.degree(t.root) == 1

    def test_dump(self):
        t = root_at_diametrical_leaf(build_dual(SNOWFLAKE))

        assert t.dump().splitlines()[0] == "0: (0,1,2) -> [1]"
        assert t.dump().splitlines()[1] == "1: (0,2,4) -> [2, 3]"

    def test_subtree_vertices(self):
        t = root_at_diametrical_leaf(build_dual(SNOWFLAKE))

        assert t.subtree(1) == [1, 2, 3]
        assert t.subtree_vertices(1) == {0, 2, 3, 4, 5}


class TestLeafWalk:
    def test_fan_walk_pivots_on_the_hub(self):
        fan = family('fan', 7)
        walk = name_walk(build_dual(fan).nodes)

        assert walk.names == {1: 1, 2: 0, 3: 2, 4: 3, 5: 4, 6: 5, 7: 6}
        assert walk.pivots == {3: 2, 4: 2, 5: 2}
        assert walk.u(2) == 0

    def test_two_triangles(self):
        walk = name_walk([(0, 1, 2), (0, 2, 3)])

        assert walk.names[1] == 1
        assert walk.names[4] == 3
        assert walk.pivots == {}

    def test_disconnected_walk(self):
        with pytest.raises(MopError):
            name_walk([(0, 1, 2), (3, 4, 5)])

    def test_long_region_shapes(self):
        h1 = LeafWalk(names={}, pivots={3: 2, 4: 4, 5: 5, 6: 5})
        h2 = LeafWalk(names={}, pivots={3: 2, 4: 4, 5: 4, 6: 4})
        h6 = LeafWalk(names={}, pivots={3: 2, 4: 4, 5: 5, 6: 5, 7: 7})
        h7 = LeafWalk(names={}, pivots={3: 2, 4: 4, 5: 4, 6: 4, 7: 4})

        assert long_region_shape(h1, 5) == 'H1'
        assert long_region_shape(h2, 5) == 'H2'
        assert long_region_shape(h6, 6) == 'H6'
        assert long_region_shape(h7, 6) == 'H7'
        assert long_leg_class(h1) == 'a'
        assert long_leg_class(h2) == 'b'

    def test_fan_walk_has_no_long_region(self):
        walk = name_walk(build_dual(family('fan', 9)).nodes)

        assert long_region_shape(walk, 5) == 'NONE'
        assert long_leg_class(walk) is None


class TestLeafContext:
    def test_path_has_no_branch(self):
        fan = family('fan', 7)

        with pytest.raises(NoBranchNodeError):
            leaf_context(fan, build_dual(fan), 0)

    def test_snowflake_leaf(self):
        t = build_dual(SNOWFLAKE)
        context = leaf_context(SNOWFLAKE, t, 0)

        assert context.nearest_deg3 == 1
        assert context.dist == 1
        assert context.path_triangles == ((0, 1, 2), (0, 2, 4))

    def test_not_a_leaf(self):
        t = build_dual(SNOWFLAKE)

        with pytest.raises(MopError):
            leaf_context(SNOWFLAKE, t, 1)


class TestShapes:
    def test_codes(self):
        assert leg_code(2) == "(())"
        assert node_code(L2, L1) == "((())())"
        assert T_PRIME == node_code(L1, L2)
        assert T_DOUBLE == "((())(()))"

    def test_bracket_codes(self):
        t = root_at_diametrical_leaf(build_dual(SNOWFLAKE))
        codes = bracket_codes(t)

        assert codes[1] == node_code(L1, L1)
        assert codes[0] == node_code(node_code(L1, L1))

    def test_catalogue(self):
        ids = [p.pattern_id for p in TREE_PATTERNS]

        assert len(TREE_PATTERNS) == 28
        assert ids == [f"T{i}" for i in range(1, 29)]
        assert TREE_PATTERNS[0].size == 3
        assert TREE_PATTERNS[0].leaves == 2
        assert TREE_PATTERNS[27].size == 13
        assert any(L5 in code for code in TREE_PATTERNS[15].codes)


class TestMatching:
    def test_cherry_matches_t1(self):
        t = root_at_diametrical_leaf(build_dual(SNOWFLAKE))
        match = match_maximal_subtree(t)

        assert match.pattern_id == 'T1'
        assert match.root == 1

    def test_matches_are_deepest_first(self):
        for m in enumerate_triangulations(10):
            t = build_dual(m)
            if t.is_path:
                continue
            t = root_at_diametrical_leaf(t)
            depths = [t.depth[match.root] for match in iter_pattern_matches(t)]
            assert depths == sorted(depths, reverse=True)

    def test_unrooted_tree(self):
        with pytest.raises(MopError):
            list(iter_pattern_matches(build_dual(SNOWFLAKE)))

    def test_path_has_no_pattern(self):
        t = root_at_diametrical_leaf(build_dual(family('fan', 9)))

        with pytest.raises(NoBranchNodeError):
            match_maximal_subtree(t)

    def test_no_catalogued_subtree(self):
        # A branch triangle with two legs of length three has no catalogued shape
        m = Mop(12, frozenset({
            (0, 4), (4, 8), (0, 8),
            (0, 2), (0, 3),
            (4, 6), (4, 7),
            (8, 10), (8, 11),
        }))
        t = root_at_diametrical_leaf(build_dual(m))

        with pytest.raises(PatternAnomaly):
            match_maximal_subtree(t)


class TestShortRegionShapes:
    def leaf_shape(self, m: Mop, leaf_triangle: tuple) -> str:
        t = build_dual(m)
        return leaf_context(m, t, t.nodes.index(leaf_triangle)).region_shape

    def test_h9(self):
        t = build_dual(H9_REGION)
        context = leaf_context(H9_REGION, t, t.nodes.index((3, 4, 5)))

        assert context.region_shape == 'H9'
        assert context.dist == 1
        assert t.nodes[context.nearest_deg3] == (0, 3, 5)

    def test_h10(self):
        assert self.leaf_shape(H10_REGION, (3, 4, 5)) == 'H10'

    def test_shape_is_the_same_from_either_leg(self):
        assert self.leaf_shape(H9_REGION, (1, 2, 3)) == 'H9'
        assert self.leaf_shape(H10_REGION, (0, 1, 2)) == 'H10'

    def test_two_legs_of_length_two(self):
        assert self.leaf_shape(two_short_legs((1, 3), (3, 5)), (1, 2, 3)) == 'H11'
        assert self.leaf_shape(two_short_legs((1, 3), (4, 6)), (1, 2, 3)) == 'H12'
        assert self.leaf_shape(two_short_legs((0, 2), (4, 6)), (0, 1, 2)) == 'H13'

    def test_rooted_shape(self):
        t = root_at_diametrical_leaf(build_dual(H9_REGION))
        branch = t.nodes.index((0, 3, 5))

        # Should root at the far end of the fan, leaving both short legs below the branch
        assert t.nodes[t.root] == (0, 8, 9)
        assert rooted_short_shape(t, branch) == 'H9'
        assert rooted_short_shape(t, t.nodes.index((0, 5, 6))) == 'NONE'

    def test_rooted_shape_needs_a_root(self):
        with pytest.raises(MopError):
            rooted_short_shape(build_dual(H9_REGION), 1)
