import pytest

from mopdom.generators import enumerate_triangulations, family
from mopdom.mop_core import (
    InvalidMopError, Mop, MopError, MopMetrics, NotOuterEdgeError, Region,
    RegionDeletionError, common_neighbors_across, contract_outer_edge, contraction_map,
    cut_region, degree, degree_two_count, delete_ear_region, disjunctive_bound, distance,
    find_partition_diagonal, insert_ear, internal_triangles, is_internal_triangle,
    obs3_pairs, partition_side, validate, window_hub,
)

FAN5 = Mop(5, frozenset({(0, 2), (0, 3)}))
SNOWFLAKE = Mop(6, frozenset({(0, 2), (2, 4), (0, 4)}))


class TestMop:
    def test_pairs_are_normalized(self):
        m = Mop(5, frozenset({(2, 0), (3, 0)}))

        assert m == FAN5
        assert m.sorted_diagonals == [(0, 2), (0, 3)]

    def test_derived_adjacency(self):
        assert FAN5.neighbors[0] == {1, 2, 3, 4}
        assert FAN5.neighbors[1] == {0, 2}
        assert FAN5.second_neighbors[1] == {3, 4}
        assert FAN5.faces == [(0, 1, 2), (0, 2, 3), (0, 3, 4)]

    def test_edge_count(self):
        for m in enumerate_triangulations(7):
            assert len(m.edges) == 2 * 7 - 3

    def test_networkx_view(self):
        g = SNOWFLAKE.to_networkx()

        assert g.number_of_nodes() == 6
        assert g.number_of_edges() == 9


class TestValidate:
    def test_fan_is_valid(self):
        report = validate(FAN5)

        assert report.is_valid
        assert report.issues == []

    def test_crossing_diagonals(self):
        report = validate(Mop(6, frozenset({(0, 2), (1, 3), (0, 3)})))

        assert not report.is_valid
        # Should name the crossing pair
        assert any("{0,2} crosses {1,3}" in issue for issue in report.issues)

    def test_wrong_diagonal_count(self):
        report = validate(Mop(7, frozenset({(0, 2), (0, 3)})))

        assert not report.is_valid
        assert any("|diagonals| = 2 != 4" in issue for issue in report.issues)

    def test_boundary_edge_as_diagonal(self):
        report = validate(Mop(5, frozenset({(0, 1), (0, 3)})))

        assert not report.is_valid
        assert any("boundary edge" in issue for issue in report.issues)

    def test_out_of_range(self):
        report = validate(Mop(5, frozenset({(0, 2), (0, 7)})))

        assert any("out of range" in issue for issue in report.issues)

    def test_too_small(self):
        assert not validate(Mop(2, frozenset())).is_valid

    def test_every_enumerated_mop_passes_face_traversal(self):
        for n in range(3, 9):
            for m in enumerate_triangulations(n):
                assert validate(m, traverse_faces=True).is_valid


class TestDegrees:
    def test_fan_degrees(self):
        assert degree(FAN5, 0) == 4
        assert degree(FAN5, 1) == 2

    def test_handshake(self):
        for m in enumerate_triangulations(7):
            assert sum(degree(m, v) for v in range(m.n)) == 2 * (2 * m.n - 3)

    def test_degree_out_of_range(self):
        with pytest.raises(InvalidMopError):
            degree(FAN5, 5)

    def test_degree_two_count(self):
        assert degree_two_count(family('fan', 7)) == 2
        assert degree_two_count(SNOWFLAKE) == 3
        for m in enumerate_triangulations(4):
            assert degree_two_count(m) == 2

    def test_internal_triangles_account_for_extra_ears(self):
        # Should hold for every mop with n >= 4
        for m in enumerate_triangulations(9):
            assert degree_two_count(m) == len(internal_triangles(m)) + 2


class TestDistance:
    def test_distance(self):
        fan7 = family('fan', 7)

        assert distance(fan7, 3, 3) == 0
        assert distance(fan7, 1, 2) == 1
        assert distance(fan7, 1, 6) == 2

    def test_distance_out_of_range(self):
        with pytest.raises(InvalidMopError):
            distance(FAN5, 0, 9)


class TestContraction:
    def test_contract_fan(self):
        assert contract_outer_edge(FAN5, (1, 2)) == Mop(4, frozenset({(0, 2)}))

    def test_contract_to_triangle(self):
        result = contract_outer_edge(Mop(4, frozenset({(0, 2)})), (0, 1))

        assert result == Mop(3, frozenset())
        assert validate(result).is_valid

    def test_wrap_edge_merges_into_zero(self):
        mapping = contraction_map(5, (0, 4))

        assert mapping[4] == 0
        assert mapping[1] == 1

    def test_every_contraction_is_a_mop(self):
        for m in enumerate_triangulations(8):
            for i in range(m.n):
                assert validate(contract_outer_edge(m, (i, (i + 1) % m.n))).is_valid

    def test_not_outer_edge(self):
        with pytest.raises(NotOuterEdgeError):
            contract_outer_edge(FAN5, (0, 2))

    def test_triangle_cannot_contract(self):
        with pytest.raises(InvalidMopError):
            contract_outer_edge(Mop(3, frozenset()), (0, 1))


class TestEarRegions:
    def test_delete_single_ear(self):
        result, index_map = delete_ear_region(FAN5, {4})

        assert result == Mop(4, frozenset({(0, 2)}))
        assert index_map == {0: 0, 1: 1, 2: 2, 3: 3}

    def test_delete_non_ear(self):
        with pytest.raises(RegionDeletionError):
            delete_ear_region(FAN5, {2})

    def test_delete_from_strip(self):
        m = Mop(6, frozenset({(0, 2), (2, 5), (2, 4)}))

        result, index_map = delete_ear_region(m, {1})

        assert result.n == 5
        assert validate(result).is_valid
        assert index_map[2] == 1

    def test_insert_then_delete_restores(self):
        for m in enumerate_triangulations(7):
            for i in range(m.n):
                grown = insert_ear(m, i)
                new_vertex = i + 1 if i < m.n - 1 else m.n
                assert degree(grown, new_vertex) == 2
                assert delete_ear_region(grown, {new_vertex}).mop == m


class TestPartition:
    def test_fan7(self):
        assert find_partition_diagonal(family('fan', 7)) == ((0, 4), 4)

    def test_fan6(self):
        assert find_partition_diagonal(family('fan', 6)) == ((0, 4), 4)

    def test_every_mop_has_a_partition(self):
        for n in (6, 9, 10):
            for m in enumerate_triangulations(n):
                d, count = find_partition_diagonal(m)
                assert count in (4, 5, 6)
                assert len(partition_side(m, d, count)) == count + 1

    def test_too_small(self):
        with pytest.raises(InvalidMopError):
            find_partition_diagonal(FAN5)

    def test_cut_region(self):
        region = cut_region(family('fan', 7), (0, 4), 2)

        assert region == Region(vertices=(0, 1, 2, 3, 4), closing_diagonal=(0, 4))
        assert region.interior == (1, 2, 3)
        assert region.outer_edge_count == 4


class TestTriangles:
    def test_internal_triangle(self):
        assert is_internal_triangle(SNOWFLAKE, (0, 2, 4))
        assert not is_internal_triangle(FAN5, (0, 1, 2))

    def test_not_a_face(self):
        with pytest.raises(MopError):
            is_internal_triangle(FAN5, (1, 2, 3))


class TestObservations:
    def test_common_neighbors_across(self):
        assert common_neighbors_across(SNOWFLAKE, (0, 2)) == (1, 4)

    @pytest.mark.parametrize("n", [4, 5, 6, 7, 8])
    def test_every_diagonal_separates_two_faces(self, n):
        for m in enumerate_triangulations(n):
            faces = set(m.faces)
            for a, b in m.sorted_diagonals:
                inside, outside = common_neighbors_across(m, (a, b))

                assert a < inside < b
                assert not a < outside < b
                assert tuple(sorted((a, b, inside))) in faces
                assert tuple(sorted((a, b, outside))) in faces

    def test_five_vertex_hub(self):
        # Every 5-vertex mop has a vertex adjacent to all others
        for m in enumerate_triangulations(5):
            assert window_hub(m, 0) is not None
        assert window_hub(family('fan', 7), 0) == 0

    def test_window_without_closing_edge(self):
        assert window_hub(family('fan', 7), 1) is None

    def test_obs3_pairs(self):
        assert obs3_pairs(8)[0] == (0, 4)
        assert obs3_pairs(7)[5] == (5, 2)


class TestMetrics:
    def test_bound_and_slack(self):
        metrics = MopMetrics(n=7, k=2, internal_triangles=0, gamma=1, gamma2d=1)

        assert metrics.bound == 2
        assert metrics.slack == 1

    def test_slack_without_exact_value(self):
        assert MopMetrics(n=9, k=2, internal_triangles=0).slack is None

    def test_disjunctive_bound(self):
        assert disjunctive_bound(7, 2) == 2
        assert disjunctive_bound(13, 2) == 3
