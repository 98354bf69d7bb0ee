from collections import Counter

import networkx as nx
import pytest

from mopdom.dual_tree import build_dual
from mopdom.generators import (
    CanonicalCode, canonical_classes, canonical_form, catalan, enumerate_triangulations,
    family, random_mop, random_mops, triangulation_count,
)
from mopdom.mop_core import InvalidMopError, Mop, degree, validate

SNOWFLAKE = Mop(6, frozenset({(0, 2), (2, 4), (0, 4)}))


def relabel(m: Mop, f) -> Mop:
    return Mop(m.n, frozenset((f(a), f(b)) for a, b in m.diagonals))


class TestEnumeration:
    @pytest.mark.parametrize("n,expected", [(3, 1), (4, 2), (5, 5), (7, 42), (10, 1430)])
    def test_catalan_counts(self, n, expected):
        mops = list(enumerate_triangulations(n))

        assert len(mops) == expected
        assert len(set(mops)) == expected
        assert triangulation_count(n) == expected

    @pytest.mark.slow
    def test_twelve(self):
        assert sum(1 for _ in enumerate_triangulations(12)) == 16796

    def test_all_valid(self):
        for m in enumerate_triangulations(8):
            assert validate(m).is_valid

    def test_apex_shards_partition_the_set(self):
        shards = [list(enumerate_triangulations(8, apex=a)) for a in range(1, 7)]

        assert sum(len(s) for s in shards) == catalan(6)
        for a, shard in enumerate(shards, start=1):
            for m in shard:
                # the triangle on {0, n-1} has apex a
                assert m.has_edge(0, a) and m.has_edge(a, 7)

    def test_out_of_range(self):
        with pytest.raises(InvalidMopError):
            list(enumerate_triangulations(17))
        with pytest.raises(InvalidMopError):
            list(enumerate_triangulations(2))
        with pytest.raises(InvalidMopError):
            list(enumerate_triangulations(6, apex=5))


class TestCanonicalForm:
    @pytest.mark.parametrize("n,classes", [(6, 3), (7, 4), (8, 12)])
    def test_class_counts(self, n, classes):
        assert len(canonical_classes(enumerate_triangulations(n))) == classes

    def test_rotation_and_reflection(self):
        fan = family('fan', 5)
        code = canonical_form(fan)

        assert canonical_form(relabel(fan, lambda v: (v + 2) % 5)) == code
        assert canonical_form(relabel(fan, lambda v: (-v) % 5)) == code

    def test_distinguishes_shapes(self):
        assert canonical_form(family('serpentine', 6)) != canonical_form(SNOWFLAKE)

    def test_code_equality_matches_isomorphism(self):
        mops = list(enumerate_triangulations(7))
        for a in mops[:12]:
            for b in mops:
                same = canonical_form(a) == canonical_form(b)
                assert same == nx.is_isomorphic(a.to_networkx(), b.to_networkx())

    def test_code_is_ordered(self):
        code = canonical_form(family('fan', 7))

        assert isinstance(code, CanonicalCode)
        assert str(code) == code.hex
        assert code.hex.startswith("0007")


class TestRandom:
    def test_seed_is_reproducible(self):
        assert random_mop(40, seed=3) == random_mop(40, seed=3)
        assert random_mops(12, 5, seed=1) == random_mops(12, 5, seed=1)

    def test_always_valid(self):
        for seed in range(20):
            m = random_mop(25, seed)
            assert validate(m).is_valid

    def test_triangle(self):
        assert random_mop(3, 0) == Mop(3, frozenset())

    def test_uniform_on_pentagons(self):
        counts = Counter(random_mop(5, seed) for seed in range(10000))

        assert len(counts) == 5
        # five triangulations, 2000 expected each
        assert all(abs(c - 2000) <= 200 for c in counts.values())

    def test_too_small(self):
        with pytest.raises(InvalidMopError):
            random_mop(2, 0)


class TestFamilies:
    def test_fan(self):
        fan = family('fan', 6)

        assert fan.diagonals == frozenset({(0, 2), (0, 3), (0, 4)})
        assert degree(fan, 0) == 5

    def test_serpentine_dual_is_a_path(self):
        t = build_dual(family('serpentine', 8))

        assert t.is_path
        assert len(t.nodes) == 6

    def test_serpentine_degrees(self):
        m = family('serpentine', 12)

        assert max(degree(m, v) for v in range(m.n)) <= 4

    def test_families_are_valid(self):
        for n in range(3, 101):
            for name in ('fan', 'serpentine'):
                assert validate(family(name, n)).is_valid, (name, n)

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            family('zigzag', 7)

    def test_too_small(self):
        with pytest.raises(InvalidMopError):
            family('fan', 2)
