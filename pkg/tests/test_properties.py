from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from mopdom.bound_constructor import construct_bounded_2dd
from mopdom.generators import canonical_form, random_mop
from mopdom.mop_core import (
    Mop, contract_outer_edge, degree_two_count, delete_ear_region, disjunctive_bound,
    insert_ear, internal_triangles, validate,
)
from mopdom.solvers import exact_gamma2d, greedy_2dd, is_2dd_set

SLOW = settings(deadline=None, max_examples=25, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def mops(draw: st.DrawFn, min_n: int = 4, max_n: int = 30) -> Mop:
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    seed = draw(st.integers(min_value=0, max_value=2 ** 32 - 1))
    return random_mop(n, seed)


@given(mops())
def test_random_mops_are_valid(m: Mop) -> None:
    assert validate(m).is_valid
    assert len(m.edges) == 2 * m.n - 3
    assert degree_two_count(m) == len(internal_triangles(m)) + 2


@given(mops(), st.data())
def test_contraction_keeps_a_mop(m: Mop, data: st.DataObject) -> None:
    i = data.draw(st.integers(min_value=0, max_value=m.n - 1))
    contracted = contract_outer_edge(m, (i, (i + 1) % m.n))

    assert contracted.n == m.n - 1
    assert validate(contracted).is_valid


@given(mops(), st.data())
def test_ear_insertion_is_undone_by_deletion(m: Mop, data: st.DataObject) -> None:
    i = data.draw(st.integers(min_value=0, max_value=m.n - 1))
    new_vertex = i + 1 if i < m.n - 1 else m.n

    assert delete_ear_region(insert_ear(m, i), {new_vertex}).mop == m


@given(mops(), st.data())
def test_canonical_form_ignores_rotation(m: Mop, data: st.DataObject) -> None:
    r = data.draw(st.integers(min_value=0, max_value=m.n - 1))
    rotated = Mop(m.n, frozenset(((a + r) % m.n, (b + r) % m.n) for a, b in m.diagonals))

    assert canonical_form(rotated) == canonical_form(m)


@given(mops(min_n=7, max_n=40))
@SLOW
def test_greedy_dominates(m: Mop) -> None:
    assert is_2dd_set(m, greedy_2dd(m))


@given(mops(min_n=7, max_n=12))
@SLOW
def test_exact_within_bound(m: Mop) -> None:
    assert exact_gamma2d(m).value <= disjunctive_bound(m.n, degree_two_count(m))


@given(mops(min_n=7, max_n=45))
@SLOW
def test_constructed_set_is_verified(m: Mop) -> None:
    trace = construct_bounded_2dd(m)

    assert trace.final_set.verified
    assert is_2dd_set(m, trace.final_set)
    assert trace.within_bound or trace.used_fallback
