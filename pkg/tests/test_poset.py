import pytest
from hypothesis import given, settings, strategies as st

from antichains.poset import (LayerSlice, append_twos, boundary, closure, down_neighbors,
                              dual, enumerate_layer, layer_size, layer_sizes, leq,
                              restrict_above, two_linked_components, up_neighbors,
                              verify_layer_embedding, vertex_type)


def test_enumerate_layer_examples():
    assert enumerate_layer(3, 2, 2) == [(0, 2), (1, 1), (2, 0)]
    assert enumerate_layer(3, 1, 0) == [(0,)]
    assert enumerate_layer(2, 2, 1) == [(0, 1), (1, 0)]


def test_enumerate_layer_rejects_bad_input():
    with pytest.raises(ValueError):
        enumerate_layer(3, 2, 5)
    with pytest.raises(ValueError):
        enumerate_layer(1, 2, 0)


def test_layer_size_examples():
    assert layer_size(3, 2, 2) == 3
    assert layer_size(3, 2, 0) == 1
    assert layer_size(3, 4, 4) == 19


def test_neighbours():
    assert up_neighbors((1, 2), 3) == [(2, 2)]
    assert sorted(up_neighbors((1, 1), 3)) == [(1, 2), (2, 1)]
    assert sorted(down_neighbors((1, 1))) == [(0, 1), (1, 0)]


def test_vertex_types():
    vt = vertex_type((0, 1, 2))
    assert vt == (1, 1, 1) and vt.up_degree == 2 and vt.down_degree == 2
    vt = vertex_type((1, 1, 1, 1))
    assert vt == (0, 4, 0) and vt.up_degree == 4 and vt.down_degree == 4


@pytest.mark.parametrize("n", [3, 4, 5])
def test_vertex_type_of_layer_below_middle(n):
    for u in enumerate_layer(3, n, n - 1):
        k = u.count(2)
        assert vertex_type(u) == (k + 1, n - 2 * k - 1, k)


def test_two_linked_components():
    assert len(two_linked_components([(0, 1), (1, 0)], 3, 0, 4)) == 1
    assert len(two_linked_components([(2, 0, 0), (0, 0, 2)], 3, 0, 6)) == 2


def test_boundary_closure_restrict():
    assert boundary([(0, 1)]) == {(0, 2), (1, 1)}
    assert closure([], 3) == frozenset()
    assert restrict_above(enumerate_layer(3, 2, 1), [(2, 2)]) == []
    # both (0,1) and (1,0) lie below (1,2)
    assert restrict_above(enumerate_layer(3, 2, 1), [(1, 2)]) == []
    assert restrict_above(enumerate_layer(3, 2, 1), [(2, 0)]) == [(0, 1)]


def test_append_twos_and_embedding():
    assert append_twos((0, 1), 2, 1) == (0, 1, 2)
    assert verify_layer_embedding(3, 2, 1)["ok"]
    with pytest.raises(ValueError):
        append_twos((0, 1), 2, 2)


points = st.integers(2, 5).flatmap(
    lambda t: st.integers(1, 5).flatmap(
        lambda n: st.tuples(st.just(t), st.lists(st.integers(0, t - 1), min_size=n, max_size=n).map(tuple))))


@given(points)
def test_degree_identity(tp):
    t, p = tp
    assert len(up_neighbors(p, t)) + p.count(t - 1) == len(p)
    assert len(down_neighbors(p)) + p.count(0) == len(p)


@given(st.integers(2, 6), st.integers(1, 6))
def test_layer_sizes_are_symmetric_and_sum_to_total(t, n):
    sizes = layer_sizes(t, n)
    assert sum(sizes) == t ** n
    assert sizes == sizes[::-1]


@given(points)
def test_dual_reverses_order(tp):
    t, p = tp
    assert dual(dual(p, t), t) == p
    for q in up_neighbors(p, t):
        assert leq(dual(q, t), dual(p, t))


@settings(max_examples=50)
@given(st.integers(2, 4), st.data())
def test_closure_idempotent(n, data):
    layer = enumerate_layer(3, n, n - 1)
    A = data.draw(st.sets(st.sampled_from(layer), max_size=5))
    c = closure(A, 3)
    assert set(A) <= c
    assert closure(c, 3) == c


def test_layer_slice_bits_roundtrip():
    sl = LayerSlice.build(3, 3, 2, 4)
    pts = sl.points[::3]
    assert sl.from_bits(sl.to_bits(pts)) == list(pts)
    s = sl.subset(pts)
    assert len(s) == len(pts) and pts[0] in s
