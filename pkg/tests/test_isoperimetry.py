from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from antichains import isoperimetry as iso
from antichains.asymptotics import motzkin
from antichains.poset import enumerate_layer, layer_size, layer_sizes, middle_rank


def test_compress_examples():
    assert iso.compress({(1, 0)}, 3) == [(0, 1)]
    layer = enumerate_layer(3, 3, 2)
    assert iso.compress(layer, 3) == layer
    assert iso.compress([], 3) == []


def test_compress_rejects_mixed_layers():
    with pytest.raises(ValueError):
        iso.compress({(0, 1), (1, 1)}, 3)


@pytest.mark.parametrize("k", range(0, 7))
def test_compression_never_enlarges_down_shadow(k):
    # plain loops over every subset, independent of the vectorized checker
    layer = enumerate_layer(3, 3, k)
    for r in range(len(layer) + 1):
        for S in combinations(layer, r):
            assert len(iso.shadow_down(S)) >= len(iso.shadow_down(iso.compress(S, 3, 3)))
            assert len(iso.shadow_up(S, 3)) >= len(iso.shadow_up(iso.last_segment(S, 3, 3), 3))


@settings(max_examples=40)
@given(st.integers(2, 4), st.integers(1, 4), st.data())
def test_compression_idempotent_and_size_preserving(t, n, data):
    k = data.draw(st.integers(0, (t - 1) * n))
    layer = enumerate_layer(t, n, k)
    S = data.draw(st.sets(st.sampled_from(layer)))
    C = iso.compress(S, t, n)
    assert len(C) == len(S)
    if S:
        assert iso.compress(C, t, n) == C


@pytest.mark.parametrize("t,n", [(3, 3), (4, 2), (2, 4)])
def test_clements_lindstrom_exhaustive(t, n):
    rep = iso.verify_clements_lindstrom(t, n)
    assert rep.mode == "exhaustive"
    assert rep.violations == 0 and rep.ok


def test_clements_lindstrom_sampled_mode_is_labelled():
    rep = iso.verify_clements_lindstrom(3, 6, samples=2000, seed=3)
    assert rep.mode == "sampled" and rep.violations == 0


def test_normalized_matching():
    rep = iso.normalized_matching_check(3, 3, 1)
    assert rep.mode == "exhaustive" and rep.ok
    assert rep.layer_ratio == Fraction(layer_size(3, 3, 2), layer_size(3, 3, 1))
    assert iso.normalized_matching_check(3, 3, 4, direction="down").ok


@pytest.mark.parametrize("n", range(3, 11))
def test_middle_ratio_motzkin_bound(n):
    m = n
    assert iso.layer_ratio(3, n, m) >= 1 + Fraction(motzkin(n - 2), layer_size(3, n, m - 1))


def test_layer_ratio_floor_positive():
    floor = iso.layer_ratio_floor()
    assert floor["c"] > 0
    assert floor["c"] == Fraction(25, 6)


def test_constants_file_matches_recomputation(tmp_path):
    stored = iso.load_constants()
    fresh = iso.write_constants(tmp_path / "c.json")
    assert stored["c"] == fresh["c"] and stored["c_prime"] == fresh["c_prime"]
    assert stored["C"] == pytest.approx(min(fresh["c"] / 9, fresh["c_prime"] / 3))
    assert iso.load_constants(tmp_path / "c.json")["version"] == stored["version"]


def test_load_constants_rejects_incomplete(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"c": 1}')
    with pytest.raises(ValueError):
        iso.load_constants(p)


def test_worked_chain_in_4_6():
    x = (0, 2, 1, 3, 2, 1)
    target = iso.bracket_structure(x, 4).symbols
    chains = [c for c in iso.tsai_scd(4, 6) if iso.bracket_structure(c.points[0], 4).symbols == target]
    assert len(chains) == 1
    assert chains[0].points == ((0, 2, 1, 3, 0, 1), (0, 2, 1, 3, 1, 1), (0, 2, 1, 3, 2, 1),
                                (0, 2, 1, 3, 2, 2), (0, 2, 1, 3, 2, 3))


@pytest.mark.parametrize("t,n,expected", [(2, 3, 3), (3, 2, 3)])
def test_chain_counts(t, n, expected):
    rep = iso.check_scd(t, n)
    assert rep.chains == expected and rep.ok


@pytest.mark.parametrize("t,n", [(2, 5), (3, 4), (4, 3), (5, 2)])
def test_scd_properties(t, n):
    rep = iso.check_scd(t, n)
    assert rep.partition and rep.saturated and rep.symmetric
    assert rep.chains == layer_size(t, n, middle_rank(t, n))


@pytest.mark.parametrize("t,n", [(3, 4), (4, 3), (3, 5)])
def test_chain_successor_injective(t, n):
    succ = iso.chain_successor_map(t, n)
    m = middle_rank(t, n)
    assert set(succ) == set(enumerate_layer(t, n, m - 1))
    assert len(set(succ.values())) == len(succ)
    # chains that start on the middle rank are the ones nothing maps into
    fresh = [c for c in iso.tsai_scd(t, n) if c.start == m]
    assert len(succ) + len(fresh) == layer_size(t, n, m)


def test_fully_matched_n2():
    rep = iso.fully_matched_count(2)
    assert rep.fully_matched == 1 and rep.ok
    # blocks "((" then "))" close up completely; (1,1) reads ")()(" and is not
    assert iso.bracket_structure((0, 2), 3).unmatched == 0
    assert iso.bracket_structure((1, 1), 3).unmatched == 2


@pytest.mark.parametrize("n", range(3, 11))
def test_fully_matched_at_least_motzkin(n):
    rep = iso.fully_matched_count(n)
    assert rep.ok and rep.fully_matched >= motzkin(n - 2)


@given(st.integers(2, 6), st.integers(1, 8))
def test_log_concave(t, n):
    assert iso.layers_log_concave(t, n)


@pytest.mark.parametrize("n", [4, 5, 6])
def test_singleton_up_degree(n):
    for i in range(n):
        for x in enumerate_layer(3, n, i):
            assert n - x.count(2) > n / 2


def test_up_expansion_small_sets():
    rep = iso.up_expansion_check(3, 4, 2, max_size=6)
    assert rep.mode == "exhaustive" and rep.violations["a"] == 0


def test_up_expansion_whole_layer_is_the_ratio():
    layer = enumerate_layer(3, 4, 3)
    rep = iso.up_expansion_check(3, 4, 3, sets=[layer])
    # for S the whole layer, |N+(S)| = ell_4, so slack (b) is ell_4 - (1 + 1/(9*4)) ell_3
    sizes = layer_sizes(3, 4)
    assert rep.worst_slack["b"] == pytest.approx(sizes[4] - (1 + 1 / 36) * sizes[3])


def test_up_expansion_rejects_middle():
    with pytest.raises(ValueError):
        iso.up_expansion_check(3, 4, 4)


def test_two_middle_layers():
    rep = iso.two_middle_layers_check(4, 3)
    assert rep.min_ratio > 1
    assert rep.last_point_shadow >= 2
    assert rep.half_prefix_first_coord_max <= 2
    assert rep.ok
    with pytest.raises(ValueError):
        iso.two_middle_layers_check(3, 3)
