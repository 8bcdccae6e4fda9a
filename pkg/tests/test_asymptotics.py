import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from antichains import asymptotics as asy
from antichains.poset import enumerate_layer, layer_size, layer_sizes, up_neighbors


def _first_term_by_degrees(n):
    # 2 * sum over the layer below the middle of 2^-(up-degree)
    return 2 * sum(Fraction(1, 2 ** len(up_neighbors(v, 3))) for v in enumerate_layer(3, n, n - 1))


def test_first_term_small_values():
    assert asy.t1(2) == 1
    assert asy.t1(3) == Fraction(9, 4)


@pytest.mark.parametrize("n", range(2, 9))
def test_first_term_matches_degree_sum(n):
    assert asy.t1(n) == _first_term_by_degrees(n)


def test_second_term_small_values():
    assert asy.t2(2) == Fraction(-1, 4)
    # by hand: the k=0 term vanishes, the k=1 term is 3 * (-5/2) / 16
    assert asy.t2(3) == Fraction(-15, 32)


@given(st.integers(1, 60))
def test_summation_order_independent(n):
    assert asy.t1(n) == asy.t1(n, reverse=True)
    assert asy.t2(n) == asy.t2(n, reverse=True)


def test_second_term_small_relative_to_first():
    ratios = [abs(asy.t2(n)) / asy.t1(n) for n in (20, 40, 80)]
    assert ratios[0] > ratios[1] > ratios[2]
    assert ratios[-1] < 0.01


def test_closed_form_base_and_trend():
    assert abs(float(asy.closed_form_base()) - (1 + 2 * math.sqrt(2)) / 2) < 1e-15
    assert float(asy.closed_form_first_term(1)) > 0
    gaps = [abs(asy.to_mpf(asy.t1(n)) / asy.closed_form_first_term(n) - 1) for n in (50, 100, 200, 400)]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))


def test_motzkin():
    assert asy.motzkin(0) == 1
    assert [asy.motzkin(n) for n in range(1, 5)] == [1, 2, 4, 9]


@pytest.mark.parametrize("n", range(3, 11))
def test_middle_layer_gap_at_least_motzkin(n):
    sizes = layer_sizes(3, n)
    assert sizes[n] >= sizes[n - 1] + asy.motzkin(n - 2)


def test_terminating_hypergeometric():
    assert asy.gauss_2f1_terminating(0, Fraction(3, 7), 2, 5) == 1
    with pytest.raises(ValueError):
        asy.gauss_2f1_terminating(Fraction(1, 2), Fraction(1, 3), 2, 8)
    # 2F1(-1, b; c; z) = 1 - b z / c
    assert asy.gauss_2f1_terminating(-1, 3, 2, 8) == 1 - Fraction(3 * 8, 2)


@pytest.mark.parametrize("n", [4, 5, 6, 17])
def test_hypergeometric_form_of_first_term(n):
    assert asy.first_term_via_2f1(n) == asy.t1(n)


def test_hyper_asymptotic_trend():
    gaps = []
    for n in (50, 100, 200, 400):
        exact = asy.to_mpf(asy.gauss_2f1_terminating(Fraction(1, 2) - Fraction(n, 2), 1 - Fraction(n, 2), 2, 8))
        approx = asy.hyper_asymptotic(Fraction(1, 2), 1, 2, 8, Fraction(n, 2))
        gaps.append(abs(exact / approx - 1))
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 0.01


def test_hyper_asymptotic_dominant_exponential():
    base = 1 + 4 * mpmath.sqrt(2)
    assert base < 8
    h = [asy.hyper_asymptotic(Fraction(1, 2), 1, 2, 32, Fraction(n, 2)) for n in (400, 402)]
    # the polynomial factor n^(-3/2) changes little between n and n+2
    assert abs(h[1] / h[0] / base ** 2 - 1) < 0.01
    assert asy.hyper_asymptotic(Fraction(1, 2), 1, 2, 8, 1) > 0


# counts of antichains of [3]^n for n = 2, 3, 4 (4 is frozen from the exact DP)
ALPHA = {2: 20, 3: 980, 4: 17792748}


def test_two_term_estimate_gap_shrinks():
    gaps = []
    for n, alpha in ALPHA.items():
        est = asy.AsymptoticEstimate.compute(n).log2_alpha_estimate
        gaps.append(abs(float(est) - math.log2(alpha)) / math.log2(alpha))
    assert gaps[0] > gaps[1] > gaps[2]


def test_middle_size_in_estimate():
    assert asy.AsymptoticEstimate.compute(3).middle_size == layer_size(3, 3, 3) == 7


@pytest.mark.parametrize("t", [2, 3, 4, 5])
def test_layers_log_concave(t):
    for n in range(1, 9):
        assert asy.log_concave(layer_sizes(t, n))


def test_closed_form_prefactor_pinned():
    r = math.sqrt(2)
    assert float(asy.closed_form_prefactor()) == pytest.approx(math.sqrt((1 + 2 * r) / (2 * r * math.pi)), rel=1e-15)
    assert round(float(asy.closed_form_prefactor()), 10) == 0.6563912139
