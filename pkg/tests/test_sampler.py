import math
from fractions import Fraction

import numpy as np
import pytest

from antichains import polymer as pm
from antichains import sampler as smp
from antichains.counting import defect_distribution_exact, distribution_mean


def _site(n, p):
    return chain_sites(n).index(p)


def chain_sites(n):
    return list(smp.chain_graph(n).sites)


def test_middle_point_with_no_comparables_is_added():
    st = smp.AntichainState(smp.chain_graph(2))
    assert smp.glauber_step(st, _site(2, (1, 1)), True)
    assert st.points() == [(1, 1)]


def test_adding_below_a_selected_point_is_rejected():
    st = smp.AntichainState.from_points(2, [(1, 1)])
    assert not smp.glauber_step(st, _site(2, (0, 1)), True)
    assert st.points() == [(1, 1)]


def test_tails_coin_leaves_state():
    st = smp.AntichainState.from_points(2, [(1, 1)])
    assert not smp.glauber_step(st, _site(2, (1, 1)), False)
    assert st.points() == [(1, 1)]


def test_from_points_rejects_chains():
    with pytest.raises(ValueError):
        smp.AntichainState.from_points(2, [(0, 1), (1, 1)])


@pytest.mark.parametrize("n", [2, 3, 4])
def test_reference_chain_stays_antichain(n):
    st = smp.run_reference(n, 3000, seed=n, check=True)
    assert st.is_antichain()
    assert smp.path_to_empty(st)


def test_uniform_at_n2():
    rep = smp.uniformity_test(2, steps=1_000_000, seed=1)
    assert rep.states == 18
    assert rep.ok


@pytest.mark.slow
def test_uniform_at_n3():
    rep = smp.uniformity_test(3, steps=3_000_000, seed=0)
    assert rep.states == 880 and rep.ok


def test_mean_at_n2():
    st = smp.sample_defects(2, samples=10_000, seed=3)
    assert abs(st.cumulants()[0] - 2 / 3) <= 3 * st.mean_se()


@pytest.mark.parametrize("n", [3, 4])
def test_mean_matches_exact(n):
    st = smp.sample_defects(n, samples=10_000, seed=7)
    exact = float(distribution_mean(defect_distribution_exact(n)))
    assert abs(st.cumulants()[0] - exact) <= 3 * st.mean_se()


@pytest.mark.parametrize("n", [2, 3])
def test_generating_function_at_half(n):
    coeffs = pm.defect_pgf(n)
    exact = float(sum(c * Fraction(1, 2) ** d for d, c in enumerate(coeffs)) / sum(coeffs))
    st = smp.sample_defects(n, samples=20_000, seed=11)
    vals = 0.5 ** st.defects.astype(float)
    batches = [b.mean() for b in np.array_split(vals, 20)]
    se = np.std(batches, ddof=1) / math.sqrt(20)
    assert abs(vals.mean() - exact) <= 3 * se


def test_exact_structure_fractions():
    assert smp.exact_structure_fraction(2) == 1
    assert smp.exact_structure_fraction(3) == Fraction(93, 110)


def test_sampled_structure_fraction_n3():
    st = smp.sample_defects(3, samples=20_000, seed=5)
    good = (st.largest_component <= 2).astype(float)
    batches = [b.mean() for b in np.array_split(good, 20)]
    se = np.std(batches, ddof=1) / math.sqrt(20)
    assert abs(good.mean() - 93 / 110) <= 3 * se


def test_same_seed_same_output():
    a = smp.sample_defects(4, samples=500, seed=9)
    b = smp.sample_defects(4, samples=500, seed=9)
    assert np.array_equal(a.defects, b.defects)
    assert a.record() == b.record()


def test_normality_needs_samples():
    st = smp.sample_defects(3, samples=100, seed=0)
    with pytest.raises(ValueError):
        smp.normality_diagnostics(st)


def test_standardized_variance_is_one_and_skew_shrinks():
    reps = [smp.normality_diagnostics(smp.sample_defects(n, samples=10_000, seed=2)) for n in (5, 8)]
    for r in reps:
        assert r.standardized_variance == pytest.approx(1.0)
    assert abs(reps[1].skewness) < abs(reps[0].skewness)


def test_cumulant_scaling_on_synthetic_data():
    x = np.random.default_rng(0).gamma(2.0, size=5000)
    assert max(smp.cumulant_scaling_gap(x, 3.0, 2.5)) < 1e-9


def test_bad_sampler_arguments():
    with pytest.raises(ValueError):
        smp.sample_defects(2, samples=0)
