import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from antichains import containers as ct


def _k33():
    X, Y = ["x1", "x2", "x3"], ["y1", "y2", "y3"]
    adj = {v: frozenset(Y) for v in X}
    adj.update({w: frozenset(X) for w in Y})
    return X, Y, adj


def test_cover_complete_bipartite():
    X, Y, adj = _k33()
    cov = ct.lovasz_stein_cover(Y, X, adj, x=3, y=3)
    assert len(cov.chosen) == 1
    assert cov.bound == pytest.approx(1 + math.log(3))
    assert cov.within_bound


def test_cover_empty_target():
    X, Y, adj = _k33()
    assert ct.lovasz_stein_cover([], X, adj).chosen == []


def test_cover_refuses_uncoverable():
    adj = {"u": frozenset(), "w": frozenset()}
    with pytest.raises(ValueError):
        ct.lovasz_stein_cover(["u"], ["w"], adj)


def test_cover_layer_graph():
    inst = ct.BipartiteInstance.from_layers(3, 2)
    cov = ct.lovasz_stein_cover(inst.Y, inst.X, inst.adj)
    assert inst.nbhd(cov.chosen) >= set(inst.Y)
    assert cov.within_bound


def test_kappa_small_example():
    inst = ct.BipartiteInstance.from_layers(2, 1)
    A = {(0, 1)}
    assert inst.nbhd(A) == {(0, 2), (1, 1)}
    assert inst.closure(A) == {(0, 1)}
    # only the edge (1,1)-(1,0) leaves towards the unclosed part
    assert ct.kappa(inst, A) == 1
    assert ct.kappa_bound(inst, A) == 2


def test_kappa_zero_when_everything_closed():
    inst = ct.BipartiteInstance.from_layers(3, 2)
    assert ct.kappa(inst, set(inst.X)) == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 5), st.integers(0, 10 ** 6))
def test_kappa_bound_random(n, seed):
    inst = ct.BipartiteInstance.from_layers(n, n - 1)
    rng = random.Random(seed)
    A = ct.random_two_linked(inst, rng.randint(1, 2 * n), rng)
    assert inst.is_two_linked(A)
    assert ct.kappa(inst, A) <= ct.kappa_bound(inst, A)


@pytest.mark.parametrize("n", [5, 6])
def test_degree_audit(n):
    audit = ct.degree_audit(n)
    assert audit.codegree == 1
    assert audit.dominance_ok and audit.degree_range_ok
    assert audit.min_degree / n >= 0.5


def test_phi_approximation_full_closed_set():
    inst = ct.BipartiteInstance.from_layers(5, 4)
    A = set(inst.X)
    pa = ct.phi_approximation(inst, A, 1.25)
    assert pa.F == frozenset(inst.Y)
    assert pa.ok


@pytest.mark.parametrize("seed", range(10))
def test_phi_approximation_random(seed):
    n = 5
    inst = ct.BipartiteInstance.from_layers(n, n - 1)
    A = ct.random_two_linked(inst, 4, random.Random(seed))
    pa = ct.phi_approximation(inst, A, ct.default_phi(n), seed=seed)
    assert all(pa.checks.values()) and pa.cover.within_bound


def test_phi_retries_at_reduced_probability():
    n = 5
    inst = ct.BipartiteInstance.from_layers(n, n - 1)
    retries = []
    for s in range(100):
        A = ct.random_two_linked(inst, 4, random.Random(s))
        pa = ct.phi_approximation(inst, A, ct.default_phi(n), seed=s, p=0.3)
        assert pa.ok
        retries.append(pa.retries)
    assert sum(retries) / len(retries) <= 3


def test_phi_retry_budget_reports_rates():
    inst = ct.BipartiteInstance.from_layers(5, 4)
    A = ct.random_two_linked(inst, 4, random.Random(0))
    with pytest.raises(ct.RetryBudgetExhausted) as err:
        ct.phi_approximation(inst, A, 1.25, p=1e-12, budget=5)
    assert err.value.failure_rates["missed"] == 1.0


def test_phi_range_checked():
    inst = ct.BipartiteInstance.from_layers(5, 4)
    with pytest.raises(ValueError):
        ct.phi_approximation(inst, {inst.X[0]}, 0.5)


def test_psi_empty_set():
    inst = ct.BipartiteInstance.from_layers(5, 4)
    ap = ct.psi_approximation(inst, set(), frozenset(), 2)
    assert ap.S == frozenset() and ap.F == frozenset()
    assert ap.ok


@pytest.mark.parametrize("seed", range(10))
def test_psi_approximation_random(seed):
    n = 5
    inst = ct.BipartiteInstance.from_layers(n, n - 1)
    A = ct.random_two_linked(inst, 4, random.Random(100 + seed))
    pa = ct.phi_approximation(inst, A, ct.default_phi(n), seed=seed)
    ap = ct.psi_approximation(inst, A, pa.F, ct.default_psi(inst, n))
    assert all(ap.checks.values())
    assert all(ap.bounds.values())


@pytest.mark.parametrize("seed", range(5))
def test_psi_approximation_idempotent(seed):
    n = 5
    inst = ct.BipartiteInstance.from_layers(n, n - 1)
    A = ct.random_two_linked(inst, 4, random.Random(200 + seed))
    psi = ct.default_psi(inst, n)
    first = ct.psi_approximation(inst, A, ct.phi_approximation(inst, A, ct.default_phi(n), seed=seed).F, psi)
    again = ct.psi_approximation(inst, A, first.F, psi)
    assert (again.S, again.F) == (first.S, first.F)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_closure_monotone(seed):
    inst = ct.BipartiteInstance.from_layers(4, 3)
    rng = random.Random(seed)
    A = set(rng.sample(inst.X, rng.randint(0, 5)))
    B = A | set(rng.sample(inst.X, rng.randint(0, 5)))
    assert inst.nbhd(A) <= inst.nbhd(B)
    assert inst.closure(A) <= inst.closure(B)
    assert A <= inst.closure(A)
