"""The nine acceptance criteria as callable checks.

Each criterion returns a CriterionResult made of named parts; the criterion
passes only if every part does.  Results are cached per process so that a
test suite can inspect parts without recomputing.
"""
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import asymptotics as asy
from . import containers as ct
from . import isoperimetry as iso
from . import llt
from . import polymer as pm
from . import sampler as smp
from .counting import (SubposetSpec, count_antichains_brute, count_antichains_layered,
                       count_by_slicing, defect_distribution_exact, distribution_mean,
                       macmahon_box)


@dataclass
class Part:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class CriterionResult:
    number: int
    title: str
    parts: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self):
        return all(p.passed for p in self.parts)

    def part(self, name) -> Part:
        for p in self.parts:
            if p.name == name:
                return p
        raise KeyError(name)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        failed = [p.name for p in self.parts if not p.passed]
        tail = f" (failed: {', '.join(failed)})" if failed else ""
        return f"{status} criterion {self.number}: {self.title} [{self.seconds:.1f}s]{tail}"

    def to_dict(self):
        return {"number": self.number, "title": self.title, "passed": self.passed,
                "seconds": round(self.seconds, 3),
                "parts": [{"name": p.name, "passed": p.passed, "detail": p.detail} for p in self.parts]}


def _timed(fn):
    def wrapper(*args, **kw):
        t0 = time.perf_counter()
        res = fn(*args, **kw)
        res.seconds = time.perf_counter() - t0
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return lru_cache(maxsize=None)(wrapper)


def _strictly_decreasing(xs):
    return all(a > b for a, b in zip(xs, xs[1:]))


@_timed
def criterion_1() -> CriterionResult:
    """Exact antichain counts of [3]^n for n <= 3."""
    res = CriterionResult(1, "exact antichain counts")
    expected = {1: 4, 2: 20, 3: 980}
    for n in (1, 2):
        got = count_antichains_brute(SubposetSpec.full(3, n)).count
        res.parts.append(Part(f"brute n={n}", got == expected[n], f"{got}"))
    dp = count_antichains_layered(SubposetSpec.full(3, 3)).count
    mm = macmahon_box(3, 3, 3)
    res.parts.append(Part("layered n=3 vs plane partitions", dp == mm == 980, f"dp={dp}, box={mm}"))
    res.parts.append(Part("slicing oracle n=3", count_by_slicing(3, 3) == 980))
    mismatches = []
    ranges = 0
    for n in (1, 2, 3):
        top = 2 * n
        for lo in range(top + 1):
            for hi in range(lo, top + 1):
                spec = SubposetSpec(3, n, lo, hi)
                a = count_antichains_brute(spec, max_points=27).count
                b = count_antichains_layered(spec).count
                ranges += 1
                if a != b:
                    mismatches.append((n, lo, hi, a, b))
    res.parts.append(Part("brute = layered on every layer range", not mismatches,
                          f"{ranges} ranges, mismatches {mismatches[:3]}"))
    return res


@_timed
def criterion_2(seed: int = 0) -> CriterionResult:
    """Partition-function identities as exact rationals."""
    res = CriterionResult(2, "polymer identities")
    for n in (2, 3):
        lhs, rhs = pm.central_identity(n)
        res.parts.append(Part(f"central n={n}", lhs == rhs, f"{lhs} = {rhs}"))
        rng = np.random.default_rng(seed)
        Xs = [frozenset()] + pm.random_antichains_above(n, 5, rng)
        for variant in ("w", "w_prime"):
            bad = []
            for X in Xs:
                lhs, rhs = pm.three_layer_identity(n, X, variant)
                if lhs != rhs:
                    bad.append((sorted(X), lhs, rhs))
            res.parts.append(Part(f"three-layer {variant} n={n}", not bad,
                                  f"{len(Xs)} choices of X; mismatches {bad[:2]}"))
    xi2 = pm.partition_function_exact(pm.CentralModel(2))
    res.parts.append(Part("central n=2 value 9/4", xi2 == Fraction(9, 4), str(xi2)))
    return res


@lru_cache(maxsize=None)
def _size_three_absolute(n):
    return pm.cluster_sum(pm.CentralModel(n), 3, absolute=True)


@lru_cache(maxsize=None)
def _low_sums(n):
    m = pm.CentralModel(n)
    return pm.cluster_sum(m, 1), pm.cluster_sum(m, 2)


@_timed
def criterion_3() -> CriterionResult:
    """Small-cluster sums against their closed forms."""
    res = CriterionResult(3, "cluster sums vs closed forms")
    for n in range(3, 7):
        s1, s2 = _low_sums(n)
        res.parts.append(Part(f"size 1 n={n}", s1 == asy.t1(n), str(s1)))
        res.parts.append(Part(f"size 2 n={n}", s2 == asy.t2(n), str(s2)))
    abs3 = [_size_three_absolute(n) for n in (5, 6, 7, 8)]
    res.parts.append(Part("size 3 absolute strictly decreasing on n=5..8",
                          _strictly_decreasing(abs3),
                          ", ".join(f"{float(v):.4f}" for v in abs3)))
    s1, s2 = _low_sums(8)
    ratio = abs(s2) / s1
    res.parts.append(Part("|size 2| / size 1 < 0.1 at n=8", ratio < Fraction(1, 10), f"{float(ratio):.5f}"))
    return res


@_timed
def criterion_4() -> CriterionResult:
    """Hypergeometric form of the first cluster term and its asymptotics."""
    res = CriterionResult(4, "hypergeometric identity and closed form")
    bad = [n for n in range(1, 31) if asy.t1(n) != asy.first_term_via_2f1(n)]
    res.parts.append(Part("2F1 identity n<=30", not bad, f"mismatches at {bad}"))
    ns = (50, 100, 200, 400)
    ratios = [float(asy.to_mpf(asy.t1(n)) / asy.closed_form_first_term(n)) for n in ns]
    res.parts.append(Part("ratio within 5% at n=400", abs(ratios[-1] - 1) <= 0.05, f"{ratios[-1]:.6f}"))
    gaps = [abs(r - 1) for r in ratios]
    res.parts.append(Part("ratio approaches 1 monotonically", _strictly_decreasing(gaps),
                          ", ".join(f"{r:.6f}" for r in ratios)))
    return res


@_timed
def criterion_5() -> CriterionResult:
    """Shadow inequalities, log-concavity, Motzkin gap, bracket chains."""
    res = CriterionResult(5, "isoperimetry")
    for t, n in ((3, 3), (4, 2)):
        rep = iso.verify_clements_lindstrom(t, n)
        res.parts.append(Part(f"Clements-Lindstrom t={t} n={n}",
                              rep.ok and rep.mode == "exhaustive",
                              f"{rep.subsets_checked} subsets, {rep.violations} violations"))
    bad = [(t, n) for t in range(2, 6) for n in range(1, 11) if not iso.layers_log_concave(t, n)]
    res.parts.append(Part("log-concave t<=5 n<=10", not bad, f"failures {bad}"))
    bad = [n for n in range(3, 13) if not iso.motzkin_gap_holds(n)]
    res.parts.append(Part("Motzkin gap 3<=n<=12", not bad, f"failures {bad}"))
    for t, n in ((2, 4), (3, 4), (4, 3)):
        rep = iso.check_scd(t, n)
        res.parts.append(Part(f"SCD t={t} n={n}", rep.ok, f"{rep.chains} chains, middle {rep.middle_size}"))
    expected = ((0, 2, 1, 3, 0, 1), (0, 2, 1, 3, 1, 1), (0, 2, 1, 3, 2, 1),
                (0, 2, 1, 3, 2, 2), (0, 2, 1, 3, 2, 3))
    target = iso.bracket_structure((0, 2, 1, 3, 2, 1), 4).symbols
    chain = [c for c in iso.tsai_scd(4, 6) if iso.bracket_structure(c.points[0], 4).symbols == target]
    got = chain[0].points if chain else ()
    res.parts.append(Part("worked chain in [4]^6", got == expected, str(got)))
    return res


@_timed
def criterion_6(runs: int = 100, random_sets: int = 1000, seed: int = 0) -> CriterionResult:
    """Container constructions on L_(n-1) u L_n."""
    res = CriterionResult(6, "containers")
    for n in (5, 6, 7):
        audit = ct.degree_audit(n)
        res.parts.append(Part(f"degree audit n={n}", audit.ok,
                              f"codegree {audit.codegree}, delta {audit.delta}, d {audit.d}"))
        inst = ct.BipartiteInstance.from_layers(n, n - 1)
        rng = random.Random(seed + n)
        over = 0
        for _ in range(random_sets):
            A = ct.random_two_linked(inst, rng.randint(1, 2 * n), rng)
            over += ct.kappa(inst, A) > ct.kappa_bound(inst, A)
        res.parts.append(Part(f"kappa bound n={n}", over == 0, f"{over}/{random_sets} over"))
        phi, psi = ct.default_phi(n), ct.default_psi(inst, n)
        phi_bad = psi_bad = cover_bad = 0
        for s in range(runs):
            A = ct.random_two_linked(inst, 4, random.Random(seed * 1000 + s))
            pa = ct.phi_approximation(inst, A, phi, seed=s)
            phi_bad += not all(pa.checks.values())
            cover_bad += not pa.cover.within_bound
            ap = ct.psi_approximation(inst, A, pa.F, psi)
            psi_bad += not ap.ok
        res.parts.append(Part(f"phi-approximations n={n}", phi_bad == 0, f"{phi_bad}/{runs} bad, phi={phi}"))
        res.parts.append(Part(f"psi-approximations n={n}", psi_bad == 0, f"{psi_bad}/{runs} bad, psi={psi:.3f}"))
        res.parts.append(Part(f"cover bound n={n}", cover_bad == 0, f"{cover_bad}/{runs} over"))
    return res


@_timed
def criterion_7() -> CriterionResult:
    """Local limit estimate of layer sizes."""
    res = CriterionResult(7, "local limit theorem")
    ns = (20, 40, 80, 160)
    scaled = [n * llt.max_error(3, n) for n in ns]
    res.parts.append(Part("n * max error decreasing, t=3", _strictly_decreasing(scaled),
                          ", ".join(f"{v:.3e}" for v in scaled)))
    rep = llt.llt_layer_ratio(3, 10)
    res.parts.append(Part("central ratio within 1% at t=3 n=10", rep.relative_error <= 0.01,
                          f"{rep.predicted:.6f} vs {float(rep.exact):.6f}"))
    return res


@lru_cache(maxsize=None)
def _samples(n, samples, seed):
    return smp.sample_defects(n, samples=samples, seed=seed)


@_timed
def criterion_8(samples: int = 10_000, seed: int = 1) -> CriterionResult:
    """Sampler against exact references and the asymptotic trends."""
    res = CriterionResult(8, "CLT sampling")
    chi = smp.uniformity_test(2, steps=1_000_000, seed=seed)
    res.parts.append(Part("uniform on the 18 antichains at n=2", chi.ok and chi.states == 18,
                          f"chi2 {chi.statistic:.2f} <= {chi.critical:.2f}"))
    for n in (2, 3, 4):
        st = _samples(n, samples, seed)
        exact = float(distribution_mean(defect_distribution_exact(n)))
        k1, se = st.cumulants()[0], st.mean_se()
        res.parts.append(Part(f"mean defect n={n}", abs(k1 - exact) <= 3 * se,
                              f"{k1:.4f} vs {exact:.4f}, se {se:.4f}"))
    r = {}
    for n in (4, 8):
        k = _samples(n, samples, seed).cumulants()
        T = float(asy.t1(n))
        r[n] = (k[0] / T, k[1] / T)
    closer = all(abs(r[8][i] - 1) < abs(r[4][i] - 1) for i in (0, 1))
    res.parts.append(Part("cumulant ratios closer to 1 at n=8 than n=4", closer,
                          f"n=4 {r[4][0]:.4f}, {r[4][1]:.4f}; n=8 {r[8][0]:.4f}, {r[8][1]:.4f}"))
    fr = [_samples(n, samples, seed).structure_fraction() for n in (5, 6, 7, 8)]
    res.parts.append(Part("structure fraction non-decreasing n=5..8",
                          all(a <= b for a, b in zip(fr, fr[1:])),
                          ", ".join(f"{v:.4f}" for v in fr)))
    return res


@_timed
def criterion_9(n: int = 20, cutoff: int = 2, constants_file=None) -> CriterionResult:
    """Truncated convergence certificates at every anchor type."""
    res = CriterionResult(9, "truncated Kotecky-Preiss certificates")
    consts = iso.load_constants(constants_file)
    C = consts["C"]
    models = [(pm.CentralModel(n), pm.anchor_representatives(n, n - 1) + pm.anchor_representatives(n, n + 1)),
              (pm.ThreeLayerModel(n), pm.anchor_representatives(n, n - 1))]
    for model, anchors in models:
        worst = None
        for a in anchors:
            rep = pm.kp_check(model, a, cutoff, C)
            if worst is None or rep.margin < worst.margin:
                worst = rep
        res.parts.append(Part(f"{model.tag} n={n}", worst.passed,
                              f"{len(anchors)} anchor types, worst sum {worst.partial_sum:.3e} "
                              f"<= {worst.target:.3e}, C={C:.4f}"))
    return res


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9)


def run_all(echo=print) -> list:
    out = []
    for crit in CRITERIA:
        r = crit()
        if echo:
            echo(r.line())
        out.append(r)
    return out
