"""Markov chain sampling of uniform antichains in the three middle layers of [3]^n.

Single-site dynamics: pick a site uniformly, flip a fair coin, and on heads
toggle the site if the result is still an antichain.  The proposal is
symmetric and every accepted move is reversible, so the uniform
distribution is stationary; the coin makes the chain aperiodic.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numba
import numpy as np
from scipy import stats

from .counting import SubposetSpec, enumerate_antichains
from .poset import LayerSlice, leq, same_layer_linked


@dataclass(frozen=True)
class ChainGraph:
    """Sites of L_(n-1) u L_n u L_(n+1) with comparability lists in CSR form."""
    n: int
    sites: tuple
    defect: np.ndarray          # bool per site: off the middle layer
    ptr: np.ndarray
    idx: np.ndarray
    link_ptr: np.ndarray        # 2-linkage among defect sites
    link_idx: np.ndarray

    @property
    def size(self):
        return len(self.sites)


def _csr(lists):
    ptr = np.zeros(len(lists) + 1, dtype=np.int64)
    for i, l in enumerate(lists):
        ptr[i + 1] = ptr[i] + len(l)
    idx = np.array([j for l in lists for j in l], dtype=np.int64)
    return ptr, idx


def _defects_linked(p, q, n):
    rp, rq = sum(p), sum(q)
    if rp == rq:
        return same_layer_linked(p, q)
    return leq(p, q) or leq(q, p)


@lru_cache(maxsize=None)
def chain_graph(n: int) -> ChainGraph:
    if n < 1:
        raise ValueError("need n >= 1")
    sl = LayerSlice.build(3, n, n - 1, n + 1)
    pts = sl.points
    ranks = [sum(p) for p in pts]
    comp = [[] for _ in pts]
    link = [[] for _ in pts]
    for i, p in enumerate(pts):
        for j in range(i + 1, len(pts)):
            q = pts[j]
            if ranks[i] != ranks[j] and (leq(p, q) or leq(q, p)):
                comp[i].append(j)
                comp[j].append(i)
            if ranks[i] != n and ranks[j] != n and _defects_linked(p, q, n):
                link[i].append(j)
                link[j].append(i)
    ptr, idx = _csr(comp)
    lptr, lidx = _csr(link)
    defect = np.array([r != n for r in ranks], dtype=np.bool_)
    return ChainGraph(n, pts, defect, ptr, idx, lptr, lidx)


# ---- reference single-step implementation ----

@dataclass
class AntichainState:
    graph: ChainGraph
    occupied: np.ndarray = None
    conflicts: np.ndarray = None
    defects: int = 0

    def __post_init__(self):
        if self.occupied is None:
            self.occupied = np.zeros(self.graph.size, dtype=np.bool_)
            self.conflicts = np.zeros(self.graph.size, dtype=np.int64)

    @classmethod
    def from_points(cls, n, points):
        g = chain_graph(n)
        st = cls(g)
        pos = {p: i for i, p in enumerate(g.sites)}
        for p in points:
            if not st.add(pos[p]):
                raise ValueError("points do not form an antichain")
        return st

    def neighbours(self, site):
        g = self.graph
        return g.idx[g.ptr[site]:g.ptr[site + 1]]

    def add(self, site) -> bool:
        if self.occupied[site]:
            return True
        if self.conflicts[site]:
            return False
        self.occupied[site] = True
        self.conflicts[self.neighbours(site)] += 1
        self.defects += bool(self.graph.defect[site])
        return True

    def remove(self, site):
        if self.occupied[site]:
            self.occupied[site] = False
            self.conflicts[self.neighbours(site)] -= 1
            self.defects -= bool(self.graph.defect[site])

    def points(self):
        return [self.graph.sites[i] for i in np.nonzero(self.occupied)[0]]

    def is_antichain(self) -> bool:
        pts = self.points()
        return not any(leq(p, q) for p in pts for q in pts if p != q)


def glauber_step(state: AntichainState, site: int, coin: bool) -> bool:
    """One move; returns whether the state changed."""
    if not coin:
        return False
    if state.occupied[site]:
        state.remove(site)
        return True
    return state.add(site)


def run_reference(n, steps, seed=0, check=True):
    """Slow chain driven by numpy's generator; asserts the antichain property when check is set."""
    st = AntichainState(chain_graph(n))
    rng = np.random.default_rng(seed)
    sites = rng.integers(0, st.graph.size, steps)
    coins = rng.random(steps) < 0.5
    for s, c in zip(sites, coins):
        glauber_step(st, int(s), bool(c))
        if check:
            assert st.is_antichain()
    return st


def path_to_empty(state: AntichainState) -> bool:
    """Remove points one at a time and confirm every intermediate set is an antichain."""
    for i in list(np.nonzero(state.occupied)[0]):
        state.remove(int(i))
        if not state.is_antichain():
            return False
    return not state.occupied.any()


# ---- compiled chain ----

@numba.njit(cache=True)
def _largest_component(occ, defect, lptr, lidx, seen, stack):
    best = 0
    for s in range(occ.size):
        seen[s] = False
    for s in range(occ.size):
        if not (occ[s] and defect[s]) or seen[s]:
            continue
        seen[s] = True
        top = 0
        stack[0] = s
        size = 0
        while top >= 0:
            v = stack[top]
            top -= 1
            size += 1
            for k in range(lptr[v], lptr[v + 1]):
                w = lidx[k]
                if occ[w] and not seen[w]:
                    seen[w] = True
                    top += 1
                    stack[top] = w
        if size > best:
            best = size
    return best


@numba.njit(cache=True)
def _run_chain(ptr, idx, defect, lptr, lidx, burn_in, samples, thin, seed, want_masks):
    np.random.seed(seed)
    m = defect.size
    occ = np.zeros(m, dtype=np.bool_)
    conf = np.zeros(m, dtype=np.int64)
    ndef = 0
    out_def = np.zeros(samples, dtype=np.int64)
    out_comp = np.zeros(samples, dtype=np.int64)
    out_mask = np.zeros(samples if want_masks else 0, dtype=np.int64)
    seen = np.zeros(m, dtype=np.bool_)
    stack = np.zeros(m + 1, dtype=np.int64)
    total = burn_in + samples * thin
    k = 0
    for step in range(total):
        s = np.random.randint(0, m)
        if np.random.random() < 0.5:
            if occ[s]:
                occ[s] = False
                for e in range(ptr[s], ptr[s + 1]):
                    conf[idx[e]] -= 1
                if defect[s]:
                    ndef -= 1
            elif conf[s] == 0:
                occ[s] = True
                for e in range(ptr[s], ptr[s + 1]):
                    conf[idx[e]] += 1
                if defect[s]:
                    ndef += 1
        if step >= burn_in and (step - burn_in + 1) % thin == 0:
            out_def[k] = ndef
            out_comp[k] = _largest_component(occ, defect, lptr, lidx, seen, stack)
            if want_masks:
                mask = 0
                for i in range(m):
                    if occ[i]:
                        mask |= 1 << i
                out_mask[k] = mask
            k += 1
    return out_def, out_comp, out_mask


@dataclass
class SampleStats:
    n: int
    samples: int
    burn_in: int
    thinning: int
    seed: int
    defects: np.ndarray = field(repr=False)
    largest_component: np.ndarray = field(repr=False)
    masks: np.ndarray = field(repr=False, default=None)

    @property
    def histogram(self) -> dict:
        vals, counts = np.unique(self.defects, return_counts=True)
        return {int(v): int(c) for v, c in zip(vals, counts)}

    def cumulants(self) -> list:
        """Unbiased k-statistics k1..k4 of the defect counts."""
        x = self.defects.astype(float)
        return [float(stats.kstat(x, j)) for j in range(1, 5)]

    def batch_se(self, which=1, batches: int = 20) -> float:
        """Standard error of k1 (which=1) or k2 (which=2) from batch means."""
        parts = np.array_split(self.defects.astype(float), batches)
        vals = [float(stats.kstat(p, which)) for p in parts]
        return float(np.std(vals, ddof=1) / math.sqrt(batches))

    def mean_se(self) -> float:
        return self.batch_se(1)

    def structure_fraction(self) -> float:
        """Share of samples whose off-middle points split into 2-linked pieces of size <= 2."""
        return float(np.mean(self.largest_component <= 2))

    def record(self) -> dict:
        k = self.cumulants()
        return {"n": self.n, "samples": self.samples, "burn_in": self.burn_in,
                "thinning": self.thinning, "seed": self.seed,
                "histogram": self.histogram, "cumulants": k,
                "mean_se": self.mean_se(), "variance_se": self.batch_se(2),
                "structure_fraction": self.structure_fraction()}


def default_burn_in(n):
    return 50 * chain_graph(n).size


def default_thinning(n):
    return chain_graph(n).size


def sample_defects(n: int, samples: int = 10_000, burn_in: int | None = None,
                   thinning: int | None = None, seed: int = 0) -> SampleStats:
    g = chain_graph(n)
    burn_in = default_burn_in(n) if burn_in is None else burn_in
    thinning = default_thinning(n) if thinning is None else thinning
    if samples < 1 or thinning < 1 or burn_in < 0:
        raise ValueError("need samples >= 1, thinning >= 1, burn_in >= 0")
    want = g.size <= 62
    d, c, m = _run_chain(g.ptr, g.idx, g.defect, g.link_ptr, g.link_idx,
                         burn_in, samples, thinning, seed, want)
    return SampleStats(n, samples, burn_in, thinning, seed, d, c, m if want else None)


# ---- exact references and tests of fit ----

def exact_state_index(n: int) -> dict:
    """Bitmask (over chain_graph sites) -> index, for every antichain."""
    g = chain_graph(n)
    if g.size > 62:
        raise ValueError("too many sites for bitmask indexing")
    pos = {p: i for i, p in enumerate(g.sites)}
    out = {}
    for a in enumerate_antichains(SubposetSpec(3, n, n - 1, n + 1)):
        out[sum(1 << pos[p] for p in a)] = len(out)
    return out


@dataclass
class ChiSquareReport:
    n: int
    states: int
    samples: int
    statistic: float
    critical: float
    p_value: float
    unseen_states: int

    @property
    def ok(self):
        return self.statistic <= self.critical and self.unseen_states == 0


def uniformity_test(n: int = 2, steps: int = 1_000_000, thinning: int | None = None,
                    seed: int = 0, level: float = 0.99) -> ChiSquareReport:
    """Chi-square of visit counts against the uniform law on all antichains.

    Consecutive states are dependent, so the chain is read every `thinning`
    steps (default ten sweeps) and the test uses those readings only.
    """
    index = exact_state_index(n)
    g = chain_graph(n)
    thinning = 10 * g.size if thinning is None else thinning
    samples = steps // thinning
    st = sample_defects(n, samples=samples, burn_in=0, thinning=thinning, seed=seed)
    counts = np.zeros(len(index), dtype=np.int64)
    for mask in st.masks:
        counts[index[int(mask)]] += 1
    chi = stats.chisquare(counts)
    crit = float(stats.chi2.ppf(level, len(index) - 1))
    return ChiSquareReport(n, len(index), samples, float(chi.statistic), crit,
                           float(chi.pvalue), int(np.sum(counts == 0)))


def exact_structure_fraction(n: int) -> Fraction:
    """Exact share of antichains of L_[n-1,n+1] whose off-middle 2-linked pieces have size <= 2."""
    g = chain_graph(n)
    pos = {p: i for i, p in enumerate(g.sites)}
    good = total = 0
    seen = np.zeros(g.size, dtype=np.bool_)
    stack = np.zeros(g.size + 1, dtype=np.int64)
    for a in enumerate_antichains(SubposetSpec(3, n, n - 1, n + 1), max_points=64):
        occ = np.zeros(g.size, dtype=np.bool_)
        for p in a:
            occ[pos[p]] = True
        total += 1
        good += _largest_component(occ, g.defect, g.link_ptr, g.link_idx, seen, stack) <= 2
    return Fraction(good, total)


@dataclass
class NormalityReport:
    n: int
    samples: int
    skewness: float
    excess_kurtosis: float
    ks_distance: float
    standardized_variance: float


def normality_diagnostics(st: SampleStats, min_samples: int = 10_000) -> NormalityReport:
    if st.samples < min_samples:
        raise ValueError(f"need at least {min_samples} samples, got {st.samples}")
    k1, k2, k3, k4 = st.cumulants()
    if k2 <= 0:
        raise ValueError("degenerate sample: zero variance")
    z = (st.defects - k1) / math.sqrt(k2)
    return NormalityReport(st.n, st.samples, k3 / k2 ** 1.5, k4 / k2 ** 2,
                           float(stats.kstest(z, "norm").statistic),
                           float(stats.kstat(z, 2)))


def cumulant_scaling_gap(x, a: float, b: float) -> list:
    """|k_l((x-a)/b) - k_l(x)/b^l| for l = 2, 3, 4."""
    x = np.asarray(x, dtype=float)
    y = (x - a) / b
    return [abs(float(stats.kstat(y, l)) - float(stats.kstat(x, l)) / b ** l) for l in (2, 3, 4)]
