"""Polymer models on the layers around the middle of [3]^n.

A polymer is a 2-linked set of points on one layer (two points of a layer
are 2-linked when they differ by moving one unit between coordinates).
Weights are exact Fractions; partition functions and cluster sums are exact.
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations

from .counting import (InstanceTooLarge, SubposetSpec, count_antichains_layered,
                       enumerate_antichains)
from .poset import (LayerSlice, down_neighbors, enumerate_layer, layer_size, leq,
                    linked_in_layer, up_neighbors)


# ---------------------------------------------------------------- Ursell

def _connected(k, edges):
    parent = list(range(k))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    comps = k
    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            comps -= 1
    return comps == 1


@lru_cache(maxsize=None)
def _ursell_cached(k, edges):
    total = 0
    for r in range(len(edges) + 1):
        for sub in combinations(edges, r):
            if _connected(k, sub):
                total += (-1) ** r
    return Fraction(total, math.factorial(k))


def ursell(k: int, edges) -> Fraction:
    """(1/k!) * sum over connected spanning edge subsets E' of (-1)^|E'|."""
    if k > 7:
        raise InstanceTooLarge("Ursell function refused above 7 vertices")
    if k < 1:
        raise ValueError("graph needs at least one vertex")
    canon = tuple(sorted({tuple(sorted(e)) for e in edges if e[0] != e[1]}))
    return _ursell_cached(k, canon)


# ---------------------------------------------------------------- models

class PolymerModel:
    """Base class.  Subclasses define ground membership, 2-linking, weights,
    and the seeds of a polymer: a polymer is incompatible with A exactly when
    it meets seeds(A).  The ground layers are only listed when asked for, so
    large n works for local computations."""
    tag = "abstract"

    def __init__(self, n):
        self.n = n
        self._ground = None
        self._link = {}

    def in_ground(self, v) -> bool:
        raise NotImplementedError

    def _list_ground(self):
        raise NotImplementedError

    @property
    def ground(self):
        if self._ground is None:
            self._ground = sorted(self._list_ground(), key=self.order_key)
        return self._ground

    @staticmethod
    def order_key(v):
        return (sum(v), v)

    @property
    def max_hasse_degree(self):
        return 2 * self.n

    def link(self, v):
        out = self._link.get(v)
        if out is None:
            out = [q for q in linked_in_layer(v, 3) if self.in_ground(q)]
            self._link[v] = out
        return out

    def weight(self, A) -> Fraction:
        raise NotImplementedError

    def seeds(self, A) -> set:
        raise NotImplementedError

    def compatible(self, A, B) -> bool:
        return not (self.seeds(A) & set(B))

    def describe(self):
        return {"model": self.tag, "n": self.n}


class CentralModel(PolymerModel):
    """Polymers on the two layers next to the middle; weight 2^-|boundary|,
    compatible when the middle-layer boundaries are disjoint.  With
    max_size set, larger polymers get weight zero."""
    tag = "central"

    def __init__(self, n, max_size=None):
        super().__init__(n)
        self.max_size = max_size
        if max_size is not None:
            self.tag = f"central-truncated-{max_size}"
        self._nb = {}

    def in_ground(self, v):
        return abs(sum(v) - self.n) == 1

    def _list_ground(self):
        return enumerate_layer(3, self.n, self.n - 1) + enumerate_layer(3, self.n, self.n + 1)

    def point_boundary(self, v):
        out = self._nb.get(v)
        if out is None:
            out = frozenset(up_neighbors(v, 3) if sum(v) < self.n else down_neighbors(v))
            self._nb[v] = out
        return out

    def boundary(self, A) -> frozenset:
        out = set()
        for v in A:
            out |= self.point_boundary(v)
        return frozenset(out)

    def weight(self, A):
        if self.max_size is not None and len(A) > self.max_size:
            return Fraction(0)
        return Fraction(1, 2 ** len(self.boundary(A)))

    def seeds(self, A):
        out = set()
        for p in self.boundary(A):
            out.update(up_neighbors(p, 3))
            out.update(down_neighbors(p))
        return out


class ThreeLayerModel(PolymerModel):
    """Polymers in the restricted layer below the middle; two polymers are
    compatible when their union is not 2-linked.

    variant "w":        2^(|int A| - |N+(A) in the restricted middle|)
    variant "w_prime":  2^(-|N+(A) in the restricted middle|)
    """

    def __init__(self, n, X=(), variant="w"):
        if variant not in ("w", "w_prime"):
            raise ValueError("variant must be 'w' or 'w_prime'")
        self.X = frozenset(tuple(x) for x in X)
        self.variant = variant
        self.tag = f"three-layer-{variant}"
        self._upc = {}
        super().__init__(n)

    def _free(self, v):
        return not any(leq(v, x) for x in self.X)

    def in_ground(self, v):
        return sum(v) == self.n - 1 and self._free(v)

    def in_middle(self, v):
        return sum(v) == self.n and self._free(v)

    def _list_ground(self):
        return LayerSlice.build(3, self.n, self.n - 1, exclude_above=sorted(self.X)).points

    def middle_size(self):
        return len(LayerSlice.build(3, self.n, self.n, exclude_above=sorted(self.X)).points)

    def _up(self, v):
        out = self._upc.get(v)
        if out is None:
            out = up_neighbors(v, 3)
            self._upc[v] = out
        return out

    def upper_count(self, A):
        up = set()
        for v in A:
            up.update(self._up(v))
        if not self.X:
            return len(up)
        return sum(1 for u in up if self.in_middle(u))

    def interior(self, A):
        # a point two layers below the middle has at least n - (n-2)//2 up-neighbours
        if len(A) < self.n - (self.n - 2) // 2:
            return set()
        A = set(A)
        below = set()
        for v in A:
            below.update(down_neighbors(v))
        return {v for v in below if set(self._up(v)) <= A}

    def weight(self, A):
        e = -self.upper_count(A)
        if self.variant == "w":
            e += len(self.interior(A))
        return Fraction(2) ** e

    def seeds(self, A):
        out = set(A)
        for v in A:
            out.update(self.link(v))
        return out


# ---------------------------------------------------------------- polymers

def polymer_count_ceiling(model, size):
    """Rooted 2-linked sets of a given size number at most (e * D^2)^(size-1)."""
    return (math.e * model.max_hasse_degree ** 2) ** (size - 1)


def enumerate_polymers(model, anchor, max_size, budget=1e8, smallest=False):
    """Every 2-linked set of size <= max_size containing anchor, each once.

    With smallest=True only sets whose least vertex (ground order) is the
    anchor are produced, so looping over all anchors lists every polymer once.
    """
    if not model.in_ground(anchor):
        raise ValueError(f"{anchor} is not a ground vertex of the model")
    if max_size < 1:
        return
    if polymer_count_ceiling(model, max_size) > budget:
        raise InstanceTooLarge(f"polymer budget exceeded for size {max_size}")
    key = model.order_key
    floor = key(anchor)

    def ok(v):
        return not smallest or key(v) > floor

    start = frozenset([anchor])
    frontier = [v for v in model.link(anchor) if ok(v)]
    stack = [(start, frontier, frozenset(start))]
    while stack:
        current, frontier, blocked = stack.pop()
        yield current
        if len(current) == max_size:
            continue
        if len(current) + 1 == max_size:
            for v in frontier:
                yield current | {v}
            continue
        # branch i takes frontier[i] and excludes frontier[:i] for good;
        # blocked doubles as the "already on the frontier" marker
        running = set(blocked)
        running.update(frontier)
        for i, v in enumerate(frontier):
            extra = [w for w in model.link(v) if w not in running and ok(w)]
            stack.append((current | {v}, frontier[i + 1:] + extra, frozenset(running.union(extra))))


def all_polymers(model, max_size=None, **kw):
    if max_size is None:
        max_size = len(model.ground)
        kw.setdefault("budget", math.inf)
    for v in model.ground:
        yield from enumerate_polymers(model, v, max_size, smallest=True, **kw)


# ---------------------------------------------------------------- partition functions

def configuration_polynomial(model, max_polymers=20000) -> list:
    """Coefficient s is the total weight of compatible polymer collections
    covering s ground vertices (the empty collection gives 1 at s = 0)."""
    polys = [A for A in all_polymers(model, getattr(model, "max_size", None))]
    if len(polys) > max_polymers:
        raise InstanceTooLarge(f"{len(polys)} polymers is too many for exhaustive summation")
    polys = [A for A in polys if model.weight(A) != 0]
    weights = [model.weight(A) for A in polys]
    sizes = [len(A) for A in polys]
    containing = {}
    for i, A in enumerate(polys):
        for v in A:
            containing.setdefault(v, 0)
            containing[v] |= 1 << i
    conflict = []
    for i, A in enumerate(polys):
        m = 0
        for v in model.seeds(A):
            m |= containing.get(v, 0)
        conflict.append(m)
    coeffs = {}
    stack = [((1 << len(polys)) - 1, Fraction(1), 0)]
    while stack:
        allowed, w, s = stack.pop()
        if not allowed:
            coeffs[s] = coeffs.get(s, 0) + w
            continue
        low = allowed & -allowed
        i = low.bit_length() - 1
        rest = allowed ^ low
        stack.append((rest, w, s))
        stack.append((rest & ~conflict[i], w * weights[i], s + sizes[i]))
    top = max(coeffs)
    return [coeffs.get(s, Fraction(0)) for s in range(top + 1)]


def partition_function_exact(model, **kw) -> Fraction:
    return sum(configuration_polynomial(model, **kw), Fraction(0))


def defect_pgf(n: int) -> list:
    """Partition function of the central model with every polymer A tilted by z^|A|.

    Returned as coefficients; dividing by their sum gives the probability
    generating function of the number of off-middle points in a uniform
    antichain of the three middle layers.
    """
    if n > 3:
        raise InstanceTooLarge("exact tilted partition functions only for n <= 3")
    return configuration_polynomial(CentralModel(n))


def central_identity(n):
    """(2^|middle| * Xi, antichains of the three middle layers)."""
    lhs = 2 ** layer_size(3, n, n) * partition_function_exact(CentralModel(n))
    rhs = count_antichains_layered(SubposetSpec(3, n, n - 1, n + 1)).count
    return lhs, rhs


def three_layer_identity(n, X=(), variant="w"):
    """(2^|restricted middle| * Xi, antichains of the restricted range).

    The range is layers n-2..n for weight w and n-1..n for w_prime.
    """
    model = ThreeLayerModel(n, X, variant)
    lhs = 2 ** model.middle_size() * partition_function_exact(model)
    low = n - 2 if variant == "w" else n - 1
    rhs = count_antichains_layered(SubposetSpec(3, n, max(low, 0), n, frozenset(X))).count
    return lhs, rhs


def random_antichains_above(n, count, rng):
    """Distinct antichains of layers n+1..2n, drawn uniformly (the empty one excluded)."""
    pool = [a for a in enumerate_antichains(SubposetSpec(3, n, n + 1, 2 * n)) if a]
    idx = rng.choice(len(pool), size=min(count, len(pool)), replace=False)
    return [frozenset(pool[i]) for i in sorted(idx)]


# ---------------------------------------------------------------- clusters

@dataclass(frozen=True)
class Cluster:
    polymers: tuple
    weight: Fraction

    @property
    def size(self):
        return sum(len(A) for A in self.polymers)

    def incompatibility_edges(self, model):
        return [(i, j) for i, j in combinations(range(len(self.polymers)), 2)
                if not model.compatible(self.polymers[i], self.polymers[j])]


def _polymers_by_size(model, max_size):
    out = {s: [] for s in range(1, max_size + 1)}
    for A in all_polymers(model, max_size):
        out[len(A)].append(A)
    return out


def _connected_multisets(model, polys, max_total):
    """Sorted index tuples of polymers (repeats allowed) whose incompatibility
    graph is connected and whose sizes add up to at most max_total."""
    containing = {}
    for i, A in enumerate(polys):
        for v in A:
            containing.setdefault(v, []).append(i)
    conflicts = []
    for A in polys:
        c = set()
        for v in model.seeds(A):
            c.update(containing.get(v, ()))
        conflicts.append(c)
    sizes = [len(A) for A in polys]
    found = set()
    stack = [((i,), sizes[i]) for i in range(len(polys))]
    while stack:
        members, total = stack.pop()
        key = tuple(sorted(members))
        if key in found:
            continue
        found.add(key)
        room = max_total - total
        if room <= 0:
            continue
        cand = set()
        for i in members:
            cand |= conflicts[i]
        for j in cand:
            if sizes[j] <= room:
                stack.append((members + (j,), total + sizes[j]))
    return found


def _graph_of(model, seq):
    return [(i, j) for i, j in combinations(range(len(seq)), 2)
            if not model.compatible(seq[i], seq[j])]


def enumerate_clusters(model, max_total, max_polymer_count=20000):
    """Every ordered cluster of total size <= max_total, each once."""
    if max_total > 3:
        raise InstanceTooLarge("cluster enumeration is limited to total size 3")
    polys = [A for s, group in _polymers_by_size(model, max_total).items() for A in group]
    if len(polys) > max_polymer_count:
        raise InstanceTooLarge(f"{len(polys)} polymers is too many for cluster enumeration")
    for key in sorted(_connected_multisets(model, polys, max_total)):
        for order in sorted(set(permutations(key))):
            seq = tuple(polys[i] for i in order)
            phi = ursell(len(seq), _graph_of(model, seq))
            w = phi
            for A in seq:
                w *= model.weight(A)
            yield Cluster(seq, w)


def _cluster_sum_enumerated(model, k, absolute):
    total = Fraction(0)
    polys = [A for s, group in _polymers_by_size(model, k).items() for A in group]
    for key in _connected_multisets(model, polys, k):
        seq = [polys[i] for i in key]
        if sum(len(A) for A in seq) != k:
            continue
        arrangements = len(set(permutations(key)))
        w = ursell(len(seq), _graph_of(model, seq))
        for A in seq:
            w *= model.weight(A)
        total += arrangements * (abs(w) if absolute else w)
    return total


def _scaled(weights):
    scale = 1
    for w in weights:
        scale = scale * w.denominator // math.gcd(scale, w.denominator)
    return scale, [int(w * scale) for w in weights]


def _cluster_sum_incidence(model, k, absolute):
    """Cluster sums of total size <= 3 from incidence counts among small polymers.

    Only pairwise incompatibility of singletons and of (pair, singleton) is
    needed, plus plain sums over polymers of size k; the Ursell values of the
    one-, two- and three-vertex connected graphs weight the pieces.
    """
    singles = [frozenset([v]) for v in model.ground]
    idx = {v: i for i, v in enumerate(model.ground)}
    scale, W = _scaled([model.weight(A) for A in singles])
    nbrs = []
    for A in singles:
        nbrs.append({idx[v] for v in model.seeds(A) if v in idx})
    s = [sum(W[j] for j in nb) for nb in nbrs]
    one = Fraction(sum(W), scale)
    if k == 1:
        return one
    edge = ursell(2, [(0, 1)])
    if k == 2:
        pair_w = sum((model.weight(A) for A in all_polymers(model, 2) if len(A) == 2), Fraction(0))
        ordered = Fraction(sum(W[i] * s[i] for i in range(len(W))), scale ** 2)
        return pair_w + (abs(edge) if absolute else edge) * ordered
    if k != 3:
        raise ValueError("incidence route covers total sizes 1, 2 and 3")
    path = ursell(3, [(0, 1), (1, 2)])
    tri = ursell(3, [(0, 1), (1, 2), (0, 2)])
    triples = Fraction(0)
    mixed = Fraction(0)
    for A in all_polymers(model, 3):
        if len(A) == 3:
            triples += model.weight(A)
        elif len(A) == 2:
            touched = {idx[v] for v in model.seeds(A) if v in idx}
            mixed += model.weight(A) * Fraction(sum(W[j] for j in touched), scale)
    # ordered singleton triples: Q counts those with a chosen centre adjacent to
    # both others, T those forming a triangle (self-incompatibility included)
    Q = sum(W[a] * s[a] * s[a] for a in range(len(W)))
    T = 0
    for a in range(len(W)):
        na = nbrs[a]
        for b in na:
            common = na & nbrs[b]
            T += W[a] * W[b] * sum(W[c] for c in common)
    paths = 3 * Q - 3 * T
    singles3 = Fraction(tri * T + path * paths, scale ** 3)
    # a pair polymer next to a singleton in either order
    mixed_total = 2 * edge * mixed
    if absolute:
        return triples + abs(mixed_total) + abs(tri) * Fraction(T, scale ** 3) \
            + abs(path) * Fraction(paths, scale ** 3)
    return triples + mixed_total + singles3


def cluster_sum(model, k: int, moment: int = 0, method: str = "auto", absolute: bool = False) -> Fraction:
    """Sum of w(cluster) * size^moment over clusters of total size k.

    With absolute=True the absolute values of the cluster weights are summed.
    """
    if method == "auto":
        method = "incidence" if k <= 3 else "enumerate"
    if method == "incidence":
        total = _cluster_sum_incidence(model, k, absolute)
    elif method == "enumerate":
        total = _cluster_sum_enumerated(model, k, absolute)
    else:
        raise ValueError(f"unknown method {method}")
    return total * k ** moment


# ---------------------------------------------------------------- Kotecky-Preiss

def kp_functions(n, C):
    """The pair (f, g) used to certify convergence, as functions of |A|."""
    ln2 = math.log(2)

    def f(size):
        return size * ln2 / n ** 2

    def g(size):
        if size <= n / 10:
            return ((n - 2) / 2 * size - size ** 2) * ln2 - 10 * size * math.log(n)
        if size <= n ** 4:
            return 9 * C / 10 * n * size * ln2
        return size * ln2 / n ** 2

    return f, g


@dataclass(frozen=True)
class KPReport:
    model: str
    anchor: tuple
    cutoff: int
    partial_sum: float
    target: float
    polymers_counted: int
    partial_sum_g_clamped: float
    note: str = ("only polymers up to the cutoff size enter the sum; this certifies "
                 "the truncation, not the full inequality")

    @property
    def margin(self):
        return self.target - self.partial_sum

    @property
    def passed(self):
        return self.partial_sum <= self.target


def kp_check(model, anchor, cutoff, C, f=None, g=None) -> KPReport:
    """Partial sum over polymers B of size <= cutoff incompatible with {anchor}
    of |w(B)| exp(f(B) + g(B)), compared with f({anchor})."""
    if f is None or g is None:
        f0, g0 = kp_functions(model.n, C)
        f, g = f or f0, g or g0
    A = frozenset([anchor])
    found = set()
    if cutoff >= 1:
        for seed in model.seeds(A):
            if model.in_ground(seed):
                found.update(enumerate_polymers(model, seed, cutoff))
    total = 0.0
    clamped = 0.0
    for B in found:
        w = abs(float(model.weight(B)))
        total += w * math.exp(f(len(B)) + g(len(B)))
        clamped += w * math.exp(f(len(B)) + max(g(len(B)), 0.0))
    return KPReport(model.tag, tuple(anchor), cutoff, total, f(1), len(found), clamped)


def anchor_representatives(n, layer):
    """One point per vertex type of a layer of [3]^n (symmetric models only)."""
    reps = []
    for twos in range(n + 1):
        for zeros in range(n + 1 - twos):
            ones = n - twos - zeros
            if ones + 2 * twos == layer:
                reps.append((0,) * zeros + (1,) * ones + (2,) * twos)
    return reps
