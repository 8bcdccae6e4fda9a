"""Exact antichain counts for layer ranges of [t]^n.

Two independent routes: exhaustive include/exclude search over the points
(small instances), and a layer-by-layer downset count whose transition is a
superset-sum transform over the subsets of a single layer.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .poset import (LayerSlice, boundary, check_params, down_neighbors,
                    enumerate_layer, layer_size, leq)


class InstanceTooLarge(ValueError):
    """Raised when an exhaustive routine is asked for more than it can do."""


@dataclass(frozen=True)
class SubposetSpec:
    """Layers k_low..k_high of [t]^n, minus everything strictly below a point of X."""
    t: int
    n: int
    k_low: int
    k_high: int
    X: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        check_params(self.t, self.n)
        object.__setattr__(self, "X", frozenset(tuple(x) for x in self.X))
        for x in self.X:
            if sum(x) <= self.k_high:
                raise ValueError(f"X point {x} is not above layer {self.k_high}")

    @classmethod
    def full(cls, t, n):
        return cls(t, n, 0, (t - 1) * n)

    def slice(self) -> LayerSlice:
        return LayerSlice.build(self.t, self.n, self.k_low, self.k_high,
                                exclude_above=sorted(self.X))

    def describe(self) -> dict:
        return {"t": self.t, "n": self.n, "layers": [self.k_low, self.k_high],
                "X": [list(x) for x in sorted(self.X)]}


@dataclass(frozen=True)
class CountResult:
    count: int
    method: str
    spec: SubposetSpec


def _comparability_masks(points):
    masks = [0] * len(points)
    for i, j in combinations(range(len(points)), 2):
        p, q = points[i], points[j]
        if leq(p, q) or leq(q, p):
            masks[i] |= 1 << j
            masks[j] |= 1 << i
    return masks


def _brute_points(spec, max_points):
    pts = spec.slice().points
    if len(pts) > max_points:
        raise InstanceTooLarge(f"{len(pts)} points exceeds the exhaustive limit of {max_points}")
    return pts


def _antichain_masks(comp, allowed):
    # walk the subset tree, dropping every point comparable to a chosen one
    stack = [(allowed, 0)]
    while stack:
        allowed, chosen = stack.pop()
        if not allowed:
            yield chosen
            continue
        low = allowed & -allowed
        i = low.bit_length() - 1
        rest = allowed ^ low
        stack.append((rest & ~comp[i], chosen | low))
        stack.append((rest, chosen))


def count_antichains_brute(spec: SubposetSpec, max_points: int = 25) -> CountResult:
    """Exhaustive search over the subsets of the instance."""
    pts = _brute_points(spec, max_points)
    comp = _comparability_masks(pts)
    total = sum(1 for _ in _antichain_masks(comp, (1 << len(pts)) - 1))
    return CountResult(total, "brute", spec)


def enumerate_antichains(spec: SubposetSpec, max_points: int = 25):
    """Yield every antichain once, as a tuple of points in slice order."""
    pts = _brute_points(spec, max_points)
    comp = _comparability_masks(pts)
    for mask in _antichain_masks(comp, (1 << len(pts)) - 1):
        yield tuple(p for i, p in enumerate(pts) if mask >> i & 1)


def _layers_and_masks(spec, max_width):
    sl = spec.slice()
    layers = [sl.layer(k) for k in range(spec.k_low, spec.k_high + 1)]
    widest = max(len(L) for L in layers)
    if widest > max_width:
        raise InstanceTooLarge(f"layer of width {widest} exceeds the limit of {max_width}")
    down = []
    for lower, upper in zip(layers, layers[1:]):
        pos = {p: i for i, p in enumerate(lower)}
        masks = []
        for q in upper:
            m = 0
            for p in down_neighbors(q):
                if p in pos:
                    m |= 1 << pos[p]
            masks.append(m)
        down.append(masks)
    return layers, down


def _all_subset_masks(masks):
    # entry T is the OR of masks[j] over the bits j of T
    out = np.zeros(1, dtype=np.int64)
    for m in masks:
        out = np.concatenate([out, out | m])
    return out


def _superset_sum(f, width):
    """In place: f[..., N] <- sum of f[..., S] over S containing N."""
    lead = f.shape[:-1]
    for i in range(width):
        v = f.reshape(lead + (-1, 2, 1 << i))
        v[..., 0, :] += v[..., 1, :]


def _weighted_superset_sum(f, width):
    """In place on a (degree, subset) array: sum over S containing N of f[S] z^|S - N|."""
    for i in range(width):
        v = f.reshape(f.shape[0], -1, 2, 1 << i)
        v[1:, :, 0, :] += v[:-1, :, 1, :]


def _downset_dp(layers, down, marked, dtype):
    """Downset count, as a polynomial in z marking the maximal elements on marked layers."""
    marked = set(marked)
    degree = 0
    f = np.ones((1, 1 << len(layers[0])), dtype=dtype)
    for k in range(len(layers) - 1):
        width = len(layers[k])
        if k in marked:
            f = np.concatenate([f, np.zeros((width, f.shape[1]), dtype=dtype)])
            degree += width
            _weighted_superset_sum(f, width)
        else:
            _superset_sum(f, width)
        f = f[:, _all_subset_masks(down[k])]
    last = len(layers) - 1
    if last in marked:
        sizes = np.bitwise_count(np.arange(f.shape[1], dtype=np.int64))
        poly = [0] * (degree + len(layers[last]) + 1)
        for s in range(len(layers[last]) + 1):
            col = f[:, sizes == s].sum(axis=1)
            for d, c in enumerate(col):
                poly[d + s] += int(c)
    else:
        poly = [int(c) for c in f.sum(axis=1)]
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return poly


def _layered_poly(spec, marked, max_width):
    layers, down = _layers_and_masks(spec, max_width)
    if not layers or all(len(L) == 0 for L in layers):
        return [1]
    # every intermediate entry is bounded by the final total, so a float pass
    # tells us whether 64-bit integers are safe
    estimate = _downset_dp(layers, down, (), np.float64)[0]
    dtype = np.int64 if estimate < 2.0 ** 60 else object
    return _downset_dp(layers, down, marked, dtype)


def count_antichains_layered(spec: SubposetSpec, max_width: int = 22) -> CountResult:
    """Count downsets (equivalently antichains) layer by layer."""
    return CountResult(_layered_poly(spec, (), max_width)[0], "layered-dp", spec)


def maximal_element_polynomial(spec: SubposetSpec, marked_layers, max_width: int = 22) -> list:
    """Coefficient d counts antichains with exactly d points on the given layers."""
    marked = [k - spec.k_low for k in marked_layers if spec.k_low <= k <= spec.k_high]
    return _layered_poly(spec, marked, max_width)


def central_spec(n: int) -> SubposetSpec:
    return SubposetSpec(3, n, n - 1, n + 1)


def defect_distribution_exact(n: int, method: str = "auto") -> dict:
    """Number of antichains of the three middle layers of [3]^n with a given number
    of points off the middle layer."""
    if not 1 <= n <= 4:
        raise InstanceTooLarge("exact defect tallies are available for 1 <= n <= 4")
    spec = central_spec(n)
    if method == "auto":
        method = "brute" if n <= 3 else "layered"
    if method == "brute":
        tally = {}
        for a in enumerate_antichains(spec):
            d = sum(1 for p in a if sum(p) != n)
            tally[d] = tally.get(d, 0) + 1
        return dict(sorted(tally.items()))
    poly = maximal_element_polynomial(spec, [n - 1, n + 1])
    return {d: c for d, c in enumerate(poly) if c}


def distribution_mean(tally: dict) -> Fraction:
    total = sum(tally.values())
    return Fraction(sum(d * c for d, c in tally.items()), total)


def ramsey_number(n: int, t: int = 3) -> int:
    """Smallest N such that every 2-colouring contains a monochromatic monotone
    path of length 3; equals the antichain count of [t]^n plus one."""
    return count_antichains_layered(SubposetSpec.full(t, n)).count + 1


def macmahon_box(a: int, b: int, c: int) -> int:
    """Plane partitions inside an a x b x c box."""
    num, den = 1, 1
    for i in range(1, a + 1):
        for j in range(1, b + 1):
            for k in range(1, c + 1):
                num *= i + j + k - 1
                den *= i + j + k - 2
    q, r = divmod(num, den)
    assert r == 0
    return q


def _downset_masks(t, n):
    spec = SubposetSpec.full(t, n)
    sl = spec.slice()
    below = [0] * len(sl.points)
    for i, p in enumerate(sl.points):
        m = 1 << i
        for q in down_neighbors(p):
            m |= below[sl.index[q]]
        below[i] = m
    out = []
    for a in enumerate_antichains(spec, max_points=64):
        m = 0
        for p in a:
            m |= below[sl.index[p]]
        out.append(m)
    return out


def count_by_slicing(t: int, n: int) -> int:
    """Antichains of [t]^n as multichains D_0 >= ... >= D_(t-1) of downsets of [t]^(n-1).

    Fixing the first coordinate to j cuts a downset of [t]^n into a downset
    D_j of [t]^(n-1), and these are nested.
    """
    if n == 1:
        return t + 1
    downs = _downset_masks(t, n - 1)
    if len(downs) > 5000:
        raise InstanceTooLarge("too many downsets for the slicing oracle")
    below = [[j for j, e in enumerate(downs) if e & d == e] for d in downs]
    chains = [1] * len(downs)
    for _ in range(t - 1):
        chains = [sum(chains[j] for j in below[i]) for i in range(len(downs))]
    return sum(chains)


def count_by_boundary_decomposition(n: int) -> int:
    """Sum over boundary-disjoint pairs (lower, upper) of 2^(free middle points).

    Splits an antichain of the three middle layers of [3]^n into its parts on
    the outer layers; the middle part is any subset of the middle points not
    comparable to them.
    """
    lower = enumerate_layer(3, n, n - 1)
    upper = enumerate_layer(3, n, n + 1)
    if len(lower) > 12:
        raise InstanceTooLarge("boundary decomposition is exhaustive; n <= 3 only")
    mid = layer_size(3, n, n)

    def boundaries(pts):
        out = []
        for r in range(len(pts) + 1):
            for sub in combinations(pts, r):
                out.append(boundary(sub, 3, n) if sub else frozenset())
        return out

    total = 0
    for bl in boundaries(lower):
        for bu in boundaries(upper):
            if not bl & bu:
                total += 2 ** (mid - len(bl | bu))
    return total
