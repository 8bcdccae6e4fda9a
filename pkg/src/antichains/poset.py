"""Points, layers and neighbourhoods of the product of chains [t]^n.

Points are plain tuples of ints.  The chain length t is carried by the
caller (or by a LayerSlice), which keeps the hot loops cheap.
"""
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, NamedTuple

Point = tuple


def check_params(t: int, n: int) -> None:
    if t < 2 or n < 1:
        raise ValueError(f"need t >= 2 and n >= 1, got t={t}, n={n}")


def rank(p: Point) -> int:
    return sum(p)


def _check_layer(t, n, k):
    check_params(t, n)
    if not 0 <= k <= (t - 1) * n:
        raise ValueError(f"layer {k} outside [0, {(t - 1) * n}] for t={t}, n={n}")


@lru_cache(maxsize=None)
def _layer_tuple(t, n, k):
    out = []

    def rec(prefix, left, remaining):
        if left == 0:
            if remaining == 0:
                out.append(tuple(prefix))
            return
        # the remaining coordinates can absorb at most (t-1)*left
        lo = max(0, remaining - (t - 1) * (left - 1))
        hi = min(t - 1, remaining)
        for v in range(lo, hi + 1):
            prefix.append(v)
            rec(prefix, left - 1, remaining - v)
            prefix.pop()

    rec([], n, k)
    return tuple(out)


def enumerate_layer(t: int, n: int, k: int) -> list:
    """All points of rank k, in increasing lexicographic order."""
    _check_layer(t, n, k)
    return list(_layer_tuple(t, n, k))


@lru_cache(maxsize=None)
def layer_sizes(t: int, n: int) -> tuple:
    """Coefficients of (1 + z + ... + z^(t-1))^n."""
    check_params(t, n)
    coeffs = [1]
    for _ in range(n):
        new = [0] * (len(coeffs) + t - 1)
        for i, c in enumerate(coeffs):
            if c:
                for j in range(t):
                    new[i + j] += c
        coeffs = new
    return tuple(coeffs)


def layer_size(t: int, n: int, k: int) -> int:
    _check_layer(t, n, k)
    return layer_sizes(t, n)[k]


def middle_rank(t: int, n: int) -> int:
    return (t - 1) * n // 2


def up_neighbors(p: Point, t: int) -> list:
    out = []
    for i, v in enumerate(p):
        if v < t - 1:
            out.append(p[:i] + (v + 1,) + p[i + 1:])
    return out


def down_neighbors(p: Point, t: int = 0) -> list:
    out = []
    for i, v in enumerate(p):
        if v > 0:
            out.append(p[:i] + (v - 1,) + p[i + 1:])
    return out


def neighbors(p: Point, t: int) -> list:
    return up_neighbors(p, t) + down_neighbors(p)


def leq(p: Point, q: Point) -> bool:
    return all(a <= b for a, b in zip(p, q))


def comparable(p: Point, q: Point) -> bool:
    return leq(p, q) or leq(q, p)


def dual(p: Point, t: int) -> Point:
    """Order-reversing involution u -> (t-1, ..., t-1) - u."""
    return tuple(t - 1 - v for v in p)


class VertexType(NamedTuple):
    zeros: int
    ones: int
    twos: int

    @property
    def up_degree(self):
        return self.zeros + self.ones

    @property
    def down_degree(self):
        return self.ones + self.twos


def vertex_type(p: Point, t: int = 3) -> VertexType:
    if t != 3:
        raise NotImplementedError("vertex types are defined for t = 3 only")
    return VertexType(p.count(0), p.count(1), p.count(2))


def up_set(points: Iterable, t: int) -> set:
    out = set()
    for p in points:
        out.update(up_neighbors(p, t))
    return out


def down_set(points: Iterable, t: int = 0) -> set:
    out = set()
    for p in points:
        out.update(down_neighbors(p))
    return out


def _single_rank(points, what="set"):
    ranks = {sum(p) for p in points}
    if len(ranks) > 1:
        raise ValueError(f"{what} must lie in a single layer, found ranks {sorted(ranks)}")
    return ranks.pop() if ranks else None


def closure(A: Iterable, t: int) -> frozenset:
    """{v in the layer of A : N+(v) is inside N+(A)}."""
    A = frozenset(A)
    if not A:
        return frozenset()
    _single_rank(A, "closure argument")
    up = up_set(A, t)
    out = {v for v in down_set(up) if set(up_neighbors(v, t)) <= up}
    # only the maximum has an empty up-neighbourhood; A always belongs
    out.update(A)
    return frozenset(out)


def interior(A: Iterable, t: int = 3) -> frozenset:
    """Points one layer below A whose whole up-neighbourhood lies in A."""
    A = frozenset(A)
    if not A:
        return frozenset()
    _single_rank(A, "interior argument")
    return frozenset(v for v in down_set(A) if set(up_neighbors(v, t)) <= A)


def boundary(A: Iterable, t: int = 3, middle: int | None = None) -> frozenset:
    """Neighbours of A in the middle layer; A must sit one layer above or below it."""
    A = frozenset(A)
    if not A:
        return frozenset()
    n = len(next(iter(A)))
    if middle is None:
        if (t - 1) * n % 2:
            raise ValueError("no single middle layer; pass middle explicitly")
        middle = (t - 1) * n // 2
    out = set()
    for p in A:
        r = sum(p)
        if r == middle - 1:
            out.update(up_neighbors(p, t))
        elif r == middle + 1:
            out.update(down_neighbors(p))
        else:
            raise ValueError(f"point {p} has rank {r}, expected {middle - 1} or {middle + 1}")
    return frozenset(out)


def restrict_above(Y: Iterable, X: Iterable) -> list:
    """Points of Y that are not strictly below any element of X."""
    X = list(X)
    out = []
    for v in Y:
        if not any(v != w and leq(v, w) for w in X):
            out.append(v)
    return out


def two_linked_components(S: Iterable, t: int, k_low: int, k_high: int) -> list:
    """Split S into classes joined by Hasse paths of length <= 2 inside [k_low, k_high].

    Paths may pass through points of the ambient range that are not in S.
    Components come back as sorted lists, ordered by their first point.
    """
    S = set(S)
    for p in S:
        if not k_low <= sum(p) <= k_high:
            raise ValueError(f"{p} outside layer range [{k_low}, {k_high}]")
    seen = set()
    comps = []
    for start in sorted(S):
        if start in seen:
            continue
        comp = [start]
        seen.add(start)
        queue = deque([start])
        while queue:
            p = queue.popleft()
            for q in ball2(p, t, k_low, k_high):
                if q in S and q not in seen:
                    seen.add(q)
                    comp.append(q)
                    queue.append(q)
        comps.append(sorted(comp))
    return comps


def ball2(p: Point, t: int, k_low: int, k_high: int) -> set:
    """Points at Hasse distance 1 or 2 from p, using only ranks in [k_low, k_high]."""
    first = [q for q in neighbors(p, t) if k_low <= sum(q) <= k_high]
    out = set(first)
    for q in first:
        for r in neighbors(q, t):
            if k_low <= sum(r) <= k_high:
                out.add(r)
    out.discard(p)
    return out


def same_layer_linked(p: Point, q: Point) -> bool:
    """Two distinct points of one layer are 2-linked iff they differ by e_i - e_j."""
    diff = [a - b for a, b in zip(p, q) if a != b]
    return sorted(diff) == [-1, 1]


def linked_in_layer(p: Point, t: int) -> list:
    """All points of p's layer at Hasse distance exactly 2 (moves of one unit)."""
    out = []
    n = len(p)
    for i in range(n):
        if p[i] == t - 1:
            continue
        for j in range(n):
            if j != i and p[j] > 0:
                q = list(p)
                q[i] += 1
                q[j] -= 1
                out.append(tuple(q))
    return out


@dataclass(frozen=True)
class LayerSlice:
    """Indexed point list of the layers k_low..k_high, optionally with points removed."""
    t: int
    n: int
    k_low: int
    k_high: int
    points: tuple
    index: dict = field(compare=False, repr=False)

    @classmethod
    def build(cls, t, n, k_low, k_high=None, exclude_above=()):
        if k_high is None:
            k_high = k_low
        check_params(t, n)
        top = (t - 1) * n
        k_low, k_high = max(k_low, 0), min(k_high, top)
        exclude_above = list(exclude_above)
        pts = []
        for k in range(k_low, k_high + 1):
            layer = _layer_tuple(t, n, k)
            if exclude_above:
                layer = restrict_above(layer, exclude_above)
            pts.extend(layer)
        pts = tuple(pts)
        return cls(t, n, k_low, k_high, pts, {p: i for i, p in enumerate(pts)})

    def __len__(self):
        return len(self.points)

    def layer(self, k) -> list:
        return [p for p in self.points if sum(p) == k]

    def to_bits(self, points) -> int:
        bits = 0
        for p in points:
            bits |= 1 << self.index[p]
        return bits

    def from_bits(self, bits: int) -> list:
        out = []
        i = 0
        while bits:
            if bits & 1:
                out.append(self.points[i])
            bits >>= 1
            i += 1
        return out

    def subset(self, points) -> "PointSet":
        return PointSet(self, self.to_bits(points))


@dataclass(frozen=True)
class PointSet:
    slice: LayerSlice
    bits: int

    def __len__(self):
        return self.bits.bit_count()

    def __iter__(self):
        return iter(self.slice.from_bits(self.bits))

    def __contains__(self, p):
        i = self.slice.index.get(p)
        return i is not None and bool(self.bits >> i & 1)

    def __or__(self, other):
        return PointSet(self.slice, self.bits | other.bits)

    def __and__(self, other):
        return PointSet(self.slice, self.bits & other.bits)

    def __sub__(self, other):
        return PointSet(self.slice, self.bits & ~other.bits)


def append_twos(p: Point, n: int, i: int) -> Point:
    """Embed a point of [3]^n into [3]^(2n-i) by appending n-i coordinates equal to 2."""
    if not i < n:
        raise ValueError(f"need i < n, got i={i}, n={n}")
    return tuple(p) + (2,) * (n - i)


embed_phi = append_twos


def verify_layer_embedding(n: int, i: int, j: int, X: Iterable = ()) -> dict:
    """Check that appending twos is an order isomorphism between two restricted ranges.

    Source: layers j..i of [3]^n below nothing in X.  Target: layers
    2n-2i+j .. 2n-i of [3]^(2n-i), restricted by the image of X together with
    the all-twos vector lowered by one in each appended coordinate.
    """
    if not j < i < n:
        raise ValueError("need j < i < n")
    X = list(X)
    if any(sum(x) <= i for x in X):
        raise ValueError("X must lie strictly above layer i")
    N = 2 * n - i
    source = LayerSlice.build(3, n, j, i, exclude_above=X).points
    extra = [(2,) * c + (1,) + (2,) * (N - c - 1) for c in range(n, N)]
    X2 = [append_twos(x, n, i) for x in X] + extra
    target = LayerSlice.build(3, N, N - i + j, N, exclude_above=X2).points
    image = [append_twos(p, n, i) for p in source]
    bijective = sorted(image) == sorted(target) and len(set(image)) == len(image)
    order_ok = all(leq(p, q) == leq(fp, fq)
                   for p, fp in zip(source, image) for q, fq in zip(source, image))
    return {"source_size": len(source), "target_size": len(target),
            "bijective": bijective, "order_preserving": order_ok,
            "ok": bijective and order_ok}
