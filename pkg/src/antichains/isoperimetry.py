"""Shadow inequalities on the layers of [t]^n, checked by computer.

Everything here is exact.  Exhaustive checks run over all subsets of a
layer when it has at most EXHAUSTIVE_LIMIT points and fall back to seeded
random subsets otherwise; reports carry a "mode" field saying which.
"""
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from pathlib import Path

import numpy as np

from .asymptotics import log_concave, motzkin
from .counting import _all_subset_masks
from .poset import (check_params, down_neighbors, enumerate_layer, layer_size,
                    layer_sizes, middle_rank, up_neighbors)

EXHAUSTIVE_LIMIT = 22
DEFAULT_SAMPLES = 100_000
CONSTANTS_VERSION = "1"


def _same_layer(S):
    ranks = {sum(p) for p in S}
    if len(ranks) > 1:
        raise ValueError(f"set spans several layers: {sorted(ranks)}")
    return ranks.pop() if ranks else None


def compress(S, t: int, n: int | None = None) -> list:
    """First |S| points of S's layer in lexicographic order."""
    S = set(S)
    k = _same_layer(S)
    if k is None:
        return []
    n = len(next(iter(S))) if n is None else n
    return enumerate_layer(t, n, k)[:len(S)]


def last_segment(S, t: int, n: int | None = None) -> list:
    """Last |S| points of S's layer in lexicographic order."""
    S = set(S)
    k = _same_layer(S)
    if k is None:
        return []
    n = len(next(iter(S))) if n is None else n
    layer = enumerate_layer(t, n, k)
    return layer[len(layer) - len(S):]


def shadow_down(S) -> set:
    out = set()
    for p in S:
        out.update(down_neighbors(p))
    return out


def shadow_up(S, t) -> set:
    out = set()
    for p in S:
        out.update(up_neighbors(p, t))
    return out


def _masks(src, dst, step):
    pos = {p: i for i, p in enumerate(dst)}
    out = []
    for p in src:
        m = 0
        for q in step(p):
            m |= 1 << pos[q]
        out.append(m)
    return out


def _prefix_or(masks, reverse=False):
    acc = [0]
    for m in (reversed(masks) if reverse else masks):
        acc.append(acc[-1] | m)
    return acc


@dataclass
class CLReport:
    t: int
    n: int
    mode: str
    subsets_checked: int = 0
    violations: int = 0
    witness: tuple | None = None

    @property
    def ok(self):
        return self.violations == 0


def _random_subsets(width, samples, rng):
    for _ in range(samples):
        size = rng.randint(1, width)
        yield sum(1 << i for i in rng.sample(range(width), size))


def _layer_checks(t, n, k, top):
    """(direction, neighbour masks, shadow-of-segment table, segment-mask builder)."""
    layer = enumerate_layer(t, n, k)
    out = []
    if k > 0:
        below = enumerate_layer(t, n, k - 1)
        dm = _masks(layer, below, down_neighbors)
        # compressed sets are prefixes, and C(N-(S)) is the first |N-(S)| points
        out.append(("down", dm, _prefix_or(dm), lambda g: (1 << g) - 1))
    if k < top:
        above = enumerate_layer(t, n, k + 1)
        um = _masks(layer, above, lambda p: up_neighbors(p, t))
        wa = len(above)
        full = (1 << wa) - 1
        # entry s of the suffix table is the up-shadow of the last s points
        out.append(("up", um, _prefix_or(um, reverse=True),
                    lambda g: full ^ ((1 << (wa - g)) - 1)))
    return layer, out


def verify_clements_lindstrom(t: int, n: int, samples: int = DEFAULT_SAMPLES,
                              seed: int = 0) -> CLReport:
    """Check N-(C(S)) inside C(N-(S)) and N+(L(S)) inside L(N+(S)) on every layer."""
    check_params(t, n)
    top = (t - 1) * n
    rep = CLReport(t, n, "exhaustive")
    rng = random.Random(seed)

    def record(direction, k, layer, bits, count=1):
        rep.violations += count
        if rep.witness is None:
            rep.witness = (direction, k, tuple(p for i, p in enumerate(layer) if bits >> i & 1))

    for k in range(top + 1):
        layer, checks = _layer_checks(t, n, k, top)
        w = len(layer)
        for direction, masks, seg, target in checks:
            vectorised = w <= EXHAUSTIVE_LIMIT and max(masks).bit_length() < 63
            if vectorised:
                nbr = _all_subset_masks(masks)
                size = np.bitwise_count(np.arange(1 << w, dtype=np.int64))
                gsize = np.bitwise_count(nbr)
                segs = np.array(seg, dtype=np.int64)[size]
                targets = np.array([target(g) for g in range(int(gsize.max()) + 1)], dtype=np.int64)
                bad = np.nonzero(segs & ~targets[gsize])[0]
                rep.subsets_checked += 1 << w
                if len(bad):
                    record(direction, k, layer, int(bad[0]), len(bad))
                continue
            rep.mode = "sampled"
            for bits in _random_subsets(w, samples, rng):
                g = 0
                for i in range(w):
                    if bits >> i & 1:
                        g |= masks[i]
                rep.subsets_checked += 1
                if seg[bits.bit_count()] & ~target(g.bit_count()):
                    record(direction, k, layer, bits)
    return rep


@dataclass
class ExpansionReport:
    t: int
    n: int
    lower: int
    upper: int
    direction: str
    mode: str
    subsets_checked: int
    min_ratio: Fraction
    layer_ratio: Fraction
    witness: tuple

    @property
    def ok(self):
        return self.min_ratio >= self.layer_ratio


def _min_expansion(layer, masks, samples, rng):
    """Minimum |N(A)|/|A| over nonempty A, as (ratio, bits, mode, count)."""
    w = len(layer)
    if w <= EXHAUSTIVE_LIMIT and max(masks, default=0).bit_length() < 63:
        nbr = _all_subset_masks(masks)[1:]
        size = np.bitwise_count(np.arange(1, 1 << w, dtype=np.int64))
        gsize = np.bitwise_count(nbr)
        # compare g/s exactly by cross-multiplying against the running best
        best = None
        for s in range(1, w + 1):
            sel = size == s
            g = int(gsize[sel].min())
            if best is None or Fraction(g, s) < best[0]:
                idx = int(np.nonzero(sel & (gsize == g))[0][0]) + 1
                best = (Fraction(g, s), idx)
        return best[0], best[1], "exhaustive", (1 << w) - 1
    best = None
    for bits in _random_subsets(w, samples, rng):
        g = 0
        for i in range(w):
            if bits >> i & 1:
                g |= masks[i]
        r = Fraction(g.bit_count(), bits.bit_count())
        if best is None or r < best[0]:
            best = (r, bits)
    return best[0], best[1], "sampled", samples


def normalized_matching_check(t: int, n: int, lower: int, direction: str = "up",
                              samples: int = DEFAULT_SAMPLES, seed: int = 0) -> ExpansionReport:
    """Minimum neighbourhood expansion between layers lower and lower+1.

    direction "up" takes A in the lower layer, "down" takes A in the upper one.
    The ratio of layer sizes is the benchmark every A should meet.
    """
    check_params(t, n)
    if not 0 <= lower < (t - 1) * n:
        raise ValueError("need two consecutive layers inside [0, (t-1)n]")
    bottom, top = enumerate_layer(t, n, lower), enumerate_layer(t, n, lower + 1)
    if direction == "up":
        src, masks = bottom, _masks(bottom, top, lambda p: up_neighbors(p, t))
        bench = Fraction(len(top), len(bottom))
    elif direction == "down":
        src, masks = top, _masks(top, bottom, down_neighbors)
        bench = Fraction(len(bottom), len(top))
    else:
        raise ValueError("direction must be 'up' or 'down'")
    ratio, bits, mode, count = _min_expansion(src, masks, samples, random.Random(seed))
    witness = tuple(p for i, p in enumerate(src) if bits >> i & 1)
    return ExpansionReport(t, n, lower, lower + 1, direction, mode, count, ratio, bench, witness)


def layer_ratio(t: int, n: int, j: int) -> Fraction:
    """ell_j / ell_(j-1), exactly."""
    if j < 1:
        raise ValueError("need j >= 1")
    return Fraction(layer_size(t, n, j), layer_size(t, n, j - 1))


def implied_constant(t: int, n: int, j: int | None = None) -> Fraction:
    """t^2 n (ell_j/ell_(j-1) - 1); j defaults to the lower middle layer."""
    j = middle_rank(t, n) if j is None else j
    return t * t * n * (layer_ratio(t, n, j) - 1)


def layer_ratio_floor(ts=(2, 3, 4, 5), n_max: int = 30, n_min: int = 2) -> dict:
    """Smallest implied constant over the grid, with where it occurs."""
    best = None
    for t in ts:
        for n in range(n_min, n_max + 1):
            if middle_rank(t, n) < 1:
                continue
            c = implied_constant(t, n)
            if best is None or c < best[0]:
                best = (c, t, n)
    return {"c": best[0], "t": best[1], "n": best[2], "grid": {"t": list(ts), "n": [n_min, n_max]}}


def layers_log_concave(t: int, n: int) -> bool:
    return log_concave(list(layer_sizes(t, n)))


def motzkin_gap_holds(n: int) -> bool:
    """ell_n >= ell_(n-1) + M_(n-2) in [3]^n."""
    if n < 2:
        raise ValueError("need n >= 2")
    return layer_size(3, n, n) >= layer_size(3, n, n - 1) + motzkin(n - 2)


# ---- symmetric chains from bracket matching ----

@dataclass(frozen=True)
class BracketStructure:
    """Per-position symbols '(' ')' or '*', plus the matched pairs (left, right)."""
    symbols: tuple
    pairs: tuple

    def __str__(self):
        return "".join(self.symbols)

    @property
    def unmatched(self) -> int:
        return self.symbols.count("*")


def bracket_configuration(x, t: int) -> list:
    """Block i holds x_i right brackets followed by t-1-x_i left brackets."""
    out = []
    for v in x:
        if not 0 <= v < t:
            raise ValueError(f"coordinate {v} outside [0, {t - 1}]")
        out.extend(")" * v + "(" * (t - 1 - v))
    return out


def bracket_structure(x, t: int) -> BracketStructure:
    conf = bracket_configuration(x, t)
    symbols = ["*"] * len(conf)
    pairs = []
    stack = []
    for i, ch in enumerate(conf):
        if ch == "(":
            stack.append(i)
        elif stack:
            j = stack.pop()
            symbols[j], symbols[i] = "(", ")"
            pairs.append((j, i))
    return BracketStructure(tuple(symbols), tuple(sorted(pairs)))


@dataclass(frozen=True)
class SymmetricChain:
    points: tuple
    t: int

    @property
    def start(self):
        return sum(self.points[0])

    @property
    def end(self):
        return sum(self.points[-1])

    def __len__(self):
        return len(self.points)

    def is_saturated(self) -> bool:
        for p, q in zip(self.points, self.points[1:]):
            diff = [b - a for a, b in zip(p, q)]
            if sorted(diff) != [0] * (len(p) - 1) + [1]:
                return False
        return True

    def is_symmetric(self) -> bool:
        return self.start + self.end == (self.t - 1) * len(self.points[0])


def _all_points(t, n):
    for k in range((t - 1) * n + 1):
        yield from enumerate_layer(t, n, k)


def tsai_scd(t: int, n: int, max_points: int = 100_000) -> list:
    """Group [t]^n by bracket structure; each class is one chain, sorted by rank."""
    check_params(t, n)
    if t ** n > max_points:
        raise ValueError(f"{t}^{n} points exceeds the limit of {max_points}")
    classes = {}
    for x in _all_points(t, n):
        classes.setdefault(bracket_structure(x, t).symbols, []).append(x)
    chains = [SymmetricChain(tuple(sorted(pts, key=sum)), t) for pts in classes.values()]
    chains.sort(key=lambda c: c.points[0])
    return chains


@dataclass
class SCDReport:
    t: int
    n: int
    chains: int
    middle_size: int
    partition: bool
    saturated: bool
    symmetric: bool

    @property
    def ok(self):
        return self.partition and self.saturated and self.symmetric and self.chains == self.middle_size


def check_scd(t: int, n: int) -> SCDReport:
    chains = tsai_scd(t, n)
    seen = [p for c in chains for p in c.points]
    partition = len(seen) == len(set(seen)) == t ** n
    return SCDReport(t, n, len(chains), layer_size(t, n, middle_rank(t, n)), partition,
                     all(c.is_saturated() for c in chains),
                     all(c.is_symmetric() for c in chains))


def chain_successor_map(t: int, n: int) -> dict:
    """Map L_(m-1) -> L_m sending x to the next point of its chain."""
    m = middle_rank(t, n)
    out = {}
    for c in tsai_scd(t, n):
        for p, q in zip(c.points, c.points[1:]):
            if sum(p) == m - 1:
                out[p] = q
    return out


@dataclass
class FullyMatchedReport:
    n: int
    fully_matched: int
    singleton_chains: int
    layer_gap: int
    motzkin_floor: int

    @property
    def ok(self):
        return (self.fully_matched == self.singleton_chains == self.layer_gap
                and self.fully_matched >= self.motzkin_floor)


def fully_matched_count(n: int) -> FullyMatchedReport:
    """Points of the middle layer of [3]^n whose brackets all match."""
    if n < 2:
        raise ValueError("need n >= 2")
    fm = sum(1 for x in enumerate_layer(3, n, n) if bracket_structure(x, 3).unmatched == 0)
    singles = sum(1 for c in tsai_scd(3, n) if len(c) == 1)
    gap = layer_size(3, n, n) - layer_size(3, n, n - 1)
    return FullyMatchedReport(n, fm, singles, gap, motzkin(n - 2))


# ---- expansion out of a layer below the middle ----

@dataclass
class UpExpansionReport:
    t: int
    n: int
    layer: int
    mode: str
    sets_checked: int
    c: float
    c_prime: float
    worst_slack: dict
    violations: dict
    witnesses: dict = field(default_factory=dict)

    @property
    def ok(self):
        return not any(self.violations.values())


def _up_checks(S_size, g, n, t, c, c_prime):
    """Slack of each inequality (nonnegative means it holds)."""
    out = {"a": Fraction(g) - Fraction(S_size * (n - S_size), 2),
           "b": g - (1 + c / (t * t * n)) * S_size}
    if S_size <= n ** 4:
        out["c"] = g - c_prime * n * S_size / t
    return out


def up_expansion_check(t: int, n: int, i: int, sets=None, max_size: int | None = None,
                       c: float = 1.0, c_prime: float = 1.0, samples: int = 20_000,
                       seed: int = 0) -> UpExpansionReport:
    """Test the three lower bounds on |N+(S)| for S in L_i, i below the middle.

    With sets=None every subset up to max_size is tried when that is at most
    2^EXHAUSTIVE_LIMIT sets; otherwise random subsets are drawn.
    """
    check_params(t, n)
    m = middle_rank(t, n)
    if not 0 <= i < m:
        raise ValueError(f"layer {i} is not below the middle layer {m}")
    layer = enumerate_layer(t, n, i)
    max_size = len(layer) if max_size is None else min(max_size, len(layer))
    if sets is not None:
        mode, family = "given", [tuple(S) for S in sets]
    else:
        total = sum(comb(len(layer), r) for r in range(1, max_size + 1))
        if total <= 1 << EXHAUSTIVE_LIMIT:
            mode = "exhaustive"
            family = (S for r in range(1, max_size + 1) for S in combinations(layer, r))
        else:
            rng = random.Random(seed)
            mode = "sampled"
            family = (tuple(rng.sample(layer, rng.randint(1, max_size))) for _ in range(samples))
    worst, bad, wit = {}, {"a": 0, "b": 0, "c": 0}, {}
    count = 0
    for S in family:
        if any(sum(p) != i for p in S):
            raise ValueError("every set must lie in the given layer")
        count += 1
        g = len(shadow_up(S, t))
        for key, slack in _up_checks(len(S), g, n, t, c, c_prime).items():
            if key not in worst or slack < worst[key]:
                worst[key] = slack
                if slack < 0:
                    wit[key] = S
            if slack < 0:
                bad[key] += 1
    return UpExpansionReport(t, n, i, mode, count, c, c_prime,
                             {k: float(v) for k, v in worst.items()}, bad, wit)


# ---- the two middle layers when (t-1)n is odd ----

@dataclass
class TwoMiddleReport:
    t: int
    n: int
    upper_layer: int
    prefixes_checked: int
    min_ratio: Fraction
    implied_constant: Fraction
    half_prefix_first_coord_max: int
    last_point_shadow: int

    @property
    def ok(self):
        return (self.min_ratio > 1 and self.half_prefix_first_coord_max <= self.t // 2
                and self.last_point_shadow >= 2)


def two_middle_layers_check(t: int, n: int) -> TwoMiddleReport:
    """Down-expansion of compressed S in the upper middle layer with |S| <= half of it.

    Compressed sets are lex prefixes, and compression cannot enlarge the
    down-shadow, so the prefixes carry the minimum for every size.
    """
    check_params(t, n)
    if (t - 1) * n % 2 == 0:
        raise ValueError("need (t-1)n odd so that there are two middle layers")
    m = middle_rank(t, n)
    upper = enumerate_layer(t, n, m + 1)
    half = len(upper) // 2
    shadow = set()
    best = None
    for s, p in enumerate(upper[:half], start=1):
        shadow.update(down_neighbors(p))
        r = Fraction(len(shadow), s)
        if best is None or r < best:
            best = r
    if best is None:
        best = Fraction(len(down_neighbors(upper[0])), 1)
    first_max = max((p[0] for p in upper[:half]), default=0)
    return TwoMiddleReport(t, n, m + 1, half, best, t * t * n * (best - 1), first_max,
                           len(down_neighbors(upper[-1])))


# ---- empirical constants ----

def up_shadow_floor(ts=(2, 3, 4), n_max: int = 8, n_min: int = 2) -> dict:
    """Smallest t|N+(S)|/(n|S|) over last segments S of L_i, i below the middle, |S| <= n^4.

    Last segments minimise the up-shadow for their size, so this is the
    minimum over all such S on the grid.
    """
    best = None
    for t in ts:
        for n in range(n_min, n_max + 1):
            for i in range(middle_rank(t, n)):
                layer = enumerate_layer(t, n, i)
                shadow = set()
                for s in range(1, min(n ** 4, len(layer)) + 1):
                    shadow.update(up_neighbors(layer[-s], t))
                    r = Fraction(t * len(shadow), n * s)
                    if best is None or r < best[0]:
                        best = (r, t, n, i, s)
    return {"c_prime": best[0], "t": best[1], "n": best[2], "layer": best[3], "size": best[4],
            "grid": {"t": list(ts), "n": [n_min, n_max]}}


def empirical_constants() -> dict:
    lr = layer_ratio_floor()
    us = up_shadow_floor()
    c, cp = lr["c"], us["c_prime"]
    return {"version": CONSTANTS_VERSION,
            "c": float(c), "c_exact": f"{c.numerator}/{c.denominator}",
            "c_prime": float(cp), "c_prime_exact": f"{cp.numerator}/{cp.denominator}",
            "C": float(min(c / 9, cp / 3)),
            "c_source": {k: v for k, v in lr.items() if k != "c"},
            "c_prime_source": {k: v for k, v in us.items() if k != "c_prime"}}


DEFAULT_CONSTANTS_PATH = Path(__file__).with_name("constants.json")


def write_constants(path=DEFAULT_CONSTANTS_PATH) -> dict:
    data = empirical_constants()
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return data


def load_constants(path=None) -> dict:
    path = DEFAULT_CONSTANTS_PATH if path is None else Path(path)
    data = json.loads(Path(path).read_text())
    for key in ("version", "c", "c_prime", "C"):
        if key not in data:
            raise ValueError(f"constants file {path} lacks {key!r}")
    return data
