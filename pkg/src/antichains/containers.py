"""Per-instance container constructions on a bipartite graph X u Y.

The graphs of interest are two consecutive layers of [3]^n with the
lower layer as X.  Nothing here counts container families; each routine
builds one object for one set A and checks its defining conditions.
"""
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .poset import down_neighbors, enumerate_layer, up_neighbors


@dataclass
class BipartiteInstance:
    X: list
    Y: list
    adj: dict            # vertex -> frozenset of neighbours on the other side
    label: str = ""
    order: str = "lexicographic on coordinate tuples"

    @classmethod
    def from_layers(cls, n: int, lower: int, t: int = 3):
        X = enumerate_layer(t, n, lower)
        Y = enumerate_layer(t, n, lower + 1)
        adj = {x: frozenset(up_neighbors(x, t)) for x in X}
        adj.update({y: frozenset(down_neighbors(y)) for y in Y})
        return cls(X, Y, adj, f"L_{lower} u L_{lower + 1} of [{t}]^{n}")

    def degree(self, v) -> int:
        return len(self.adj[v])

    @property
    def d(self) -> int:
        return max(len(a) for a in self.adj.values())

    @property
    def min_degree(self) -> int:
        return min(len(a) for a in self.adj.values())

    @property
    def delta(self) -> Fraction:
        return Fraction(self.min_degree, self.d)

    def codegree(self) -> int:
        """Largest number of common neighbours of two distinct vertices."""
        best = 0
        for side in (self.X, self.Y):
            count = {}
            for v in side:
                for w in self.adj[v]:
                    for u in self.adj[w]:
                        if u > v:
                            count[(v, u)] = count.get((v, u), 0) + 1
            best = max(best, max(count.values(), default=0))
        return best

    def nbhd(self, A) -> set:
        out = set()
        for v in A:
            out |= self.adj[v]
        return out

    def closure(self, A) -> set:
        """Vertices of X whose whole neighbourhood lies in N(A)."""
        G = self.nbhd(A)
        return {v for v in self.X if self.adj[v] <= G}

    def deg_into(self, v, Z) -> int:
        return len(self.adj[v] & Z)

    def edges_between(self, A, B) -> int:
        B = B if isinstance(B, (set, frozenset)) else set(B)
        return sum(len(self.adj[a] & B) for a in A)

    def is_two_linked(self, A) -> bool:
        A = set(A)
        if not A:
            return True
        start = next(iter(A))
        seen, stack = {start}, [start]
        while stack:
            v = stack.pop()
            for w in self.adj[v]:
                for u in self.adj[w]:
                    if u in A and u not in seen:
                        seen.add(u)
                        stack.append(u)
        return seen == A


@dataclass
class DegreeAudit:
    label: str
    d: int
    min_degree: int
    delta: Fraction
    codegree: int
    dominance_ok: bool
    dominance_failures: int
    degree_range_ok: bool

    @property
    def ok(self):
        return self.dominance_ok and self.degree_range_ok and self.codegree == 1


def degree_audit(n: int, lower: int | None = None, t: int = 3) -> DegreeAudit:
    """Degree census of consecutive layers (default L_(n-1), L_n), lower layer as X."""
    lower = n - 1 if lower is None else lower
    inst = BipartiteInstance.from_layers(n, lower, t)
    fails = sum(1 for v in inst.X for w in inst.adj[v] if inst.degree(v) < inst.degree(w))
    d, lo = inst.d, inst.min_degree
    in_range = all(lo <= len(a) <= d for a in inst.adj.values())
    return DegreeAudit(inst.label, d, lo, Fraction(lo, d), inst.codegree(),
                       fails == 0, fails, in_range)


def kappa(inst: BipartiteInstance, A) -> int:
    """Edges from N(A) to the part of X outside the closure of A."""
    closed = inst.closure(A)
    return sum(len(inst.adj[y] - closed) for y in inst.nbhd(A))


def kappa_bound(inst: BipartiteInstance, A) -> int:
    """d (|N(A)| - |[A]|), an upper bound for kappa."""
    return inst.d * (len(inst.nbhd(A)) - len(inst.closure(A)))


def random_two_linked(inst: BipartiteInstance, size: int, rng: random.Random) -> set:
    """Grow a 2-linked subset of X one random 2-neighbour at a time."""
    if not 1 <= size <= len(inst.X):
        raise ValueError("size out of range")
    A = {rng.choice(inst.X)}
    frontier = set()
    for v in A:
        frontier |= {u for w in inst.adj[v] for u in inst.adj[w]}
    frontier -= A
    while len(A) < size:
        if not frontier:
            raise ValueError("component exhausted before reaching the requested size")
        v = rng.choice(sorted(frontier))
        A.add(v)
        frontier |= {u for w in inst.adj[v] for u in inst.adj[w]}
        frontier -= A
    return A


@dataclass
class Cover:
    chosen: list
    bound: float
    x: int
    y: int

    @property
    def within_bound(self):
        return len(self.chosen) <= self.bound + 1e-12


def lovasz_stein_cover(U, W, adj, x: int | None = None, y: int | None = None) -> Cover:
    """Greedy cover of U by vertices of W (repeatedly take the w covering most).

    adj maps each vertex to its neighbours; only edges between U and W count.
    x defaults to the smallest degree of U into W, y to the largest degree of
    W into U.
    """
    U, W = set(U), list(W)
    Wset = set(W)
    if not U:
        return Cover([], 0.0, x or 0, y or 0)
    into_W = {u: adj[u] & Wset for u in U}
    for u, nb in into_W.items():
        if not nb:
            raise ValueError(f"{u} has no neighbour in W and cannot be covered")
    into_U = {w: adj[w] & U for w in W}
    x = min(len(nb) for nb in into_W.values()) if x is None else x
    y = max(len(nb) for nb in into_U.values()) if y is None else y
    uncovered = set(U)
    chosen = []
    while uncovered:
        # ties go to the earliest vertex of W
        w = max(W, key=lambda w: len(into_U[w] & uncovered))
        chosen.append(w)
        uncovered -= into_U[w]
    bound = len(W) / x * (1 + math.log(y)) if y > 0 else 0.0
    return Cover(chosen, bound, x, y)


@dataclass
class PhiApprox:
    F: frozenset
    phi: float
    p: float
    retries: int
    checks: dict
    cover: Cover
    sample_conditions: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(self.checks.values()) and self.cover.within_bound


class RetryBudgetExhausted(RuntimeError):
    def __init__(self, msg, failure_rates):
        super().__init__(msg)
        self.failure_rates = failure_rates


def design_probability(inst: BipartiteInstance, phi: float) -> float:
    """10 Delta log d / (phi delta d), natural log, capped at 1."""
    d = inst.d
    p = 10 * inst.codegree() * math.log(d) / (phi * inst.min_degree)
    return min(1.0, p)


def phi_conditions(inst, A, F, phi) -> dict:
    closed = inst.closure(A)
    G = inst.nbhd(A)
    G_phi = {v for v in G if inst.deg_into(v, closed) > phi}
    return {"G_phi_in_F": G_phi <= F, "F_in_G": F <= G, "covers_closure": closed <= inst.nbhd(F)}


def phi_approximation(inst: BipartiteInstance, A, phi: float, seed: int = 0,
                      p: float | None = None, budget: int = 1000) -> PhiApprox:
    """Random T0 inside N(A), retried until its three size conditions hold, then a greedy cover."""
    if not 1 <= phi <= inst.min_degree - 1:
        raise ValueError(f"phi={phi} outside [1, {inst.min_degree - 1}]")
    rng = random.Random(seed)
    A = set(A)
    closed = inst.closure(A)
    outside = set(inst.X) - closed
    G = sorted(inst.nbhd(A))
    g, d = len(G), inst.d
    k = kappa(inst, A)
    G_phi = {v for v in G if inst.deg_into(v, closed) > phi}
    p = design_probability(inst, phi) if p is None else p
    fails = {"size": 0, "escaping_edges": 0, "missed": 0}
    for attempt in range(budget):
        T0 = {v for v in G if rng.random() < p}
        reach = inst.nbhd({u for v in T0 for u in inst.adj[v] & closed})
        missed = G_phi - reach
        conds = {"size": len(T0) <= 3 * g * p,
                 "escaping_edges": inst.edges_between(T0, outside) <= 3 * k * p,
                 "missed": len(missed) <= 3 * g / d ** 10}
        if all(conds.values()):
            break
        for key, good in conds.items():
            fails[key] += not good
    else:
        raise RetryBudgetExhausted(f"no admissible T0 in {budget} tries",
                                   {key: v / budget for key, v in fails.items()})
    L = reach | missed
    todo = closed - inst.nbhd(L)
    cover = lovasz_stein_cover(todo, sorted(set(G) - L), inst.adj)
    F = frozenset(L | set(cover.chosen))
    return PhiApprox(F, phi, p, attempt, phi_conditions(inst, A, F, phi), cover, conds)


@dataclass
class ApproxPair:
    S: frozenset
    F: frozenset
    psi: float
    checks: dict
    bounds: dict

    @property
    def ok(self):
        return all(self.checks.values()) and all(self.bounds.values())


def psi_conditions(inst, A, S, F, psi) -> dict:
    closed = inst.closure(A)
    G = inst.nbhd(A)
    Xs = set(inst.X)
    return {"F_in_G": F <= G,
            "S_contains_closure": closed <= S,
            "S_degrees": all(inst.deg_into(u, F) >= inst.degree(u) - psi for u in S),
            "outside_F_degrees": all(inst.deg_into(v, Xs - S) >= inst.degree(v) - psi
                                     for v in inst.Y if v not in F)}


def psi_bounds(inst, A, S, F, psi) -> dict:
    """Exact consequences on the output: sizes of S - [A], G - F, and the escaping edges."""
    closed = inst.closure(A)
    G = inst.nbhd(A)
    k = kappa(inst, A)
    slack = inst.min_degree - psi
    s_extra, g_missing = len(S - closed), len(G - F)
    escaping = inst.edges_between(S, set(inst.Y) - F)
    return {"S_excess": s_extra * slack <= k,
            "G_deficit": g_missing * slack <= k,
            "escaping_edges": escaping <= psi * (s_extra + g_missing),
            "S_vs_F": len(S) <= len(F) + Fraction(escaping, inst.min_degree)}


def psi_approximation(inst: BipartiteInstance, A, F_prime, psi: float) -> ApproxPair:
    """Two greedy passes: grow F until [A] is well covered, then trim S."""
    if not 1 <= psi <= inst.min_degree - 1:
        raise ValueError(f"psi={psi} outside [1, {inst.min_degree - 1}]")
    A = set(A)
    closed = sorted(inst.closure(A))
    G = inst.nbhd(A)
    F = set(F_prime)
    while True:
        bad = [u for u in closed if inst.deg_into(u, G - F) > psi]
        if not bad:
            break
        F |= inst.adj[bad[0]]
    S = {u for u in inst.X if inst.deg_into(u, F) >= inst.degree(u) - psi}
    outside = sorted(v for v in inst.Y if v not in G)
    while True:
        bad = [v for v in outside if inst.deg_into(v, S) > psi]
        if not bad:
            break
        S -= inst.adj[bad[0]]
    F |= {v for v in inst.Y if inst.deg_into(v, S) > psi}
    S, F = frozenset(S), frozenset(F)
    return ApproxPair(S, F, psi, psi_conditions(inst, A, S, F, psi),
                      psi_bounds(inst, A, S, F, psi))


def default_phi(n: int) -> float:
    return n / 4


def default_psi(inst: BipartiteInstance, n: int) -> float:
    """sqrt(n), lowered to min degree - 1 when that is smaller."""
    return min(math.sqrt(n), inst.min_degree - 1)
