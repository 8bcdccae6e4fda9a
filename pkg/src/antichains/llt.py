"""Edgeworth-corrected local limit estimates for layer sizes of [t]^n.

A uniform point of [t]^n has coordinate sum S_n, a sum of n independent
uniform variables on {0..t-1}, and P(S_n = j) = ell_j / t^n exactly.
"""
import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction

from .poset import check_params, layer_sizes, middle_rank


@dataclass(frozen=True)
class LatticeStepLaw:
    t: int
    mean: Fraction
    variance: Fraction
    kappa3: Fraction
    kappa4: Fraction

    @classmethod
    def uniform(cls, t: int):
        if t < 2:
            raise ValueError("need t >= 2")
        mu = Fraction(t - 1, 2)

        def central(k):
            return sum((Fraction(i) - mu) ** k for i in range(t)) / t

        m2 = central(2)
        return cls(t, mu, m2, central(3), central(4) - 3 * m2 ** 2)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.variance)


def hermite(k: int, x: float) -> float:
    """Probabilists' Hermite polynomial, by He_(k+1) = x He_k - k He_(k-1)."""
    if k < 0:
        raise ValueError("k must be non-negative")
    prev, cur = 1.0, x
    if k == 0:
        return prev
    for i in range(1, k):
        prev, cur = cur, x * cur - i * prev
    return cur


def _gauss(x):
    return math.exp(-x * x / 2) / math.sqrt(2 * math.pi)


def q_polynomial(i: int, x: float, law: LatticeStepLaw) -> float:
    s = law.sigma
    k3, k4 = float(law.kappa3), float(law.kappa4)
    if i == 1:
        return _gauss(x) * hermite(3, x) * k3 / (6 * s ** 3)
    if i == 2:
        return _gauss(x) * (hermite(6, x) * k3 ** 2 / (72 * s ** 6)
                            + hermite(4, x) * k4 / (24 * s ** 4))
    raise ValueError("only i = 1 and i = 2 are provided")


def standardized(t: int, n: int, j: int) -> float:
    law = LatticeStepLaw.uniform(t)
    return (j - n * float(law.mean)) / (law.sigma * math.sqrt(n))


def esseen_estimate(t: int, n: int, j: int) -> float:
    """Approximation of sigma sqrt(n) P(S_n = j) with the 1/n correction."""
    check_params(t, n)
    if not 0 <= j <= (t - 1) * n:
        raise ValueError("j outside the range of S_n")
    law = LatticeStepLaw.uniform(t)
    x = standardized(t, n, j)
    return _gauss(x) * (1 + hermite(4, x) * float(law.kappa4) / (24 * law.variance ** 2 * n))


def exact_scaled(t: int, n: int, j: int) -> float:
    """sigma sqrt(n) ell_j / t^n."""
    law = LatticeStepLaw.uniform(t)
    return law.sigma * math.sqrt(n) * float(Fraction(layer_sizes(t, n)[j], t ** n))


def error_profile(t: int, n: int) -> list:
    rows = []
    for j in range((t - 1) * n + 1):
        ex, est = exact_scaled(t, n, j), esseen_estimate(t, n, j)
        err = abs(ex - est)
        rows.append({"t": t, "n": n, "j": j, "exact": ex, "estimate": est,
                     "abs_error": err, "n_abs_error": n * err})
    return rows


def max_error(t: int, n: int) -> float:
    return max(r["abs_error"] for r in error_profile(t, n))


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    cols = ["t", "n", "j", "exact", "estimate", "abs_error", "n_abs_error"]
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(r[k]) if isinstance(r[k], float) else r[k]) for k in cols})
    return buf.getvalue()


@dataclass
class RatioReport:
    t: int
    n: int
    x_lower: float
    x_upper: float
    predicted: float
    exact: Fraction

    @property
    def relative_error(self) -> float:
        return abs(self.predicted / float(self.exact) - 1)


def llt_layer_ratio(t: int, n: int) -> RatioReport:
    """Predicted ell_m/ell_(m-1) from the estimate, next to the exact ratio."""
    m = middle_rank(t, n)
    if m < 1:
        raise ValueError("need a layer below the middle one")
    sizes = layer_sizes(t, n)
    return RatioReport(t, n, standardized(t, n, m - 1), standardized(t, n, m),
                       esseen_estimate(t, n, m) / esseen_estimate(t, n, m - 1),
                       Fraction(sizes[m], sizes[m - 1]))


def total_probability(t: int, n: int) -> Fraction:
    return Fraction(sum(layer_sizes(t, n)), t ** n)
