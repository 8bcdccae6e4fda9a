"""Leading terms of log alpha([3]^n), their closed forms, and the hypergeometric link."""
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import mpmath

from .poset import layer_size

PRECISION_BITS = 128


def _first_term_summand(n, k):
    return Fraction(comb(n, 2 * k + 1) * comb(2 * k + 1, k), 2 ** (n - k))


def _second_term_summand(n, k):
    bracket = Fraction(n * n - 3 * (k + 1) * n) + Fraction(k * (9 * k + 17), 4)
    return comb(n, 2 * k + 1) * comb(2 * k + 1, k) * bracket / 2 ** (2 * (n - k))


def _ks(n, reverse):
    ks = [k for k in range(n) if 2 * k < n]
    return ks[::-1] if reverse else ks


def first_cluster_term(n: int, reverse: bool = False) -> Fraction:
    """2 * sum_{0 <= k < n/2} C(n,2k+1) C(2k+1,k) 2^-(n-k)."""
    if n < 1:
        raise ValueError("n must be positive")
    return 2 * sum((_first_term_summand(n, k) for k in _ks(n, reverse)), Fraction(0))


def second_cluster_term(n: int, reverse: bool = False) -> Fraction:
    """sum_k C(n,2k+1) C(2k+1,k) (n^2 - 3(k+1)n + k(9k+17)/4) 2^-2(n-k)."""
    if n < 1:
        raise ValueError("n must be positive")
    return sum((_second_term_summand(n, k) for k in _ks(n, reverse)), Fraction(0))


t1 = first_cluster_term
t2 = second_cluster_term


def _mpf(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def closed_form_prefactor():
    with mpmath.workprec(PRECISION_BITS):
        r = mpmath.sqrt(2)
        return +mpmath.sqrt((1 + 2 * r) / (2 * r * mpmath.pi))


def closed_form_base():
    with mpmath.workprec(PRECISION_BITS):
        return (1 + 2 * mpmath.sqrt(2)) / 2


def closed_form_first_term(n: int):
    """sqrt((1+2 sqrt2)/(2 sqrt2 pi)) n^(-1/2) ((1+2 sqrt2)/2)^n, evaluated through logs."""
    if n < 1:
        raise ValueError("n must be positive")
    with mpmath.workprec(PRECISION_BITS):
        log_value = (mpmath.log(closed_form_prefactor()) - mpmath.log(n) / 2
                     + n * mpmath.log(closed_form_base()))
        return mpmath.exp(log_value)


def motzkin(n: int) -> int:
    """Number of Motzkin paths with n steps."""
    if n < 0:
        raise ValueError("n must be non-negative")
    m = [1, 1]
    for j in range(1, n):
        m.append(m[j] + sum(m[k] * m[j - 1 - k] for k in range(j)))
    return m[n]


def is_nonpositive_integer(x: Fraction) -> bool:
    return x.denominator == 1 and x <= 0


def gauss_2f1_terminating(a, b, c, z) -> Fraction:
    """Exact value of a terminating 2F1(a, b; c; z) with rational arguments."""
    a, b, c, z = (Fraction(v) for v in (a, b, c, z))
    stops = [-int(v) for v in (a, b) if is_nonpositive_integer(v)]
    if not stops:
        raise ValueError("series does not terminate: neither a nor b is a non-positive integer")
    top = min(stops)
    total = term = Fraction(1)
    for k in range(top):
        if c + k == 0:
            raise ValueError("lower parameter hits a pole before the series ends")
        term = term * (a + k) * (b + k) * z / ((c + k) * (k + 1))
        total += term
    return total


def first_term_via_2f1(n: int) -> Fraction:
    return n * Fraction(2) ** (1 - n) * gauss_2f1_terminating(
        Fraction(1, 2) - Fraction(n, 2), 1 - Fraction(n, 2), 2, 8)


def hyper_asymptotic(a, b, c, z, lam):
    """Large-lam approximation of 2F1(a - lam, b - lam; c; z) for z > 0.

    Gamma(c) z^(1/4) / (2 sqrt(pi)) lam^(1/2-c) (1+1/sqrt z)^(c-a+lam)
    divided by (1/sqrt z)^(lam-a) (1+sqrt z)^(b-lam), through logs.
    """
    with mpmath.workprec(PRECISION_BITS):
        a, b, c, z, lam = (_mpf(v) for v in (a, b, c, z, lam))
        if z <= 0 or lam <= 0:
            raise ValueError("need z > 0 and lam > 0")
        s = mpmath.sqrt(z)
        log_value = (mpmath.loggamma(c) + mpmath.log(z) / 4 - mpmath.log(2 * mpmath.sqrt(mpmath.pi))
                     + (mpmath.mpf(1) / 2 - c) * mpmath.log(lam)
                     + (c - a + lam) * mpmath.log(1 + 1 / s)
                     - (lam - a) * mpmath.log(1 / s)
                     - (b - lam) * mpmath.log(1 + s))
        return mpmath.exp(log_value)


def to_mpf(x):
    with mpmath.workprec(PRECISION_BITS):
        return +_mpf(x)


@dataclass(frozen=True)
class AsymptoticEstimate:
    n: int
    middle_size: int
    first: Fraction
    second: Fraction
    log2_alpha_estimate: object

    @classmethod
    def compute(cls, n):
        first, second = first_cluster_term(n), second_cluster_term(n)
        mid = layer_size(3, n, n)
        with mpmath.workprec(PRECISION_BITS):
            est = mid + (_mpf(first) + _mpf(second)) / mpmath.log(2)
        return cls(n, mid, first, second, est)


def log_concave(seq) -> bool:
    return all(seq[j] ** 2 >= seq[j - 1] * seq[j + 1] for j in range(1, len(seq) - 1))
