"""Exact collision probabilities for bosons and boltzmannons.

Everything here is integer or :class:`fractions.Fraction` arithmetic.  No
floating point enters a probability or a threshold decision.
"""
from __future__ import annotations

import math
from collections import defaultdict
from fractions import Fraction

from .occupancy import CollisionProfile, iter_occupancy_vectors

DEFAULT_ENUMERATION_CAP = 10**7

MODELS = ("boson", "boltzmannon")


class DomainError(ValueError):
    """Arguments outside an operation's mathematical domain."""


class SizeError(ValueError):
    """Requested enumeration or matrix exceeds a configured cap."""


def _nat(x, name: str) -> int:
    if isinstance(x, bool) or int(x) != x or x < 0:
        raise DomainError(f"{name} must be a non-negative integer, got {x!r}")
    return int(x)


def multiset_coefficient(n: int, k: int) -> int:
    """Number of size-``k`` multisets drawn from ``n`` kinds, ``C(n+k-1, k)``."""
    n, k = _nat(n, "n"), _nat(k, "k")
    if k == 0:
        return 1
    if n == 0:
        raise DomainError("no modes to occupy: n = 0 with k > 0")
    return math.comb(n + k - 1, k)


def prob_all_distinct_bosons(n: int, k: int) -> Fraction:
    """P(no two of ``k`` uniform-multiset bosons share one of ``n`` modes)."""
    n, k = _nat(n, "n"), _nat(k, "k")
    if n < 1:
        raise DomainError("n must be >= 1")
    if k > n:
        return Fraction(0)
    return Fraction(math.comb(n, k), multiset_coefficient(n, k))


def prob_all_distinct_bosons_product(n: int, k: int) -> Fraction:
    """Telescoping product prod_{a<k} (1 - a/n) / (1 + a/n); independent of the binomial route."""
    n, k = _nat(n, "n"), _nat(k, "k")
    if n < 1:
        raise DomainError("n must be >= 1")
    r = Fraction(1)
    for a in range(k):
        r *= Fraction(n - a, n + a)
    return r


def _check_jl(n: int, k: int, j: int, l: int) -> tuple[int, int, int, int]:
    n, k, j, l = _nat(n, "n"), _nat(k, "k"), _nat(j, "j"), _nat(l, "l")
    if n < 1:
        raise DomainError("n must be >= 1")
    if j < 1:
        raise DomainError("j must be >= 1")
    if l > n:
        raise DomainError(f"l = {l} exceeds the number of days n = {n}")
    return n, k, j, l


def prob_first_l_days_at_least_j(n: int, k: int, j: int, l: int) -> Fraction:
    """P(each of ``l`` fixed days holds at least ``j`` bosons).

    Reserving ``j`` particles on each of the ``l`` days leaves an arbitrary
    multiset of ``k - j*l`` particles, hence the ratio of multiset counts.
    """
    n, k, j, l = _check_jl(n, k, j, l)
    if k < j * l:
        return Fraction(0)
    return Fraction(multiset_coefficient(n, k - j * l), multiset_coefficient(n, k))


def prob_first_l_days_at_least_j_product(n: int, k: int, j: int, l: int) -> Fraction:
    """Product form prod_{a < j*l} (k - a) / (n + k - 1 - a).

    The ``-1`` matters: C(n+k-1-r, k-r) / C(n+k-1, k) telescopes to exactly
    this product.
    """
    n, k, j, l = _check_jl(n, k, j, l)
    r = Fraction(1)
    for a in range(j * l):
        if k - a <= 0:
            return Fraction(0)
        r *= Fraction(k - a, n + k - 1 - a)
    return r


def binomial_moment_at_least(n: int, k: int, j: int, l: int) -> Fraction:
    """E[C(Y, l)] where Y counts the days holding at least ``j`` bosons."""
    n, k, j, l = _check_jl(n, k, j, l)
    return math.comb(n, l) * prob_first_l_days_at_least_j(n, k, j, l)


def factorial_moment_at_least(n: int, k: int, j: int, l: int) -> Fraction:
    """E[Y (Y-1) ... (Y-l+1)], i.e. ``l!`` times the binomial moment."""
    return math.factorial(l) * binomial_moment_at_least(n, k, j, l)


def prob_all_distinct_boltzmannons(n: int, k: int) -> Fraction:
    """Classical birthday problem: n (n-1) ... (n-k+1) / n^k."""
    n, k = _nat(n, "n"), _nat(k, "k")
    if n < 1:
        raise DomainError("n must be >= 1")
    if k > n:
        return Fraction(0)
    return Fraction(math.perm(n, k), n**k)


def prob_all_distinct(n: int, k: int, model: str) -> Fraction:
    if model == "boson":
        return prob_all_distinct_bosons(n, k)
    if model == "boltzmannon":
        return prob_all_distinct_boltzmannons(n, k)
    raise DomainError(f"unknown model {model!r}; expected one of {MODELS}")


def _collides_with_majority(n: int, k: int, model: str) -> bool:
    # 1 - P(distinct) >= 1/2  <=>  2 * favourable <= total, all in integers
    if k > n:
        return True
    if model == "boson":
        return 2 * math.comb(n, k) <= multiset_coefficient(n, k)
    return 2 * math.perm(n, k) <= n**k


def threshold_k(n: int, model: str = "boson") -> int:
    """Smallest ``k`` for which a repeated birthday has probability >= 1/2.

    P(all distinct) is non-increasing in ``k``, so an exponential bracket
    followed by bisection finds the crossing with exact comparisons only.
    """
    n = _nat(n, "n")
    if n < 1:
        raise DomainError("n must be >= 1")
    if model not in MODELS:
        raise DomainError(f"unknown model {model!r}; expected one of {MODELS}")
    hi = 1
    while not _collides_with_majority(n, hi, model):
        hi *= 2
    lo = hi // 2  # lo fails (or is 0), hi succeeds
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _collides_with_majority(n, mid, model):
            hi = mid
        else:
            lo = mid
    return hi


def asymptotic_threshold(n: int, model: str = "boson") -> float:
    """sqrt(n ln 2) for bosons, sqrt(2 n ln 2) for boltzmannons."""
    if model == "boson":
        return math.sqrt(n * math.log(2))
    if model == "boltzmannon":
        return math.sqrt(2 * n * math.log(2))
    raise DomainError(f"unknown model {model!r}; expected one of {MODELS}")


def exact_profile_distribution(
    n: int, k: int, cap: int = DEFAULT_ENUMERATION_CAP
) -> dict[CollisionProfile, Fraction]:
    """Law of the collision profile under the uniform multiset, by brute force.

    Every occupancy vector is visited once (colex order) with weight
    ``1 / multiset(n, k)``.  Keys appear in first-visit order.
    """
    n, k = _nat(n, "n"), _nat(k, "k")
    if n < 1:
        raise DomainError("n must be >= 1")
    total = multiset_coefficient(n, k)
    if total > cap:
        raise SizeError(
            f"multiset({n},{k}) = {total} exceeds the enumeration cap {cap}"
        )
    counts: dict[CollisionProfile, int] = defaultdict(int)
    for occ in iter_occupancy_vectors(n, k):
        counts[CollisionProfile.from_counts(occ)] += 1
    return {prof: Fraction(c, total) for prof, c in counts.items()}


def format_rational(x: Fraction) -> str:
    """Serialize as ``"p/q"`` (always with a denominator)."""
    return f"{x.numerator}/{x.denominator}"


def parse_rational(s: str) -> Fraction:
    return Fraction(s)
