import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bosonic_birthday import exactcomb as ec
from bosonic_birthday.occupancy import CollisionProfile

from conftest import brute_multisets, brute_profile_law, pascal_binomial


# ---------------------------------------------------------------- multiset_coefficient


def test_multiset_coefficient_stars_and_bars_example():
    assert pascal_binomial(9, 4) == 126
    assert ec.multiset_coefficient(6, 4) == 126


@pytest.mark.parametrize("n", [0, 1, 5, 1000])
def test_multiset_coefficient_empty(n):
    assert ec.multiset_coefficient(n, 0) == 1


def test_multiset_coefficient_single_mode():
    assert ec.multiset_coefficient(1, 7) == 1


def test_multiset_coefficient_no_modes():
    with pytest.raises(ec.DomainError):
        ec.multiset_coefficient(0, 3)


@pytest.mark.parametrize("bad", [-1, 2.5, True])
def test_multiset_coefficient_rejects_non_naturals(bad):
    with pytest.raises(ec.DomainError):
        ec.multiset_coefficient(bad, 2)


def test_multiset_coefficient_matches_enumeration():
    for n, k in itertools.product(range(1, 6), range(0, 6)):
        assert ec.multiset_coefficient(n, k) == len(brute_multisets(n, k))


def test_pascal_identity():
    # n = 1 has no (n-1, k) term: multiset(0, k) is a domain error, read as 0
    for k in range(1, 61):
        assert ec.multiset_coefficient(1, k) == ec.multiset_coefficient(1, k - 1) == 1
    for n in range(2, 61):
        for k in range(1, 61):
            assert ec.multiset_coefficient(n, k) == (
                ec.multiset_coefficient(n - 1, k) + ec.multiset_coefficient(n, k - 1)
            )


# ---------------------------------------------------------------- all-distinct


def test_all_distinct_bosons_small():
    tables = brute_multisets(3, 2)
    distinct = sum(1 for t in tables if max(t) <= 1)
    assert Fraction(distinct, len(tables)) == Fraction(1, 2)
    assert ec.prob_all_distinct_bosons(3, 2) == Fraction(1, 2)


def test_all_distinct_bosons_trivial():
    assert ec.prob_all_distinct_bosons(17, 1) == 1
    assert ec.prob_all_distinct_bosons(17, 0) == 1
    assert ec.prob_all_distinct_bosons(5, 6) == 0


def test_all_distinct_forms_agree():
    for n in range(1, 41):
        for k in range(1, 41):
            assert ec.prob_all_distinct_bosons(n, k) == ec.prob_all_distinct_bosons_product(n, k)


def test_all_distinct_boltzmannons():
    assert ec.prob_all_distinct_boltzmannons(365, 23) < Fraction(1, 2)
    assert ec.prob_all_distinct_boltzmannons(365, 22) > Fraction(1, 2)
    assert ec.prob_all_distinct_boltzmannons(9, 1) == 1
    # 2 of the 4 labelled outcomes are distinct
    labelled = list(itertools.product(range(2), repeat=2))
    assert Fraction(sum(a != b for a, b in labelled), 4) == ec.prob_all_distinct_boltzmannons(2, 2) == Fraction(1, 2)
    assert ec.prob_all_distinct_boltzmannons(3, 4) == 0


# ---------------------------------------------------------------- l days with >= j


def test_first_l_days_examples():
    assert ec.prob_first_l_days_at_least_j(7, 5, 3, 0) == 1
    tables = brute_multisets(3, 2)
    assert Fraction(sum(t[0] >= 2 for t in tables), len(tables)) == Fraction(1, 6)
    assert ec.prob_first_l_days_at_least_j(3, 2, 2, 1) == Fraction(1, 6)
    assert ec.prob_first_l_days_at_least_j(3, 2, 3, 1) == 0


def test_first_l_days_rejects_bad_args():
    with pytest.raises(ec.DomainError):
        ec.prob_first_l_days_at_least_j(3, 2, 0, 1)
    with pytest.raises(ec.DomainError):
        ec.prob_first_l_days_at_least_j(3, 2, 1, 4)


def test_ratio_and_product_forms_agree():
    for n in range(1, 41):
        for k in range(0, 41):
            for j in range(1, k + 1):
                for l in range(0, min(n, k // j) + 1):
                    assert ec.prob_first_l_days_at_least_j(n, k, j, l) == (
                        ec.prob_first_l_days_at_least_j_product(n, k, j, l)
                    )


def test_first_l_days_against_enumeration():
    for n, k in [(3, 4), (4, 5), (5, 3)]:
        tables = brute_multisets(n, k)
        for j in range(1, 4):
            for l in range(0, n + 1):
                hits = sum(all(t[d] >= j for d in range(l)) for t in tables)
                assert ec.prob_first_l_days_at_least_j(n, k, j, l) == Fraction(hits, len(tables))


# ---------------------------------------------------------------- binomial moments


def test_binomial_moment_examples():
    assert ec.binomial_moment_at_least(3, 2, 2, 1) == Fraction(1, 2)
    assert ec.binomial_moment_at_least(10, 4, 2, 0) == 1
    v = ec.binomial_moment_at_least(10**4, 100, 2, 1)
    assert abs(float(v) - 1) < 0.05


def test_binomial_moment_against_enumeration():
    for n, k in [(3, 3), (4, 4), (5, 6), (6, 4)]:
        tables = brute_multisets(n, k)
        for j in (1, 2, 3):
            for l in range(0, n + 1):
                tot = sum(math.comb(sum(c >= j for c in t), l) for t in tables)
                assert ec.binomial_moment_at_least(n, k, j, l) == Fraction(tot, len(tables))


def test_factorial_moment_is_scaled_binomial_moment():
    assert ec.factorial_moment_at_least(8, 6, 2, 3) == 6 * ec.binomial_moment_at_least(8, 6, 2, 3)


def test_single_day_asymptotic_ratio_tends_to_one():
    # P(day 1 has >= j+1) ~ k^{j+1} / (n+k)^{j+1}; check the ratio approaches 1
    j = 2
    errs = []
    for n in (10**3, 10**4, 10**5, 10**6):
        k = round(n ** ((j - 1) / j))
        exact = ec.prob_first_l_days_at_least_j(n, k, j + 1, 1)
        approx = Fraction(k, n + k) ** (j + 1)
        errs.append(abs(float(exact / approx) - 1))
    assert errs == sorted(errs, reverse=True)
    assert errs[-1] < 0.01


# ---------------------------------------------------------------- asymptotics


def test_all_distinct_taylor_remainder():
    """ln P + k(k-1)/n is O(k^4/n^3); the scaled remainder tends to 1/6."""
    scaled = []
    for n in (10**3, 10**4, 10**5):
        k = math.floor(n**0.6)
        p = ec.prob_all_distinct_bosons(n, k)
        lnp = math.log(p.numerator) - math.log(p.denominator)
        scaled.append(abs(lnp + k * (k - 1) / n) * n**3 / k**4)
    assert all(0.1 < s < 0.25 for s in scaled)
    assert abs(scaled[-1] - 1 / 6) < abs(scaled[0] - 1 / 6) + 1e-12


def test_all_distinct_exponential_estimate():
    for n in (10**4, 10**5):
        k = math.floor(n**0.6)
        p = float(ec.prob_all_distinct_bosons(n, k))
        assert abs(math.log(p) / (-k * k / n) - 1) < 0.01


# ---------------------------------------------------------------- threshold


def test_threshold_examples():
    assert ec.threshold_k(1, "boson") == 2
    assert ec.threshold_k(1, "boltzmannon") == 2
    assert ec.threshold_k(365, "boltzmannon") == 23
    k = ec.threshold_k(365, "boson")
    assert abs(k / math.sqrt(365 * math.log(2)) - 1) < 0.25


@pytest.mark.parametrize("model", ec.MODELS)
def test_threshold_is_minimal(model):
    for n in list(range(1, 60)) + [365, 1000]:
        k = ec.threshold_k(n, model)
        assert 1 - ec.prob_all_distinct(n, k, model) >= Fraction(1, 2)
        assert 1 - ec.prob_all_distinct(n, k - 1, model) < Fraction(1, 2)


def test_threshold_linear_scan_agrees():
    for n in range(1, 200):
        k = 0
        while 2 * ec.prob_all_distinct_bosons(n, k) > 1:
            k += 1
        assert ec.threshold_k(n, "boson") == k


@pytest.mark.parametrize("model,scale", [("boson", 1), ("boltzmannon", 2)])
def test_threshold_ratio_approaches_one(model, scale):
    ratios = [
        abs(ec.threshold_k(n, model) / math.sqrt(scale * n * math.log(2)) - 1)
        for n in (10**2, 10**3, 10**4, 10**5, 10**6)
    ]
    assert ratios == sorted(ratios, reverse=True)
    assert ratios[-1] < 0.02


def test_threshold_unknown_model():
    with pytest.raises(ec.DomainError):
        ec.threshold_k(10, "anyon")


# ---------------------------------------------------------------- profile law


def _law_as_pairs(law):
    return {p.pairs: v for p, v in law.items()}


def test_profile_distribution_examples():
    assert _law_as_pairs(ec.exact_profile_distribution(3, 2)) == {((1, 2),): Fraction(1, 2), ((2, 1),): Fraction(1, 2)}
    assert _law_as_pairs(ec.exact_profile_distribution(1, 3)) == {((3, 1),): 1}
    assert _law_as_pairs(ec.exact_profile_distribution(2, 2)) == {((1, 2),): Fraction(1, 3), ((2, 1),): Fraction(2, 3)}


def test_profile_distribution_key_order_is_colex():
    # colex visits (2,0) first, then (1,1)
    assert list(ec.exact_profile_distribution(2, 2)) == [
        CollisionProfile(((2, 1),)),
        CollisionProfile(((1, 2),)),
    ]


def test_profile_distribution_matches_brute_force():
    for n, k in itertools.product(range(1, 6), range(0, 6)):
        law = ec.exact_profile_distribution(n, k)
        assert sum(law.values()) == 1
        assert _law_as_pairs(law) == brute_profile_law(n, k)


def test_profile_distribution_consistency():
    for n, k in [(4, 3), (5, 5), (6, 4), (7, 2)]:
        law = ec.exact_profile_distribution(n, k)
        all_distinct = sum((p for prof, p in law.items() if all(j == 1 for j, _ in prof.pairs)), Fraction(0))
        assert all_distinct == ec.prob_all_distinct_bosons(n, k)
        for j in (1, 2, 3):
            for l in range(0, 4):
                m = sum((p * math.comb(prof.count(j, "at_least"), l) for prof, p in law.items()), Fraction(0))
                assert m == ec.binomial_moment_at_least(n, k, j, l)


def test_profile_distribution_cap():
    with pytest.raises(ec.SizeError, match="cap 100"):
        ec.exact_profile_distribution(10, 10, cap=100)


# ---------------------------------------------------------------- properties


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 300), st.integers(0, 300))
def test_probabilities_in_unit_interval(n, k):
    for p in (ec.prob_all_distinct_bosons(n, k), ec.prob_all_distinct_boltzmannons(n, k)):
        assert 0 <= p <= 1


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 500), st.integers(2, 200))
def test_bosons_collide_sooner(n, k):
    assert ec.prob_all_distinct_bosons(n, k) <= ec.prob_all_distinct_boltzmannons(n, k)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 200), st.integers(0, 60))
def test_all_distinct_monotone_in_k(n, k):
    assert ec.prob_all_distinct_bosons(n, k + 1) <= ec.prob_all_distinct_bosons(n, k)


def test_rational_serialization_roundtrip():
    x = ec.prob_all_distinct_bosons(10, 4)
    assert ec.format_rational(x) == f"{x.numerator}/{x.denominator}"
    assert ec.parse_rational(ec.format_rational(x)) == x
    assert ec.format_rational(Fraction(1)) == "1/1"
