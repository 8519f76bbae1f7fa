import itertools
from collections import Counter
from fractions import Fraction

import pytest

SEED = 20120901


def pascal_binomial(m: int, r: int) -> int:
    """C(m, r) from the additive recurrence only."""
    if r < 0 or r > m:
        return 0
    row = [1]
    for _ in range(m):
        row = [1] + [row[i] + row[i + 1] for i in range(len(row) - 1)] + [1]
    return row[r]


def brute_multisets(n: int, k: int) -> list[tuple[int, ...]]:
    """All occupancy tables, via sorted tuples of days (independent of the package)."""
    out = []
    for days in itertools.combinations_with_replacement(range(n), k):
        c = Counter(days)
        out.append(tuple(c.get(i, 0) for i in range(n)))
    return out


def brute_profile_law(n: int, k: int) -> dict[tuple[tuple[int, int], ...], Fraction]:
    tables = brute_multisets(n, k)
    law = Counter()
    for t in tables:
        law[tuple(sorted(Counter(c for c in t if c).items()))] += 1
    return {p: Fraction(c, len(tables)) for p, c in law.items()}


@pytest.fixture
def seed():
    return SEED
