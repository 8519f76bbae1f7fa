"""Occupancy tables and their collision profiles.

An occupancy vector is a length-``n`` table of per-day counts summing to ``k``
(one multiset).  Single vectors are plain tuples of ints; batches are 2-D
integer numpy arrays with one table per row.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np


class OccupancyError(ValueError):
    pass


def check_occupancy(counts: Sequence[int], n: int | None = None, k: int | None = None) -> tuple[int, ...]:
    """Validate an occupancy vector and return it as a tuple of ints."""
    out = tuple(int(c) for c in counts)
    if any(c < 0 for c in out):
        raise OccupancyError(f"negative count in {out}")
    if n is not None and len(out) != n:
        raise OccupancyError(f"expected {n} days, got {len(out)}")
    if k is not None and sum(out) != k:
        raise OccupancyError(f"counts {out} sum to {sum(out)}, expected {k}")
    return out


def iter_occupancy_vectors(n: int, k: int) -> Iterator[tuple[int, ...]]:
    """Yield every occupancy vector of ``k`` particles in ``n`` days, colexicographically.

    Colex order compares the last day first, so for n=2, k=2 the order is
    (2, 0), (1, 1), (0, 2).
    """
    if n < 0 or k < 0:
        raise OccupancyError("n and k must be non-negative")
    if n == 0:
        if k == 0:
            yield ()
        return
    # r is the reversed vector, walked in lex order
    r = [0] * n
    r[-1] = k
    while True:
        yield tuple(reversed(r))
        if n == 1:
            return
        if r[-1] > 0:
            i = n - 2
        else:
            p = n - 2
            while p >= 0 and r[p] == 0:
                p -= 1
            i = p - 1
        if i < 0:
            return
        s = sum(r[i + 1:])
        r[i] += 1
        for q in range(i + 1, n):
            r[q] = 0
        r[-1] = s - 1


@dataclass(frozen=True, order=True)
class CollisionProfile:
    """Number of days holding exactly ``j`` occupants, for each ``j >= 1``.

    Stored as a sorted tuple of ``(j, days)`` pairs with ``days > 0`` so that
    profiles hash and compare by value.
    """

    pairs: tuple[tuple[int, int], ...] = ()

    @classmethod
    def from_mapping(cls, m: Mapping[int, int]) -> CollisionProfile:
        for j, c in m.items():
            if j < 1 or c < 0:
                raise OccupancyError(f"invalid profile entry {j}: {c}")
        return cls(tuple(sorted((int(j), int(c)) for j, c in m.items() if c)))

    @classmethod
    def from_counts(cls, counts: Iterable[int]) -> CollisionProfile:
        return cls.from_mapping(Counter(int(c) for c in counts if c))

    def __getitem__(self, j: int) -> int:
        for jj, c in self.pairs:
            if jj == j:
                return c
        return 0

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs)

    @property
    def particles(self) -> int:
        return sum(j * c for j, c in self.pairs)

    @property
    def occupied_days(self) -> int:
        return sum(c for _, c in self.pairs)

    def count(self, j: int, mode: str = "exactly") -> int:
        if j < 1:
            raise OccupancyError("j must be >= 1")
        if mode == "exactly":
            return self[j]
        if mode == "at_least":
            return sum(c for jj, c in self.pairs if jj >= j)
        raise OccupancyError(f"unknown mode {mode!r}")

    def __str__(self) -> str:
        return "{" + ", ".join(f"{j}:{c}" for j, c in self.pairs) + "}"


def day_count_matrix(tables: np.ndarray, max_j: int | None = None) -> np.ndarray:
    """Per-row histogram of occupancy values.

    Returns an array ``h`` of shape ``(rows, max_j + 1)`` where ``h[r, j]`` is
    the number of days in row ``r`` holding exactly ``j`` occupants.
    """
    tables = np.asarray(tables)
    if tables.ndim != 2:
        raise OccupancyError("expected a 2-D batch of occupancy tables")
    rows = tables.shape[0]
    if max_j is None:
        max_j = int(tables.max(initial=0))
    clipped = np.minimum(tables, max_j + 1)
    offs = clipped + (max_j + 2) * np.arange(rows)[:, None]
    h = np.bincount(offs.ravel(), minlength=rows * (max_j + 2)).reshape(rows, max_j + 2)
    return h[:, : max_j + 1]


def table_ranks(tables: np.ndarray) -> np.ndarray:
    """Rank of each row among all tables with the same ``n`` and ``k``.

    A table is identified by its bar positions ``b_1 < ... < b_{n-1}`` in the
    stars-and-bars word, and ranked by the combinatorial number system
    ``sum_t C(b_t, t)``.  Ranks are a bijection onto ``range(multiset(n, k))``.
    """
    tables = np.asarray(tables, dtype=np.int64)
    rows, n = tables.shape
    if n == 1 or rows == 0:
        return np.zeros(rows, dtype=np.int64)
    k = int(tables[0].sum())
    total = math.comb(n + k - 1, k)
    if total >= 2**62:
        raise OccupancyError("too many tables to rank in 64 bits")
    width = n + k - 1
    # binom[x, t] = C(x, t) clipped; entries above total never occur in a valid rank
    binom = np.array(
        [[min(math.comb(x, t), total) for t in range(n)] for x in range(width)], dtype=np.int64
    ).reshape(width, n)
    bars = np.cumsum(tables[:, :-1], axis=1) + np.arange(n - 1)
    return binom[bars, np.arange(1, n)].sum(axis=1)
