"""Random occupancy tables for bosons, boltzmannons and fermions.

Each model has a batch sampler returning an ``(size, n)`` integer array and a
single-draw wrapper returning a tuple.  ``rng`` may be a numpy Generator, an
:class:`~bosonic_birthday.rng.RngStream`, or an integer seed.
"""
from __future__ import annotations

from typing import Callable, TextIO

import numpy as np

from .exactcomb import DomainError
from .occupancy import check_occupancy
from .rng import as_generator

SIMPLEX_TOL = 1e-12
SIMPLEX_METHODS = ("spacings", "exponential")


# rows per chunk so that a chunk holds about this many array cells
CHUNK_CELLS = 2_000_000


def _chunk_rows(width: int) -> int:
    return max(1, CHUNK_CELLS // max(1, width))


def _check_nk(n, k):
    if int(n) != n or int(k) != k or n < 1 or k < 0:
        raise DomainError(f"need n >= 1 and k >= 0, got n={n}, k={k}")
    return int(n), int(k)


def _check_size(size):
    if int(size) != size or size < 0:
        raise DomainError(f"size must be a non-negative integer, got {size}")
    return int(size)


def random_subsets(m: int, s: int, size: int, rng) -> np.ndarray:
    """``size`` independent uniform ``s``-subsets of ``range(m)`` (unsorted rows).

    Partial Fisher-Yates shuffle, vectorized across rows.
    """
    gen = as_generator(rng)
    if not 0 <= s <= m:
        raise DomainError(f"cannot choose {s} items from {m}")
    dtype = np.int32 if m < 2**31 else np.int64
    out = np.empty((size, s), dtype=dtype)
    step = _chunk_rows(m)
    for start in range(0, size, step):
        rows = np.arange(min(step, size - start))
        perm = np.tile(np.arange(m, dtype=dtype), (rows.size, 1))
        for i in range(min(s, m - 1)):
            j = i + gen.integers(0, m - i, size=rows.size)
            a = perm[rows, i].copy()
            perm[rows, i] = perm[rows, j]
            perm[rows, j] = a
        out[start:start + rows.size] = perm[:, :s]
    return out


def _tables_from_bars(bars: np.ndarray, m: int) -> np.ndarray:
    # bars: sorted bar positions in range(m); stars fill the gaps
    size = bars.shape[0]
    edges = np.concatenate(
        [np.full((size, 1), -1), bars.astype(np.int64), np.full((size, 1), m)], axis=1
    )
    return np.diff(edges, axis=1) - 1


def _tables_from_stars(stars: np.ndarray, n: int) -> np.ndarray:
    # the star of rank r at position s sits after s - r bars, i.e. on day s - r
    size, k = stars.shape
    days = np.sort(stars, axis=1).astype(np.int64) - np.arange(k)
    offs = days + n * np.arange(size)[:, None]
    return np.bincount(offs.ravel(), minlength=size * n).reshape(size, n)


def sample_boson_multisets(n: int, k: int, size: int, rng=None) -> np.ndarray:
    """Uniform multisets via a uniform choice of star positions among ``n+k-1`` slots.

    Whichever of the stars (``k``) or bars (``n-1``) is fewer gets sampled
    directly; the other fills the remaining slots.
    """
    n, k = _check_nk(n, k)
    size = _check_size(size)
    gen = as_generator(rng)
    if n == 1:
        return np.full((size, 1), k, dtype=np.int64)
    m = n + k - 1
    if k <= n - 1:
        stars = random_subsets(m, k, size, gen)
        return _tables_from_stars(stars, n)
    bars = np.sort(random_subsets(m, n - 1, size, gen), axis=1)
    return _tables_from_bars(bars, m)


def sample_boson_multiset(n: int, k: int, rng=None) -> tuple[int, ...]:
    return tuple(int(c) for c in sample_boson_multisets(n, k, 1, rng)[0])


def sample_stars_bars_continuous_batch(n: int, k: int, size: int, rng=None) -> np.ndarray:
    """Drop ``n-1+k`` uniform points on [0, 1]; a random ``n-1`` of them are bars.

    Rows whose points contain a tie are redrawn.
    """
    n, k = _check_nk(n, k)
    size = _check_size(size)
    gen = as_generator(rng)
    m = n - 1 + k
    out = np.empty((size, n), dtype=np.int64)
    todo = np.arange(size)
    while todo.size:
        pts = gen.random((todo.size, m))
        bar_idx = random_subsets(m, n - 1, todo.size, gen)
        order = np.argsort(pts, axis=1)
        srt = np.take_along_axis(pts, order, axis=1)
        tied = (np.diff(srt, axis=1) == 0).any(axis=1) if m > 1 else np.zeros(todo.size, bool)
        rank = np.empty_like(order)
        np.put_along_axis(rank, order, np.arange(m)[None, :].repeat(todo.size, 0), axis=1)
        bar_rank = np.sort(np.take_along_axis(rank, bar_idx.astype(np.int64), axis=1), axis=1)
        tables = _tables_from_bars(bar_rank, m)
        ok = ~tied
        out[todo[ok]] = tables[ok]
        todo = todo[tied]
    return out


def sample_stars_bars_continuous(n: int, k: int, rng=None) -> tuple[int, ...]:
    return tuple(int(c) for c in sample_stars_bars_continuous_batch(n, k, 1, rng)[0])


def _renormalize(p: np.ndarray) -> np.ndarray:
    return p / p.sum(axis=-1, keepdims=True)


def sample_simplex_uniform_batch(n: int, size: int, rng=None, method: str = "spacings") -> np.ndarray:
    """Uniform points of the probability simplex on ``n`` outcomes.

    ``spacings`` cuts [0, 1] at ``n-1`` sorted uniforms; ``exponential``
    normalizes ``n`` i.i.d. standard exponentials.
    """
    n, _ = _check_nk(n, 0)
    size = _check_size(size)
    gen = as_generator(rng)
    if method == "spacings":
        cuts = np.sort(gen.random((size, n - 1)), axis=1)
        edges = np.concatenate([np.zeros((size, 1)), cuts, np.ones((size, 1))], axis=1)
        p = np.diff(edges, axis=1)
    elif method == "exponential":
        p = gen.standard_exponential((size, n))
    else:
        raise DomainError(f"unknown simplex method {method!r}; expected one of {SIMPLEX_METHODS}")
    return _renormalize(p)


def sample_simplex_uniform(n: int, rng=None, method: str = "spacings") -> np.ndarray:
    return sample_simplex_uniform_batch(n, 1, rng, method)[0]


def sample_haar_simplex_batch(n: int, size: int, rng=None) -> np.ndarray:
    """Squared moduli of a normalized complex Gaussian vector (Haar-random pure state)."""
    n, _ = _check_nk(n, 0)
    size = _check_size(size)
    gen = as_generator(rng)
    out = np.empty((size, n))
    todo = np.arange(size)
    while todo.size:
        g = gen.standard_normal((todo.size, 2 * n))
        w = g[:, :n] ** 2 + g[:, n:] ** 2
        s = w.sum(axis=1)
        ok = s > 0
        out[todo[ok]] = w[ok] / s[ok, None]
        todo = todo[~ok]
    return _renormalize(out)


def sample_haar_simplex(n: int, rng=None) -> np.ndarray:
    return sample_haar_simplex_batch(n, 1, rng)[0]


def check_simplex(p, n: int | None = None, tol: float = SIMPLEX_TOL) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if n is not None and p.shape[-1] != n:
        raise DomainError(f"simplex point has {p.shape[-1]} coordinates, expected {n}")
    if (p < 0).any():
        raise DomainError("simplex point has a negative coordinate")
    if (np.abs(p.sum(axis=-1) - 1) > tol).any():
        raise DomainError("simplex point does not sum to 1")
    return p


def categorical_indices(p: np.ndarray, draws: int, rng=None) -> np.ndarray:
    """Inverse-CDF categorical draws, one row of ``draws`` per row of ``p``.

    Binary search on each row's cumulative vector, vectorized over rows.
    """
    gen = as_generator(rng)
    p = np.atleast_2d(p)
    size, n = p.shape
    cum = np.cumsum(p, axis=1)
    cum[:, -1] = 1.0
    u = gen.random((size, draws))
    lo = np.zeros((size, draws), dtype=np.int64)
    hi = np.full((size, draws), n - 1, dtype=np.int64)
    rows = np.arange(size)[:, None]
    # invariant: answer (first index with cum > u) lies in [lo, hi]
    while (lo < hi).any():
        mid = (lo + hi) // 2
        right = cum[rows, mid] <= u
        lo = np.where(right, mid + 1, lo)
        hi = np.where(right, hi, mid)
    return lo


def _occupancy_from_indices(idx: np.ndarray, n: int) -> np.ndarray:
    size = idx.shape[0]
    offs = idx + n * np.arange(size)[:, None]
    return np.bincount(offs.ravel(), minlength=size * n).reshape(size, n)


def sample_boltzmannons(n: int, k: int, p, size: int, rng=None) -> np.ndarray:
    """``k`` i.i.d. birthdays drawn from ``p``; ``p`` is one point or one per row."""
    n, k = _check_nk(n, k)
    size = _check_size(size)
    p = check_simplex(p, n)
    if p.ndim == 1:
        p = np.broadcast_to(p, (size, n))
    elif p.shape[0] != size:
        raise DomainError(f"got {p.shape[0]} simplex points for {size} samples")
    idx = categorical_indices(p, k, rng)
    return _occupancy_from_indices(idx, n)


def sample_boltzmannon(n: int, k: int, p, rng=None) -> tuple[int, ...]:
    return tuple(int(c) for c in sample_boltzmannons(n, k, np.asarray(p, float), 1, rng)[0])


def sample_uniform_boltzmannons(n: int, k: int, size: int, rng=None) -> np.ndarray:
    return sample_boltzmannons(n, k, np.full(n, 1.0 / n), size, rng)


def sample_dirichlet_mixtures(n: int, k: int, size: int, rng=None, method: str = "spacings") -> np.ndarray:
    """Draw a uniform simplex point per sample, then ``k`` i.i.d. boltzmannons from it."""
    n, k = _check_nk(n, k)
    size = _check_size(size)
    gen = as_generator(rng)
    out = np.empty((size, n), dtype=np.int64)
    step = _chunk_rows(n + k)
    for start in range(0, size, step):
        b = min(step, size - start)
        p = sample_simplex_uniform_batch(n, b, gen, method)
        out[start:start + b] = sample_boltzmannons(n, k, p, b, gen)
    return out


def sample_dirichlet_mixture(n: int, k: int, rng=None) -> tuple[int, ...]:
    return tuple(int(c) for c in sample_dirichlet_mixtures(n, k, 1, rng)[0])


def sample_fermions(n: int, k: int, size: int, rng=None) -> np.ndarray:
    n, k = _check_nk(n, k)
    if k > n:
        raise DomainError(
            f"Pauli exclusion: {k} fermions cannot occupy {n} modes without sharing one"
        )
    size = _check_size(size)
    sub = random_subsets(n, k, size, rng).astype(np.int64)
    out = np.zeros((size, n), dtype=np.int64)
    np.put_along_axis(out, sub, 1, axis=1)
    return out


def sample_fermion(n: int, k: int, rng=None) -> tuple[int, ...]:
    return tuple(int(c) for c in sample_fermions(n, k, 1, rng)[0])


# name -> batch sampler(n, k, size, rng)
SAMPLERS: dict[str, Callable[..., np.ndarray]] = {
    "boson": sample_boson_multisets,
    "stars-bars": sample_stars_bars_continuous_batch,
    "dirichlet": sample_dirichlet_mixtures,
    "dirichlet-exponential": lambda n, k, size, rng=None: sample_dirichlet_mixtures(
        n, k, size, rng, method="exponential"
    ),
    "boltzmannon-uniform": sample_uniform_boltzmannons,
    "boltzmannon": sample_uniform_boltzmannons,
    "fermion": sample_fermions,
}

MODEL_SAMPLERS = {
    "boson": sample_boson_multisets,
    "boltzmannon": sample_uniform_boltzmannons,
    "fermion": sample_fermions,
}


def get_sampler(name: str) -> Callable[..., np.ndarray]:
    try:
        return SAMPLERS[name]
    except KeyError:
        raise DomainError(f"unknown sampler {name!r}; choose from {sorted(SAMPLERS)}") from None


def write_dump(stream: TextIO, tables, n: int, k: int, model: str, seed: int) -> None:
    """Header ``n=..,k=..,model=..,seed=..`` then one comma-separated table per line."""
    stream.write(f"n={n},k={k},model={model},seed={seed}\n")
    for row in np.asarray(tables):
        stream.write(",".join(str(int(c)) for c in row))
        stream.write("\n")


def read_dump(stream: TextIO) -> tuple[dict[str, str], list[tuple[int, ...]]]:
    header_line = stream.readline().strip()
    header = dict(item.split("=", 1) for item in header_line.split(","))
    n, k = int(header["n"]), int(header["k"])
    rows = []
    for line in stream:
        line = line.strip()
        if line:
            rows.append(check_occupancy(line.split(","), n, k))
    return header, rows
