"""Collision statistics, distances, goodness-of-fit tests and the two experiments.

Acceptance thresholds used by the experiments (TV < 0.02 at N = 1e5,
alpha = 1e-3) are choices of this package, not derived quantities; they
live in :data:`DEFAULTS`.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import stats as sps

from . import exactcomb
from .exactcomb import DomainError, SizeError
from .occupancy import CollisionProfile, day_count_matrix, iter_occupancy_vectors, table_ranks
from .parallel import run_blocks
from .rng import RngStream, as_stream
from .samplers import MODEL_SAMPLERS, get_sampler

DEFAULTS = {
    "alpha": 1e-3,
    "poisson_tv_tol": 0.02,
    "min_expected": 5.0,
}


class DegenerateTestError(ValueError):
    pass


@dataclass(frozen=True)
class MomentEstimate:
    value: float
    standard_error: float
    sample_count: int


@dataclass(frozen=True)
class TestResult:
    """Outcome of a distribution comparison.

    ``p_value`` is None for pure distance checks and ``distance`` is None for
    pure significance tests.  ``passed`` is the verdict at ``alpha`` (or at
    the distance tolerance).
    """

    statistic: float
    p_value: float | None
    distance: float | None
    dof: int
    support_size: int
    alpha: float
    passed: bool

    __test__ = False  # keep pytest from collecting this class

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"


def collision_profile(occ: Sequence[int]) -> CollisionProfile:
    return CollisionProfile.from_counts(occ)


def count_j_fold(profile: CollisionProfile | Mapping[int, int], j: int, mode: str = "exactly") -> int:
    if not isinstance(profile, CollisionProfile):
        profile = CollisionProfile.from_mapping(profile)
    return profile.count(j, mode)


def _falling(x: np.ndarray, l: int) -> np.ndarray:
    out = np.ones_like(x, dtype=float)
    for i in range(l):
        out *= x - i
    return out


def _estimate(values: np.ndarray) -> MomentEstimate:
    m = values.size
    se = float(values.std(ddof=1) / math.sqrt(m)) if m > 1 else 0.0
    return MomentEstimate(float(values.mean()), se, m)


def _check_samples(samples) -> np.ndarray:
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise DomainError("moment of an empty sample")
    return x


def factorial_moment(samples, l: int) -> MomentEstimate:
    """Mean and standard error of X (X-1) ... (X-l+1)."""
    if l < 0:
        raise DomainError("l must be >= 0")
    return _estimate(_falling(_check_samples(samples), l))


def binomial_moment(samples, l: int) -> MomentEstimate:
    """Mean and standard error of C(X, l)."""
    if l < 0:
        raise DomainError("l must be >= 0")
    return _estimate(_falling(_check_samples(samples), l) / math.factorial(l))


def poisson_pmf(mean: float, i: int) -> float:
    if mean < 0 or i < 0:
        raise DomainError("need mean >= 0 and i >= 0")
    if mean == 0:
        return 1.0 if i == 0 else 0.0
    return math.exp(-mean + i * math.log(mean) - math.lgamma(i + 1))


def total_variation(p, q) -> float:
    """Half the L1 distance.  Mappings must share keys; sequences must share length."""
    if isinstance(p, Mapping) or isinstance(q, Mapping):
        if not (isinstance(p, Mapping) and isinstance(q, Mapping)) or set(p) != set(q):
            raise DomainError("distributions are indexed by different supports")
        keys = list(p)
        a = np.array([float(p[x]) for x in keys])
        b = np.array([float(q[x]) for x in keys])
    else:
        a = np.asarray(p, dtype=float)
        b = np.asarray(q, dtype=float)
        if a.shape != b.shape:
            raise DomainError(f"support sizes differ: {a.shape} vs {b.shape}")
    return float(min(1.0, 0.5 * np.abs(a - b).sum()))


def merge_cells(expected: np.ndarray, min_expected: float, *others: np.ndarray) -> list[np.ndarray]:
    """Merge adjacent cells, in order, until each has expected count >= ``min_expected``.

    A short remainder at the end joins the last full group.  ``others`` are
    regrouped the same way.  Returns ``[expected, *others]`` merged.
    """
    groups: list[list[int]] = []
    cur: list[int] = []
    acc = 0.0
    for i, e in enumerate(expected):
        cur.append(i)
        acc += e
        if acc >= min_expected:
            groups.append(cur)
            cur, acc = [], 0.0
    if cur:
        if groups:
            groups[-1].extend(cur)
        else:
            groups.append(cur)
    return [np.array([arr[g].sum() for g in groups], dtype=float) for arr in (expected, *others)]


def chi_square_gof(
    observed,
    expected_probs,
    N: int | None = None,
    alpha: float = DEFAULTS["alpha"],
    min_expected: float = DEFAULTS["min_expected"],
) -> TestResult:
    """Pearson goodness of fit with ordered tail merging; dof = cells - 1."""
    obs = np.asarray(observed, dtype=float)
    q = np.asarray(expected_probs, dtype=float)
    if obs.shape != q.shape:
        raise DomainError("observed and expected have different supports")
    if N is None:
        N = int(obs.sum())
    exp_counts = N * q
    exp_m, obs_m = merge_cells(exp_counts, min_expected, obs)
    cells = exp_m.size
    if cells < 2:
        raise DegenerateTestError("all expected mass falls in one cell after merging")
    stat = float(((obs_m - exp_m) ** 2 / exp_m).sum())
    p = float(sps.chi2.sf(stat, cells - 1))
    return TestResult(stat, p, None, cells - 1, q.size, alpha, p > alpha)


def chi_square_two_sample(
    counts_a,
    counts_b,
    alpha: float = DEFAULTS["alpha"],
    min_expected: float = DEFAULTS["min_expected"],
) -> TestResult:
    """Pearson homogeneity test on a 2 x cells contingency table."""
    a = np.asarray(counts_a, dtype=float)
    b = np.asarray(counts_b, dtype=float)
    if a.shape != b.shape:
        raise DomainError("samples are indexed by different supports")
    na, nb = a.sum(), b.sum()
    pooled = a + b
    # merge on the smaller of the two expected rows
    exp_small = pooled * min(na, nb) / (na + nb)
    _, a_m, b_m = merge_cells(exp_small, min_expected, a, b)
    cells = a_m.size
    if cells < 2:
        raise DegenerateTestError("all mass falls in one cell after merging")
    pooled_m = a_m + b_m
    ea = pooled_m * na / (na + nb)
    eb = pooled_m * nb / (na + nb)
    stat = float((((a_m - ea) ** 2) / ea).sum() + (((b_m - eb) ** 2) / eb).sum())
    p = float(sps.chi2.sf(stat, cells - 1))
    return TestResult(stat, p, None, cells - 1, a.size, alpha, p > alpha)


def ks_beta_test(samples, a: float, b: float, alpha: float = DEFAULTS["alpha"]) -> TestResult:
    """One-sample Kolmogorov-Smirnov test against Beta(a, b)."""
    x = np.asarray(samples, dtype=float)
    res = sps.kstest(x, sps.beta(a, b).cdf)
    return TestResult(float(res.statistic), float(res.pvalue), float(res.statistic), 0, x.size, alpha,
                      float(res.pvalue) > alpha)


# ---------------------------------------------------------------- experiments


def k_from_c(n: int, j: int, c: float) -> int:
    """k = round(c * n^((j-1)/j)), halves rounded up."""
    return int(math.floor(c * n ** ((j - 1) / j) + 0.5))


def _poisson_tv(hist: np.ndarray, mean: float) -> tuple[float, np.ndarray]:
    N = hist.sum()
    emp = hist / N
    pmf = np.array([poisson_pmf(mean, i) for i in range(hist.size)])
    tail = max(0.0, 1.0 - pmf.sum())
    return float(0.5 * (np.abs(emp - pmf).sum() + tail)), pmf


@dataclass
class PoissonReport:
    n: int
    k: int
    j: int
    c: float
    model: str
    samples: int
    seed: int
    poisson_mean: float
    histogram: list[int]
    poisson_pmf: list[float]
    tv_distance: float
    tv_tolerance: float
    gof: TestResult | None
    factorial_moments: list[MomentEstimate]
    factorial_moments_at_least: list[MomentEstimate]
    exact_factorial_moments_at_least: list[str] | None
    mean_more_than_j: float
    wall_clock: float = 0.0

    @property
    def passed(self) -> bool:
        return self.tv_distance < self.tv_tolerance

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def _poisson_block(model: str, n: int, k: int, j: int):
    sampler = MODEL_SAMPLERS[model]

    def task(size: int, gen: np.random.Generator) -> np.ndarray:
        tables = sampler(n, k, size, gen)
        h = day_count_matrix(tables, max_j=max(k, j + 1))
        exactly = h[:, j]
        at_least = h[:, j:].sum(axis=1)
        more = h[:, j + 1:].sum(axis=1)
        return np.stack([exactly, at_least, more], axis=1)

    return task


def poisson_limit_experiment(
    n: int,
    j: int,
    c: float,
    model: str = "boson",
    N: int = 100_000,
    rng=None,
    workers: int = 1,
    block_size: int = 250,
    max_moment: int = 3,
) -> PoissonReport:
    """Count j-fold birthdays over ``N`` trials with ``k = round(c n^((j-1)/j))``.

    The histogram of the exactly-j count is compared with Poisson(c^j) for
    bosons and Poisson(c^j / j!) for boltzmannons.
    """
    if j < 2:
        raise DomainError("j must be >= 2")
    if c < 0:
        raise DomainError("c must be >= 0")
    if model not in ("boson", "boltzmannon"):
        raise DomainError(f"model must be boson or boltzmannon, got {model!r}")
    if N < 1:
        raise DomainError("need at least one trial")
    stream = as_stream(rng)
    t0 = time.perf_counter()
    k = k_from_c(n, j, c)
    parts = run_blocks(_poisson_block(model, n, k, j), N, stream, block_size, workers)
    data = np.concatenate(parts, axis=0)
    exactly, at_least, more = data[:, 0], data[:, 1], data[:, 2]
    mean = c**j if model == "boson" else c**j / math.factorial(j)
    hist = np.bincount(exactly)
    tv, pmf = _poisson_tv(hist, mean)
    # gof over 0..max plus an upper-tail cell
    probs = np.append(pmf, max(0.0, 1.0 - pmf.sum()))
    obs = np.append(hist, 0)
    try:
        gof = chi_square_gof(obs, probs / probs.sum(), N)
    except DegenerateTestError:
        gof = None
    ls = range(1, max_moment + 1)
    exact = None
    if model == "boson":
        exact = [exactcomb.format_rational(exactcomb.factorial_moment_at_least(n, k, j, l)) for l in ls]
    return PoissonReport(
        n=n, k=k, j=j, c=c, model=model, samples=N, seed=stream.seed,
        poisson_mean=mean,
        histogram=[int(x) for x in hist],
        poisson_pmf=[float(x) for x in pmf],
        tv_distance=tv,
        tv_tolerance=DEFAULTS["poisson_tv_tol"],
        gof=gof,
        factorial_moments=[factorial_moment(exactly, l) for l in ls],
        factorial_moments_at_least=[factorial_moment(at_least, l) for l in ls],
        exact_factorial_moments_at_least=exact,
        mean_more_than_j=float(more.mean()),
        wall_clock=time.perf_counter() - t0,
    )


def table_support(n: int, k: int) -> list[tuple[int, ...]]:
    return list(iter_occupancy_vectors(n, k))


def table_histogram(tables: np.ndarray, support: Sequence[tuple[int, ...]]) -> np.ndarray:
    """Counts of each support table (in ``support`` order) among the rows.

    ``support`` must list every table of its ``(n, k)`` exactly once.
    """
    tables = np.asarray(tables)
    m = len(support)
    if tables.shape[0] == 0:
        return np.zeros(m, dtype=np.int64)
    if tables.shape[1] != len(support[0]) or int(tables[0].sum()) != sum(support[0]):
        raise DomainError("tables are outside the support")
    if (tables.sum(axis=1) != sum(support[0])).any() or (tables < 0).any():
        raise DomainError("tables are outside the support")
    pos = np.empty(m, dtype=np.int64)
    pos[table_ranks(np.array(support, dtype=np.int64).reshape(m, -1))] = np.arange(m)
    return np.bincount(pos[table_ranks(tables)], minlength=m)


def profile_histogram(tables: np.ndarray, support: Sequence[CollisionProfile]) -> np.ndarray:
    index = {p: i for i, p in enumerate(support)}
    out = np.zeros(len(support), dtype=np.int64)
    uniq, cnt = np.unique(np.sort(np.asarray(tables), axis=1), axis=0, return_counts=True)
    for row, c in zip(uniq, cnt):
        out[index[CollisionProfile.from_counts(row)]] += c
    return out


@dataclass
class EquivalenceReport:
    sampler_a: str
    sampler_b: str
    n: int
    k: int
    samples: int
    seed: int
    projection: str
    support_size: int
    tv_a: float
    tv_b: float
    chi_square: TestResult
    observed_a: list[int] = field(repr=False)
    observed_b: list[int] = field(repr=False)
    expected: list[float] = field(repr=False)
    outcomes: list[str] = field(repr=False)
    wall_clock: float = 0.0

    @property
    def passed(self) -> bool:
        return self.chi_square.passed

    @property
    def verdict(self) -> str:
        return self.chi_square.verdict

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        d["verdict"] = self.verdict
        return d


def _sampler_name(s) -> str:
    return s if isinstance(s, str) else getattr(s, "__name__", repr(s))


def equivalence_experiment(
    sampler_a: str | Callable,
    sampler_b: str | Callable,
    n: int,
    k: int,
    N: int = 100_000,
    rng=None,
    projection: str = "table",
    alpha: float = DEFAULTS["alpha"],
    workers: int = 1,
    block_size: int = 100_000,
) -> EquivalenceReport:
    """Compare two samplers' laws with each other and with the uniform multiset law.

    ``projection="table"`` compares full occupancy tables (uniform reference);
    ``projection="profile"`` compares collision profiles (reference: exact
    profile law), which keeps the support small for larger ``n, k``.
    """
    stream = as_stream(rng)
    t0 = time.perf_counter()
    fa = get_sampler(sampler_a) if isinstance(sampler_a, str) else sampler_a
    fb = get_sampler(sampler_b) if isinstance(sampler_b, str) else sampler_b
    if projection == "table":
        size = exactcomb.multiset_coefficient(n, k)
        if N / size < DEFAULTS["min_expected"]:
            raise SizeError(
                f"{size} tables with N={N} gives under {DEFAULTS['min_expected']:g} expected "
                "per cell; compare the collision-profile projection instead (projection='profile')"
            )
        support = table_support(n, k)
        expected = np.full(size, 1.0 / size)
        hist = table_histogram
        labels = [",".join(map(str, t)) for t in support]
    elif projection == "profile":
        law = exactcomb.exact_profile_distribution(n, k)
        support = list(law)
        expected = np.array([float(v) for v in law.values()])
        hist = profile_histogram
        labels = [str(p) for p in support]
    else:
        raise DomainError(f"unknown projection {projection!r}")

    def counts(f, sub: RngStream) -> np.ndarray:
        parts = run_blocks(lambda s, g: hist(f(n, k, s, g), support), N, sub, block_size, workers)
        return np.sum(parts, axis=0)

    obs_a = counts(fa, stream.child(0))
    obs_b = counts(fb, stream.child(1))
    test = chi_square_two_sample(obs_a, obs_b, alpha)
    return EquivalenceReport(
        sampler_a=_sampler_name(sampler_a),
        sampler_b=_sampler_name(sampler_b),
        n=n, k=k, samples=N, seed=stream.seed, projection=projection,
        support_size=len(support),
        tv_a=total_variation(obs_a / N, expected),
        tv_b=total_variation(obs_b / N, expected),
        chi_square=test,
        observed_a=[int(x) for x in obs_a],
        observed_b=[int(x) for x in obs_b],
        expected=[float(x) for x in expected * N],
        outcomes=labels,
        wall_clock=time.perf_counter() - t0,
    )


def exact_expected_count(law: Mapping[CollisionProfile, Fraction], j: int, mode: str) -> Fraction:
    return sum((p * prof.count(j, mode) for prof, p in law.items()), Fraction(0))
