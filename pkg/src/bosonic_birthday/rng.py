"""Seeded, splittable random streams.

All randomness goes through numpy's Philox4x64-10, a counter-based
generator.  A stream is identified by ``(seed, path)``; child streams extend
the path, so a block of Monte Carlo work always sees the same numbers no
matter which worker runs it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_SEED = 20120901


@dataclass(frozen=True)
class RngStream:
    seed: int = DEFAULT_SEED
    path: tuple[int, ...] = ()

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed}")

    def child(self, index: int) -> RngStream:
        return RngStream(self.seed, self.path + (int(index),))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=self.path)
        return np.random.Generator(np.random.Philox(ss))


def as_generator(rng) -> np.random.Generator:
    """Accept a Generator, an RngStream, an int seed or None (default seed)."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    if rng is None:
        return RngStream().generator()
    return RngStream(int(rng)).generator()


def as_stream(rng) -> RngStream:
    if isinstance(rng, RngStream):
        return rng
    if rng is None:
        return RngStream()
    if isinstance(rng, np.random.Generator):
        # derive a reproducible seed from the generator's own state
        return RngStream(int(rng.integers(0, 2**63)))
    return RngStream(int(rng))
