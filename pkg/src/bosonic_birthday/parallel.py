"""Fixed-block Monte Carlo fan-out.

Work is cut into blocks of ``block_size`` trials; block ``i`` always draws
from ``stream.child(i)``.  Workers only decide who computes a block, so the
merged result depends on ``(seed, parameters, block_size)`` and never on the
worker count.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np

from .rng import RngStream

T = TypeVar("T")


def block_sizes(total: int, block_size: int) -> list[int]:
    if block_size < 1:
        raise ValueError("block_size must be >= 1")
    full, rest = divmod(total, block_size)
    return [block_size] * full + ([rest] if rest else [])


def run_blocks(
    task: Callable[[int, np.random.Generator], T],
    total: int,
    stream: RngStream,
    block_size: int = 10_000,
    workers: int = 1,
) -> list[T]:
    """Run ``task(size, generator)`` per block; results come back in block order."""
    sizes = block_sizes(total, block_size)

    def one(i: int) -> T:
        return task(sizes[i], stream.child(i).generator())

    if workers <= 1 or len(sizes) <= 1:
        return [one(i) for i in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, range(len(sizes))))
