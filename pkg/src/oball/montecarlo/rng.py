"""Reproducible random streams.

All Monte Carlo entry points take an :class:`RngSpec`; identical
(seed, stream_count, operation parameters) reproduce identical outputs
bit-for-bit.  Streams are counter-based Philox substreams keyed by
(stream index, role), so results are independent of thread scheduling:
each stream generates its own block deterministically and merging is a
deterministic reduction in stream order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["RngSpec", "substream"]

# role tags keep the substreams of one operation disjoint
ROLE_CHAIN = 0
ROLE_NUMERATOR = 1
ROLE_DENOMINATOR = 2
ROLE_GIBBS_MAGNITUDE = 3
ROLE_GIBBS_SIGN = 4


@dataclass(frozen=True)
class RngSpec:
    seed: int
    stream_count: int = 8

    def __post_init__(self):
        if self.stream_count < 1:
            raise ValueError("stream_count must be at least 1")


def substream(spec: RngSpec, stream: int, role: int) -> np.random.Generator:
    """Philox generator for one (stream, role) pair."""
    seq = np.random.SeedSequence(spec.seed, spawn_key=(stream, role))
    return np.random.Generator(np.random.Philox(seq))


def split_count(total: int, streams: int) -> list[int]:
    """Deterministic near-equal split of a sample budget across streams."""
    base, extra = divmod(total, streams)
    return [base + (1 if i < extra else 0) for i in range(streams)]
