"""Seedable, splittable random streams for the simulator.

Each stream is an independent PCG64 substream keyed by
(run seed, source id, role).  Substreams are derived through numpy's
SeedSequence spawn keys, so adding sources or roles never perturbs the draws
of existing streams, and the same key always reproduces the same sequence.
"""
from __future__ import annotations

import math

import numpy as np

__all__ = ["Role", "UniformStream", "SourceStreams"]

_BLOCK = 1 << 14
_U64 = (1 << 64) - 1


class Role:
    """Stream roles, one per independent randomness consumer of a source."""

    ARRIVAL = 0
    CHANNEL = 1
    ACCESS = 2
    DELAY = 3


class UniformStream:
    """Buffered stream of U(0,1) draws on a dedicated substream."""

    __slots__ = ("_gen", "_buf", "_idx")

    def __init__(self, seed: int, key: tuple[int, ...]):
        ss = np.random.SeedSequence(entropy=seed & _U64, spawn_key=key)
        self._gen = np.random.Generator(np.random.PCG64(ss))
        self._buf = self._gen.random(_BLOCK).tolist()
        self._idx = 0

    def uniform(self) -> float:
        i = self._idx
        buf = self._buf
        if i == _BLOCK:
            self._buf = buf = self._gen.random(_BLOCK).tolist()
            i = 0
        self._idx = i + 1
        return buf[i]

    def bernoulli(self, p: float) -> bool:
        return self.uniform() < p

    def geometric(self, p: float) -> int:
        """Number of Bernoulli(p) trials up to the first success; support {1, 2, ...}."""
        if p >= 1.0:
            return 1
        u = self.uniform()
        return int(math.log(1.0 - u) / math.log(1.0 - p)) + 1


class SourceStreams:
    """The independent streams one source consumes during a run."""

    __slots__ = ("arrival", "channel", "access", "delay")

    def __init__(self, seed: int, source_id: int):
        self.arrival = UniformStream(seed, (source_id, Role.ARRIVAL))
        self.channel = UniformStream(seed, (source_id, Role.CHANNEL))
        self.access = UniformStream(seed, (source_id, Role.ACCESS))
        self.delay = UniformStream(seed, (source_id, Role.DELAY))
