"""Seeded random streams for reproducible simulations.

One root seed feeds every replication. Replication ``r`` uses the
counter-derived ``SeedSequence(root, spawn_key=(r,))`` and each concern
(arrivals, thinning, actions, server sampling, service, dispatcher delay,
group partition) gets its own child sequence, so adding draws to one concern
never shifts the draws of another.
"""

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from config.settings import settings


STREAM_NAMES = ("arrivals", "thinning", "actions", "sampling", "service", "delay", "partition")


def replication_seed(root_seed: int, replication: int) -> np.random.SeedSequence:
    """Counter-based split of ``root_seed`` for replication ``replication``."""
    return np.random.SeedSequence(entropy=root_seed, spawn_key=(replication,))


class RandomStream:
    """Buffered uniform and exponential draws from one numpy Generator."""

    def __init__(self, seed_sequence: np.random.SeedSequence, buffer_size: int = 0):
        self._gen = np.random.Generator(np.random.PCG64(seed_sequence))
        self._size = buffer_size or settings.rng_buffer_size
        self._uniforms: List[float] = []
        self._u_pos = 0
        self._exps: List[float] = []
        self._e_pos = 0

    def random(self) -> float:
        """Uniform draw on [0, 1)."""
        if self._u_pos >= len(self._uniforms):
            self._uniforms = self._gen.random(self._size).tolist()
            self._u_pos = 0
        u = self._uniforms[self._u_pos]
        self._u_pos += 1
        return u

    def exponential(self) -> float:
        """Standard (unit-rate) exponential draw."""
        if self._e_pos >= len(self._exps):
            self._exps = self._gen.standard_exponential(self._size).tolist()
            self._e_pos = 0
        e = self._exps[self._e_pos]
        self._e_pos += 1
        return e

    def below(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        k = int(self.random() * n)
        return k if k < n else n - 1

    def sample(self, population: Sequence[int], k: int) -> List[int]:
        """``k`` distinct items of ``population`` in sampled order."""
        n = len(population)
        if k > n:
            raise ValueError(f"cannot sample {k} of {n}")
        if 4 * k <= n:
            picked: List[int] = []
            seen = set()
            while len(picked) < k:
                i = self.below(n)
                if i not in seen:
                    seen.add(i)
                    picked.append(population[i])
            return picked
        pool = list(population)
        for i in range(k):
            j = i + self.below(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def permutation(self, n: int) -> List[int]:
        return self.sample(range(n), n)


@dataclass
class StreamSet:
    """The independent random streams of one replication."""
    arrivals: RandomStream
    thinning: RandomStream
    actions: RandomStream
    sampling: RandomStream
    service: RandomStream
    delay: RandomStream
    partition: RandomStream

    @classmethod
    def for_replication(cls, root_seed: int, replication: int = 0) -> "StreamSet":
        parent = replication_seed(root_seed, replication)
        streams = {
            name: RandomStream(
                np.random.SeedSequence(entropy=parent.entropy, spawn_key=parent.spawn_key + (i,))
            )
            for i, name in enumerate(STREAM_NAMES)
        }
        return cls(**streams)
