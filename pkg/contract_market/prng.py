"""
SplitMix64 stream generator.

Streams are reproducible from a 64-bit seed. ``derive`` splits an
independent stream per label (agent id, worker-firm pair, ...) by mixing
the seed with a blake2b digest of the label, so adding labels never
shifts the draws of existing ones.
"""

import hashlib
from typing import List, Sequence, TypeVar

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

T = TypeVar("T")


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    @classmethod
    def derive(cls, seed: int, label: str) -> "SplitMix64":
        digest = hashlib.blake2b(label.encode("utf-8"), digest_size=8).digest()
        return cls(_mix((seed & MASK64) ^ int.from_bytes(digest, "big")))

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return _mix(self.state)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection"""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - (1 << 64) % bound
        while True:
            value = self.next_u64()
            if value < limit:
                return value % bound

    def unit(self) -> float:
        """Uniform float in [0, 1) from the top 53 bits"""
        return (self.next_u64() >> 11) / float(1 << 53)

    def chance(self, probability: float) -> bool:
        return self.unit() < probability

    def shuffled(self, items: Sequence[T]) -> List[T]:
        """Fisher-Yates shuffle into a new list"""
        result = list(items)
        for index in range(len(result) - 1, 0, -1):
            other = self.below(index + 1)
            result[index], result[other] = result[other], result[index]
        return result
