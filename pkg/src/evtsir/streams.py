"""Counter-based random streams.

A stream is addressed by ``(seed, stream_id, position)``.  The triple maps to
a Philox generator whose key is ``(seed, stream_id)`` and whose counter
starts at ``position * 2**128``.  Two addresses never share a counter range,
so the draws at any address are fixed no matter which worker produces them
or in what order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_SEED = 0xC0FFEE
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RandomStream:
    seed: int = DEFAULT_SEED
    stream_id: int = 0
    position: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id", "position"):
            v = getattr(self, name)
            if not 0 <= v <= _MASK64:
                raise ValueError(f"{name} must fit in 64 unsigned bits, got {v}")

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        counter = np.array([0, 0, self.position, 0], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key, counter=counter))

    def substream(self, stream_id: int) -> "RandomStream":
        return RandomStream(self.seed, stream_id, 0)

    def at(self, position: int) -> "RandomStream":
        return RandomStream(self.seed, self.stream_id, position)


def as_generator(rng) -> np.random.Generator:
    """Accept a ``RandomStream``, a numpy ``Generator`` or an int seed."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RandomStream):
        return rng.generator()
    if rng is None:
        return RandomStream().generator()
    if isinstance(rng, (int, np.integer)):
        return RandomStream(int(rng)).generator()
    raise TypeError(f"cannot build a generator from {type(rng).__name__}")
