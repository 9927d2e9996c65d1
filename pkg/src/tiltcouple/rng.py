"""Counter-based random streams.

Each :class:`RngStream` wraps a Philox bit generator keyed by
``(seed, stream_id)``. Philox is counter-based, so distinct stream ids give
statistically independent streams without any coordination, and a stream is
reproduced exactly by reconstructing it with the same key. The ``counter``
field records how many draw calls the stream has served; it is bookkeeping
for reports, not an offset into the keystream.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def _mix64(x: int) -> int:
    # splitmix64 finalizer; good avalanche for deriving child stream ids
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


class RngStream:
    """Seeded, splittable source of randomness.

    Parameters
    ----------
    seed : int
        Base seed, reduced mod 2**64.
    stream_id : int, optional
        Substream selector, reduced mod 2**64. Distinct ids are independent.
    counter : int, optional
        Number of draw calls already served. Informational; a stream
        restarted with a nonzero counter still replays from the beginning
        of its keystream.
    """

    __slots__ = ("seed", "stream_id", "counter", "_gen")

    def __init__(self, seed: int, stream_id: int = 0, counter: int = 0):
        self.seed = int(seed) & _MASK64
        self.stream_id = int(stream_id) & _MASK64
        self.counter = int(counter)
        key = (self.stream_id << 64) | self.seed
        self._gen = np.random.Generator(np.random.Philox(key=key))

    @property
    def generator(self) -> np.random.Generator:
        """The underlying numpy Generator. Draws made directly through it
        are not reflected in ``counter``."""
        return self._gen

    def spawn(self, index: int) -> "RngStream":
        """Deterministic child stream; children with distinct indices are
        independent of each other and of the parent."""
        child = _mix64(self.stream_id ^ _mix64(index))
        return RngStream(self.seed, child)

    # thin draw wrappers; every public sampler routes through these

    def uniform(self, size=None):
        self.counter += 1
        return self._gen.random(size)

    def exponential(self, size=None):
        self.counter += 1
        return self._gen.standard_exponential(size)

    def gamma(self, shape, size=None):
        self.counter += 1
        return self._gen.gamma(shape, 1.0, size)

    def beta(self, a, b, size=None):
        # two-gamma construction, kept here so every beta in the package
        # uses the same route
        self.counter += 1
        x = self._gen.gamma(a, 1.0, size)
        y = self._gen.gamma(b, 1.0, size)
        return x / (x + y)

    def __repr__(self):  # pragma: no cover
        return (f"RngStream(seed={self.seed}, stream_id={self.stream_id}, "
                f"counter={self.counter})")
