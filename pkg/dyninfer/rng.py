"""Seeded random source for reproducible rollouts and random instances."""
import numpy as np

from dyninfer.exceptions import InvalidParams

MAX_SEED = 2 ** 64


class SeededRNG:
    """
    numpy PCG64 stream seeded through SeedSequence(seed).

    Rollout substreams: with `width` uniforms per rollout, rollout r owns the
    doubles at stream offsets [r * width, (r + 1) * width). Draws are taken in
    sequential blocks, so the values a rollout sees depend only on (seed, r).
    """

    def __init__(self, seed):
        if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or seed < 0 or seed >= MAX_SEED:
            raise InvalidParams("seed must be an integer in [0, 2**64), got %r" % (seed,))
        self._seed = int(seed)
        self._rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(self._seed)))

    @property
    def seed(self):
        return self._seed

    @property
    def generator(self):
        return self._rng

    def random(self, size=None):
        return self._rng.random(size)

    def dirichlet(self, alpha, size=None):
        return self._rng.dirichlet(alpha, size)

    def integers(self, low, high=None, size=None):
        return self._rng.integers(low, high, size)

    def uniform(self, low, high, size=None):
        return self._rng.uniform(low, high, size)

    def rollout_blocks(self, rollouts, width, chunk_size=65536):
        """Yields (first rollout index, uniforms of shape (count, width)) in rollout order."""
        start = 0
        while start < rollouts:
            count = min(chunk_size, rollouts - start)
            yield start, self._rng.random((count, width))
            start += count

    def fork(self, suffix=0):
        """Independent child stream derived from (seed, suffix)."""
        child = SeededRNG.__new__(SeededRNG)
        child._seed = self._seed
        child._rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([self._seed, int(suffix)])))
        return child
