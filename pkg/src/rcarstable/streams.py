"""Reproducible random-stream derivation.

Every unit of work (one process path, one LePage draw, one block of
stable variates) gets its own :class:`Stream`, derived by hashing the
root seed together with a purpose tag and an index through
:class:`numpy.random.SeedSequence`.  A stream carries two independent
PCG64 generators: ``arrivals`` feeds the exponential inter-arrival
increments and ``innovations`` feeds the ``eps_k`` draws.  Keeping them
apart lets the recursion, the closed form, and both kernel backends read
exactly the same numbers regardless of how draws are batched.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidArgumentError

PURPOSE_PROCESS = 1
PURPOSE_LEPAGE = 2
PURPOSE_CMS = 3
PURPOSE_AUX = 4

PURPOSES = {
    "process": PURPOSE_PROCESS,
    "lepage": PURPOSE_LEPAGE,
    "cms": PURPOSE_CMS,
    "aux": PURPOSE_AUX,
}

_MASK64 = (1 << 64) - 1


def _check_seed(seed) -> int:
    if isinstance(seed, (bool, np.bool_)) or not isinstance(seed, (int, np.integer)):
        raise InvalidArgumentError(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if seed < 0 or seed > _MASK64:
        raise InvalidArgumentError("seed must fit in an unsigned 64-bit integer")
    return seed


class Stream:
    """Pair of generators derived from ``(seed, *key)``."""

    __slots__ = ("seed", "key", "arrivals", "innovations")

    def __init__(self, seed: int, key: tuple = ()):
        self.seed = _check_seed(seed)
        self.key = tuple(int(k) for k in key)
        self.arrivals = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=self.key + (0,))))
        self.innovations = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=self.key + (1,))))

    def __repr__(self):
        return f"Stream(seed={self.seed}, key={self.key})"


def derive(seed: int, purpose: int | str, index: int) -> Stream:
    """Stream for work item ``index`` of the given purpose."""
    if isinstance(purpose, str):
        purpose = PURPOSES[purpose]
    return Stream(seed, (purpose, index))


def as_stream(rng) -> Stream:
    """Accept a :class:`Stream` or a bare integer seed."""
    if isinstance(rng, Stream):
        return rng
    return Stream(rng)


def block_generator(seed: int, purpose: int | str, index: int) -> np.random.Generator:
    """Single generator for vectorised blocks (stable variates)."""
    return derive(seed, purpose, index).arrivals
