"""Portable counter-based random streams built on SplitMix64.

Every draw is a pure function of ``(key, counter)`` so a re-implementation
in another language reproduces cohorts bit for bit:

* ``splitmix64(x)``: ``z = x + 0x9E3779B97F4A7C15``;
  ``z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9``;
  ``z = (z ^ (z >> 27)) * 0x94D049BB133111EB``; return ``z ^ (z >> 31)``
  (all arithmetic mod 2**64).
* Stream key for ``(seed, a, b, ...)``: ``k = splitmix64(seed)``, then
  ``k = splitmix64(k ^ a)`` for each further part.
* The ``i``-th raw output (``i = 1, 2, ...``) of a stream with key ``k`` is
  ``splitmix64(k + (i - 1) * 0x9E3779B97F4A7C15)``.
* uniform in [0, 1): ``(raw >> 11) * 2**-53``; open uniform in (0, 1]:
  ``((raw >> 11) + 1) * 2**-53``.
* normal: ``sqrt(-2 ln u1) * cos(2 pi u2)`` from two consecutive outputs,
  ``u1`` open, ``u2`` half-open.
* exponential(1): ``-ln u`` with ``u`` open.
"""

from __future__ import annotations

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_MASK = (1 << 64) - 1
_U53 = 2.0 ** -53


def splitmix64(x: int) -> int:
    z = (x + GAMMA) & _MASK
    z = ((z ^ (z >> 30)) * _M1) & _MASK
    z = ((z ^ (z >> 27)) * _M2) & _MASK
    return z ^ (z >> 31)


def derive_key(*parts: int) -> int:
    if not parts:
        raise ValueError("need at least a seed")
    k = splitmix64(parts[0] & _MASK)
    for p in parts[1:]:
        k = splitmix64(k ^ (p & _MASK))
    return k


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = z + np.uint64(GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


class Stream:
    """Sequential reader over one counter-based SplitMix64 stream."""

    def __init__(self, key: int):
        self.key = key & _MASK
        self.counter = 0

    def raw(self, n: int) -> np.ndarray:
        idx = np.arange(self.counter, self.counter + n, dtype=np.uint64)
        self.counter += n
        with np.errstate(over="ignore"):
            return _mix_array(np.uint64(self.key) + idx * np.uint64(GAMMA))

    def uniform(self, n: int, low: float = 0.0, high: float = 1.0) -> np.ndarray:
        u = (self.raw(n) >> np.uint64(11)).astype(np.float64) * _U53
        return low + (high - low) * u

    def uniform_open(self, n: int) -> np.ndarray:
        return ((self.raw(n) >> np.uint64(11)).astype(np.float64) + 1.0) * _U53

    def normal(self, n: int) -> np.ndarray:
        r = self.raw(2 * n)
        u1 = ((r[0::2] >> np.uint64(11)).astype(np.float64) + 1.0) * _U53
        u2 = (r[1::2] >> np.uint64(11)).astype(np.float64) * _U53
        return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)

    def exponential(self, n: int) -> np.ndarray:
        return -np.log(self.uniform_open(n))

    def poisson(self, mean: float) -> int:
        """Poisson count as the number of unit-rate arrivals in ``[0, mean]``."""
        if mean < 0:
            raise ValueError("mean must be non-negative")
        count, t = 0, 0.0
        while True:
            t += float(self.exponential(1)[0])
            if t > mean:
                return count
            count += 1

    def scalar(self, low: float = 0.0, high: float = 1.0) -> float:
        return float(self.uniform(1, low, high)[0])
