"""Counter-based random streams keyed by (seed, path index, component).

Every path of every experiment owns an independent stream, so results do not
depend on worker count or chunking.  The jit kernels draw from a Philox4x32
generator (10 rounds) implemented in ``_kernels``; this module provides the
key derivation shared by both lanes and a pure-numpy Philox reference used to
unit-test the kernel implementation.  Vectorized numpy code paths use
``numpy.random.Philox`` with keys derived from the same material.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Component", "StreamKey", "derive_key32", "philox4x32_reference"]


class Component:
    """Noise-component ids for stream separation."""

    Y_NOISE = 0
    THETA_NOISE = 1
    THETA_CLOCK = 2
    GENERAL = 3


_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


def _splitmix64(z: int) -> int:
    z = (z + _SPLITMIX_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_key32(seed: int, component: int) -> tuple[int, int]:
    """Derive the 64-bit Philox4x32 key half-pair for (seed, component).

    Per-path keys are formed inside the kernels by xoring the path index
    into this base key, which selects independent Philox streams.
    """
    h = _splitmix64(_splitmix64(seed & _MASK64) ^ _splitmix64(0xC0FFEE ^ (component & _MASK64)))
    return h & 0xFFFFFFFF, (h >> 32) & 0xFFFFFFFF


@dataclass(frozen=True)
class StreamKey:
    """Addressable random stream for one path of one experiment."""

    seed: int
    path: int = 0
    component: int = Component.GENERAL

    def philox_key32(self) -> tuple[int, int]:
        k0, k1 = derive_key32(self.seed, self.component)
        return k0 ^ (self.path & 0xFFFFFFFF), k1 ^ ((self.path >> 32) & 0xFFFFFFFF)

    def generator(self) -> np.random.Generator:
        """numpy Generator backed by counter-based Philox with this key."""
        h0 = _splitmix64(self.seed ^ _splitmix64(self.component + 0x51AB))
        h1 = _splitmix64(h0 ^ _splitmix64(self.path))
        key = (h0 << 64) | h1
        return np.random.Generator(np.random.Philox(key=key))


_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint32(0x9E3779B9)
_W1 = np.uint32(0xBB67AE85)


def philox4x32_reference(counters: np.ndarray, k0: int, k1: int) -> np.ndarray:
    """Vectorized Philox4x32-10 over 64-bit counters (reference implementation).

    Parameters
    ----------
    counters : array of uint64
        Block counters; counter ``c`` fills lanes (c & 2^32-1, c >> 32, 0, 0).
    k0, k1 : int
        32-bit key halves.

    Returns
    -------
    (len(counters), 4) array of uint32 output lanes.
    """
    counters = np.asarray(counters, dtype=np.uint64)
    c0 = (counters & np.uint64(0xFFFFFFFF)).astype(np.uint32)
    c1 = (counters >> np.uint64(32)).astype(np.uint32)
    c2 = np.zeros_like(c0)
    c3 = np.zeros_like(c0)
    kk0 = int(k0)
    kk1 = int(k1)
    for _ in range(10):
        p0 = _M0 * c0.astype(np.uint64)
        p1 = _M1 * c2.astype(np.uint64)
        hi0 = (p0 >> np.uint64(32)).astype(np.uint32)
        lo0 = p0.astype(np.uint32)
        hi1 = (p1 >> np.uint64(32)).astype(np.uint32)
        lo1 = p1.astype(np.uint32)
        n0 = hi1 ^ c1 ^ np.uint32(kk0)
        n1 = lo1
        n2 = hi0 ^ c3 ^ np.uint32(kk1)
        n3 = lo0
        c0, c1, c2, c3 = n0, n1, n2, n3
        kk0 = (kk0 + 0x9E3779B9) & 0xFFFFFFFF
        kk1 = (kk1 + 0xBB67AE85) & 0xFFFFFFFF
    return np.stack([c0, c1, c2, c3], axis=1)
