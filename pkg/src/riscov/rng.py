"""Counter-based random streams (Philox4x32-10).

Every random number in the simulator is a pure function of
``(seed, trial, stream id, slot, extra)``. Nothing is carried between
draws, so trials can be evaluated in any order, on any number of
threads, and windows can grow without disturbing the draws already made.

Counter layout: ``(slot, stream, trial, extra)`` with the 64-bit seed as
the key. The 32-bit stream id packs

    bit 31      population tag (vehicle/handset independence in mixtures)
    bits 27-30  element class
    bits 10-26  line id (0 = typical line, k + 1 = k-th nearest other line)
    bits 0-9    band << 1 | side
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_MASK32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_S5 = np.uint64(5)
_S6 = np.uint64(6)

MAX_LINE_ID = (1 << 17) - 1
MAX_BAND = (1 << 9) - 1
MAX_TRIALS = 1 << 32

# element classes
BS = 1
LINES = 2
TYPICAL = 3
RIS = 4
VEHICLE = 5
HANDSET = 6
BLOCK_DIRECT = 7
BLOCK_USER = 8
BLOCK_FEED = 9
BS_LOCAL = 10


@njit(cache=True)
def philox4x32(c0, c1, c2, c3, k0, k1):
    """Ten Philox rounds on a 4x32-bit counter; words held in uint64."""
    for _ in range(10):
        p0 = _M0 * c0
        p1 = _M1 * c2
        c0, c1, c2, c3 = (p1 >> _S32) ^ c1 ^ k0, p1 & _MASK32, (p0 >> _S32) ^ c3 ^ k1, p0 & _MASK32
        k0 = (k0 + _W0) & _MASK32
        k1 = (k1 + _W1) & _MASK32
    return c0, c1, c2, c3


@njit(cache=True)
def _to_unit(hi, lo):
    # 53-bit mantissa, offset half an ulp so the result lies in (0, 1)
    return ((hi >> _S5) * 67108864.0 + (lo >> _S6) + 0.5) * 1.1102230246251565e-16


@njit(cache=True)
def uniform_pair(key0, key1, slot, stream, trial, extra):
    w0, w1, w2, w3 = philox4x32(
        np.uint64(slot), np.uint64(stream), np.uint64(trial), np.uint64(extra), key0, key1
    )
    return _to_unit(w0, w1), _to_unit(w2, w3)


@njit(cache=True)
def stream_id(tag, cls, line, band_side):
    return (tag << 31) | (cls << 27) | (line << 10) | band_side


def split_seed(seed: int):
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return np.uint64(seed & 0xFFFFFFFF), np.uint64(seed >> 32)


@dataclass(frozen=True)
class Stream:
    """Handle naming one trial's family of random streams."""

    seed: int
    trial: int = 0
    tag: int = 0

    def __post_init__(self):
        split_seed(self.seed)
        if not 0 <= self.trial < MAX_TRIALS:
            raise ValueError("trial index must fit in 32 bits")
        if self.tag not in (0, 1):
            raise ValueError("tag must be 0 or 1")

    @property
    def key(self):
        return split_seed(self.seed)
