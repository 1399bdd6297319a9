"""Deterministic integer math: 16.16 fixed point, binary angles, xorshift RNG.

Everything the simulation touches goes through the helpers here so that two
runs (or two peers in a lockstep match) produce bit-identical state. The sine
table is shipped as binary package data; it is never recomputed at runtime,
which keeps results independent of the host libm.
"""
from __future__ import annotations

import math
import struct
from pathlib import Path

FX_SHIFT = 16
FX_ONE = 1 << FX_SHIFT  # 1.0 game unit

_MASK32 = 0xFFFFFFFF
_MASK64 = 0xFFFFFFFFFFFFFFFF

# Full circle = 2^32 binary angle units (BAM).
ANG_90 = 0x40000000
ANG_180 = 0x80000000
ANG_270 = 0xC0000000

FINE_ENTRIES = 8192
_FINE_SHIFT = 32 - 13  # BAM -> table index

_table_path = Path(__file__).parent / "data" / "sintab.bin"
SINTAB: tuple[int, ...] = struct.unpack(f"<{FINE_ENTRIES}i", _table_path.read_bytes())


def wrap32(v: int) -> int:
    """Wrap to signed 32-bit, the storage type of fixed-point values."""
    return ((v + 0x80000000) & _MASK32) - 0x80000000


def to_fx(units: float | int) -> int:
    return int(units * FX_ONE)


def fx_to_float(v: int) -> float:
    return v / FX_ONE


def fx_mul(a: int, b: int) -> int:
    """Fixed multiply, truncating toward zero."""
    p = a * b
    if p >= 0:
        return wrap32(p >> FX_SHIFT)
    return wrap32(-((-p) >> FX_SHIFT))


def fx_div(a: int, b: int) -> int:
    """Fixed divide, truncating toward zero. b must be nonzero."""
    p = a << FX_SHIFT
    if (p >= 0) == (b > 0):
        return wrap32(abs(p) // abs(b))
    return wrap32(-(abs(p) // abs(b)))


def fx_hypot(dx: int, dy: int) -> int:
    """Exact floor(sqrt(dx^2 + dy^2)) in raw fixed point."""
    return math.isqrt(dx * dx + dy * dy)


def norm_angle(a: int) -> int:
    return a & _MASK32


def deg_to_bam(deg: float) -> int:
    return round(deg * 4294967296.0 / 360.0) & _MASK32


def bam_to_deg(a: int) -> float:
    return (a & _MASK32) * 360.0 / 4294967296.0


def centideg_to_bam(cd: int) -> int:
    """Signed hundredths of a degree to a signed BAM delta (symmetric floor)."""
    if cd >= 0:
        return cd * 4294967296 // 36000
    return -((-cd) * 4294967296 // 36000)


def sin_fx(angle: int) -> int:
    return SINTAB[(angle & _MASK32) >> _FINE_SHIFT]


def cos_fx(angle: int) -> int:
    return SINTAB[(((angle & _MASK32) >> _FINE_SHIFT) + 2048) & (FINE_ENTRIES - 1)]


_RNG_MULT = 2685821657736338717
_RNG_DEFAULT = 0x9E3779B97F4A7C15


class Rng:
    """xorshift64* generator; the state is never zero."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        s = seed & _MASK64
        self.state = s if s != 0 else _RNG_DEFAULT

    def next(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & _MASK64
        x ^= x >> 27
        self.state = x
        return (x * _RNG_MULT) & _MASK64

    def below(self, n: int) -> int:
        return self.next() % n

    def copy(self) -> "Rng":
        r = Rng(1)
        r.state = self.state
        return r


def mix_seed(seed: int, salt: int) -> int:
    """Derive a sub-seed (per player, per match) from one master seed."""
    x = (seed ^ (salt * 0x9E3779B97F4A7C15)) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64
