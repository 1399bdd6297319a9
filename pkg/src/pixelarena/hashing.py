"""FNV-1a 64 over canonical byte strings.

The JIT kernel and the pure-Python loop produce identical values (asserted in
tests); the kernel exists because state hashing runs once per simulated tic.
"""
from __future__ import annotations

import numpy as np

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def fnv1a_py(data: bytes, h: int = FNV_OFFSET) -> int:
    for b in data:
        h = ((h ^ b) * FNV_PRIME) & _MASK64
    return h


try:
    from numba import njit

    @njit(cache=True)
    def _fnv1a_kernel(data):  # pragma: no cover - exercised via fnv1a
        h = np.uint64(FNV_OFFSET)
        prime = np.uint64(FNV_PRIME)
        for i in range(data.shape[0]):
            h = (h ^ np.uint64(data[i])) * prime
        return h

    def fnv1a(data: bytes) -> int:
        return int(_fnv1a_kernel(np.frombuffer(data, dtype=np.uint8)))

except ImportError:  # pragma: no cover
    fnv1a = fnv1a_py
