#!/usr/bin/env python3
"""Regenerate the packaged binary sine table.

The table is committed as src/pixelarena/data/sintab.bin so every build ships
bit-identical trig regardless of the host libm. Run this only when changing
the table size or scale, then bump the replay format version.
"""
import math
import struct
from pathlib import Path

ENTRIES = 8192
SCALE = 65536

out = Path(__file__).resolve().parent.parent / "src" / "pixelarena" / "data" / "sintab.bin"
values = [round(math.sin(2.0 * math.pi * i / ENTRIES) * SCALE) for i in range(ENTRIES)]
out.write_bytes(struct.pack(f"<{ENTRIES}i", *values))
print(f"wrote {out} ({out.stat().st_size} bytes)")
