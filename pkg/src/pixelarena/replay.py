"""Bit-exact episode recording and deterministic playback (.vzr format).

A replay stores the seed, the full scenario (config + map text), and every
player's action for every tic, plus a state-hash checkpoint every 35 tics and
a footer with the final counters and hash. Playback re-simulates from the
seed and verifies every checkpoint, so a replay doubles as a determinism test
vector. Rendering settings are free to differ at playback time; they cannot
influence the simulation.

Layout (little-endian):
  magic "VZR1" | version u16 | seed u64 | players u8
  | config_len u32 | config utf-8 | map_len u32 | map utf-8
  | per tic: players x (buttons u32, turn_delta i16 centidegrees)
  |   after every tic divisible by 35: checkpoint hash u64
  | sentinel u32 0xFFFFFFFF | final_tic u32
  | per player: 12 x u32 + i64 counters | final hash u64 | "ENDV"
"""
from __future__ import annotations

import io
import struct
from dataclasses import dataclass
from pathlib import Path

from .scenario import BUTTON_MASK_ALL, ScenarioConfig, attach_map, parse_config, serialize_config
from .sim import Counters, WorldState, state_hash, step

MAGIC = b"VZR1"
END_MAGIC = b"ENDV"
REPLAY_VERSION = 1  # bump when default tuning or the sim itself changes
CHECKPOINT_INTERVAL = 35
SENTINEL = 0xFFFFFFFF

_HHDR = struct.Struct("<4sHQB")
_LEN = struct.Struct("<I")
_ENTRY = struct.Struct("<Ih")
_HASH = struct.Struct("<Q")
_COUNTERS = struct.Struct("<12Iq")
_U32 = struct.Struct("<I")

COUNTER_FIELDS = Counters.__slots__


class ReplayError(Exception):
    pass


class IncompatibleReplayError(ReplayError):
    pass


class TruncatedReplayError(ReplayError):
    def __init__(self, last_tic: int):
        super().__init__(f"replay truncated after tic {last_tic}")
        self.last_tic = last_tic


class ReplayDesyncError(ReplayError):
    def __init__(self, tic: int, expected: int, actual: int):
        super().__init__(
            f"checkpoint mismatch at tic {tic}: "
            f"recorded {expected:#018x}, resimulated {actual:#018x}")
        self.tic = tic


class ReplayWriter:
    """Streams a match to a binary file object; flush-safe."""

    def __init__(self, out, flush_every: int = 350):
        self._out = out
        self._flush_every = flush_every
        self._n = 0
        self._tic = 0
        self._entry = _ENTRY
        self.finished = False

    def begin(self, cfg: ScenarioConfig, n_players: int) -> None:
        if cfg.map_grid is None:
            raise ReplayError("config has no map attached")
        self._n = n_players
        cfg_text = serialize_config(cfg).encode()
        map_text = cfg.map_grid.text.encode()
        self._out.write(_HHDR.pack(MAGIC, REPLAY_VERSION, cfg.seed, n_players))
        self._out.write(_LEN.pack(len(cfg_text)))
        self._out.write(cfg_text)
        self._out.write(_LEN.pack(len(map_text)))
        self._out.write(map_text)

    def add_tic(self, actions, world: WorldState) -> None:
        pack = self._entry.pack
        out = self._out
        for buttons, delta in actions:
            out.write(pack(buttons & BUTTON_MASK_ALL, delta))
        self._tic += 1
        if self._tic % CHECKPOINT_INTERVAL == 0:
            out.write(_HASH.pack(state_hash(world)))
        if self._tic % self._flush_every == 0:
            out.flush()

    def finish(self, world: WorldState) -> None:
        out = self._out
        out.write(_U32.pack(SENTINEL))
        out.write(_U32.pack(world.tic))
        for c in world.counters:
            out.write(_COUNTERS.pack(*[getattr(c, f) for f in COUNTER_FIELDS]))
        out.write(_HASH.pack(state_hash(world)))
        out.write(END_MAGIC)
        out.flush()
        self.finished = True


@dataclass
class ReplayHeader:
    version: int
    seed: int
    n_players: int
    config_text: str
    map_text: str


@dataclass
class ReplayResult:
    final_tic: int
    counters: list[Counters]
    final_hash: int
    tic_hashes: list[int]


class _Cursor:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise EOFError
        b = self.data[self.pos:self.pos + n]
        self.pos += n
        return b

    def peek_u32(self) -> int | None:
        if self.pos + 4 > len(self.data):
            return None
        return _U32.unpack_from(self.data, self.pos)[0]


def read_header(cur: _Cursor) -> ReplayHeader:
    try:
        magic, version, seed, n = _HHDR.unpack(cur.take(_HHDR.size))
        if magic != MAGIC:
            raise ReplayError("not a replay file (bad magic)")
        if version != REPLAY_VERSION:
            raise IncompatibleReplayError(
                f"replay version {version} not supported (expected {REPLAY_VERSION}); "
                "replays do not survive simulation-constant changes")
        cfg_len = _LEN.unpack(cur.take(4))[0]
        cfg_text = cur.take(cfg_len).decode()
        map_len = _LEN.unpack(cur.take(4))[0]
        map_text = cur.take(map_len).decode()
    except EOFError:
        raise TruncatedReplayError(0) from None
    return ReplayHeader(version, seed, n, cfg_text, map_text)


def load_header(source) -> ReplayHeader:
    return read_header(_Cursor(_read_all(source)))


def _read_all(source) -> bytes:
    if isinstance(source, (str, Path)):
        return Path(source).read_bytes()
    if isinstance(source, (bytes, bytearray)):
        return bytes(source)
    return source.read()


def replay(source, on_tic=None, collect_hashes: bool = False) -> ReplayResult:
    """Re-simulate a recorded match, verifying every checkpoint hash.

    `on_tic(world, actions, events)` runs after every simulated tic; rendering
    during playback goes through it and cannot affect the outcome.
    """
    cur = _Cursor(_read_all(source))
    hdr = read_header(cur)
    cfg = parse_config(hdr.config_text)
    attach_map(cfg, hdr.map_text)
    cfg.seed = hdr.seed
    world = WorldState(cfg, n_players=hdr.n_players)

    n = hdr.n_players
    entry = _ENTRY
    rec_size = entry.size * n
    tic_hashes: list[int] = []
    tic = 0
    while True:
        nxt = cur.peek_u32()
        if nxt == SENTINEL:
            break
        if nxt is None or cur.pos + rec_size > len(cur.data):
            raise TruncatedReplayError(tic)
        raw = cur.take(rec_size)
        actions = [entry.unpack_from(raw, i * entry.size) for i in range(n)]
        events = step(world, actions)
        tic += 1
        h = None
        if tic % CHECKPOINT_INTERVAL == 0:
            try:
                stored = _HASH.unpack(cur.take(8))[0]
            except EOFError:
                raise TruncatedReplayError(tic) from None
            h = state_hash(world)
            if stored != h:
                raise ReplayDesyncError(tic, stored, h)
        if collect_hashes:
            tic_hashes.append(h if h is not None else state_hash(world))
        if on_tic is not None:
            on_tic(world, actions, events)

    try:
        cur.take(4)  # sentinel
        final_tic = _U32.unpack(cur.take(4))[0]
        counters = []
        for _ in range(n):
            vals = _COUNTERS.unpack(cur.take(_COUNTERS.size))
            counters.append(Counters.from_dict(dict(zip(COUNTER_FIELDS, vals))))
        final_hash = _HASH.unpack(cur.take(8))[0]
        end = cur.take(4)
    except EOFError:
        raise TruncatedReplayError(tic) from None
    if end != END_MAGIC:
        raise ReplayError("bad footer magic")
    if final_tic != world.tic:
        raise ReplayError(f"footer tic {final_tic} != simulated {world.tic}")
    actual = state_hash(world)
    if actual != final_hash:
        raise ReplayDesyncError(final_tic, final_hash, actual)
    for pid, c in enumerate(counters):
        if c != world.counters[pid]:
            raise ReplayError(f"footer counters for player {pid} do not match re-simulation")
    return ReplayResult(final_tic, counters, final_hash, tic_hashes)


def record_to_bytes(runner_factory) -> tuple[bytes, "object"]:
    """Convenience for tests: run a match into an in-memory replay buffer."""
    buf = io.BytesIO()
    writer = ReplayWriter(buf)
    result = runner_factory(writer)
    return buf.getvalue(), result
