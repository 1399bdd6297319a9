"""Binary lockstep wire protocol.

Every frame on the wire is: u32 payload length | u8 type | payload, all
little-endian. decode() of any byte sequence either returns a message or
raises a typed ProtocolError — never anything else (fuzzed in tests).

    HELLO    proto u16, name utf-8 (rest of frame)
    WELCOME  player_id u8, seed u64, cfg_len u32, cfg utf-8, map_len u32, map utf-8
    READY    (empty)
    ACTION   tic u32, buttons u32, turn_delta i16 (hundredths of degrees)
    TICBATCH tic u32, n u8, n x (buttons u32, turn_delta i16)
    HASH     tic u32, value u64
    BYE      reason u8
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

PROTO_VERSION = 1
MAX_FRAME = 1 << 20

TYPE_HELLO = 1
TYPE_WELCOME = 2
TYPE_READY = 3
TYPE_ACTION = 4
TYPE_TICBATCH = 5
TYPE_HASH = 6
TYPE_BYE = 7

BYE_NORMAL = 0
BYE_DESYNC = 1
BYE_FULL = 2
BYE_PROTOCOL = 3
BYE_VERSION = 4

_LEN = struct.Struct("<I")
_HELLO = struct.Struct("<H")
_WELCOME = struct.Struct("<BQ")
_ACTION = struct.Struct("<IIh")
_BATCH_HDR = struct.Struct("<IB")
_ENTRY = struct.Struct("<Ih")
_HASH = struct.Struct("<IQ")


class ProtocolError(Exception):
    pass


class TruncatedFrameError(ProtocolError):
    pass


class BadLengthError(ProtocolError):
    pass


class UnknownTypeError(ProtocolError):
    pass


@dataclass(frozen=True, slots=True)
class Hello:
    proto: int
    name: str


@dataclass(frozen=True, slots=True)
class Welcome:
    player_id: int
    seed: int
    config_text: str
    map_text: str


@dataclass(frozen=True, slots=True)
class Ready:
    pass


@dataclass(frozen=True, slots=True)
class ActionMsg:
    tic: int
    buttons: int
    turn_delta: int


@dataclass(frozen=True, slots=True)
class TicBatch:
    tic: int
    actions: tuple[tuple[int, int], ...]


@dataclass(frozen=True, slots=True)
class HashMsg:
    tic: int
    value: int


@dataclass(frozen=True, slots=True)
class Bye:
    reason: int


Message = Hello | Welcome | Ready | ActionMsg | TicBatch | HashMsg | Bye


def _frame(mtype: int, payload: bytes) -> bytes:
    return _LEN.pack(1 + len(payload)) + bytes([mtype]) + payload


def encode(msg: Message) -> bytes:
    if isinstance(msg, Hello):
        return _frame(TYPE_HELLO, _HELLO.pack(msg.proto) + msg.name.encode())
    if isinstance(msg, Welcome):
        cfg = msg.config_text.encode()
        mp = msg.map_text.encode()
        payload = (_WELCOME.pack(msg.player_id, msg.seed)
                   + _LEN.pack(len(cfg)) + cfg + _LEN.pack(len(mp)) + mp)
        return _frame(TYPE_WELCOME, payload)
    if isinstance(msg, Ready):
        return _frame(TYPE_READY, b"")
    if isinstance(msg, ActionMsg):
        return _frame(TYPE_ACTION, _ACTION.pack(msg.tic, msg.buttons, msg.turn_delta))
    if isinstance(msg, TicBatch):
        payload = _BATCH_HDR.pack(msg.tic, len(msg.actions))
        payload += b"".join(_ENTRY.pack(b, d) for b, d in msg.actions)
        return _frame(TYPE_TICBATCH, payload)
    if isinstance(msg, HashMsg):
        return _frame(TYPE_HASH, _HASH.pack(msg.tic, msg.value))
    if isinstance(msg, Bye):
        return _frame(TYPE_BYE, bytes([msg.reason]))
    raise TypeError(f"not a protocol message: {msg!r}")


def _need(payload: bytes, n: int, what: str) -> None:
    if len(payload) < n:
        raise TruncatedFrameError(f"{what}: need {n} bytes, have {len(payload)}")


def decode_payload(mtype: int, payload: bytes) -> Message:
    if mtype == TYPE_HELLO:
        _need(payload, _HELLO.size, "HELLO")
        (proto,) = _HELLO.unpack_from(payload)
        try:
            name = payload[_HELLO.size:].decode()
        except UnicodeDecodeError as e:
            raise BadLengthError(f"HELLO name not utf-8: {e}") from None
        return Hello(proto, name)
    if mtype == TYPE_WELCOME:
        _need(payload, _WELCOME.size + 4, "WELCOME")
        pid, seed = _WELCOME.unpack_from(payload)
        pos = _WELCOME.size
        (cfg_len,) = _LEN.unpack_from(payload, pos)
        pos += 4
        _need(payload, pos + cfg_len + 4, "WELCOME config")
        cfg = payload[pos:pos + cfg_len]
        pos += cfg_len
        (map_len,) = _LEN.unpack_from(payload, pos)
        pos += 4
        _need(payload, pos + map_len, "WELCOME map")
        mp = payload[pos:pos + map_len]
        if pos + map_len != len(payload):
            raise BadLengthError("WELCOME: trailing bytes")
        try:
            return Welcome(pid, seed, cfg.decode(), mp.decode())
        except UnicodeDecodeError as e:
            raise BadLengthError(f"WELCOME text not utf-8: {e}") from None
    if mtype == TYPE_READY:
        if payload:
            raise BadLengthError("READY carries no payload")
        return Ready()
    if mtype == TYPE_ACTION:
        if len(payload) != _ACTION.size:
            raise (TruncatedFrameError if len(payload) < _ACTION.size else BadLengthError)(
                f"ACTION payload must be {_ACTION.size} bytes, got {len(payload)}")
        tic, buttons, delta = _ACTION.unpack(payload)
        return ActionMsg(tic, buttons, delta)
    if mtype == TYPE_TICBATCH:
        _need(payload, _BATCH_HDR.size, "TICBATCH")
        tic, n = _BATCH_HDR.unpack_from(payload)
        expect = _BATCH_HDR.size + n * _ENTRY.size
        if len(payload) != expect:
            raise (TruncatedFrameError if len(payload) < expect else BadLengthError)(
                f"TICBATCH with {n} entries must be {expect} bytes, got {len(payload)}")
        actions = tuple(
            _ENTRY.unpack_from(payload, _BATCH_HDR.size + i * _ENTRY.size)
            for i in range(n)
        )
        return TicBatch(tic, actions)
    if mtype == TYPE_HASH:
        if len(payload) != _HASH.size:
            raise (TruncatedFrameError if len(payload) < _HASH.size else BadLengthError)(
                f"HASH payload must be {_HASH.size} bytes, got {len(payload)}")
        tic, value = _HASH.unpack(payload)
        return HashMsg(tic, value)
    if mtype == TYPE_BYE:
        if len(payload) != 1:
            raise BadLengthError(f"BYE payload must be 1 byte, got {len(payload)}")
        return Bye(payload[0])
    raise UnknownTypeError(f"unknown message type {mtype:#04x}")


def decode(data: bytes) -> Message:
    """Decode exactly one complete frame."""
    _need(data, 4, "frame header")
    (length,) = _LEN.unpack_from(data)
    if length < 1 or length > MAX_FRAME:
        raise BadLengthError(f"frame length {length} out of range")
    if len(data) < 4 + length:
        raise TruncatedFrameError(f"frame needs {4 + length} bytes, have {len(data)}")
    if len(data) > 4 + length:
        raise BadLengthError("trailing bytes after frame")
    return decode_payload(data[4], data[5:4 + length])


class FrameDecoder:
    """Incremental decoder for a TCP stream; tolerates partial reads."""

    def __init__(self):
        self._buf = bytearray()

    def feed(self, data: bytes) -> list[Message]:
        self._buf.extend(data)
        out = []
        while True:
            if len(self._buf) < 4:
                return out
            (length,) = _LEN.unpack_from(self._buf)
            if length < 1 or length > MAX_FRAME:
                raise BadLengthError(f"frame length {length} out of range")
            if len(self._buf) < 4 + length:
                return out
            mtype = self._buf[4]
            payload = bytes(self._buf[5:4 + length])
            del self._buf[:4 + length]
            out.append(decode_payload(mtype, payload))

    @property
    def pending(self) -> int:
        return len(self._buf)
