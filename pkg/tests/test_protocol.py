from __future__ import annotations

import struct

import pytest
from hypothesis import given, settings, strategies as st

from pixelarena.netplay import protocol as p


MESSAGES = [
    p.Hello(1, "RandomBot"),
    p.Hello(7, ""),
    p.Welcome(3, 0xDEADBEEFCAFEF00D, "mode = SYNC_PLAYER\n", "###\n#S#\n###\n"),
    p.Ready(),
    p.ActionMsg(7, 0b101, 0),
    p.ActionMsg(0xFFFFFFFF, 0x3FF, -1500),
    p.TicBatch(9, ((1, 100), (0, -100), (0x200, 0))),
    p.TicBatch(0, ()),
    p.HashMsg(35, 0x0123456789ABCDEF),
    p.Bye(p.BYE_DESYNC),
]


@pytest.mark.parametrize("msg", MESSAGES, ids=lambda m: type(m).__name__)
def test_round_trip(msg):
    assert p.decode(p.encode(msg)) == msg


def test_frame_layout_is_length_prefixed():
    raw = p.encode(p.ActionMsg(7, 0b101, 0))
    length = struct.unpack_from("<I", raw)[0]
    assert length == len(raw) - 4
    assert raw[4] == p.TYPE_ACTION


def test_truncated_frame_error():
    # frame claims 3 payload bytes but carries 2
    bad = struct.pack("<I", 3) + bytes([p.TYPE_ACTION, 0])
    with pytest.raises(p.TruncatedFrameError):
        p.decode(bad)


def test_unknown_type_error():
    bad = struct.pack("<I", 1) + bytes([0xFF])
    with pytest.raises(p.UnknownTypeError):
        p.decode(bad)


def test_bad_length_errors():
    with pytest.raises(p.BadLengthError):
        p.decode(struct.pack("<I", 0) + b"")
    with pytest.raises(p.BadLengthError):
        p.decode(struct.pack("<I", p.MAX_FRAME + 1) + b"x")
    # trailing garbage after a full frame
    with pytest.raises(p.BadLengthError):
        p.decode(p.encode(p.Ready()) + b"!")


def test_short_action_payload_rejected():
    payload = struct.pack("<IIh", 1, 2, 3)[:-1]
    frame = struct.pack("<I", 1 + len(payload)) + bytes([p.TYPE_ACTION]) + payload
    with pytest.raises(p.TruncatedFrameError):
        p.decode(frame)


def test_ticbatch_count_mismatch_rejected():
    payload = struct.pack("<IB", 5, 3) + struct.pack("<Ih", 1, 2)  # says 3, has 1
    frame = struct.pack("<I", 1 + len(payload)) + bytes([p.TYPE_TICBATCH]) + payload
    with pytest.raises(p.TruncatedFrameError):
        p.decode(frame)


def test_streaming_decoder_handles_partial_reads():
    stream = b"".join(p.encode(m) for m in MESSAGES)
    decoder = p.FrameDecoder()
    out = []
    for i in range(0, len(stream), 3):  # drip-feed 3 bytes at a time
        out.extend(decoder.feed(stream[i:i + 3]))
    assert out == MESSAGES
    assert decoder.pending == 0


@settings(max_examples=300, deadline=None)
@given(st.binary(min_size=0, max_size=80))
def test_decode_total_on_arbitrary_bytes(data):
    """Any byte sequence either decodes or raises a typed ProtocolError."""
    try:
        p.decode(data)
    except p.ProtocolError:
        pass


@settings(max_examples=200, deadline=None)
@given(st.lists(st.binary(min_size=1, max_size=40), max_size=8))
def test_feed_total_on_arbitrary_chunks(chunks):
    decoder = p.FrameDecoder()
    try:
        for chunk in chunks:
            decoder.feed(chunk)
    except p.ProtocolError:
        pass
