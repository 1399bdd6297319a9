from __future__ import annotations

import dataclasses
import io
import struct

import pytest

from pixelarena.deathmatch import MatchRunner
from pixelarena.render import render_frame
from pixelarena.replay import (
    CHECKPOINT_INTERVAL,
    REPLAY_VERSION,
    IncompatibleReplayError,
    ReplayDesyncError,
    ReplayError,
    ReplayWriter,
    TruncatedReplayError,
    load_header,
    replay,
)
from pixelarena.scenario import load_scenario, serialize_config

from conftest import SCENARIO_DIR


def record_match(specs, tics, seed=5, collect_hashes=True):
    cfg = load_scenario(SCENARIO_DIR / "deathmatch_2016.cfg")
    cfg.seed = seed
    buf = io.BytesIO()
    writer = ReplayWriter(buf)
    runner = MatchRunner.from_bots(cfg, specs, recorder=writer,
                                   collect_hashes=collect_hashes)
    result = runner.run(tics)
    return buf.getvalue(), result, cfg


def test_layout_size_arithmetic():
    """File size = header + tics*players*6 + checkpoints*8 + footer, exactly."""
    data, result, cfg = record_match(["idle", "idle"], 100)
    cfg_text = serialize_config(cfg).encode()
    map_text = cfg.map_grid.text.encode()
    header = 4 + 2 + 8 + 1 + 4 + len(cfg_text) + 4 + len(map_text)
    body = 100 * 2 * 6
    checkpoints = (100 // CHECKPOINT_INTERVAL) * 8
    footer = 4 + 4 + 2 * (12 * 4 + 8) + 8 + 4
    assert len(data) == header + body + checkpoints + footer


def test_record_then_replay_reproduces_everything():
    data, result, _ = record_match(["fighter", "fighter", "wanderer"], 700)
    rr = replay(data, collect_hashes=True)
    assert rr.final_tic == result.final_tic == 700
    assert rr.final_hash == result.final_hash
    assert rr.tic_hashes == result.tic_hashes  # every per-tic hash
    assert rr.counters == result.counters


def test_header_exposes_scenario():
    data, _, cfg = record_match(["idle", "idle"], 40)
    hdr = load_header(data)
    assert hdr.version == REPLAY_VERSION
    assert hdr.seed == cfg.seed
    assert hdr.n_players == 2
    assert "deathmatch_2016" in hdr.config_text
    assert hdr.map_text == cfg.map_grid.text


def test_render_retargeting_does_not_change_stats():
    data, result, _ = record_match(["fighter", "fighter"], 300)
    opts_small = None

    frames = []

    def on_tic(world, actions, events):
        if world.tic % 100 == 0:
            from pixelarena.options import RenderOptions

            frames.append(render_frame(world, 0, RenderOptions(width=640, height=480)))

    rr_rendered = replay(data, on_tic=on_tic)
    rr_plain = replay(data)
    assert frames and frames[0].screen.shape == (480, 640, 3)
    assert rr_rendered.counters == rr_plain.counters == result.counters
    assert rr_rendered.final_hash == rr_plain.final_hash


def test_truncated_tail_detected():
    data, _, _ = record_match(["idle", "idle"], 100)
    truncated = data[:-40]  # rips through the footer
    with pytest.raises(TruncatedReplayError):
        replay(truncated)
    # cutting mid-record works too
    hdr_end = len(data) - (100 * 2 * 6 + 2 * 8 + 4 + 4 + 2 * 56 + 8 + 4)
    cut = data[:hdr_end + 6 * 2 * 10 + 3]  # ten tics and a partial record
    with pytest.raises(TruncatedReplayError) as ei:
        replay(cut)
    assert ei.value.last_tic == 10


def test_flipped_checkpoint_names_the_tic():
    data, _, cfg = record_match(["idle", "idle"], 100)
    cfg_text = serialize_config(cfg).encode()
    map_text = cfg.map_grid.text.encode()
    header = 4 + 2 + 8 + 1 + 4 + len(cfg_text) + 4 + len(map_text)
    # first checkpoint sits right after 35 tic records
    pos = header + 35 * 2 * 6
    corrupted = bytearray(data)
    corrupted[pos] ^= 0xFF
    with pytest.raises(ReplayDesyncError) as ei:
        replay(bytes(corrupted))
    assert ei.value.tic == 35


def test_version_gate():
    data, _, _ = record_match(["idle", "idle"], 10)
    bumped = bytearray(data)
    struct.pack_into("<H", bumped, 4, REPLAY_VERSION + 1)
    with pytest.raises(IncompatibleReplayError):
        replay(bytes(bumped))


def test_bad_magic_rejected():
    with pytest.raises(ReplayError, match="magic"):
        replay(b"NOPE" + b"\x00" * 64)


def test_footer_counters_must_match():
    data, _, _ = record_match(["idle", "idle"], 50)
    corrupted = bytearray(data)
    # footer counters start after sentinel+final_tic; flip a kills byte
    footer_start = len(data) - (2 * 56 + 8 + 4)
    corrupted[footer_start] ^= 0x01
    with pytest.raises(ReplayError, match="counters"):
        replay(bytes(corrupted))
