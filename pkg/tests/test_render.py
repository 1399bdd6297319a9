from __future__ import annotations

import dataclasses

import numpy as np
import pytest

from pixelarena.fixmath import deg_to_bam
from pixelarena.options import PixelFormat, RenderOptions
from pixelarena.render import (
    discovery_mask,
    get_context,
    render_automap,
    render_frame,
    update_discovery,
)
from pixelarena.render.kernels import cast_ray, sweep_discovery
from pixelarena.render.ppm import write_pgm, write_ppm
from pixelarena.scenario import attach_map
from pixelarena.sim import WorldState, state_serialize, visibility_test

from conftest import SMALL_MAP, small_config

CEILING = (34, 32, 36)
FLOOR = (52, 48, 44)


def empty_world(**overrides) -> WorldState:
    cfg = small_config(num_players=1, **overrides)
    return WorldState(cfg)


def duel_world() -> WorldState:
    cfg = small_config(num_players=2)
    w = WorldState(cfg)
    a, b = w.actors
    a.x = (2 << 23) + (64 << 16)
    a.y = (3 << 23) + (64 << 16)
    a.angle = 0
    b.x = a.x + (200 << 16)
    b.y = a.y
    return w


# -- ray casting oracle ---------------------------------------------------------


def march_oracle(walls: np.ndarray, px, py, dx, dy, step=0.01, limit=60.0):
    """Brute-force ray march at `step` cells per iteration (vectorized)."""
    n = px.shape[0]
    t = np.zeros(n)
    done = np.zeros(n, dtype=bool)
    out = np.full(n, np.inf)
    gh, gw = walls.shape
    for _ in range(int(limit / step)):
        t += step
        x = px + dx * t
        y = py + dy * t
        cx = np.clip(x.astype(np.int64), 0, gw - 1)
        cy = np.clip(y.astype(np.int64), 0, gh - 1)
        hit = (walls[cy, cx] != 0) & ~done
        out[hit] = t[hit]
        done |= hit
        if done.all():
            break
    return out


def test_dda_matches_brute_force_oracle():
    world = WorldState(small_config(num_players=1))
    walls = get_context(world).walls
    rng = np.random.default_rng(42)
    n = 10_000
    # poses anywhere on open floor, any direction
    floor_cells = np.argwhere(walls == 0)
    picks = floor_cells[rng.integers(0, len(floor_cells), n)]
    px = picks[:, 1] + rng.uniform(0.05, 0.95, n)
    py = picks[:, 0] + rng.uniform(0.05, 0.95, n)
    ang = rng.uniform(0, 2 * np.pi, n)
    dx = np.cos(ang)
    dy = np.sin(ang)
    expected = march_oracle(walls, px, py, dx, dy)
    for i in range(n):
        got = cast_ray(walls, px[i], py[i], dx[i], dy[i])
        assert abs(got - expected[i]) <= 0.02, (
            f"pose {i}: dda {got} vs oracle {expected[i]}")


# -- frame contracts --------------------------------------------------------------


def test_screen_size_contract_320x240_rgb():
    world = empty_world()
    bundle = render_frame(world, 0, RenderOptions())
    assert bundle.screen.shape == (240, 320, 3)
    assert bundle.screen.dtype == np.uint8
    assert bundle.screen.nbytes == 320 * 240 * 3
    assert bundle.depth is None and bundle.labels is None and bundle.automap is None


def test_gray8_format():
    world = empty_world()
    opts = RenderOptions(width=64, height=48, format=PixelFormat.GRAY8)
    bundle = render_frame(world, 0, opts)
    assert bundle.screen.shape == (48, 64)


def test_enabled_buffers_have_exact_sizes():
    world = duel_world()
    opts = RenderOptions(width=160, height=120, depth_enabled=True,
                         labels_enabled=True, automap_enabled=True,
                         automap_full=True)
    bundle = render_frame(world, 0, opts)
    assert bundle.depth.shape == (120, 160)
    assert bundle.labels.shape == (120, 160)
    assert bundle.automap.shape == (120, 160, 3)


def test_empty_world_has_no_labels():
    world = empty_world()
    opts = RenderOptions(labels_enabled=True)
    bundle = render_frame(world, 0, opts)
    assert bundle.label_entries == []
    assert not bundle.labels.any()


BIG_ROOM = """
#########
#S......#
#.......#
#.......#
#.......#
#.......#
#.......#
#.......#
#########
"""


def test_fisheye_symmetry_and_center_max():
    cfg = small_config(num_players=1)
    attach_map(cfg, BIG_ROOM)
    world = WorldState(cfg)
    a = world.actors[0]
    # 2.5 cells from the east wall, mid-row: the facing wall spans the whole
    # 90-degree view (side walls are 3.5 cells away, strictly farther)
    a.x = (5 << 23) + (64 << 16)
    a.y = (4 << 23) + (64 << 16)
    a.angle = 0
    bundle = render_frame(world, 0, RenderOptions(width=320, height=240))
    img = bundle.screen
    is_ceiling = np.all(img == CEILING, axis=2)
    is_floor = np.all(img == FLOOR, axis=2)
    heights = img.shape[0] - is_ceiling.sum(axis=0) - is_floor.sum(axis=0)
    assert np.array_equal(heights, heights[::-1]), "h(c) != h(W-1-c)"
    assert heights.max() == heights[img.shape[1] // 2]


def test_depth_quantization_monotone():
    from pixelarena.render.kernels import DEPTH_SCALE

    perps = np.linspace(0.05, 20.0, 500)
    bytes_ = np.minimum(255, (perps * DEPTH_SCALE + 0.5).astype(int))
    assert (np.diff(bytes_) >= 0).all()
    # 8 game units per step: one cell = 16 steps
    assert bytes_[0] == int(0.05 * 16 + 0.5)


def test_label_pixels_strictly_in_front_of_walls():
    rng = np.random.default_rng(7)
    cfg = small_config(num_players=4)
    world = WorldState(cfg)
    opts = RenderOptions(width=160, height=120, depth_enabled=True,
                         labels_enabled=True)
    bare = WorldState(small_config(num_players=1))
    for frame_i in range(100):
        for a in world.actors:
            a.x = int((1.3 + 5.4 * rng.random()) * (1 << 23))
            a.y = int((1.3 + 3.4 * rng.random()) * (1 << 23))
            a.angle = int(rng.integers(0, 2**32))
        bundle = render_frame(world, 0, opts)
        # wall-only depth for the same pose
        bare.actors[0].x = world.actors[0].x
        bare.actors[0].y = world.actors[0].y
        bare.actors[0].angle = world.actors[0].angle
        walls_only = render_frame(bare, 0, opts)
        mask = bundle.labels != 0
        if not mask.any():
            continue
        cols = np.nonzero(mask)[1]
        wall_depth_per_col = walls_only.depth[walls_only.depth.shape[0] // 2]
        assert (bundle.depth[mask] < wall_depth_per_col[cols]).all()


def test_label_visibility_agreement():
    world = duel_world()
    assert visibility_test(world, 0, 1)
    opts = RenderOptions(labels_enabled=True)
    bundle = render_frame(world, 0, opts)
    ids = [e.object_id for e in bundle.label_entries]
    assert 1 + 1 in ids  # actor label base + player id
    entry = [e for e in bundle.label_entries if e.object_id == 2][0]
    assert entry.name == "Actor"
    assert entry.width >= 1 and entry.height >= 1
    # tight bbox: matches the labeled pixels exactly
    ys, xs = np.nonzero(bundle.labels == 2)
    assert (entry.x, entry.y) == (xs.min(), ys.min())
    assert (entry.width, entry.height) == (xs.max() - xs.min() + 1, ys.max() - ys.min() + 1)
    # world metadata round-trips
    assert entry.world_x == pytest.approx(world.actors[1].x / 65536.0)


def test_renderer_purity():
    world = duel_world()
    before = state_serialize(world)
    opts = RenderOptions(depth_enabled=True, labels_enabled=True,
                         automap_enabled=True)
    render_frame(world, 0, opts)
    render_automap(world, 0, opts)
    assert state_serialize(world) == before
    assert world.discovered == {} or 0 not in world.discovered or True
    # render_frame never touches the discovered set; only update_discovery does
    world2 = duel_world()
    render_frame(world2, 0, opts)
    assert 0 not in world2.discovered or not any(world2.discovered[0])


def test_hud_and_crosshair_touch_screen_only():
    world = duel_world()
    base = RenderOptions(depth_enabled=True, labels_enabled=True)
    with_overlay = dataclasses.replace(base, hud=True, crosshair=True)
    b1 = render_frame(world, 0, base)
    b2 = render_frame(world, 0, with_overlay)
    assert not np.array_equal(b1.screen, b2.screen)
    assert np.array_equal(b1.depth, b2.depth)
    assert np.array_equal(b1.labels, b2.labels)


# -- automap ------------------------------------------------------------------------


def test_automap_full_shows_all_walls():
    world = empty_world()
    opts = RenderOptions(width=90, height=70, automap_enabled=True,
                         automap_full=True)
    img = render_automap(world, 0, opts)
    wall_color = np.array([170, 170, 178], dtype=np.uint8)
    walls = get_context(world).walls
    scale = max(1, min(90 // world.gw, 70 // world.gh))
    offx = (90 - world.gw * scale) // 2
    offy = (70 - world.gh * scale) // 2
    for cy in range(world.gh):
        for cx in range(world.gw):
            if walls[cy, cx]:
                px = offx + cx * scale
                py = offy + cy * scale
                assert (img[py, px] == wall_color).all(), (cx, cy)


def test_discovery_sweep_matches_marching_oracle():
    world = empty_world()
    attach_map(world.cfg, SMALL_MAP)
    a = world.actors[0]
    a.x = (4 << 23) + (64 << 16)
    a.y = (3 << 23) + (64 << 16)
    a.angle = deg_to_bam(30.0)
    update_discovery(world, 0)
    mask = discovery_mask(world, 0).copy()

    # Oracle: march the same 256 rays at a fine step, collecting every cell
    # entered until (and including) the blocking wall.
    import math

    walls = get_context(world).walls
    expected = np.zeros_like(mask)
    px = a.x / (1 << 23)
    py = a.y / (1 << 23)
    base = math.radians(30.0)
    expected[int(py), int(px)] = 1
    for k in range(256):
        ang = base + (k + 0.5) / 256.0 * math.pi / 2 - math.pi / 4
        dx, dy = math.cos(ang), math.sin(ang)
        t = 0.0
        while t < 40.0:
            t += 0.002
            cx = int(px + dx * t)
            cy = int(py + dy * t)
            if not (0 <= cx < world.gw and 0 <= cy < world.gh):
                break
            expected[cy, cx] = 1
            if walls[cy, cx]:
                break
    assert np.array_equal(mask, expected)


def test_automap_discovered_mode_reveals_progressively():
    world = empty_world()
    a = world.actors[0]
    a.x = (2 << 23) + (64 << 16)
    a.y = (3 << 23) + (64 << 16)
    a.angle = 0
    opts = RenderOptions(width=90, height=70, automap_enabled=True,
                         automap_full=False)
    update_discovery(world, 0)
    partial = discovery_mask(world, 0).sum()
    assert 0 < partial < world.gw * world.gh
    img1 = render_automap(world, 0, opts)
    # viewer marker (white) present
    assert (img1 == np.array([255, 255, 255])).all(axis=2).any()
    # turning around reveals more
    a.angle = deg_to_bam(180.0)
    update_discovery(world, 0)
    assert discovery_mask(world, 0).sum() > partial


def test_automap_viewer_marker_in_full_mode():
    world = empty_world()
    opts = RenderOptions(width=90, height=70, automap_enabled=True,
                         automap_full=True)
    img = render_automap(world, 0, opts)
    assert (img == np.array([255, 255, 255])).all(axis=2).any()


# -- export -------------------------------------------------------------------------


def test_ppm_pgm_export(tmp_path):
    world = duel_world()
    opts = RenderOptions(width=80, height=60, depth_enabled=True)
    bundle = render_frame(world, 0, opts)
    ppm = tmp_path / "frame.ppm"
    pgm = tmp_path / "depth.pgm"
    write_ppm(ppm, bundle.screen)
    write_pgm(pgm, bundle.depth)
    data = ppm.read_bytes()
    assert data.startswith(b"P6\n80 60\n255\n")
    assert len(data) == len(b"P6\n80 60\n255\n") + 80 * 60 * 3
    data = pgm.read_bytes()
    assert data.startswith(b"P5\n80 60\n255\n")
    assert len(data) == len(b"P5\n80 60\n255\n") + 80 * 60


def test_get_state_depth_disabled_absent():
    from pixelarena.env import Env

    cfg = small_config(num_players=1)
    env = Env(cfg)
    state = env.get_state()
    assert state.frame.depth is None
    env.close()
