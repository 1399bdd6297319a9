"""Software column raycaster: screen, depth, label, and automap buffers
rendered off-screen from a world snapshot.

render_frame is a pure function of (world, viewer, options); the only world
state the render path ever mutates is the viewer's discovered-cell set, and
that happens exclusively in update_discovery, which the environment calls
once per tic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..fixmath import bam_to_deg
from ..options import PixelFormat, RenderOptions
from ..scenario import ItemKind
from ..sim import WorldState
from ..sim.visibility import CELL_SHIFT
from . import kernels

FX_PER_CELL = float(1 << CELL_SHIFT)
ACTOR_RADIUS_CELLS = 20.0 / 128.0
ACTOR_HEIGHT_CELLS = 56.0 / 128.0
ITEM_RADIUS_CELLS = 12.0 / 128.0
ITEM_HEIGHT_CELLS = 20.0 / 128.0
BARREL_RADIUS_CELLS = 10.0 / 128.0
BARREL_HEIGHT_CELLS = 34.0 / 128.0
ROCKET_RADIUS_CELLS = 6.0 / 128.0
ROCKET_HEIGHT_CELLS = 12.0 / 128.0
EYE_CELLS = 0.5  # eye height: half a wall

LABEL_ACTOR_BASE = 1
LABEL_ITEM_BASE = 32
LABEL_BARREL_BASE = 96
LABEL_PROJECTILE_BASE = 128

_ITEM_NAMES = {
    ItemKind.MEDIKIT: "Medikit",
    ItemKind.ARMOR: "Armor",
    ItemKind.AMMO_BULLETS: "AmmoBullets",
    ItemKind.AMMO_ROCKETS: "AmmoRockets",
    ItemKind.WEAPON_ROCKET_LAUNCHER: "WeaponRocketLauncher",
}
_ITEM_COLORS = {
    ItemKind.MEDIKIT: (226, 226, 222),
    ItemKind.ARMOR: (60, 180, 70),
    ItemKind.AMMO_BULLETS: (182, 152, 92),
    ItemKind.AMMO_ROCKETS: (206, 126, 44),
    ItemKind.WEAPON_ROCKET_LAUNCHER: (160, 90, 36),
}
ACTOR_PALETTE = [
    (196, 56, 40), (64, 96, 200), (70, 170, 70), (210, 180, 60),
    (170, 70, 190), (70, 180, 180), (220, 120, 60), (140, 140, 150),
    (120, 70, 40), (230, 90, 140), (100, 130, 60), (90, 90, 220),
    (200, 200, 90), (60, 130, 120), (180, 100, 100), (110, 110, 60),
]
_BARREL_COLOR = (96, 130, 70)
_ROCKET_COLOR = (240, 222, 90)

_WALL_PALETTE = [
    (110, 104, 96), (126, 118, 104), (96, 104, 112),
    (118, 106, 92), (104, 112, 100), (132, 124, 116),
]


@dataclass(frozen=True)
class LabelEntry:
    object_id: int
    name: str
    x: int  # screen bbox
    y: int
    width: int
    height: int
    world_x: float  # game units
    world_y: float
    angle_deg: float
    velocity: tuple[float, float]  # units per tic


@dataclass
class FrameBundle:
    width: int
    height: int
    format: PixelFormat
    screen: np.ndarray
    depth: np.ndarray | None = None
    labels: np.ndarray | None = None
    automap: np.ndarray | None = None
    label_entries: list[LabelEntry] = field(default_factory=list)


class RenderContext:
    """Per-world immutable render data (wall grid, procedural colors)."""

    def __init__(self, world: WorldState):
        gw, gh = world.gw, world.gh
        self.walls = np.frombuffer(world.walls, dtype=np.uint8).reshape(gh, gw).copy()
        colors = np.empty((gh, gw, 3), dtype=np.uint8)
        for cy in range(gh):
            for cx in range(gw):
                colors[cy, cx] = _WALL_PALETTE[(cx * 7 + cy * 13 + (cx * cy) % 5) % len(_WALL_PALETTE)]
        self.cellcolor = colors
        self._rowdepth: dict[tuple[int, int], np.ndarray] = {}

    def rowdepth(self, w: int, h: int) -> np.ndarray:
        """Depth bytes of floor/ceiling rows for a resolution (precomputed)."""
        key = (w, h)
        cached = self._rowdepth.get(key)
        if cached is not None:
            return cached
        focal = w * 0.5
        half_h = h // 2
        out = np.full(h, 255, dtype=np.uint8)
        for y in range(h):
            off = abs(y - half_h)
            if off == 0:
                continue
            dist_cells = EYE_CELLS * focal / off
            out[y] = min(255, int(dist_cells * kernels.DEPTH_SCALE + 0.5))
        self._rowdepth[key] = out
        return out


def get_context(world: WorldState) -> RenderContext:
    ctx = world.render_cache
    if ctx is None:
        ctx = RenderContext(world)
        world.render_cache = ctx
    return ctx


_EMPTY_U8 = np.zeros((1, 1), dtype=np.uint8)
_EMPTY_RGB = np.zeros((1, 1, 3), dtype=np.uint8)


def _gather_sprites(world: WorldState, viewer_id: int):
    """(x_cells, y_cells, radius, top_offset, color, label_id, meta) per entity."""
    sprites = []
    for a in world.actors:
        if not a.alive or a.id == viewer_id:
            continue
        color = ACTOR_PALETTE[a.id % len(ACTOR_PALETTE)]
        sprites.append((
            a.x / FX_PER_CELL, a.y / FX_PER_CELL, ACTOR_RADIUS_CELLS,
            EYE_CELLS - ACTOR_HEIGHT_CELLS, color,
            LABEL_ACTOR_BASE + a.id, "Actor", a.x, a.y, bam_to_deg(a.angle),
            (a.last_dx / 65536.0, a.last_dy / 65536.0),
        ))
    for idx, it in enumerate(world.items):
        if not it.present:
            continue
        x_fx = (it.cx << CELL_SHIFT) + (64 << 16)
        y_fx = (it.cy << CELL_SHIFT) + (64 << 16)
        sprites.append((
            x_fx / FX_PER_CELL, y_fx / FX_PER_CELL, ITEM_RADIUS_CELLS,
            EYE_CELLS - ITEM_HEIGHT_CELLS, _ITEM_COLORS[it.kind],
            LABEL_ITEM_BASE + (idx % 64), _ITEM_NAMES[it.kind], x_fx, y_fx,
            0.0, (0.0, 0.0),
        ))
    for b in world.barrels:
        if b.destroyed:
            continue
        sprites.append((
            b.x / FX_PER_CELL, b.y / FX_PER_CELL, BARREL_RADIUS_CELLS,
            EYE_CELLS - BARREL_HEIGHT_CELLS, _BARREL_COLOR,
            LABEL_BARREL_BASE + (b.id % 32), "Barrel", b.x, b.y, 0.0, (0.0, 0.0),
        ))
    for p in world.projectiles:
        vx = p.vx * 4 / 65536.0
        vy = p.vy * 4 / 65536.0
        sprites.append((
            p.x / FX_PER_CELL, p.y / FX_PER_CELL, ROCKET_RADIUS_CELLS,
            EYE_CELLS - ROCKET_HEIGHT_CELLS, _ROCKET_COLOR,
            LABEL_PROJECTILE_BASE + (p.id % 128), "Rocket", p.x, p.y,
            math.degrees(math.atan2(vy, vx)) % 360.0, (vx, vy),
        ))
    return sprites


def render_frame(world: WorldState, viewer_id: int, opts: RenderOptions) -> FrameBundle:
    opts.validate()
    ctx = get_context(world)
    viewer = world.actors[viewer_id]
    w, h = opts.width, opts.height
    rgb = opts.format is PixelFormat.RGB24

    px = viewer.x / FX_PER_CELL
    py = viewer.y / FX_PER_CELL
    ang = bam_to_deg(viewer.angle) * math.pi / 180.0
    fx = math.cos(ang)
    fy = math.sin(ang)

    screen = np.empty((h, w, 3), dtype=np.uint8) if rgb else _EMPTY_RGB
    gray = np.empty((h, w), dtype=np.uint8) if not rgb else _EMPTY_U8
    want_depth = opts.depth_enabled
    want_labels = opts.labels_enabled
    depth = np.empty((h, w), dtype=np.uint8) if want_depth else _EMPTY_U8
    labels = np.empty((h, w), dtype=np.uint8) if want_labels else _EMPTY_U8
    col_perp = np.empty(w, dtype=np.float32)
    col_depth = np.empty(w, dtype=np.uint8)
    rowdepth = ctx.rowdepth(w, h) if want_depth else _EMPTY_U8[0]

    kernels.render_walls(ctx.walls, ctx.cellcolor, px, py, fx, fy, screen,
                         gray, depth, labels, rowdepth, col_perp, col_depth,
                         rgb, want_depth, want_labels)

    sprites = _gather_sprites(world, viewer_id)
    entries: list[LabelEntry] = []
    if sprites:
        n = len(sprites)
        camx = np.empty(n, dtype=np.float64)
        camd = np.empty(n, dtype=np.float64)
        half_w = np.empty(n, dtype=np.float64)
        top_off = np.empty(n, dtype=np.float64)
        cr = np.empty(n, dtype=np.uint8)
        cg = np.empty(n, dtype=np.uint8)
        cb = np.empty(n, dtype=np.uint8)
        lids = np.empty(n, dtype=np.uint8)
        keep = []
        for i, s in enumerate(sprites):
            sx, sy, radius, topo, color, lid = s[0], s[1], s[2], s[3], s[4], s[5]
            relx = sx - px
            rely = sy - py
            d = relx * fx + rely * fy          # forward depth
            x_cam = relx * -fy + rely * fx     # rightward offset
            if d <= 0.05:
                continue
            camx[i] = x_cam
            camd[i] = d
            half_w[i] = radius
            top_off[i] = topo
            cr[i], cg[i], cb[i] = color
            lids[i] = lid
            keep.append(i)
        if keep:
            order = np.array(sorted(keep, key=lambda i: -camd[i]), dtype=np.int64)
            bboxes = np.zeros((n, 5), dtype=np.int32)
            bboxes[:, 0] = 1 << 30
            bboxes[:, 1] = 1 << 30
            bboxes[:, 2] = -1
            bboxes[:, 3] = -1
            kernels.render_sprites(order, camx, camd, half_w, top_off, cr, cg,
                                   cb, lids, screen, gray, depth, labels,
                                   col_depth, bboxes, rgb, want_depth,
                                   want_labels)
            for i in keep:
                if bboxes[i, 4]:
                    s = sprites[i]
                    entries.append(LabelEntry(
                        object_id=int(lids[i]), name=s[6],
                        x=int(bboxes[i, 0]), y=int(bboxes[i, 1]),
                        width=int(bboxes[i, 2] - bboxes[i, 0] + 1),
                        height=int(bboxes[i, 3] - bboxes[i, 1] + 1),
                        world_x=s[7] / 65536.0, world_y=s[8] / 65536.0,
                        angle_deg=s[9], velocity=s[10],
                    ))

    surface = screen if rgb else gray
    if opts.crosshair:
        _draw_crosshair(surface, rgb)
    if opts.hud:
        _draw_hud(surface, rgb, viewer)

    automap = None
    if opts.automap_enabled:
        automap = render_automap(world, viewer_id, opts)

    return FrameBundle(
        width=w, height=h, format=opts.format, screen=surface,
        depth=depth if want_depth else None,
        labels=labels if want_labels else None,
        automap=automap, label_entries=entries,
    )


def render_automap(world: WorldState, viewer_id: int, opts: RenderOptions) -> np.ndarray:
    """Top-down view; in discovered mode only cells the viewer has seen."""
    ctx = get_context(world)
    viewer = world.actors[viewer_id]
    w, h = opts.width, opts.height
    rgb = opts.format is PixelFormat.RGB24
    out = np.zeros((h, w, 3), dtype=np.uint8) if rgb else np.zeros((h, w), dtype=np.uint8)
    scale = max(1, min(w // world.gw, h // world.gh))
    offx = (w - world.gw * scale) // 2
    offy = (h - world.gh * scale) // 2

    if opts.automap_full:
        mask = _EMPTY_U8
    else:
        mask = discovery_mask(world, viewer_id)

    ents = []
    for a in world.actors:
        if not a.alive:
            continue
        if not opts.automap_full and not _cell_known(mask, a, world, viewer_id):
            continue
        ang = bam_to_deg(a.angle) * math.pi / 180.0
        color = (255, 255, 255) if a.id == viewer_id else ACTOR_PALETTE[a.id % len(ACTOR_PALETTE)]
        ents.append((a.x / FX_PER_CELL, a.y / FX_PER_CELL,
                     math.cos(ang), math.sin(ang), 0.45, color))
    for it in world.items:
        if not it.present:
            continue
        if not opts.automap_full and not mask[it.cy, it.cx]:
            continue
        x = it.cx + 0.5
        y = it.cy + 0.5
        ents.append((x, y, 1.0, 0.0, 0.3, _ITEM_COLORS[it.kind]))
    for b in world.barrels:
        if b.destroyed:
            continue
        if not opts.automap_full and not mask[b.cy, b.cx]:
            continue
        ents.append((b.x / FX_PER_CELL, b.y / FX_PER_CELL, 1.0, 0.0, 0.3, _BARREL_COLOR))

    n = len(ents)
    ex = np.array([e[0] for e in ents], dtype=np.float64)
    ey = np.array([e[1] for e in ents], dtype=np.float64)
    efx = np.array([e[2] for e in ents], dtype=np.float64)
    efy = np.array([e[3] for e in ents], dtype=np.float64)
    sizes = np.array([e[4] for e in ents], dtype=np.float64)
    cr = np.array([e[5][0] for e in ents], dtype=np.uint8)
    cg = np.array([e[5][1] for e in ents], dtype=np.uint8)
    cb = np.array([e[5][2] for e in ents], dtype=np.uint8)
    kernels.render_automap(ctx.walls, mask, opts.automap_full, ex, ey, efx,
                           efy, sizes, cr, cg, cb, n, out, rgb, scale, offx, offy)
    return out


def _cell_known(mask, a, world, viewer_id) -> bool:
    if a.id == viewer_id:
        return True
    return bool(mask[a.y >> CELL_SHIFT, a.x >> CELL_SHIFT])


def discovery_mask(world: WorldState, viewer_id: int) -> np.ndarray:
    buf = world.discovered.get(viewer_id)
    if buf is None:
        buf = bytearray(world.gw * world.gh)
        world.discovered[viewer_id] = buf
    return np.frombuffer(buf, dtype=np.uint8).reshape(world.gh, world.gw)


def update_discovery(world: WorldState, viewer_id: int) -> None:
    """Per-tic FOV rasterization into the viewer's discovered-cell set; the
    single sanctioned render-path mutation of world state."""
    ctx = get_context(world)
    viewer = world.actors[viewer_id]
    mask = discovery_mask(world, viewer_id)
    ang = bam_to_deg(viewer.angle) * math.pi / 180.0
    kernels.sweep_discovery(ctx.walls, mask, viewer.x / FX_PER_CELL,
                            viewer.y / FX_PER_CELL, math.cos(ang), math.sin(ang))


_FONT = {
    "0": ("###", "#.#", "#.#", "#.#", "###"),
    "1": (".#.", "##.", ".#.", ".#.", "###"),
    "2": ("###", "..#", "###", "#..", "###"),
    "3": ("###", "..#", "###", "..#", "###"),
    "4": ("#.#", "#.#", "###", "..#", "..#"),
    "5": ("###", "#..", "###", "..#", "###"),
    "6": ("###", "#..", "###", "#.#", "###"),
    "7": ("###", "..#", ".#.", ".#.", ".#."),
    "8": ("###", "#.#", "###", "#.#", "###"),
    "9": ("###", "#.#", "###", "..#", "###"),
    "/": ("..#", "..#", ".#.", "#..", "#.."),
    " ": ("...", "...", "...", "...", "..."),
}


def _blit_text(surface, rgb: bool, text: str, x: int, y: int, scale: int, color) -> None:
    h = surface.shape[0]
    w = surface.shape[1]
    cx = x
    for ch in text:
        glyph = _FONT.get(ch, _FONT[" "])
        for gy, row in enumerate(glyph):
            for gx, c in enumerate(row):
                if c != "#":
                    continue
                y0 = y + gy * scale
                x0 = cx + gx * scale
                if y0 + scale > h or x0 + scale > w or y0 < 0 or x0 < 0:
                    continue
                if rgb:
                    surface[y0:y0 + scale, x0:x0 + scale] = color
                else:
                    surface[y0:y0 + scale, x0:x0 + scale] = 230
        cx += 4 * scale


def _draw_hud(surface, rgb: bool, viewer) -> None:
    """Health / armor / ammo strip; drawn on the screen only, never into the
    depth or label buffers."""
    h = surface.shape[0]
    w = surface.shape[1]
    strip = max(10, h // 10)
    if rgb:
        surface[h - strip:, :] = (20, 20, 24)
    else:
        surface[h - strip:, :] = 21
    scale = max(1, strip // 8)
    y = h - strip + scale
    ammo = viewer.rockets if viewer.selected == 2 else viewer.bullets
    _blit_text(surface, rgb, f"{viewer.health}", 2 * scale, y, scale, (214, 60, 50))
    _blit_text(surface, rgb, f"{viewer.armor}", 2 * scale + w // 3, y, scale, (70, 170, 80))
    _blit_text(surface, rgb, f"{ammo}", 2 * scale + 2 * (w // 3), y, scale, (210, 200, 90))


def _draw_crosshair(surface, rgb: bool) -> None:
    h = surface.shape[0]
    w = surface.shape[1]
    cy, cx = h // 2, w // 2
    arm = max(2, min(h, w) // 60)
    color = (90, 240, 90)
    if rgb:
        surface[cy, max(0, cx - arm):cx + arm + 1] = color
        surface[max(0, cy - arm):cy + arm + 1, cx] = color
    else:
        surface[cy, max(0, cx - arm):cx + arm + 1] = 220
        surface[max(0, cy - arm):cy + arm + 1, cx] = 220


__all__ = [
    "FrameBundle", "LabelEntry", "RenderContext", "RenderOptions",
    "PixelFormat", "discovery_mask", "get_context", "render_automap",
    "render_frame", "update_discovery",
]
