"""numba kernels behind the software renderer.

Positions here are floats in cell units (1 cell = 128 game units); the
renderer is output-only, so floating point is fine — every gameplay-relevant
query stays in the fixed-point sim core. Depth bytes quantize perpendicular
distance at 8 game units per step (byte = perp_cells * 16, saturating).

Sprite pixels are drawn only where the sprite's quantized depth byte is
strictly below the wall column's, which makes "label pixel implies depth <
wall depth" hold by construction on the emitted buffers.
"""
from __future__ import annotations

import numpy as np
from numba import njit

FOV_TAN = 1.0  # 90 degree horizontal field of view
DEPTH_UNITS_PER_STEP = 8.0
DEPTH_SCALE = 128.0 / DEPTH_UNITS_PER_STEP  # cells -> depth byte


@njit(cache=True)
def cast_ray(walls, px, py, dx, dy):
    """Euclidean distance (cells) from (px, py) along unit (dx, dy) to the
    first wall cell, via DDA. The grid border is solid."""
    gh, gw = walls.shape
    mapx = int(px)
    mapy = int(py)
    if dx != 0.0:
        ddx = abs(1.0 / dx)
    else:
        ddx = 1e30
    if dy != 0.0:
        ddy = abs(1.0 / dy)
    else:
        ddy = 1e30
    if dx < 0:
        stepx = -1
        sidex = (px - mapx) * ddx
    else:
        stepx = 1
        sidex = (mapx + 1.0 - px) * ddx
    if dy < 0:
        stepy = -1
        sidey = (py - mapy) * ddy
    else:
        stepy = 1
        sidey = (mapy + 1.0 - py) * ddy
    while True:
        if sidex < sidey:
            hit_t = sidex
            sidex += ddx
            mapx += stepx
        else:
            hit_t = sidey
            sidey += ddy
            mapy += stepy
        if mapx < 0 or mapy < 0 or mapx >= gw or mapy >= gh:
            return hit_t
        if walls[mapy, mapx]:
            return hit_t


@njit(cache=True)
def render_walls(walls, cellcolor, px, py, fx, fy, screen, gray, depth,
                 labels, rowdepth, col_perp, col_depth_u8, rgb, want_depth,
                 want_labels):
    """Column DDA pass: screen + optional depth, zeroed labels, and the
    per-column perpendicular wall distance used for sprite clipping."""
    if rgb:
        h = screen.shape[0]
        w = screen.shape[1]
    else:
        h = gray.shape[0]
        w = gray.shape[1]
    gh, gw = walls.shape
    # camera plane: right vector scaled by tan(fov/2)
    plx = -fy * FOV_TAN
    ply = fx * FOV_TAN
    half_h = h // 2
    focal = w * 0.5

    for col in range(w):
        camx = (2.0 * col + 1.0) / w - 1.0
        rdx = fx + plx * camx
        rdy = fy + ply * camx
        mapx = int(px)
        mapy = int(py)
        ddx = 1e30 if rdx == 0.0 else abs(1.0 / rdx)
        ddy = 1e30 if rdy == 0.0 else abs(1.0 / rdy)
        if rdx < 0:
            stepx = -1
            sidex = (px - mapx) * ddx
        else:
            stepx = 1
            sidex = (mapx + 1.0 - px) * ddx
        if rdy < 0:
            stepy = -1
            sidey = (py - mapy) * ddy
        else:
            stepy = 1
            sidey = (mapy + 1.0 - py) * ddy
        side = 0
        while True:
            if sidex < sidey:
                sidex += ddx
                mapx += stepx
                side = 0
            else:
                sidey += ddy
                mapy += stepy
                side = 1
            if mapx < 0 or mapy < 0 or mapx >= gw or mapy >= gh:
                break
            if walls[mapy, mapx]:
                break
        if side == 0:
            perp = (mapx - px + (1 - stepx) * 0.5) / rdx
        else:
            perp = (mapy - py + (1 - stepy) * 0.5) / rdy
        if perp < 1e-4:
            perp = 1e-4
        col_perp[col] = perp
        d = perp * DEPTH_SCALE + 0.5
        if d > 255.0:
            d = 255.0
        db = np.uint8(d)
        col_depth_u8[col] = db

        half = focal * 0.5 / perp
        ytop = int(half_h - half)
        ybot = int(half_h + half)
        if ytop < 0:
            ytop = 0
        if ybot > h:
            ybot = h
        cx = mapx
        cy = mapy
        if cx < 0:
            cx = 0
        if cy < 0:
            cy = 0
        if cx >= gw:
            cx = gw - 1
        if cy >= gh:
            cy = gh - 1
        r = cellcolor[cy, cx, 0]
        g = cellcolor[cy, cx, 1]
        b = cellcolor[cy, cx, 2]
        if side == 1:
            r = np.uint8(r * 0.72)
            g = np.uint8(g * 0.72)
            b = np.uint8(b * 0.72)
        if rgb:
            for y in range(0, ytop):
                screen[y, col, 0] = 34
                screen[y, col, 1] = 32
                screen[y, col, 2] = 36
            for y in range(ytop, ybot):
                screen[y, col, 0] = r
                screen[y, col, 1] = g
                screen[y, col, 2] = b
            for y in range(ybot, h):
                screen[y, col, 0] = 52
                screen[y, col, 1] = 48
                screen[y, col, 2] = 44
        else:
            wall_g = np.uint8((np.int32(r) * 299 + np.int32(g) * 587 + np.int32(b) * 114) // 1000)
            for y in range(0, ytop):
                gray[y, col] = 33
            for y in range(ytop, ybot):
                gray[y, col] = wall_g
            for y in range(ybot, h):
                gray[y, col] = 48
        if want_depth:
            for y in range(0, ytop):
                depth[y, col] = rowdepth[y]
            for y in range(ytop, ybot):
                depth[y, col] = db
            for y in range(ybot, h):
                depth[y, col] = rowdepth[y]
        if want_labels:
            for y in range(h):
                labels[y, col] = 0


@njit(cache=True)
def render_sprites(order, camx_arr, camd_arr, half_w, top_off, colors_r,
                   colors_g, colors_b, label_ids, screen, gray, depth, labels,
                   col_depth_u8, bboxes, rgb, want_depth, want_labels):
    """Billboard pass, far to near. Sprites are grounded flat-color columns
    clipped per column against the wall depth bytes."""
    if rgb:
        h = screen.shape[0]
        w = screen.shape[1]
    else:
        h = gray.shape[0]
        w = gray.shape[1]
    half_h = h // 2
    focal = w * 0.5
    for oi in range(order.shape[0]):
        i = order[oi]
        camd = camd_arr[i]
        camx = camx_arr[i]
        sb_f = camd * DEPTH_SCALE + 0.5
        if sb_f > 255.0:
            sb_f = 255.0
        sb = np.uint8(sb_f)
        sxf = focal * camx / camd + w * 0.5
        hw = focal * half_w[i] / camd
        x0 = int(sxf - hw)
        x1 = int(sxf + hw)
        ybot = int(half_h + focal * 0.5 / camd)
        ytop = int(half_h + focal * top_off[i] / camd)
        if ytop < 0:
            ytop = 0
        if ybot > h:
            ybot = h
        if x0 < 0:
            x0 = 0
        if x1 > w - 1:
            x1 = w - 1
        r = colors_r[i]
        g = colors_g[i]
        b = colors_b[i]
        gval = np.uint8((np.int32(r) * 299 + np.int32(g) * 587 + np.int32(b) * 114) // 1000)
        lid = label_ids[i]
        for col in range(x0, x1 + 1):
            if sb >= col_depth_u8[col]:
                continue
            for y in range(ytop, ybot):
                if rgb:
                    screen[y, col, 0] = r
                    screen[y, col, 1] = g
                    screen[y, col, 2] = b
                else:
                    gray[y, col] = gval
                if want_depth:
                    depth[y, col] = sb
                if want_labels:
                    labels[y, col] = lid
                if col < bboxes[i, 0]:
                    bboxes[i, 0] = col
                if y < bboxes[i, 1]:
                    bboxes[i, 1] = y
                if col > bboxes[i, 2]:
                    bboxes[i, 2] = col
                if y > bboxes[i, 3]:
                    bboxes[i, 3] = y
                bboxes[i, 4] = 1


@njit(cache=True)
def render_automap(walls, mask, full, ex, ey, efx, efy, sizes, cr, cg, cb,
                   n_ents, out, rgb, scale, offx, offy):
    """Top-down orthographic map: wall cells (all, or only discovered),
    entities as oriented triangles."""
    h = out.shape[0]
    w = out.shape[1]
    gh, gw = walls.shape
    for y in range(h):
        for x in range(w):
            if rgb:
                out[y, x, 0] = 18
                out[y, x, 1] = 18
                out[y, x, 2] = 20
            else:
                out[y, x] = 18
    for cy in range(gh):
        for cx in range(gw):
            if full:
                known = True
            else:
                known = mask[cy, cx] != 0
            if not known:
                continue
            is_wall = walls[cy, cx] != 0
            py0 = offy + cy * scale
            px0 = offx + cx * scale
            for y in range(py0, py0 + scale):
                if y < 0 or y >= h:
                    continue
                for x in range(px0, px0 + scale):
                    if x < 0 or x >= w:
                        continue
                    if rgb:
                        if is_wall:
                            out[y, x, 0] = 170
                            out[y, x, 1] = 170
                            out[y, x, 2] = 178
                        else:
                            out[y, x, 0] = 46
                            out[y, x, 1] = 46
                            out[y, x, 2] = 52
                    else:
                        out[y, x] = 170 if is_wall else 46
    # entities: oriented triangles (tip at facing direction)
    for i in range(n_ents):
        tipx = offx + (ex[i] + efx[i] * sizes[i]) * scale
        tipy = offy + (ey[i] + efy[i] * sizes[i]) * scale
        # base corners at +/- 140 degrees from facing
        c140 = -0.766
        s140 = 0.643
        b1x = offx + (ex[i] + (efx[i] * c140 - efy[i] * s140) * sizes[i]) * scale
        b1y = offy + (ey[i] + (efx[i] * s140 + efy[i] * c140) * sizes[i]) * scale
        b2x = offx + (ex[i] + (efx[i] * c140 + efy[i] * s140) * sizes[i]) * scale
        b2y = offy + (ey[i] + (-efx[i] * s140 + efy[i] * c140) * sizes[i]) * scale
        minx = int(min(tipx, min(b1x, b2x)))
        maxx = int(max(tipx, max(b1x, b2x))) + 1
        miny = int(min(tipy, min(b1y, b2y)))
        maxy = int(max(tipy, max(b1y, b2y))) + 1
        for y in range(miny, maxy):
            if y < 0 or y >= h:
                continue
            for x in range(minx, maxx):
                if x < 0 or x >= w:
                    continue
                pxc = x + 0.5
                pyc = y + 0.5
                d1 = (pxc - tipx) * (b1y - tipy) - (pyc - tipy) * (b1x - tipx)
                d2 = (pxc - b1x) * (b2y - b1y) - (pyc - b1y) * (b2x - b1x)
                d3 = (pxc - b2x) * (tipy - b2y) - (pyc - b2y) * (tipx - b2x)
                neg = (d1 < 0) or (d2 < 0) or (d3 < 0)
                pos = (d1 > 0) or (d2 > 0) or (d3 > 0)
                if neg and pos:
                    continue
                if rgb:
                    out[y, x, 0] = cr[i]
                    out[y, x, 1] = cg[i]
                    out[y, x, 2] = cb[i]
                else:
                    out[y, x] = np.uint8(
                        (np.int32(cr[i]) * 299 + np.int32(cg[i]) * 587
                         + np.int32(cb[i]) * 114) // 1000)


@njit(cache=True)
def sweep_discovery(walls, mask, px, py, fx, fy):
    """Mark cells visible in the 90-degree FOV: 256 rays, each marking the
    floor cells it crosses plus the wall cell that stops it."""
    gh, gw = walls.shape
    mask[int(py), int(px)] = 1
    # rotate facing by -45 deg, then sweep 256 rays over 90 degrees
    for k in range(256):
        ang = (k + 0.5) / 256.0 * 1.5707963267948966 - 0.7853981633974483
        c = np.cos(ang)
        s = np.sin(ang)
        dx = fx * c - fy * s
        dy = fx * s + fy * c
        mapx = int(px)
        mapy = int(py)
        ddx = 1e30 if dx == 0.0 else abs(1.0 / dx)
        ddy = 1e30 if dy == 0.0 else abs(1.0 / dy)
        if dx < 0:
            stepx = -1
            sidex = (px - mapx) * ddx
        else:
            stepx = 1
            sidex = (mapx + 1.0 - px) * ddx
        if dy < 0:
            stepy = -1
            sidey = (py - mapy) * ddy
        else:
            stepy = 1
            sidey = (mapy + 1.0 - py) * ddy
        while True:
            if sidex < sidey:
                sidex += ddx
                mapx += stepx
            else:
                sidey += ddy
                mapy += stepy
            if mapx < 0 or mapy < 0 or mapx >= gw or mapy >= gh:
                break
            mask[mapy, mapx] = 1
            if walls[mapy, mapx]:
                break
