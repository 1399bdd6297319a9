"""Fixed-point line-of-sight and field-of-view queries on the wall grid.

Everything here is exact integer arithmetic: these queries are part of the
deterministic gameplay core, unlike the renderer which is free to use floats.
"""
from __future__ import annotations

from math import isqrt

CELL_SHIFT = 23  # 16 fractional bits + 128 units per cell


def segment_clear(walls: bytes, gw: int, x0: int, y0: int, x1: int, y1: int) -> bool:
    """True if the segment crosses no wall cell (start cell excluded)."""
    cx = x0 >> CELL_SHIFT
    cy = y0 >> CELL_SHIFT
    tx = x1 >> CELL_SHIFT
    ty = y1 >> CELL_SHIFT
    dx = x1 - x0
    dy = y1 - y0
    sx = 1 if dx > 0 else -1
    sy = 1 if dy > 0 else -1
    adx = dx if dx > 0 else -dx
    ady = dy if dy > 0 else -dy

    while cx != tx or cy != ty:
        if cx == tx:
            cy += sy
        elif cy == ty:
            cx += sx
        else:
            # Compare the ray parameters of the next x and y cell boundaries
            # by cross-multiplication; exact, no division. The sign factors
            # make both products non-negative.
            bx = (cx + 1) << CELL_SHIFT if sx > 0 else cx << CELL_SHIFT
            by = (cy + 1) << CELL_SHIFT if sy > 0 else cy << CELL_SHIFT
            ax = (bx - x0) * sx * ady
            ay = (by - y0) * sy * adx
            if ax < ay:
                cx += sx
            elif ay < ax:
                cy += sy
            else:
                # Exact corner crossing: pass through diagonally.
                cx += sx
                cy += sy
        if walls[cy * gw + cx]:
            return False
    return True


def wall_ray_distance(walls: bytes, gw: int, x0: int, y0: int, dirx: int, diry: int) -> int:
    """Raw fixed-point distance along (dirx, diry) to the first wall cell.

    The direction is a 16.16 unit vector (a sine-table pair). The map border
    is solid, so the walk always terminates.
    """
    cx = x0 >> CELL_SHIFT
    cy = y0 >> CELL_SHIFT
    sx = 1 if dirx > 0 else -1
    sy = 1 if diry > 0 else -1
    adx = dirx if dirx > 0 else -dirx
    ady = diry if diry > 0 else -diry

    while True:
        if adx == 0:
            cy += sy
            stepped_x = False
        elif ady == 0:
            cx += sx
            stepped_x = True
        else:
            bx = (cx + 1) << CELL_SHIFT if sx > 0 else cx << CELL_SHIFT
            by = (cy + 1) << CELL_SHIFT if sy > 0 else cy << CELL_SHIFT
            ax = abs(bx - x0) * ady
            ay = abs(by - y0) * adx
            if ax <= ay:
                cx += sx
                stepped_x = True
                if ax == ay:
                    cy += sy
            else:
                cy += sy
                stepped_x = False
        if walls[cy * gw + cx]:
            if stepped_x:
                bx = cx << CELL_SHIFT if sx > 0 else (cx + 1) << CELL_SHIFT
                nx = bx - x0
                ny = nx * diry // dirx
            else:
                by = cy << CELL_SHIFT if sy > 0 else (cy + 1) << CELL_SHIFT
                ny = by - y0
                nx = ny * dirx // diry
            return isqrt(nx * nx + ny * ny)


def in_fov(cos_a: int, sin_a: int, rx: int, ry: int) -> bool:
    """True if (rx, ry) lies within +/-45 degrees of the facing direction
    given by the table pair (cos_a, sin_a)."""
    dot = rx * cos_a + ry * sin_a
    if dot < 0:
        return False
    return 2 * dot * dot >= (rx * rx + ry * ry) << 32
