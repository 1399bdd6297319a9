"""Binary PPM (P6) / PGM (P5) export for frame buffers."""
from __future__ import annotations

from pathlib import Path

import numpy as np


def write_ppm(path: str | Path, pixels: np.ndarray) -> None:
    """RGB (h, w, 3) uint8 -> binary P6."""
    h, w, c = pixels.shape
    if c != 3:
        raise ValueError("write_ppm expects an (h, w, 3) array")
    with open(path, "wb") as f:
        f.write(f"P6\n{w} {h}\n255\n".encode())
        f.write(pixels.tobytes())


def write_pgm(path: str | Path, pixels: np.ndarray) -> None:
    """Grayscale (h, w) uint8 -> binary P5."""
    h, w = pixels.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n255\n".encode())
        f.write(pixels.tobytes())


def write_frame(stem: str | Path, bundle) -> list[Path]:
    """Export every enabled buffer of a FrameBundle as <stem>_<kind>.(ppm|pgm)."""
    stem = Path(stem)
    written = []
    if bundle.screen.ndim == 3:
        p = stem.with_name(stem.name + "_screen.ppm")
        write_ppm(p, bundle.screen)
    else:
        p = stem.with_name(stem.name + "_screen.pgm")
        write_pgm(p, bundle.screen)
    written.append(p)
    if bundle.depth is not None:
        p = stem.with_name(stem.name + "_depth.pgm")
        write_pgm(p, bundle.depth)
        written.append(p)
    if bundle.labels is not None:
        p = stem.with_name(stem.name + "_labels.pgm")
        write_pgm(p, bundle.labels)
        written.append(p)
    if bundle.automap is not None:
        if bundle.automap.ndim == 3:
            p = stem.with_name(stem.name + "_automap.ppm")
            write_ppm(p, bundle.automap)
        else:
            p = stem.with_name(stem.name + "_automap.pgm")
            write_pgm(p, bundle.automap)
        written.append(p)
    return written
