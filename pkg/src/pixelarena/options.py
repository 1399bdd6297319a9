"""Render output settings; a plain value object shared by config and renderer."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class PixelFormat(Enum):
    RGB24 = "RGB24"
    GRAY8 = "GRAY8"


@dataclass(frozen=True, slots=True)
class RenderOptions:
    width: int = 320
    height: int = 240
    format: PixelFormat = PixelFormat.RGB24
    crosshair: bool = False
    hud: bool = False
    depth_enabled: bool = False
    labels_enabled: bool = False
    automap_enabled: bool = False
    automap_full: bool = False

    def validate(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError(f"render size must be >= 1x1, got {self.width}x{self.height}")
