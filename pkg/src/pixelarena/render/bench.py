"""Single-threaded renderer benchmark with a per-buffer cost breakdown."""
from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass

from ..options import RenderOptions
from ..scenario import ScenarioConfig, attach_map, parse_map
from ..sim import WorldState
from . import render_frame

# A mid-size fixture with walls, pillars, items, and barrels in view.
BENCH_MAP = """
#########################
#S......#.......#......S#
#..##...#..B....#..###..#
#..#M...........a..#.r..#
#...........#.......#...#
#..a....##..#...M.......#
#....B..#...#...........#
#S..........R.......#..S#
#.....#.........B...#...#
#..A..#....S....#.......#
#########################
"""


@dataclass
class BenchReport:
    width: int
    height: int
    frames: int
    fps: float
    ms_per_frame: float
    breakdown: dict[str, float]  # configuration name -> fps

    def summary(self) -> str:
        lines = [
            f"benchmark {self.width}x{self.height}: "
            f"{self.fps:.0f} fps ({self.ms_per_frame:.3f} ms/frame, {self.frames} frames)"
        ]
        for name, fps in self.breakdown.items():
            lines.append(f"  {name:<28} {fps:>9.0f} fps")
        return "\n".join(lines)


def bench_world(seed: int = 7) -> WorldState:
    cfg = ScenarioConfig()
    cfg.seed = seed
    cfg.num_players = 4
    attach_map(cfg, BENCH_MAP)
    return WorldState(cfg, n_players=4)


def _time_renders(world, opts: RenderOptions, tics: int) -> float:
    """Mean fps over `tics` frames, viewer rotating one degree per frame."""
    viewer = world.actors[0]
    render_frame(world, 0, opts)  # warm the JIT outside the timed region
    start = time.perf_counter()
    for i in range(tics):
        viewer.angle = (viewer.angle + 11930465) & 0xFFFFFFFF  # ~1 degree
        render_frame(world, 0, opts)
    dt = time.perf_counter() - start
    return tics / dt


def run_bench(width: int = 320, height: int = 240, tics: int = 1000,
              buffers: bool = True) -> BenchReport:
    """Render the benchmark world repeatedly on one thread."""
    if tics < 1:
        raise ValueError("tics must be >= 1")
    world = bench_world()
    base = RenderOptions(width=width, height=height)
    fps = _time_renders(world, base, tics)
    breakdown = {"screen only": fps}
    if buffers:
        for name, opts in (
            ("+ depth", dataclasses.replace(base, depth_enabled=True)),
            ("+ labels", dataclasses.replace(base, labels_enabled=True)),
            ("+ automap", dataclasses.replace(base, automap_enabled=True, automap_full=True)),
            ("+ depth + labels + automap", dataclasses.replace(
                base, depth_enabled=True, labels_enabled=True,
                automap_enabled=True, automap_full=True)),
        ):
            breakdown[name] = _time_renders(world, opts, max(1, tics // 2))
    return BenchReport(width, height, tics, fps, 1000.0 / fps, breakdown)
