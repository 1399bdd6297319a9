from __future__ import annotations

from pathlib import Path

import pytest

from pixelarena.scenario import ScenarioConfig, attach_map, load_scenario

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"

# 9 columns x 7 rows, two spawns on one axis, open floor
SMALL_MAP = """
#########
#S.....S#
#.......#
#.......#
#.......#
#.......#
#########
"""

# corridor long enough for straight-line runs
CORRIDOR_MAP = """
########################
#S....................S#
########################
"""

# a wall splits two spawns; LOS between them is blocked
WALLED_MAP = """
#########
#S..#...#
#...#..S#
#...#...#
#.......#
#########
"""


def small_config(**overrides) -> ScenarioConfig:
    cfg = ScenarioConfig()
    attach_map(cfg, SMALL_MAP)
    for key, value in overrides.items():
        setattr(cfg, key, value)
    return cfg


@pytest.fixture
def cfg2():
    """Two-player world on the small open map."""
    cfg = small_config(num_players=2)
    return cfg


@pytest.fixture
def arena_cfg():
    return load_scenario(SCENARIO_DIR / "deathmatch_2016.cfg")


@pytest.fixture
def arena_cfg_2017():
    return load_scenario(SCENARIO_DIR / "deathmatch_2017.cfg")
