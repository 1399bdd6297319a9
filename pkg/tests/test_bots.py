from __future__ import annotations

from pixelarena.bots import FighterBrain, IdleBrain, WandererBrain, bfs_path, make_brain
from pixelarena.deathmatch import MatchRunner
from pixelarena.events import Attack
from pixelarena.scenario import load_scenario, parse_map

from conftest import SCENARIO_DIR


def run_bots(specs, tics, seed=1):
    cfg = load_scenario(SCENARIO_DIR / "deathmatch_2016.cfg")
    cfg.seed = seed
    runner = MatchRunner.from_bots(cfg, specs, collect_hashes=True)
    events = []
    while runner.world.tic < tics:
        events.extend(runner.tick())
    return runner, events


def test_idle_bot_never_moves():
    runner, _ = run_bots(["idle", "idle"], 100)
    for c in runner.world.counters:
        assert c.distance_units == 0
        assert c.attacks == 0
    assert runner.world.counters[0].alive_tics == 100


def test_wanderer_covers_ground():
    runner, events = run_bots(["wanderer", "wanderer"], 300)
    for c in runner.world.counters:
        assert c.distance_units > 100 << 16  # definitely moving
        assert c.attacks == 0  # wanderers never fire


def test_fighter_attacks_only_with_visible_enemy():
    runner, events = run_bots(["fighter", "fighter", "fighter"], 1500, seed=9)
    attacks = [e for e in events if isinstance(e, Attack)]
    assert attacks, "fixture must produce attacks"
    assert all(a.enemy_visible for a in attacks)
    for c in runner.world.counters:
        assert c.attacks_visible == c.attacks


def test_fighter_presses_attack_when_enemy_centered():
    from pixelarena.bots import Observation
    from pixelarena.scenario import Button

    grid = load_scenario(SCENARIO_DIR / "deathmatch_2016.cfg").map_grid
    brain = FighterBrain(1, 0, grid)
    obs = Observation(
        tic=5, pid=0, x=(3 << 23), y=(3 << 23), angle=0, health=100, armor=0,
        selected=1, bullets=10, rockets=0, owns_launcher=False,
        visible=((1, (3 << 23) + (300 << 16), 3 << 23),),
    )
    mask, turn = brain.act(obs)
    assert mask & (1 << Button.ATTACK.value)
    assert turn == 0  # perfectly centered: no correction


def test_same_seed_identical_action_sequences():
    r1, _ = run_bots(["fighter", "wanderer"], 400, seed=31)
    r2, _ = run_bots(["fighter", "wanderer"], 400, seed=31)
    assert r1.tic_hashes == r2.tic_hashes


def test_different_seeds_diverge():
    r1, _ = run_bots(["wanderer", "wanderer"], 300, seed=1)
    r2, _ = run_bots(["wanderer", "wanderer"], 300, seed=2)
    assert r1.tic_hashes != r2.tic_hashes


def test_fighter_flees_toward_medikit_when_hurt():
    cfg = load_scenario(SCENARIO_DIR / "deathmatch_2016.cfg")
    runner = MatchRunner.from_bots(cfg, ["fighter"])
    brain = runner.brains[0]
    actor = runner.world.actors[0]
    actor.health = 10  # below the low-health threshold of 30
    for _ in range(30):
        runner.tick()
    assert brain.path, "hurt fighter must be pathing"
    assert brain.path[-1] in brain.medikit_cells


def test_bfs_path_shortest_in_open_room():
    grid = parse_map("""
#######
#S....#
#.....#
#.....#
#######
""")
    path = bfs_path(grid, (1, 1), (5, 3))
    assert path is not None
    assert len(path) == 6  # manhattan distance
    assert path[-1] == (5, 3)
    assert bfs_path(grid, (1, 1), (1, 1)) == []
    assert bfs_path(grid, (1, 1), (0, 0)) is None  # wall goal unreachable


def test_make_brain_specs():
    grid = parse_map("#####\n#S..#\n#####")
    assert isinstance(make_brain("idle", 1, 0, grid), IdleBrain)
    assert isinstance(make_brain("wanderer", 1, 0, grid), WandererBrain)
    assert isinstance(make_brain("fighter", 1, 0, grid), FighterBrain)
    a = make_brain("fighter:5", 1, 0, grid)
    b = make_brain("fighter:6", 1, 0, grid)
    assert a.rng.state != b.rng.state
    try:
        make_brain("aimbot", 1, 0, grid)
    except ValueError as e:
        assert "aimbot" in str(e)
    else:
        raise AssertionError("unknown bot kind must raise")
