"""World construction, spawn logic, and canonical state hashing."""
from __future__ import annotations

import struct

from ..events import Respawn
from ..fixmath import FX_SHIFT, Rng
from ..hashing import fnv1a
from ..scenario import MapGrid, ScenarioConfig, WeaponKind
from .types import Actor, Barrel, Counters, ItemState, Projectile
from .visibility import CELL_SHIFT


class SimContractError(ValueError):
    """A caller violated a simulation precondition."""


def cell_center(cx: int, cy: int) -> tuple[int, int]:
    return (cx << CELL_SHIFT) + (64 << FX_SHIFT), (cy << CELL_SHIFT) + (64 << FX_SHIFT)


class WorldState:
    """Complete deterministic match state; the unit of hashing and replay."""

    __slots__ = (
        "cfg", "tuning", "grid", "gw", "gh", "walls", "tic", "rng", "actors",
        "projectiles", "items", "barrels", "spawns", "counters", "item_at",
        "next_attack_id", "next_projectile_id", "damaging_attacks",
        "discovered", "render_cache",
    )

    def __init__(self, cfg: ScenarioConfig, n_players: int | None = None):
        if cfg.map_grid is None:
            raise SimContractError("config has no map attached")
        cfg.validate()
        grid: MapGrid = cfg.map_grid
        self.cfg = cfg
        self.tuning = cfg.tuning
        self.grid = grid
        self.gw = grid.width
        self.gh = grid.height
        self.walls = grid.walls
        self.tic = 0
        self.rng = Rng(cfg.seed)
        self.spawns = grid.spawns
        n = cfg.num_players if n_players is None else n_players
        if not 1 <= n <= 16:
            raise SimContractError("player count must be in 1..16")

        self.projectiles: list[Projectile] = []
        self.items = [ItemState(kind, cx, cy) for kind, cx, cy in grid.items]
        self.item_at = {cy * self.gw + cx: i for i, (_, cx, cy) in enumerate(grid.items)}
        self.barrels = []
        for i, (cx, cy) in enumerate(grid.barrels):
            bx, by = cell_center(cx, cy)
            self.barrels.append(Barrel(i, cx, cy, bx, by, cfg.tuning.barrel_health))
        self.next_attack_id = 1
        self.next_projectile_id = 1
        self.damaging_attacks: set[int] = set()
        self.discovered: dict[int, bytearray] = {}
        self.render_cache = None

        self.counters = [Counters() for _ in range(n)]
        self.actors = []
        for pid in range(n):
            a = Actor(pid)
            self._reset_loadout(a)
            self.actors.append(a)
            sx, sy = self.spawns[select_spawn(self, pid)]
            a.x, a.y = cell_center(sx, sy)
        for a in self.actors:
            a.protection_until = cfg.spawn_protection

    def _reset_loadout(self, a: Actor) -> None:
        cfg = self.cfg
        a.weapons = 0
        for w in cfg.starting_weapons:
            a.weapons |= int(w)
        a.selected = int(cfg.starting_weapon)
        a.bullets = cfg.starting_bullets
        a.rockets = cfg.starting_rockets
        a.health = cfg.tuning.max_health
        a.armor = 0

    @property
    def n_players(self) -> int:
        return len(self.actors)

    def frags(self, pid: int) -> int:
        c = self.counters[pid]
        return c.kills - c.suicides

    def is_wall_cell(self, cx: int, cy: int) -> bool:
        return self.walls[cy * self.gw + cx] != 0

    def copy(self) -> "WorldState":
        w = object.__new__(WorldState)
        w.cfg = self.cfg
        w.tuning = self.tuning
        w.grid = self.grid
        w.gw = self.gw
        w.gh = self.gh
        w.walls = self.walls
        w.tic = self.tic
        w.rng = self.rng.copy()
        w.spawns = self.spawns
        w.actors = [a.copy() for a in self.actors]
        w.projectiles = [p.copy() for p in self.projectiles]
        w.items = [it.copy() for it in self.items]
        w.item_at = dict(self.item_at)
        w.barrels = [b.copy() for b in self.barrels]
        w.counters = [c.copy() for c in self.counters]
        w.next_attack_id = self.next_attack_id
        w.next_projectile_id = self.next_projectile_id
        w.damaging_attacks = set(self.damaging_attacks)
        w.discovered = {pid: bytearray(g) for pid, g in self.discovered.items()}
        w.render_cache = None
        return w


def select_spawn(world: WorldState, respawning_id: int) -> int:
    """Index of the spawn point farthest (maximin) from all other living
    actors; ties go to the lowest index. Distances compared squared, which
    preserves the fixed-point ordering exactly."""
    if not world.spawns:
        raise SimContractError("map has no spawn points")
    others = [a for a in world.actors if a.alive and a.id != respawning_id]
    if not others:
        return 0
    best_i = 0
    best_d = -1
    for i, (cx, cy) in enumerate(world.spawns):
        px, py = cell_center(cx, cy)
        d = min((px - o.x) ** 2 + (py - o.y) ** 2 for o in others)
        if d > best_d:
            best_d = d
            best_i = i
    return best_i


def respawn_actor(world: WorldState, aid: int, events: list) -> bool:
    """Respawn a dead, eligible actor. Returns False (no-op) otherwise."""
    a = world.actors[aid]
    if a.alive or world.tic < a.respawn_at:
        return False
    sx, sy = world.spawns[select_spawn(world, aid)]
    a.x, a.y = cell_center(sx, sy)
    a.angle = 0
    a.alive = True
    world._reset_loadout(a)
    a.cooldown = 0
    a.dist_life = 0
    a.last_dx = 0
    a.last_dy = 0
    a.protection_until = world.tic + world.cfg.spawn_protection
    events.append(Respawn(aid))
    return True


_HDR = struct.Struct("<IQ")
_ACTOR_FMT = "iiIBBBBHHBIIIq"
_PROJ_FMT = "IBiiiiI"
_ITEM_FMT = "BBBI"
_BARREL_FMT = "BBhB"
_COUNTERS_FMT = "12Iq"
_COUNT = struct.Struct("<I")

_struct_cache: dict[tuple[str, int], struct.Struct] = {}


def _batch(fmt: str, n: int) -> struct.Struct:
    key = (fmt, n)
    s = _struct_cache.get(key)
    if s is None:
        s = _struct_cache[key] = struct.Struct("<" + fmt * n)
    return s


def state_serialize(world: WorldState) -> bytes:
    """Canonical little-endian serialization: tic, rng, actors (ascending id),
    projectiles, items, barrels, per-player counters. Presentation state
    (discovered cells, render caches) is excluded."""
    actors = world.actors
    projs = world.projectiles
    items = world.items
    barrels = world.barrels
    counters = world.counters
    parts = [
        _HDR.pack(world.tic, world.rng.state),
        _batch(_ACTOR_FMT, len(actors)).pack(*[
            f for a in actors for f in (
                a.x, a.y, a.angle, a.health, a.armor, a.weapons, a.selected,
                a.bullets, a.rockets, a.alive, a.cooldown, a.protection_until,
                a.respawn_at, a.dist_life)
        ]),
        _COUNT.pack(len(projs)),
    ]
    if projs:
        parts.append(_batch(_PROJ_FMT, len(projs)).pack(*[
            f for p in projs
            for f in (p.id, p.owner, p.x, p.y, p.vx, p.vy, p.attack_id)
        ]))
    parts.append(_COUNT.pack(len(items)))
    if items:
        parts.append(_batch(_ITEM_FMT, len(items)).pack(*[
            f for it in items for f in (int(it.kind), it.cx, it.cy, it.respawn_at)
        ]))
    parts.append(_COUNT.pack(len(barrels)))
    if barrels:
        parts.append(_batch(_BARREL_FMT, len(barrels)).pack(*[
            f for b in barrels
            for f in (b.cx, b.cy, max(b.health, -32768), b.destroyed)
        ]))
    parts.append(_batch(_COUNTERS_FMT, len(counters)).pack(*[
        f for c in counters for f in (
            c.kills, c.suicides, c.deaths, c.attacks, c.attacks_visible,
            c.attacks_damaging, c.hits_taken, c.damage_taken_hp, c.picked_ammo,
            c.picked_medikits, c.picked_armors, c.alive_tics, c.distance_units)
    ]))
    return b"".join(parts)


def state_hash(world: WorldState) -> int:
    return fnv1a(state_serialize(world))
