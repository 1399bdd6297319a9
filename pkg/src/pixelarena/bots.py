"""Scripted baseline opponents: IDLE, WANDERER, and FIGHTER.

These are harness fixtures, not research agents. They read the static map
grid for pathfinding; everything dynamic they know (own variables, visible
enemies with world positions) is the geometric equivalent of what the labels
buffer exposes to a pixel agent.

A FIGHTER presses ATTACK only on tics where an enemy passed the visibility
test at the end of the previous tic, and it stands still while firing; since
the simulation judges an attack's `enemy_visible` flag against tic-start
positions, a FIGHTER's detection precision is 100% by construction.
"""
from __future__ import annotations

import math
from collections import deque

from .fixmath import Rng, bam_to_deg, mix_seed
from .scenario import Button, ItemKind, MapGrid, WeaponKind
from .sim.visibility import CELL_SHIFT

_ATTACK = 1 << Button.ATTACK.value
_FORWARD = 1 << Button.MOVE_FORWARD.value
_BACKWARD = 1 << Button.MOVE_BACKWARD.value
_TURN_L = 1 << Button.TURN_LEFT.value
_TURN_R = 1 << Button.TURN_RIGHT.value
_SEL_1 = 1 << Button.SELECT_WEAPON_1.value
_SEL_2 = 1 << Button.SELECT_WEAPON_2.value

_EMPTY = (0, 0)


class Observation:
    """What a bot sees at the end of a tic."""

    __slots__ = ("tic", "pid", "x", "y", "angle", "health", "armor",
                 "selected", "bullets", "rockets", "owns_launcher", "visible")

    def __init__(self, tic, pid, x, y, angle, health, armor, selected,
                 bullets, rockets, owns_launcher, visible):
        self.tic = tic
        self.pid = pid
        self.x = x
        self.y = y
        self.angle = angle
        self.health = health
        self.armor = armor
        self.selected = selected
        self.bullets = bullets
        self.rockets = rockets
        self.owns_launcher = owns_launcher
        self.visible = visible  # tuple of (pid, x_raw, y_raw)


def bfs_path(grid: MapGrid, start: tuple[int, int], goal: tuple[int, int]):
    """Shortest 4-connected path over floor cells, start cell excluded."""
    if start == goal:
        return []
    w, h = grid.width, grid.height
    walls = grid.walls
    prev: dict[int, int] = {}
    si = start[1] * w + start[0]
    gi = goal[1] * w + goal[0]
    if walls[gi]:
        return None
    q = deque([si])
    seen = {si}
    while q:
        ci = q.popleft()
        if ci == gi:
            path = []
            while ci != si:
                path.append((ci % w, ci // w))
                ci = prev[ci]
            path.reverse()
            return path
        for ni in (ci - 1, ci + 1, ci - w, ci + w):
            if ni not in seen and not walls[ni]:
                seen.add(ni)
                prev[ni] = ci
                q.append(ni)
    return None


def _angle_err_deg(obs_angle: int, dx: int, dy: int) -> float:
    desired = math.degrees(math.atan2(dy, dx))
    err = desired - bam_to_deg(obs_angle)
    return (err + 180.0) % 360.0 - 180.0


class BotBrain:
    """Base: deterministic per-slot policy. `act` maps an Observation to a
    (buttons_mask, turn_centideg) action."""

    kind = "idle"

    def __init__(self, seed: int, player_id: int):
        self.rng = Rng(mix_seed(seed, player_id + 1))
        self.pid = player_id

    def on_respawn(self) -> None:
        pass

    def act(self, obs: Observation) -> tuple[int, int]:
        return _EMPTY


class IdleBrain(BotBrain):
    kind = "idle"


class WandererBrain(BotBrain):
    """Roams to random reachable floor cells via BFS paths."""

    kind = "wanderer"
    low_health = 30

    def __init__(self, seed: int, player_id: int, grid: MapGrid):
        super().__init__(seed, player_id)
        self.grid = grid
        self.floor_cells = [
            (x, y)
            for y in range(grid.height)
            for x in range(grid.width)
            if not grid.walls[y * grid.width + x]
        ]
        self.medikit_cells = [(x, y) for k, x, y in grid.items if k == ItemKind.MEDIKIT]
        self.path: list[tuple[int, int]] | None = None
        self.path_i = 0
        self.stuck = 0
        self.last_pos = (0, 0)

    def on_respawn(self) -> None:
        self.path = None
        self.path_i = 0
        self.stuck = 0

    def _retarget(self, cell) -> None:
        goal = self.floor_cells[self.rng.below(len(self.floor_cells))]
        self.path = bfs_path(self.grid, cell, goal)
        self.path_i = 0

    def _path_to(self, cell, goal) -> None:
        self.path = bfs_path(self.grid, cell, goal)
        self.path_i = 0

    def _follow(self, obs: Observation) -> tuple[int, int]:
        cell = (obs.x >> CELL_SHIFT, obs.y >> CELL_SHIFT)
        if not self.path or self.path_i >= len(self.path):
            self._retarget(cell)
            if not self.path:
                return _EMPTY
        # waypoint = center of the next path cell
        wx, wy = self.path[self.path_i]
        tx = (wx << CELL_SHIFT) + (64 << 16)
        ty = (wy << CELL_SHIFT) + (64 << 16)
        dx = tx - obs.x
        dy = ty - obs.y
        if abs(dx) < (48 << 16) and abs(dy) < (48 << 16):
            self.path_i += 1
            if self.path_i >= len(self.path):
                self._retarget(cell)
                if not self.path:
                    return _EMPTY
            wx, wy = self.path[self.path_i]
            tx = (wx << CELL_SHIFT) + (64 << 16)
            ty = (wy << CELL_SHIFT) + (64 << 16)
            dx = tx - obs.x
            dy = ty - obs.y

        if (obs.x, obs.y) == self.last_pos:
            self.stuck += 1
            if self.stuck > 12:
                self._retarget(cell)
                self.stuck = 0
        else:
            self.stuck = 0
        self.last_pos = (obs.x, obs.y)

        err = _angle_err_deg(obs.angle, dx, dy)
        turn_cd = int(round(max(-15.0, min(15.0, err)) * 100.0))
        mask = 0
        if abs(err) < 45.0:
            mask |= _FORWARD
        return (mask, turn_cd)

    def act(self, obs: Observation) -> tuple[int, int]:
        return self._follow(obs)


class FighterBrain(WandererBrain):
    """Wanders, engages visible enemies, flees to medikits when hurt."""

    kind = "fighter"
    aim_tolerance_deg = 2.0
    rocket_keepout = 192  # units; avoid rocket self-blast at close range

    def __init__(self, seed: int, player_id: int, grid: MapGrid):
        super().__init__(seed, player_id, grid)
        self.cd_left = 0

    def on_respawn(self) -> None:
        super().on_respawn()
        self.cd_left = 0

    def act(self, obs: Observation) -> tuple[int, int]:
        if self.cd_left:
            self.cd_left -= 1
        if obs.visible:
            return self._engage(obs)
        if obs.health < self.low_health and self.medikit_cells:
            cell = (obs.x >> CELL_SHIFT, obs.y >> CELL_SHIFT)
            if not self.path or self.path_i >= len(self.path) or self.path[-1] not in self.medikit_cells:
                best = min(
                    self.medikit_cells,
                    key=lambda mc: (mc[0] - cell[0]) ** 2 + (mc[1] - cell[1]) ** 2,
                )
                self._path_to(cell, best)
        return self._follow(obs)

    def _engage(self, obs: Observation) -> tuple[int, int]:
        tx = ty = 0
        best_d = None
        for pid, ex, ey in obs.visible:
            d = (ex - obs.x) ** 2 + (ey - obs.y) ** 2
            if best_d is None or d < best_d:
                best_d = d
                tx, ty = ex, ey
        dist_units = math.sqrt(best_d) / 65536.0
        err = _angle_err_deg(obs.angle, tx - obs.x, ty - obs.y)
        turn_cd = int(round(max(-15.0, min(15.0, err)) * 100.0))
        mask = 0

        if obs.owns_launcher and obs.rockets > 0 and dist_units >= self.rocket_keepout:
            mask |= _SEL_2
            ammo = obs.rockets
            cooldown = 30
        elif obs.bullets > 0:
            mask |= _SEL_1
            ammo = obs.bullets
            cooldown = 10
        else:
            ammo = 0
            cooldown = 0

        if ammo > 0 and self.cd_left == 0 and abs(err) <= self.aim_tolerance_deg:
            # Fire standing still: the attack is judged against tic-start
            # positions, so visibility checked last tic still holds.
            mask |= _ATTACK
            self.cd_left = cooldown
            return (mask, turn_cd)

        if dist_units > 384.0:
            if abs(err) < 45.0:
                mask |= _FORWARD
        elif dist_units < 160.0:
            mask |= _BACKWARD
        return (mask, turn_cd)


def make_brain(spec: str, seed: int, player_id: int, grid: MapGrid) -> BotBrain:
    """Build a brain from a CLI spec: idle | wanderer | fighter, with an
    optional per-bot seed suffix like 'fighter:7'."""
    name, _, salt = spec.partition(":")
    if salt:
        seed = mix_seed(seed, 0xB07 + int(salt))
    name = name.strip().lower()
    if name == "idle":
        return IdleBrain(seed, player_id)
    if name == "wanderer":
        return WandererBrain(seed, player_id, grid)
    if name == "fighter":
        return FighterBrain(seed, player_id, grid)
    raise ValueError(f"unknown bot kind {name!r}")
