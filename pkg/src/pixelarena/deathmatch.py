"""In-process match loop: drives the sim with bot brains and/or externally
supplied actions, tracks end conditions, and optionally records a replay.

This is the deterministic core shared by the tournament runner, the lockstep
netplay host, and the test fixtures.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .events import Respawn
from .fixmath import cos_fx, sin_fx
from .scenario import ScenarioConfig
from .sim import EMPTY_ACTION, WorldState, state_hash, step
from .sim.visibility import in_fov, segment_clear
from .bots import BotBrain, Observation, make_brain

_RL_BIT = 2  # WeaponKind.ROCKET_LAUNCHER


@dataclass
class MatchResult:
    final_tic: int
    counters: list
    final_hash: int
    end_reason: str  # "timeout" | "frag_limit"
    tic_hashes: list[int] = field(default_factory=list)


def build_observation(world: WorldState, pid: int) -> Observation:
    a = world.actors[pid]
    visible = []
    cos_a = cos_fx(a.angle)
    sin_a = sin_fx(a.angle)
    walls = world.walls
    gw = world.gw
    ax = a.x
    ay = a.y
    for o in world.actors:
        if o.id == pid or not o.alive:
            continue
        rx = o.x - ax
        ry = o.y - ay
        if in_fov(cos_a, sin_a, rx, ry) and segment_clear(walls, gw, ax, ay, o.x, o.y):
            visible.append((o.id, o.x, o.y))
    return Observation(
        world.tic, pid, ax, ay, a.angle, a.health, a.armor, a.selected,
        a.bullets, a.rockets, bool(a.weapons & _RL_BIT), tuple(visible),
    )


class MatchRunner:
    """Steps one match tic by tic.

    `brains[pid]` may be None for slots driven externally (netplay peers,
    the env API player, a human). External actions are passed per tic;
    missing slots get the empty action.
    """

    def __init__(self, cfg: ScenarioConfig, brains: list[BotBrain | None],
                 recorder=None, collect_hashes: bool = False):
        self.cfg = cfg
        self.world = WorldState(cfg, n_players=len(brains))
        self.brains = brains
        self.recorder = recorder
        self.collect_hashes = collect_hashes
        self.tic_hashes: list[int] = []
        self.last_events: list = []
        self.last_actions: list = [EMPTY_ACTION] * len(brains)
        self.end_reason: str | None = None
        if recorder is not None:
            recorder.begin(cfg, len(brains))

    @classmethod
    def from_bots(cls, cfg: ScenarioConfig, bot_specs: list[str],
                  recorder=None, collect_hashes: bool = False) -> "MatchRunner":
        grid = cfg.map_grid
        brains = [make_brain(spec, cfg.seed, pid, grid)
                  for pid, spec in enumerate(bot_specs)]
        return cls(cfg, brains, recorder=recorder, collect_hashes=collect_hashes)

    def actions_for_tic(self, external: dict[int, tuple[int, int]] | None = None) -> list:
        world = self.world
        actions = []
        for pid, brain in enumerate(self.brains):
            if external is not None and pid in external:
                actions.append(external[pid])
            elif brain is None or not world.actors[pid].alive:
                actions.append(EMPTY_ACTION)
            else:
                actions.append(brain.act(build_observation(world, pid)))
        return actions

    def tick(self, external: dict[int, tuple[int, int]] | None = None,
             actions: list | None = None) -> list:
        """Advance one tic. Either pass a full canonical action vector or a
        sparse dict of external actions merged with bot decisions."""
        if actions is None:
            actions = self.actions_for_tic(external)
        events = step(self.world, actions)
        self.last_actions = actions
        self.last_events = events
        for ev in events:
            if type(ev) is Respawn:
                brain = self.brains[ev.actor]
                if brain is not None:
                    brain.on_respawn()
        if self.recorder is not None:
            self.recorder.add_tic(actions, self.world)
        if self.collect_hashes:
            self.tic_hashes.append(state_hash(self.world))
        return events

    def finished(self, duration: int) -> bool:
        if self.world.tic >= duration:
            self.end_reason = "timeout"
            return True
        limit = self.cfg.frag_limit
        if limit > 0:
            for pid in range(self.world.n_players):
                if self.world.frags(pid) >= limit:
                    self.end_reason = "frag_limit"
                    return True
        return False

    def run(self, duration: int) -> MatchResult:
        while not self.finished(duration):
            self.tick()
        if self.recorder is not None:
            self.recorder.finish(self.world)
        return MatchResult(
            final_tic=self.world.tic,
            counters=[c.copy() for c in self.world.counters],
            final_hash=state_hash(self.world),
            end_reason=self.end_reason or "timeout",
            tic_hashes=self.tic_hashes,
        )
