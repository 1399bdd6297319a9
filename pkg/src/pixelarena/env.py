"""Agent-facing environment: lifecycle, state access, frame skipping, and
the four control modes (sync/async x player/spectator).

Player slot 0 belongs to the API caller (or the human in spectator modes);
any `bots` declared in the scenario fill the remaining slots and are stepped
inside the environment. In synchronous modes nothing advances until the
controller acts; in asynchronous modes an internal 35 Hz clock advances the
world and late submissions miss tics (a missing action is the empty action,
not a repeat of the last one).
"""
from __future__ import annotations

import threading
import time

from .bots import make_brain
from .deathmatch import MatchRunner
from .render import FrameBundle, render_frame, update_discovery
from .scenario import (
    Button,
    GameVariable,
    Mode,
    ScenarioConfig,
    load_scenario,
    reward_for,
)
from .sim import EMPTY_ACTION, state_hash

TICRATE = 35.0


class EnvError(RuntimeError):
    pass


class ModeError(EnvError):
    pass


class EpisodeFinished(EnvError):
    pass


class EnvState:
    """Snapshot handed to the controller: buffers, variables, flags."""

    __slots__ = ("tic", "frame", "game_variables", "last_action",
                 "episode_finished", "player_dead")

    def __init__(self, tic, frame, game_variables, last_action,
                 episode_finished, player_dead):
        self.tic = tic
        self.frame = frame
        self.game_variables = game_variables
        self.last_action = last_action
        self.episode_finished = episode_finished
        self.player_dead = player_dead


class Env:
    """One controller drives one Env; distinct Envs are fully independent."""

    def __init__(self, cfg: ScenarioConfig):
        if cfg.map_grid is None:
            raise EnvError("config has no map attached")
        cfg.validate()
        self.cfg = cfg
        brains = [None] + [
            make_brain(spec, cfg.seed, 1 + i, cfg.map_grid)
            for i, spec in enumerate(cfg.bots)
        ]
        self.runner = MatchRunner(cfg, brains)
        self.world = self.runner.world
        self._frame_cache: tuple[int, FrameBundle] | None = None
        self._finished = False
        self._end_checked_tic = -1
        self._pending_reward = 0.0
        self._spectator_action = None
        self._episode_reward = 0.0
        self._closed = False
        self._async = cfg.mode in (Mode.ASYNC_PLAYER, Mode.ASYNC_SPECTATOR)
        self._spectator = cfg.mode in (Mode.SYNC_SPECTATOR, Mode.ASYNC_SPECTATOR)
        self._lock = threading.Lock()
        self._ticked = threading.Condition(self._lock)
        self._clock_thread: threading.Thread | None = None
        self._stop = threading.Event()
        self._async_submission: tuple[tuple[int, int], int] | None = None
        self._async_reward = 0.0
        self._async_consumed = threading.Condition(self._lock)
        if self._async:
            self._clock_thread = threading.Thread(target=self._clock_loop, daemon=True)
            self._clock_thread.start()

    # -- lifecycle -----------------------------------------------------------

    @classmethod
    def from_file(cls, path) -> "Env":
        return cls(load_scenario(path))

    def close(self) -> None:
        self._closed = True
        self._stop.set()
        if self._clock_thread is not None:
            self._clock_thread.join(timeout=2.0)

    def _check_open(self) -> None:
        if self._closed:
            raise EnvError("environment is closed")

    # -- state access ----------------------------------------------------------

    def is_episode_finished(self) -> bool:
        self._check_open()
        with self._lock:
            return self._check_end()

    def is_player_dead(self) -> bool:
        self._check_open()
        with self._lock:
            return not self.world.actors[0].alive

    def respawn_player(self) -> bool:
        """Manual respawn; honors the configured delay and protection."""
        from .sim import respawn_actor

        self._check_open()
        with self._lock:
            events = []
            ok = respawn_actor(self.world, 0, events)
            if ok:
                brain = self.runner.brains[0]
                if brain is not None:
                    brain.on_respawn()
            return ok

    def get_state(self) -> EnvState:
        self._check_open()
        with self._lock:
            if self._check_end():
                raise EpisodeFinished("episode is finished; no further state")
            return self._snapshot()

    def _snapshot(self) -> EnvState:
        world = self.world
        tic = world.tic
        if self._frame_cache is not None and self._frame_cache[0] == tic:
            frame = self._frame_cache[1]
        else:
            frame = render_frame(world, 0, self.cfg.render)
            self._frame_cache = (tic, frame)
        return EnvState(
            tic=tic,
            frame=frame,
            game_variables=[self._variable(v) for v in self.cfg.available_game_variables],
            last_action=self._decode_action(self.runner.last_actions[0]),
            episode_finished=self._finished,
            player_dead=not world.actors[0].alive,
        )

    def _variable(self, var: GameVariable) -> float:
        a = self.world.actors[0]
        c = self.world.counters[0]
        if var == GameVariable.HEALTH:
            return float(a.health)
        if var == GameVariable.ARMOR:
            return float(a.armor)
        if var == GameVariable.SELECTED_WEAPON:
            return float(a.selected)
        if var == GameVariable.SELECTED_WEAPON_AMMO:
            return float(a.ammo_for(a.selected))
        if var == GameVariable.FRAGCOUNT:
            return float(c.kills - c.suicides)
        if var == GameVariable.KILLCOUNT:
            return float(c.kills)
        if var == GameVariable.DEATHCOUNT:
            return float(c.deaths)
        if var == GameVariable.HITS_TAKEN:
            return float(c.hits_taken)
        if var == GameVariable.DAMAGE_TAKEN:
            return float(c.damage_taken_hp)
        if var == GameVariable.ITEMCOUNT:
            return float(c.picked_ammo + c.picked_medikits + c.picked_armors)
        if var == GameVariable.POSITION_X:
            return a.x / 65536.0
        if var == GameVariable.POSITION_Y:
            return a.y / 65536.0
        if var == GameVariable.ANGLE:
            return (a.angle & 0xFFFFFFFF) * 360.0 / 4294967296.0
        raise EnvError(f"unhandled game variable {var}")

    # -- actions ---------------------------------------------------------------

    def _encode_action(self, values) -> tuple[int, int]:
        buttons = self.cfg.available_buttons
        if len(values) != len(buttons):
            raise EnvError(
                f"action arity mismatch: config declares {len(buttons)} buttons, "
                f"got {len(values)} values")
        mask = 0
        turn_cd = 0
        limit = self.cfg.tuning.turn_delta_limit_centideg
        for b, v in zip(buttons, values):
            if b is Button.TURN_DELTA:
                deg = max(-limit / 100.0, min(limit / 100.0, float(v)))
                turn_cd = int(round(deg * 100.0))
            elif v:
                mask |= 1 << b.value
        return (mask, turn_cd)

    def _decode_action(self, action: tuple[int, int]) -> list[float]:
        mask, turn_cd = action
        out = []
        for b in self.cfg.available_buttons:
            if b is Button.TURN_DELTA:
                out.append(turn_cd / 100.0)
            else:
                out.append(1.0 if mask & (1 << b.value) else 0.0)
        return out

    def _advance(self, action: tuple[int, int]) -> float:
        """One tic with the controller's action; returns its reward."""
        events = self.runner.tick(external={0: action})
        if self.cfg.render.automap_enabled and not self.cfg.render.automap_full:
            update_discovery(self.world, 0)
        self._ticked.notify_all()
        return reward_for(events, self.cfg, 0)

    def _check_end(self) -> bool:
        if self._finished:
            return True
        world = self.world
        if world.tic == self._end_checked_tic:
            return self._finished
        self._end_checked_tic = world.tic
        if world.tic >= self.cfg.episode_timeout:
            self._finished = True
        elif self.cfg.frag_limit > 0 and any(
                world.frags(p) >= self.cfg.frag_limit for p in range(world.n_players)):
            self._finished = True
        elif self.cfg.episode_ends_on_death and not world.actors[0].alive:
            self._finished = True
        return self._finished

    def make_action(self, values, skip: int = 1) -> float:
        """Submit the controller's action for the next `skip` tics; returns
        the summed reward over those tics."""
        self._check_open()
        if self._spectator:
            raise ModeError("make_action is unavailable in spectator modes")
        if skip < 1:
            raise EnvError("skip must be >= 1")
        action = self._encode_action(values)
        if not self._async:
            with self._lock:
                if self._check_end():
                    raise EpisodeFinished("episode is finished")
                total = 0.0
                for _ in range(skip):
                    total += self._advance(action)
                    if self._check_end():
                        break
                return total
        with self._lock:
            if self._check_end():
                raise EpisodeFinished("episode is finished")
            self._async_submission = (action, skip)
            self._async_reward = 0.0
            while self._async_submission is not None and not self._check_end():
                self._async_consumed.wait(timeout=0.5)
            return self._async_reward

    def spectator_input(self, values) -> None:
        """Deliver the human's action. In SYNC_SPECTATOR the tic advances
        exactly when an input arrives; without input the world stands still."""
        self._check_open()
        if not self._spectator:
            raise ModeError("spectator_input is only available in spectator modes")
        action = self._encode_action(values)
        with self._lock:
            if self._check_end():
                raise EpisodeFinished("episode is finished")
            if self._async:
                self._spectator_action = action
            else:
                self._advance(action)

    def advance_async(self) -> None:
        """One clock tic of an async mode (internal)."""
        with self._lock:
            if self._check_end():
                return
            if self._spectator:
                action = self._spectator_action if self._spectator_action is not None else EMPTY_ACTION
                self._spectator_action = None
                self._advance(action)
                return
            if self._async_submission is not None:
                action, remaining = self._async_submission
                reward = self._advance(action)
                self._async_reward += reward
                remaining -= 1
                if remaining <= 0 or self._check_end():
                    self._async_submission = None
                    self._async_consumed.notify_all()
                else:
                    self._async_submission = (action, remaining)
            else:
                # late controller: this tic is missed, the empty action runs
                self._advance(EMPTY_ACTION)

    def _clock_loop(self) -> None:
        start = time.monotonic()
        n = 0
        while not self._stop.is_set():
            n += 1
            deadline = start + n / TICRATE
            delay = deadline - time.monotonic()
            if delay > 0:
                if self._stop.wait(timeout=delay):
                    return
            self.advance_async()
            with self._lock:
                if self._check_end():
                    self._async_consumed.notify_all()
                    return

    # -- diagnostics -----------------------------------------------------------

    def state_hash(self) -> int:
        with self._lock:
            return state_hash(self.world)

    def episode_tic(self) -> int:
        with self._lock:
            return self.world.tic
