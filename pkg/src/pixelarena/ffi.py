"""Flat foreign-function boundary over the environment API.

This is the stable surface language bindings build on: handle-based
functions, plain scalars and lists, and buffers as contiguous bytes with
(height, width, channels) metadata. Nothing here leaks internal objects.
"""
from __future__ import annotations

import threading

from .env import Env, EnvError
from .scenario import attach_map, parse_config

_lock = threading.Lock()
_envs: dict[int, Env] = {}
_next_handle = 1


class InvalidHandle(EnvError):
    pass


def _get(handle: int) -> Env:
    env = _envs.get(handle)
    if env is None:
        raise InvalidHandle(f"no environment with handle {handle} (closed?)")
    return env


def env_create(config_text: str, map_text: str, extra_args: str = "") -> int:
    global _next_handle
    cfg = parse_config(config_text)
    attach_map(cfg, map_text)
    if extra_args:
        cfg.extra_args = (cfg.extra_args + " " + extra_args).strip()
    env = Env(cfg)
    with _lock:
        handle = _next_handle
        _next_handle += 1
        _envs[handle] = env
    return handle


def env_new_episode(handle: int, seed: int | None = None) -> None:
    """Restart the episode; same seed unless one is given."""
    with _lock:
        env = _get(handle)
        cfg = env.cfg.copy()
        cfg.map_grid = env.cfg.map_grid
        if seed is not None:
            cfg.seed = seed
        env.close()
        _envs[handle] = Env(cfg)


def _buffer(arr) -> dict:
    if arr is None:
        return None
    if arr.ndim == 2:
        h, w = arr.shape
        c = 1
    else:
        h, w, c = arr.shape
    return {"data": arr.tobytes(), "shape": (h, w, c)}


def env_get_state(handle: int) -> dict:
    env = _get(handle)
    s = env.get_state()
    f = s.frame
    return {
        "tic": s.tic,
        "game_variables": list(s.game_variables),
        "last_action": list(s.last_action),
        "episode_finished": s.episode_finished,
        "player_dead": s.player_dead,
        "screen": _buffer(f.screen),
        "depth": _buffer(f.depth),
        "labels": _buffer(f.labels),
        "automap": _buffer(f.automap),
        "label_entries": [
            {
                "object_id": e.object_id, "name": e.name,
                "x": e.x, "y": e.y, "width": e.width, "height": e.height,
                "world_x": e.world_x, "world_y": e.world_y,
                "angle_deg": e.angle_deg, "velocity": list(e.velocity),
            }
            for e in f.label_entries
        ],
    }


def env_make_action(handle: int, values, skip: int = 1) -> float:
    return _get(handle).make_action(values, skip)


def env_is_episode_finished(handle: int) -> bool:
    return _get(handle).is_episode_finished()


def env_is_player_dead(handle: int) -> bool:
    return _get(handle).is_player_dead()


def env_respawn_player(handle: int) -> bool:
    return _get(handle).respawn_player()


def env_state_hash(handle: int) -> int:
    return _get(handle).state_hash()


def env_available_buttons(handle: int) -> list[str]:
    return [b.name for b in _get(handle).cfg.available_buttons]


def env_available_game_variables(handle: int) -> list[str]:
    return [v.name for v in _get(handle).cfg.available_game_variables]


def env_close(handle: int) -> None:
    with _lock:
        env = _envs.pop(handle, None)
    if env is None:
        raise InvalidHandle(f"no environment with handle {handle} (closed?)")
    env.close()
