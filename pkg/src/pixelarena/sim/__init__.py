"""Deterministic fixed-timestep deathmatch simulation."""
from .step import EMPTY_ACTION, fire_weapon, resolve_damage, step, visibility_test
from .types import Actor, Barrel, Counters, ItemState, Projectile
from .world import (
    SimContractError,
    WorldState,
    cell_center,
    respawn_actor,
    select_spawn,
    state_hash,
    state_serialize,
)

__all__ = [
    "Actor", "Barrel", "Counters", "EMPTY_ACTION", "ItemState", "Projectile",
    "SimContractError", "WorldState", "cell_center", "fire_weapon",
    "resolve_damage", "respawn_actor", "select_spawn", "state_hash",
    "state_serialize", "step", "visibility_test",
]
