"""Simulation events, the shared vocabulary of the sim, rewards, and stats."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class Attack:
    attacker: int
    attack_id: int
    enemy_visible: bool


@dataclass(frozen=True, slots=True)
class Damage:
    victim: int
    amount: int  # pre-armor hit points
    attacker: int | None = None
    attack_id: int | None = None


@dataclass(frozen=True, slots=True)
class Death:
    victim: int
    killer: int | None  # killer == victim for self-inflicted deaths


@dataclass(frozen=True, slots=True)
class Pickup:
    actor: int
    kind: object  # scenario.ItemKind


@dataclass(frozen=True, slots=True)
class Respawn:
    actor: int


Event = Attack | Damage | Death | Pickup | Respawn
