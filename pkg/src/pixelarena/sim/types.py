"""Mutable simulation entities. Positions are raw 16.16 fixed point."""
from __future__ import annotations

from ..scenario import WeaponKind


class Actor:
    __slots__ = (
        "id", "x", "y", "angle", "health", "armor", "weapons", "selected",
        "bullets", "rockets", "alive", "cooldown", "protection_until",
        "respawn_at", "dist_life", "last_dx", "last_dy",
    )

    def __init__(self, aid: int):
        self.id = aid
        self.x = 0
        self.y = 0
        self.angle = 0
        self.health = 100
        self.armor = 0
        self.weapons = int(WeaponKind.PISTOL)
        self.selected = int(WeaponKind.PISTOL)
        self.bullets = 0
        self.rockets = 0
        self.alive = True
        self.cooldown = 0
        self.protection_until = 0
        self.respawn_at = 0
        self.dist_life = 0
        self.last_dx = 0
        self.last_dy = 0

    def owns(self, weapon: int) -> bool:
        return bool(self.weapons & int(weapon))

    def ammo_for(self, weapon: int) -> int:
        return self.rockets if weapon == WeaponKind.ROCKET_LAUNCHER else self.bullets

    def copy(self) -> "Actor":
        a = Actor(self.id)
        for name in Actor.__slots__:
            setattr(a, name, getattr(self, name))
        return a


class Projectile:
    __slots__ = ("id", "owner", "x", "y", "vx", "vy", "attack_id")

    def __init__(self, pid: int, owner: int, x: int, y: int, vx: int, vy: int, attack_id: int):
        self.id = pid
        self.owner = owner
        self.x = x
        self.y = y
        self.vx = vx  # per sub-step (quarter tic)
        self.vy = vy
        self.attack_id = attack_id

    def copy(self) -> "Projectile":
        return Projectile(self.id, self.owner, self.x, self.y, self.vx, self.vy, self.attack_id)


class ItemState:
    __slots__ = ("kind", "cx", "cy", "respawn_at")

    def __init__(self, kind, cx: int, cy: int):
        self.kind = kind
        self.cx = cx
        self.cy = cy
        self.respawn_at = 0  # 0 = present on the map

    @property
    def present(self) -> bool:
        return self.respawn_at == 0

    def copy(self) -> "ItemState":
        it = ItemState(self.kind, self.cx, self.cy)
        it.respawn_at = self.respawn_at
        return it


class Barrel:
    __slots__ = ("id", "cx", "cy", "x", "y", "health", "destroyed")

    def __init__(self, bid: int, cx: int, cy: int, x: int, y: int, health: int):
        self.id = bid
        self.cx = cx
        self.cy = cy
        self.x = x
        self.y = y
        self.health = health
        self.destroyed = False

    def copy(self) -> "Barrel":
        b = Barrel(self.id, self.cx, self.cy, self.x, self.y, self.health)
        b.destroyed = self.destroyed
        return b


class Counters:
    """Per-player event counters; every stats table column derives from these."""

    __slots__ = (
        "kills", "suicides", "deaths", "attacks", "attacks_visible",
        "attacks_damaging", "hits_taken", "damage_taken_hp", "picked_ammo",
        "picked_medikits", "picked_armors", "alive_tics", "distance_units",
    )

    def __init__(self):
        for name in Counters.__slots__:
            setattr(self, name, 0)

    def copy(self) -> "Counters":
        c = Counters()
        for name in Counters.__slots__:
            setattr(c, name, getattr(self, name))
        return c

    def as_dict(self) -> dict[str, int]:
        return {name: getattr(self, name) for name in Counters.__slots__}

    @classmethod
    def from_dict(cls, d: dict[str, int]) -> "Counters":
        c = cls()
        for name in cls.__slots__:
            setattr(c, name, int(d[name]))
        return c

    def __eq__(self, other) -> bool:
        if not isinstance(other, Counters):
            return NotImplemented
        return all(getattr(self, n) == getattr(other, n) for n in Counters.__slots__)

    def __repr__(self) -> str:
        fields = ", ".join(f"{n}={getattr(self, n)}" for n in Counters.__slots__)
        return f"Counters({fields})"
