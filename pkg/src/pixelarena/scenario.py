"""Scenario data model and the `.map` / `.cfg` text formats.

A scenario is a character-grid map plus a key=value config. The config
declares the control surface (buttons, game variables), the reward mapping,
terminal conditions, match rules, and optional overrides of the simulation
constants table. See docs/formats.md for the grammar.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path

from .events import Attack, Damage, Death, Pickup
from .options import PixelFormat, RenderOptions


class ScenarioError(ValueError):
    """Raised for malformed maps or configs."""


class Button(IntEnum):
    ATTACK = 0
    MOVE_FORWARD = 1
    MOVE_BACKWARD = 2
    MOVE_LEFT = 3
    MOVE_RIGHT = 4
    TURN_LEFT = 5
    TURN_RIGHT = 6
    SELECT_WEAPON_1 = 7
    SELECT_WEAPON_2 = 8
    TURN_DELTA = 9


#: Binary buttons occupy bit `Button.value` in a wire/replay action mask.
BINARY_BUTTONS = tuple(b for b in Button if b is not Button.TURN_DELTA)
BUTTON_MASK_ALL = sum(1 << b.value for b in BINARY_BUTTONS)


class GameVariable(IntEnum):
    HEALTH = 0
    ARMOR = 1
    SELECTED_WEAPON = 2
    SELECTED_WEAPON_AMMO = 3
    FRAGCOUNT = 4
    KILLCOUNT = 5
    DEATHCOUNT = 6
    HITS_TAKEN = 7
    DAMAGE_TAKEN = 8
    ITEMCOUNT = 9
    POSITION_X = 10
    POSITION_Y = 11
    ANGLE = 12


class Mode(IntEnum):
    SYNC_PLAYER = 0
    SYNC_SPECTATOR = 1
    ASYNC_PLAYER = 2
    ASYNC_SPECTATOR = 3


class WeaponKind(IntEnum):
    PISTOL = 1
    ROCKET_LAUNCHER = 2


class ItemKind(IntEnum):
    MEDIKIT = 1
    ARMOR = 2
    AMMO_BULLETS = 3
    AMMO_ROCKETS = 4
    WEAPON_ROCKET_LAUNCHER = 5


@dataclass(frozen=True, slots=True)
class Tuning:
    """The single table of gameplay constants (all distances in game units,
    all times in tics). 128 units span one map cell and equal 3 meters."""

    cell_size: int = 128
    actor_radius: int = 20
    barrel_radius: int = 10
    forward_speed: int = 10
    backward_speed: int = 8
    strafe_speed: int = 10
    turn_rate_centideg: int = 500
    turn_delta_limit_centideg: int = 1500
    pistol_cooldown: int = 10
    rocket_cooldown: int = 30
    pistol_damage_base: int = 5
    pistol_damage_steps: int = 3
    pistol_spread_centideg: int = 200
    rocket_speed: int = 40
    rocket_direct_damage: int = 80
    blast_damage: int = 80
    blast_radius: int = 128
    medikit_heal: int = 25
    armor_bonus: int = 50
    ammo_bullets_amount: int = 20
    ammo_rockets_amount: int = 10
    weapon_pickup_rockets: int = 10
    max_health: int = 100
    max_armor: int = 100
    max_bullets: int = 200
    max_rockets: int = 50
    barrel_health: int = 20
    item_respawn_tics: int = 1050


_TILE_ITEMS = {
    "M": ItemKind.MEDIKIT,
    "A": ItemKind.ARMOR,
    "a": ItemKind.AMMO_BULLETS,
    "r": ItemKind.AMMO_ROCKETS,
    "R": ItemKind.WEAPON_ROCKET_LAUNCHER,
}
_ITEM_TILES = {v: k for k, v in _TILE_ITEMS.items()}


@dataclass(frozen=True, slots=True)
class MapGrid:
    width: int
    height: int
    walls: bytes  # row-major, 1 = wall
    spawns: tuple[tuple[int, int], ...]
    items: tuple[tuple[ItemKind, int, int], ...]
    barrels: tuple[tuple[int, int], ...]
    text: str  # normalized source, embedded in replays and netplay handshakes

    def is_wall(self, cx: int, cy: int) -> bool:
        if cx < 0 or cy < 0 or cx >= self.width or cy >= self.height:
            return True
        return self.walls[cy * self.width + cx] != 0


def parse_map(text: str) -> MapGrid:
    raw_lines = text.replace("\r\n", "\n").replace("\r", "\n").split("\n")
    while raw_lines and not raw_lines[0].strip():
        raw_lines.pop(0)
    while raw_lines and not raw_lines[-1].strip():
        raw_lines.pop()
    if not raw_lines:
        raise ScenarioError("empty map")

    width = len(raw_lines[0])
    for i, line in enumerate(raw_lines):
        if len(line) != width:
            raise ScenarioError(f"non-rectangular map: line {i + 1}")
    height = len(raw_lines)

    walls = bytearray(width * height)
    spawns: list[tuple[int, int]] = []
    items: list[tuple[ItemKind, int, int]] = []
    barrels: list[tuple[int, int]] = []
    for cy, line in enumerate(raw_lines):
        for cx, ch in enumerate(line):
            if ch == "#":
                walls[cy * width + cx] = 1
            elif ch == ".":
                pass
            elif ch == "S":
                spawns.append((cx, cy))
            elif ch == "B":
                barrels.append((cx, cy))
            elif ch in _TILE_ITEMS:
                items.append((_TILE_ITEMS[ch], cx, cy))
            else:
                raise ScenarioError(f"unknown tile {ch!r} at {cy + 1}:{cx + 1}")

    for cx in range(width):
        if not (walls[cx] and walls[(height - 1) * width + cx]):
            raise ScenarioError("map border must be solid wall")
    for cy in range(height):
        if not (walls[cy * width] and walls[cy * width + width - 1]):
            raise ScenarioError("map border must be solid wall")
    if not spawns:
        raise ScenarioError("map has no spawn points")

    return MapGrid(
        width=width,
        height=height,
        walls=bytes(walls),
        spawns=tuple(spawns),
        items=tuple(items),
        barrels=tuple(barrels),
        text="\n".join(raw_lines) + "\n",
    )


@dataclass(slots=True)
class ScenarioConfig:
    name: str = "scenario"
    map_path: str = ""
    map_grid: MapGrid | None = None
    mode: Mode = Mode.SYNC_PLAYER
    render: RenderOptions = field(default_factory=RenderOptions)
    available_buttons: tuple[Button, ...] = tuple(Button)
    available_game_variables: tuple[GameVariable, ...] = tuple(GameVariable)

    living_reward: float = 0.0
    death_penalty: float = 0.0
    kill_reward: float = 0.0
    suicide_penalty: float = 0.0
    item_reward: float = 0.0
    damage_taken_penalty_per_hp: float = 0.0
    damage_inflicted_reward_per_hp: float = 0.0

    episode_timeout: int = 21000
    frag_limit: int = 0
    episode_ends_on_death: bool = False
    respawn_delay: int = 0
    spawn_protection: int = 70
    auto_respawn: bool = True

    starting_weapons: tuple[WeaponKind, ...] = (WeaponKind.PISTOL,)
    starting_weapon: WeaponKind = WeaponKind.PISTOL
    starting_bullets: int = 50
    starting_rockets: int = 0

    num_players: int = 1
    seed: int = 1
    bots: tuple[str, ...] = ()
    extra_args: str = ""
    tuning: Tuning = field(default_factory=Tuning)

    def validate(self) -> None:
        if self.episode_timeout <= 0 and self.frag_limit <= 0:
            raise ScenarioError("need episode_timeout > 0 or frag_limit > 0")
        if len(set(self.available_buttons)) != len(self.available_buttons):
            raise ScenarioError("duplicate entries in available_buttons")
        if len(set(self.available_game_variables)) != len(self.available_game_variables):
            raise ScenarioError("duplicate entries in available_game_variables")
        if not 1 <= self.num_players <= 16:
            raise ScenarioError("num_players must be in 1..16")
        if self.starting_weapon not in self.starting_weapons:
            raise ScenarioError("starting_weapon not among starting_weapons")
        self.render.validate()

    def player_name(self, default: str = "player") -> str:
        for tok in self.extra_args.split():
            if tok.startswith("+name="):
                return tok[len("+name="):]
        parts = self.extra_args.split()
        for i, tok in enumerate(parts):
            if tok == "+name" and i + 1 < len(parts):
                return parts[i + 1]
        return default

    def copy(self) -> "ScenarioConfig":
        return dataclasses.replace(self)


_BOOL_KEYS = {
    "crosshair", "hud", "depth", "labels", "automap", "automap_full",
    "episode_ends_on_death", "auto_respawn",
}
_INT_KEYS = {
    "screen_width", "screen_height", "episode_timeout", "frag_limit",
    "respawn_delay", "spawn_protection", "starting_bullets", "starting_rockets",
    "num_players", "seed",
}
_FLOAT_KEYS = {
    "living_reward", "death_penalty", "kill_reward", "suicide_penalty",
    "item_reward", "damage_taken_penalty_per_hp", "damage_inflicted_reward_per_hp",
}
_LIST_KEYS = {"available_buttons", "available_game_variables", "starting_weapons", "bots"}
_TUNING_FIELDS = {f.name: f for f in dataclasses.fields(Tuning)}


def _parse_bool(key: str, v: str) -> bool:
    lo = v.lower()
    if lo in ("true", "1", "yes", "on"):
        return True
    if lo in ("false", "0", "no", "off"):
        return False
    raise ScenarioError(f"key '{key}': expected a boolean, got {v!r}")


def _parse_num(key: str, v: str, kind):
    try:
        return kind(v)
    except ValueError:
        raise ScenarioError(f"key '{key}': expected {kind.__name__}, got {v!r}") from None


def _tokenize(text: str) -> list[tuple[str, str]]:
    """Yield (key, value) pairs; '#' starts a comment, '{ ... }' may span lines."""
    pairs: list[tuple[str, str]] = []
    pending_key: str | None = None
    pending_val: list[str] = []
    for lineno, raw in enumerate(text.replace("\r\n", "\n").split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if pending_key is not None:
            if "}" in line:
                body, _, tail = line.partition("}")
                if tail.strip():
                    raise ScenarioError(f"line {lineno}: trailing text after '}}'")
                pending_val.append(body)
                pairs.append((pending_key, " ".join(pending_val)))
                pending_key, pending_val = None, []
            else:
                pending_val.append(line)
            continue
        if "=" not in line:
            raise ScenarioError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if value.startswith("{"):
            value = value[1:].strip()
            if value.endswith("}"):
                pairs.append((key, value[:-1].strip()))
            else:
                pending_key = key
                pending_val = [value] if value else []
        else:
            pairs.append((key, value))
    if pending_key is not None:
        raise ScenarioError(f"unterminated '{{' block for key '{pending_key}'")
    return pairs


def _enum_value(key: str, enum_cls, token: str):
    try:
        return enum_cls[token]
    except KeyError:
        raise ScenarioError(f"key '{key}': unknown name {token!r}") from None


def parse_config(text: str) -> ScenarioConfig:
    cfg = ScenarioConfig()
    render_kw: dict[str, object] = {}
    tuning_kw: dict[str, int] = {}

    for key, value in _tokenize(text):
        if key == "map":
            cfg.map_path = value
        elif key == "name":
            cfg.name = value
        elif key == "mode":
            cfg.mode = _enum_value(key, Mode, value)
        elif key == "format":
            render_kw["format"] = _enum_value(key, PixelFormat, value)
        elif key == "screen_width":
            render_kw["width"] = _parse_num(key, value, int)
        elif key == "screen_height":
            render_kw["height"] = _parse_num(key, value, int)
        elif key in ("crosshair", "hud", "automap_full"):
            render_kw[key] = _parse_bool(key, value)
        elif key == "depth":
            render_kw["depth_enabled"] = _parse_bool(key, value)
        elif key == "labels":
            render_kw["labels_enabled"] = _parse_bool(key, value)
        elif key == "automap":
            render_kw["automap_enabled"] = _parse_bool(key, value)
        elif key == "starting_weapon":
            cfg.starting_weapon = _enum_value(key, WeaponKind, value)
        elif key == "args":
            cfg.extra_args = value
        elif key in _FLOAT_KEYS:
            setattr(cfg, key, _parse_num(key, value, float))
        elif key in _INT_KEYS:
            setattr(cfg, key, _parse_num(key, value, int))
        elif key in _BOOL_KEYS:
            setattr(cfg, key, _parse_bool(key, value))
        elif key in _LIST_KEYS:
            tokens = value.split()
            if key == "available_buttons":
                cfg.available_buttons = tuple(_enum_value(key, Button, t) for t in tokens)
            elif key == "available_game_variables":
                cfg.available_game_variables = tuple(
                    _enum_value(key, GameVariable, t) for t in tokens
                )
            elif key == "starting_weapons":
                cfg.starting_weapons = tuple(_enum_value(key, WeaponKind, t) for t in tokens)
            else:
                cfg.bots = tuple(tokens)
        elif key.startswith("const_"):
            fname = key[len("const_"):]
            if fname not in _TUNING_FIELDS:
                raise ScenarioError(f"unknown key '{key}'")
            tuning_kw[fname] = _parse_num(key, value, int)
        else:
            raise ScenarioError(f"unknown key '{key}'")

    if render_kw:
        cfg.render = dataclasses.replace(RenderOptions(), **render_kw)
    if tuning_kw:
        cfg.tuning = dataclasses.replace(Tuning(), **tuning_kw)
    cfg.validate()
    return cfg


def serialize_config(cfg: ScenarioConfig) -> str:
    """Emit a config text that parses back to an equal config."""
    r = cfg.render
    t = cfg.tuning
    lines = [
        f"name = {cfg.name}",
        f"map = {cfg.map_path}" if cfg.map_path else None,
        f"mode = {cfg.mode.name}",
        f"screen_width = {r.width}",
        f"screen_height = {r.height}",
        f"format = {r.format.value}",
        f"crosshair = {str(r.crosshair).lower()}",
        f"hud = {str(r.hud).lower()}",
        f"depth = {str(r.depth_enabled).lower()}",
        f"labels = {str(r.labels_enabled).lower()}",
        f"automap = {str(r.automap_enabled).lower()}",
        f"automap_full = {str(r.automap_full).lower()}",
        "available_buttons = { " + " ".join(b.name for b in cfg.available_buttons) + " }",
        "available_game_variables = { "
        + " ".join(v.name for v in cfg.available_game_variables) + " }",
    ]
    for key in sorted(_FLOAT_KEYS):
        lines.append(f"{key} = {getattr(cfg, key)!r}")
    for key in sorted(_INT_KEYS - {"screen_width", "screen_height"}):
        lines.append(f"{key} = {getattr(cfg, key)}")
    for key in ("episode_ends_on_death", "auto_respawn"):
        lines.append(f"{key} = {str(getattr(cfg, key)).lower()}")
    lines.append("starting_weapons = { " + " ".join(w.name for w in cfg.starting_weapons) + " }")
    lines.append(f"starting_weapon = {cfg.starting_weapon.name}")
    if cfg.bots:
        lines.append("bots = { " + " ".join(cfg.bots) + " }")
    if cfg.extra_args:
        lines.append(f"args = {cfg.extra_args}")
    default_t = Tuning()
    for fname in _TUNING_FIELDS:
        v = getattr(t, fname)
        if v != getattr(default_t, fname):
            lines.append(f"const_{fname} = {v}")
    return "\n".join(l for l in lines if l is not None) + "\n"


def load_scenario(cfg_path: str | Path) -> ScenarioConfig:
    """Parse a config file and attach the map it references."""
    cfg_path = Path(cfg_path)
    cfg = parse_config(cfg_path.read_text())
    if not cfg.map_path:
        raise ScenarioError(f"{cfg_path}: config does not name a map")
    map_file = Path(cfg.map_path)
    if not map_file.is_absolute():
        map_file = cfg_path.parent / map_file
    cfg.map_grid = parse_map(map_file.read_text())
    return cfg


def attach_map(cfg: ScenarioConfig, map_text: str) -> ScenarioConfig:
    cfg.map_grid = parse_map(map_text)
    return cfg


def reward_for(events, cfg: ScenarioConfig, player_id: int) -> float:
    """Scalar reward for one player over one tic's events."""
    total = cfg.living_reward
    for ev in events:
        if isinstance(ev, Death):
            if ev.victim == player_id:
                total -= cfg.death_penalty
                if ev.killer is None or ev.killer == ev.victim:
                    total -= cfg.suicide_penalty
            elif ev.killer == player_id:
                total += cfg.kill_reward
        elif isinstance(ev, Pickup):
            if ev.actor == player_id:
                total += cfg.item_reward
        elif isinstance(ev, Damage):
            if ev.victim == player_id:
                total -= cfg.damage_taken_penalty_per_hp * ev.amount
            elif ev.attacker == player_id:
                total += cfg.damage_inflicted_reward_per_hp * ev.amount
        elif isinstance(ev, Attack):
            pass
    return total
