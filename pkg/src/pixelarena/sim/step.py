"""One fixed 1/35 s simulation tic.

Phase order within a tic is fixed and part of the determinism contract:
(1) player inputs in ascending id (turn, weapon select, fire, move),
(2) projectiles in ascending id, (3) item pickups then item respawns,
(4) respawn eligibility and alive-time accounting.

The `enemy_visible` flag of an Attack is evaluated against actor positions
captured at the start of the tic (before anyone moved), with the shooter's
current facing. A bot deciding from the previous tic's state therefore knows
exactly what the flag will be, which is what makes a perfect-detection
baseline bot constructible.
"""
from __future__ import annotations

from ..events import Attack, Damage, Death, Pickup
from ..fixmath import ANG_90, centideg_to_bam, cos_fx, fx_hypot, fx_mul, sin_fx
from ..scenario import Button, ItemKind, WeaponKind
from .types import Actor, Projectile
from .visibility import CELL_SHIFT, in_fov, segment_clear, wall_ray_distance
from .world import SimContractError, WorldState, respawn_actor

_ATTACK = 1 << Button.ATTACK.value
_FORWARD = 1 << Button.MOVE_FORWARD.value
_BACKWARD = 1 << Button.MOVE_BACKWARD.value
_LEFT = 1 << Button.MOVE_LEFT.value
_RIGHT = 1 << Button.MOVE_RIGHT.value
_TURN_L = 1 << Button.TURN_LEFT.value
_TURN_R = 1 << Button.TURN_RIGHT.value
_SEL_1 = 1 << Button.SELECT_WEAPON_1.value
_SEL_2 = 1 << Button.SELECT_WEAPON_2.value

_MOVE_BITS = _FORWARD | _BACKWARD | _LEFT | _RIGHT

EMPTY_ACTION = (0, 0)

_PISTOL = int(WeaponKind.PISTOL)
_ROCKET_LAUNCHER = int(WeaponKind.ROCKET_LAUNCHER)


def visibility_test(world: WorldState, observer_id: int, target_id: int) -> bool:
    """True iff the target is alive, within the observer's 90-degree FOV, and
    the observer-to-target segment crosses no wall."""
    obs = world.actors[observer_id]
    tgt = world.actors[target_id]
    if not tgt.alive:
        return False
    rx = tgt.x - obs.x
    ry = tgt.y - obs.y
    if not in_fov(cos_fx(obs.angle), sin_fx(obs.angle), rx, ry):
        return False
    return segment_clear(world.walls, world.gw, obs.x, obs.y, tgt.x, tgt.y)


def _any_enemy_visible(world: WorldState, shooter: Actor, pre) -> bool:
    cos_a = cos_fx(shooter.angle)
    sin_a = sin_fx(shooter.angle)
    walls = world.walls
    gw = world.gw
    sx = shooter.x
    sy = shooter.y
    sid = shooter.id
    for i, (px, py, alive) in enumerate(pre):
        if not alive or i == sid:
            continue
        rx = px - sx
        ry = py - sy
        if in_fov(cos_a, sin_a, rx, ry) and segment_clear(walls, gw, sx, sy, px, py):
            return True
    return False


def resolve_damage(world: WorldState, victim_id: int, amount: int,
                   attacker_id: int | None, attack_id: int | None,
                   events: list) -> None:
    """Apply damage: armor absorbs floor(amount/3) capped by current armor.
    Damage during the victim's spawn-protection window is dropped entirely."""
    victim = world.actors[victim_id]
    if not victim.alive or amount <= 0:
        return
    if world.tic < victim.protection_until:
        return
    absorb = amount // 3
    if absorb > victim.armor:
        absorb = victim.armor
    victim.armor -= absorb
    victim.health -= amount - absorb
    c = world.counters[victim_id]
    c.hits_taken += 1
    c.damage_taken_hp += amount
    events.append(Damage(victim_id, amount, attacker_id, attack_id))
    if (attack_id is not None and attacker_id is not None
            and attacker_id != victim_id
            and attack_id not in world.damaging_attacks):
        world.damaging_attacks.add(attack_id)
        world.counters[attacker_id].attacks_damaging += 1
    if victim.health <= 0:
        victim.health = 0
        victim.alive = False
        victim.respawn_at = world.tic + max(1, world.cfg.respawn_delay)
        c.deaths += 1
        if attacker_id is None or attacker_id == victim_id:
            c.suicides += 1
        else:
            world.counters[attacker_id].kills += 1
        events.append(Death(victim_id, attacker_id))


def _damage_barrel(world, barrel, amount, attacker_id, attack_id, explosions) -> None:
    if barrel.destroyed:
        return
    barrel.health -= amount
    if barrel.health <= 0:
        barrel.health = 0
        barrel.destroyed = True
        explosions.append((barrel.x, barrel.y, attacker_id, attack_id))


def _explode(world: WorldState, ex: int, ey: int, attacker_id, attack_id, events, explosions) -> None:
    """Linear-falloff area damage. Range is measured to the target's edge
    (center distance minus its radius), so a blast one cell away still grazes
    an adjacent barrel. Walls block blasts."""
    t = world.tuning
    radius_fx = t.blast_radius << 16
    dmg_max = t.blast_damage
    walls = world.walls
    gw = world.gw
    ar = t.actor_radius << 16
    br = t.barrel_radius << 16
    for a in world.actors:
        if not a.alive:
            continue
        d = fx_hypot(a.x - ex, a.y - ey) - ar
        if d < 0:
            d = 0
        if d >= radius_fx:
            continue
        if d and not segment_clear(walls, gw, ex, ey, a.x, a.y):
            continue
        dmg = dmg_max - (d * dmg_max) // radius_fx
        if dmg > 0:
            resolve_damage(world, a.id, dmg, attacker_id, attack_id, events)
    for b in world.barrels:
        if b.destroyed:
            continue
        d = fx_hypot(b.x - ex, b.y - ey) - br
        if d < 0:
            d = 0
        if d >= radius_fx:
            continue
        if d and not segment_clear(walls, gw, ex, ey, b.x, b.y):
            continue
        dmg = dmg_max - (d * dmg_max) // radius_fx
        if dmg > 0:
            _damage_barrel(world, b, dmg, attacker_id, attack_id, explosions)


def _run_explosions(world, explosions, events) -> None:
    # FIFO so barrel chains resolve in a deterministic order.
    i = 0
    while i < len(explosions):
        ex, ey, attacker_id, attack_id = explosions[i]
        i += 1
        _explode(world, ex, ey, attacker_id, attack_id, events, explosions)


def _ray_square_hit(sx, sy, dirx, diry, tx, ty, half, limit):
    """Entry distance (raw fx) of a ray into an axis-aligned square, or None.

    The ray direction is a 16.16 unit vector; `limit` caps the search (the
    wall-hit distance)."""
    rx = tx - sx
    ry = ty - sy
    if dirx == 0:
        if rx - half >= 0 or rx + half <= 0:
            return None
        tmin_x = None
    else:
        t1 = ((rx - half) << 16) // dirx
        t2 = ((rx + half) << 16) // dirx
        if t1 > t2:
            t1, t2 = t2, t1
        tmin_x, tmax_x = t1, t2
    if diry == 0:
        if ry - half >= 0 or ry + half <= 0:
            return None
        tmin_y = None
    else:
        t1 = ((ry - half) << 16) // diry
        t2 = ((ry + half) << 16) // diry
        if t1 > t2:
            t1, t2 = t2, t1
        tmin_y, tmax_y = t1, t2

    if tmin_x is None:
        entry, exit_ = tmin_y, tmax_y
    elif tmin_y is None:
        entry, exit_ = tmin_x, tmax_x
    else:
        entry = tmin_x if tmin_x > tmin_y else tmin_y
        exit_ = tmax_x if tmax_x < tmax_y else tmax_y
    if entry > exit_ or exit_ < 0:
        return None
    hit = entry if entry > 0 else 0
    if hit >= limit:
        return None
    return hit


def _hitscan(world: WorldState, shooter: Actor, attack_id: int, events: list) -> None:
    t = world.tuning
    rng = world.rng
    spread = t.pistol_spread_centideg
    offset = rng.below(2 * spread + 1) - spread
    damage = t.pistol_damage_base * (1 + rng.below(t.pistol_damage_steps))
    angle = (shooter.angle + centideg_to_bam(offset)) & 0xFFFFFFFF
    dirx = cos_fx(angle)
    diry = sin_fx(angle)
    wall_d = wall_ray_distance(world.walls, world.gw, shooter.x, shooter.y, dirx, diry)

    best_t = None
    best_actor = None
    ar = t.actor_radius << 16
    for a in world.actors:
        if not a.alive or a.id == shooter.id:
            continue
        hit = _ray_square_hit(shooter.x, shooter.y, dirx, diry, a.x, a.y, ar, wall_d)
        if hit is not None and (best_t is None or hit < best_t):
            best_t = hit
            best_actor = a
    best_barrel = None
    br = t.barrel_radius << 16
    for b in world.barrels:
        if b.destroyed:
            continue
        hit = _ray_square_hit(shooter.x, shooter.y, dirx, diry, b.x, b.y, br, wall_d)
        if hit is not None and (best_t is None or hit < best_t):
            best_t = hit
            best_actor = None
            best_barrel = b

    if best_actor is not None:
        resolve_damage(world, best_actor.id, damage, shooter.id, attack_id, events)
    elif best_barrel is not None:
        explosions: list = []
        _damage_barrel(world, best_barrel, damage, shooter.id, attack_id, explosions)
        _run_explosions(world, explosions, events)


def fire_weapon(world: WorldState, actor_id: int, events: list, pre=None) -> None:
    """Fire the selected weapon if the cooldown is over and ammo remains;
    silently a no-op otherwise."""
    a = world.actors[actor_id]
    if not a.alive or a.cooldown > 0:
        return
    t = world.tuning
    if a.selected == _ROCKET_LAUNCHER:
        if a.rockets <= 0:
            return
        a.rockets -= 1
        a.cooldown = t.rocket_cooldown
    else:
        if a.bullets <= 0:
            return
        a.bullets -= 1
        a.cooldown = t.pistol_cooldown

    if pre is None:
        pre = [(o.x, o.y, o.alive) for o in world.actors]
    attack_id = world.next_attack_id
    world.next_attack_id += 1
    visible = _any_enemy_visible(world, a, pre)
    c = world.counters[actor_id]
    c.attacks += 1
    if visible:
        c.attacks_visible += 1
    events.append(Attack(actor_id, attack_id, visible))

    if a.selected == _ROCKET_LAUNCHER:
        speed_sub = (t.rocket_speed << 16) >> 2  # four sub-steps per tic
        vx = fx_mul(speed_sub, cos_fx(a.angle))
        vy = fx_mul(speed_sub, sin_fx(a.angle))
        p = Projectile(world.next_projectile_id, actor_id, a.x, a.y, vx, vy, attack_id)
        world.next_projectile_id += 1
        world.projectiles.append(p)
    else:
        _hitscan(world, a, attack_id, events)


def _blocked(world: WorldState, actor: Actor, x: int, y: int) -> bool:
    t = world.tuning
    r = t.actor_radius << 16
    walls = world.walls
    gw = world.gw
    cx0 = (x - r) >> CELL_SHIFT
    cx1 = (x + r - 1) >> CELL_SHIFT
    cy0 = (y - r) >> CELL_SHIFT
    cy1 = (y + r - 1) >> CELL_SHIFT
    for cy in range(cy0, cy1 + 1):
        row = cy * gw
        for cx in range(cx0, cx1 + 1):
            if walls[row + cx]:
                return True
    br = (t.actor_radius + t.barrel_radius) << 16
    for b in world.barrels:
        if b.destroyed:
            continue
        if abs(x - b.x) < br and abs(y - b.y) < br:
            if not (abs(actor.x - b.x) < br and abs(actor.y - b.y) < br):
                return True
    rr = (2 * t.actor_radius) << 16
    for o in world.actors:
        if o.id == actor.id or not o.alive:
            continue
        if abs(x - o.x) < rr and abs(y - o.y) < rr:
            if not (abs(actor.x - o.x) < rr and abs(actor.y - o.y) < rr):
                return True
    return False


def _move(world: WorldState, a: Actor, buttons: int) -> None:
    t = world.tuning
    mf = 0
    ms = 0
    if buttons & _FORWARD:
        mf += t.forward_speed
    if buttons & _BACKWARD:
        mf -= t.backward_speed
    if buttons & _RIGHT:
        ms += t.strafe_speed
    if buttons & _LEFT:
        ms -= t.strafe_speed
    if mf == 0 and ms == 0:
        a.last_dx = 0
        a.last_dy = 0
        return
    dx = 0
    dy = 0
    if mf:
        dx += fx_mul(mf << 16, cos_fx(a.angle))
        dy += fx_mul(mf << 16, sin_fx(a.angle))
    if ms:
        side = (a.angle + ANG_90) & 0xFFFFFFFF
        dx += fx_mul(ms << 16, cos_fx(side))
        dy += fx_mul(ms << 16, sin_fx(side))

    # Axis-separated slide: x first, then y.
    nx = a.x
    if dx and not _blocked(world, a, a.x + dx, a.y):
        nx = a.x + dx
    ny = a.y
    if dy and not _blocked(world, a, nx, a.y + dy):
        ny = a.y + dy
    adx = nx - a.x
    ady = ny - a.y
    a.x = nx
    a.y = ny
    a.last_dx = adx
    a.last_dy = ady
    if adx or ady:
        d = fx_hypot(adx, ady)
        a.dist_life += d
        world.counters[a.id].distance_units += d


def _pickup(world: WorldState, a: Actor, events: list) -> None:
    ci = (a.y >> CELL_SHIFT) * world.gw + (a.x >> CELL_SHIFT)
    idx = world.item_at.get(ci)
    if idx is None:
        return
    t = world.tuning
    it = world.items[idx]
    kind = it.kind
    c = world.counters[a.id]
    if kind == ItemKind.MEDIKIT:
        if a.health >= t.max_health:
            return
        a.health = min(t.max_health, a.health + t.medikit_heal)
        c.picked_medikits += 1
    elif kind == ItemKind.ARMOR:
        if a.armor >= t.max_armor:
            return
        a.armor = min(t.max_armor, a.armor + t.armor_bonus)
        c.picked_armors += 1
    elif kind == ItemKind.AMMO_BULLETS:
        if a.bullets >= t.max_bullets:
            return
        a.bullets = min(t.max_bullets, a.bullets + t.ammo_bullets_amount)
        c.picked_ammo += 1
    elif kind == ItemKind.AMMO_ROCKETS:
        if a.rockets >= t.max_rockets:
            return
        a.rockets = min(t.max_rockets, a.rockets + t.ammo_rockets_amount)
        c.picked_ammo += 1
    else:  # WEAPON_ROCKET_LAUNCHER: grants the launcher plus rockets
        if a.owns(_ROCKET_LAUNCHER) and a.rockets >= t.max_rockets:
            return
        a.weapons |= _ROCKET_LAUNCHER
        a.rockets = min(t.max_rockets, a.rockets + t.weapon_pickup_rockets)
        c.picked_ammo += 1
    it.respawn_at = world.tic + t.item_respawn_tics
    del world.item_at[ci]
    events.append(Pickup(a.id, kind))


def step(world: WorldState, actions) -> list:
    """Advance the world by one tic. Mutates `world`; returns the events.

    `actions` is one (buttons_mask, turn_centideg) pair per player slot,
    dead slots included. Identical (world, actions) always produce an
    identical post-state; see state_hash.
    """
    actors = world.actors
    if len(actions) != len(actors):
        raise SimContractError(
            f"expected {len(actors)} actions, got {len(actions)}")
    world.tic = tic = world.tic + 1
    events: list = []
    t = world.tuning
    turn_bam = centideg_to_bam(t.turn_rate_centideg)
    limit = t.turn_delta_limit_centideg

    # Positions at tic start; attack visibility flags are judged against
    # these. Only needed when someone is firing this tic.
    pre = None
    for buttons, _ in actions:
        if buttons & _ATTACK:
            pre = [(a.x, a.y, a.alive) for a in actors]
            break

    # Phase 1: inputs, ascending player id.
    for a in actors:
        if not a.alive:
            continue
        if a.cooldown:
            a.cooldown -= 1
        buttons, turn_cd = actions[a.id]
        if buttons & _TURN_L:
            a.angle = (a.angle - turn_bam) & 0xFFFFFFFF
        if buttons & _TURN_R:
            a.angle = (a.angle + turn_bam) & 0xFFFFFFFF
        if turn_cd:
            if turn_cd > limit:
                turn_cd = limit
            elif turn_cd < -limit:
                turn_cd = -limit
            a.angle = (a.angle + centideg_to_bam(turn_cd)) & 0xFFFFFFFF
        if buttons & _SEL_1:
            a.selected = _PISTOL if a.owns(_PISTOL) else a.selected
        if buttons & _SEL_2:
            a.selected = _ROCKET_LAUNCHER if a.owns(_ROCKET_LAUNCHER) else a.selected
        if buttons & _ATTACK:
            fire_weapon(world, a.id, events, pre)
        if buttons & _MOVE_BITS:
            _move(world, a, buttons)
        else:
            a.last_dx = 0
            a.last_dy = 0

    # Phase 2: projectiles, ascending id.
    if world.projectiles:
        explosions: list = []
        surviving = []
        walls = world.walls
        gw = world.gw
        ar = t.actor_radius << 16
        br = t.barrel_radius << 16
        for p in world.projectiles:
            exploded = False
            for _ in range(4):
                nx = p.x + p.vx
                ny = p.y + p.vy
                if walls[(ny >> CELL_SHIFT) * gw + (nx >> CELL_SHIFT)]:
                    explosions.append((p.x, p.y, p.owner, p.attack_id))
                    exploded = True
                    break
                hit_entity = False
                for a in actors:
                    if not a.alive or a.id == p.owner:
                        continue
                    if abs(nx - a.x) < ar and abs(ny - a.y) < ar:
                        resolve_damage(world, a.id, t.rocket_direct_damage,
                                       p.owner, p.attack_id, events)
                        explosions.append((nx, ny, p.owner, p.attack_id))
                        hit_entity = True
                        break
                if not hit_entity:
                    for b in world.barrels:
                        if b.destroyed:
                            continue
                        if abs(nx - b.x) < br and abs(ny - b.y) < br:
                            _damage_barrel(world, b, t.rocket_direct_damage,
                                           p.owner, p.attack_id, explosions)
                            explosions.append((nx, ny, p.owner, p.attack_id))
                            hit_entity = True
                            break
                if hit_entity:
                    exploded = True
                    break
                p.x = nx
                p.y = ny
            if exploded:
                _run_explosions(world, explosions, events)
                explosions.clear()
            else:
                surviving.append(p)
        world.projectiles = surviving

    # Phase 3: pickups, then item respawns.
    if world.items:
        for a in actors:
            if a.alive:
                _pickup(world, a, events)
        gw = world.gw
        for idx, it in enumerate(world.items):
            if it.respawn_at and it.respawn_at <= tic:
                it.respawn_at = 0
                world.item_at[it.cy * gw + it.cx] = idx

    # Phase 4: respawn eligibility, then alive-time accounting.
    auto = world.cfg.auto_respawn
    counters = world.counters
    for a in actors:
        if not a.alive and auto and tic >= a.respawn_at:
            respawn_actor(world, a.id, events)
        if a.alive:
            counters[a.id].alive_tics += 1
    return events
