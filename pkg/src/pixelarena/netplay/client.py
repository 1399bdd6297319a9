"""Lockstep client: joins a host, mirrors the simulation from the scenario
blob, feeds a bot brain, and reports hash checkpoints.
"""
from __future__ import annotations

import asyncio
import logging
from dataclasses import dataclass

from ..bots import make_brain
from ..deathmatch import build_observation
from ..scenario import attach_map, parse_config
from ..sim import EMPTY_ACTION, WorldState, state_hash, step
from . import protocol as proto
from .host import HASH_INTERVAL

log = logging.getLogger(__name__)


@dataclass
class ClientReport:
    player_id: int
    final_tic: int
    final_hash: int
    bye_reason: int | None


class JoinError(Exception):
    pass


async def join_match(host: str, port: int, name: str, bot_spec: str = "fighter",
                     tic_delay: float = 0.0, fault_tic: int | None = None) -> ClientReport:
    """Join and play a hosted match with a bot brain.

    `tic_delay` sleeps before every action submission (a deliberately slow
    client misses tics in async mode). `fault_tic` perturbs the local world
    at that tic to exercise desync detection.
    """
    reader, writer = await asyncio.open_connection(host, port)
    decoder = proto.FrameDecoder()
    world: WorldState | None = None
    brain = None
    pid = -1
    bye: int | None = None

    async def send(msg) -> None:
        writer.write(proto.encode(msg))
        await writer.drain()

    async def act_and_send(tic: int) -> None:
        if tic_delay:
            await asyncio.sleep(tic_delay)
        a = world.actors[pid]
        action = brain.act(build_observation(world, pid)) if a.alive else EMPTY_ACTION
        await send(proto.ActionMsg(tic, action[0], action[1]))

    await send(proto.Hello(proto.PROTO_VERSION, name))
    try:
        done = False
        while not done:
            data = await reader.read(65536)
            if not data:
                break
            for msg in decoder.feed(data):
                if isinstance(msg, proto.Welcome):
                    pid = msg.player_id
                    cfg = parse_config(msg.config_text)
                    attach_map(cfg, msg.map_text)
                    cfg.seed = msg.seed
                    world = WorldState(cfg, n_players=cfg.num_players)
                    brain = make_brain(bot_spec, cfg.seed, pid, cfg.map_grid)
                    await send(proto.Ready())
                    await act_and_send(1)
                elif isinstance(msg, proto.TicBatch):
                    if world is None:
                        raise JoinError("TICBATCH before WELCOME")
                    if msg.tic != world.tic + 1:
                        raise JoinError(
                            f"lockstep violated: batch {msg.tic} at local tic {world.tic}")
                    step(world, list(msg.actions))
                    if fault_tic is not None and world.tic == fault_tic:
                        world.actors[pid].health += 1  # injected divergence
                    if world.tic % HASH_INTERVAL == 0:
                        await send(proto.HashMsg(world.tic, state_hash(world)))
                    await act_and_send(world.tic + 1)
                elif isinstance(msg, proto.Bye):
                    bye = msg.reason
                    done = True
                    break
    finally:
        writer.close()
    if world is None:
        raise JoinError("connection closed before WELCOME (match full?)"
                        if bye is None else f"rejected by host (reason {bye})")
    return ClientReport(pid, world.tic, state_hash(world), bye)
