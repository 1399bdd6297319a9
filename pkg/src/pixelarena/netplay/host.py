"""Lockstep match host: TCP server, tic collection (blocking in sync mode,
35 Hz deadlines in async mode), hash checkpointing, and bridge hooks.

All protocol handling runs on one asyncio loop, so per-session message
handling is totally ordered. Slot layout: remote TCP peers join slots
0..n_remote-1 in connect order, then any websocket ("virtual") players,
then host-side bots.
"""
from __future__ import annotations

import asyncio
import logging
import time
from dataclasses import dataclass, field

from ..bots import make_brain
from ..deathmatch import MatchRunner
from ..scenario import BUTTON_MASK_ALL, Mode, ScenarioConfig, serialize_config
from ..sim import EMPTY_ACTION, state_hash
from ..stats import PlayerStats
from . import protocol as proto

log = logging.getLogger(__name__)

TICRATE = 35.0
HASH_INTERVAL = 35
MAX_PLAYERS = 16
DEFAULT_PORT = 5029


@dataclass
class DesyncReport:
    tic: int
    player_id: int
    expected: int
    actual: int


@dataclass
class HostReport:
    final_tic: int
    counters: list
    final_hash: int
    realized_tic_rate: float
    missed_tics: dict[int, int]
    desync: DesyncReport | None
    end_reason: str
    names: list[str] = field(default_factory=list)


class _Peer:
    def __init__(self, pid: int, name: str, writer: asyncio.StreamWriter | None):
        self.pid = pid
        self.name = name
        self.writer = writer
        self.connected = True
        self.ready = False
        self.actions: dict[int, tuple[int, int]] = {}
        self.missed = 0
        self.late = 0


class HostSession:
    """One hosted match. `n_remote` TCP slots, `n_virtual` websocket slots,
    plus one slot per bot spec."""

    def __init__(self, cfg: ScenarioConfig, n_remote: int = 0,
                 bot_specs: list[str] | None = None, n_virtual: int = 0,
                 duration_tics: int = 21000, port: int = DEFAULT_PORT,
                 recorder=None):
        bot_specs = bot_specs or []
        total = n_remote + n_virtual + len(bot_specs)
        if not 1 <= total <= MAX_PLAYERS:
            raise ValueError(f"player count {total} out of range 1..{MAX_PLAYERS}")
        self.cfg = cfg.copy()
        self.cfg.num_players = total
        self.cfg.map_grid = cfg.map_grid
        self.n_remote = n_remote
        self.n_virtual = n_virtual
        self.bot_specs = bot_specs
        self.duration = duration_tics
        self.port = port
        self.recorder = recorder
        self.sync = cfg.mode in (Mode.SYNC_PLAYER, Mode.SYNC_SPECTATOR)

        brains = [None] * (n_remote + n_virtual) + [
            make_brain(spec, self.cfg.seed, n_remote + n_virtual + i, cfg.map_grid)
            for i, spec in enumerate(bot_specs)
        ]
        self.runner = MatchRunner(self.cfg, brains, recorder=recorder)
        self.world = self.runner.world
        self.peers: dict[int, _Peer] = {}
        self.virtual: dict[int, _Peer] = {
            n_remote + i: _Peer(n_remote + i, f"ws_{i}", None) for i in range(n_virtual)
        }
        self._next_slot = 0
        self._cond = asyncio.Condition()
        self._server: asyncio.base_events.Server | None = None
        self.desync: DesyncReport | None = None
        self.hash_history: dict[int, int] = {}
        self.on_tic_hooks: list = []  # callables (world, actions, events)
        self._tic_times: list[float] = []
        self.started = asyncio.Event()
        self.finished = asyncio.Event()

    # -- connection handling ------------------------------------------------

    async def _handle_conn(self, reader: asyncio.StreamReader,
                           writer: asyncio.StreamWriter) -> None:
        decoder = proto.FrameDecoder()
        peer: _Peer | None = None
        try:
            while True:
                data = await reader.read(65536)
                if not data:
                    break
                try:
                    msgs = decoder.feed(data)
                except proto.ProtocolError as e:
                    log.warning("protocol error from %s: %s", peer and peer.name, e)
                    writer.write(proto.encode(proto.Bye(proto.BYE_PROTOCOL)))
                    await writer.drain()
                    break
                for msg in msgs:
                    if peer is None:
                        peer = await self._on_hello(msg, writer)
                        if peer is None:
                            return
                    else:
                        await self._on_message(peer, msg)
        except (ConnectionResetError, BrokenPipeError):
            pass
        finally:
            if peer is not None:
                peer.connected = False
                async with self._cond:
                    self._cond.notify_all()
            writer.close()

    async def _on_hello(self, msg, writer) -> _Peer | None:
        if not isinstance(msg, proto.Hello):
            writer.write(proto.encode(proto.Bye(proto.BYE_PROTOCOL)))
            await writer.drain()
            writer.close()
            return None
        if msg.proto != proto.PROTO_VERSION:
            writer.write(proto.encode(proto.Bye(proto.BYE_VERSION)))
            await writer.drain()
            writer.close()
            return None
        if self._next_slot >= self.n_remote:
            writer.write(proto.encode(proto.Bye(proto.BYE_FULL)))
            await writer.drain()
            writer.close()
            return None
        pid = self._next_slot
        self._next_slot += 1
        peer = _Peer(pid, msg.name or f"player_{pid}", writer)
        self.peers[pid] = peer
        writer.write(proto.encode(proto.Welcome(
            pid, self.cfg.seed, serialize_config(self.cfg), self.cfg.map_grid.text)))
        await writer.drain()
        return peer

    async def _on_message(self, peer: _Peer, msg) -> None:
        if isinstance(msg, proto.Ready):
            peer.ready = True
            async with self._cond:
                self._cond.notify_all()
        elif isinstance(msg, proto.ActionMsg):
            if msg.tic <= self.world.tic:
                peer.late += 1
                return
            peer.actions[msg.tic] = (msg.buttons & BUTTON_MASK_ALL, msg.turn_delta)
            async with self._cond:
                self._cond.notify_all()
        elif isinstance(msg, proto.HashMsg):
            if msg.tic > self.world.tic:
                log.warning("hash for future tic %d from %s", msg.tic, peer.name)
                await self._kick(peer, proto.BYE_PROTOCOL)
                return
            expected = self.hash_history.get(msg.tic)
            if expected is not None and expected != msg.value:
                self.desync = DesyncReport(msg.tic, peer.pid, expected, msg.value)
                async with self._cond:
                    self._cond.notify_all()
        elif isinstance(msg, proto.Bye):
            peer.connected = False
            async with self._cond:
                self._cond.notify_all()

    async def _kick(self, peer: _Peer, reason: int) -> None:
        peer.connected = False
        if peer.writer is not None:
            try:
                peer.writer.write(proto.encode(proto.Bye(reason)))
                await peer.writer.drain()
            except (ConnectionResetError, BrokenPipeError):
                pass
        async with self._cond:
            self._cond.notify_all()

    # -- virtual (websocket) players ----------------------------------------

    def submit_virtual(self, pid: int, action: tuple[int, int]) -> None:
        """Register a websocket player's input for the next tic."""
        peer = self.virtual.get(pid)
        if peer is None:
            raise KeyError(f"slot {pid} is not a virtual slot")
        peer.actions[self.world.tic + 1] = (action[0] & BUTTON_MASK_ALL, int(action[1]))

    # -- match loop ----------------------------------------------------------

    async def _wait_joined(self) -> None:
        async with self._cond:
            while not (len(self.peers) >= self.n_remote
                       and all(p.ready for p in self.peers.values())):
                await self._cond.wait()

    async def _collect(self, tic: int, deadline: float | None) -> dict[int, tuple[int, int]]:
        external: dict[int, tuple[int, int]] = {}
        if self.sync:
            async with self._cond:
                while True:
                    if self.desync is not None:
                        return external
                    pending = [p for p in self.peers.values()
                               if p.connected and tic not in p.actions]
                    if not pending:
                        break
                    await self._cond.wait()
        else:
            # Constant 35 Hz: the engine waits for the deadline even when all
            # actions arrived early; whoever missed it gets the empty action.
            loop = asyncio.get_running_loop()
            while True:
                if self.desync is not None:
                    return external
                remaining = deadline - loop.time()
                if remaining <= 0:
                    break
                async with self._cond:
                    try:
                        await asyncio.wait_for(self._cond.wait(), timeout=remaining)
                    except asyncio.TimeoutError:
                        pass
            for p in self.peers.values():
                if p.connected and tic not in p.actions:
                    p.missed += 1
        for p in self.peers.values():
            external[p.pid] = p.actions.pop(tic, EMPTY_ACTION)
        for p in self.virtual.values():
            external[p.pid] = p.actions.pop(tic, EMPTY_ACTION)
        return external

    async def _broadcast(self, data: bytes) -> None:
        for p in self.peers.values():
            if p.connected and p.writer is not None:
                try:
                    p.writer.write(data)
                    await p.writer.drain()
                except (ConnectionResetError, BrokenPipeError):
                    p.connected = False

    async def run(self) -> HostReport:
        if self.n_remote:
            self._server = await asyncio.start_server(
                self._handle_conn, host="127.0.0.1", port=self.port)
            await self._wait_joined()
        self.started.set()
        loop = asyncio.get_running_loop()
        t0 = loop.time()
        end_reason = "timeout"
        try:
            while self.world.tic < self.duration:
                tic = self.world.tic + 1
                deadline = None if self.sync else t0 + tic / TICRATE
                external = await self._collect(tic, deadline)
                if self.desync is not None:
                    end_reason = "desync"
                    await self._broadcast(proto.encode(proto.Bye(proto.BYE_DESYNC)))
                    break
                actions = self.runner.actions_for_tic(external)
                await self._broadcast(proto.encode(proto.TicBatch(tic, tuple(actions))))
                events = self.runner.tick(actions=actions)
                self._tic_times.append(loop.time())
                if tic % HASH_INTERVAL == 0:
                    self.hash_history[tic] = state_hash(self.world)
                for hook in self.on_tic_hooks:
                    hook(self.world, actions, events)
                if self.runner.finished(self.duration):
                    end_reason = self.runner.end_reason or "timeout"
                    break
            else:
                end_reason = "timeout"
        finally:
            if self.desync is None:
                await self._broadcast(proto.encode(proto.Bye(proto.BYE_NORMAL)))
            if self._server is not None:
                self._server.close()
                await self._server.wait_closed()
            if self.recorder is not None and not self.recorder.finished:
                self.recorder.finish(self.world)
            self.finished.set()

        rate = 0.0
        if len(self._tic_times) > 1:
            rate = (len(self._tic_times) - 1) / (self._tic_times[-1] - self._tic_times[0])
        return HostReport(
            final_tic=self.world.tic,
            counters=[c.copy() for c in self.world.counters],
            final_hash=state_hash(self.world),
            realized_tic_rate=rate,
            missed_tics={p.pid: p.missed for p in self.peers.values()},
            desync=self.desync,
            end_reason=end_reason,
            names=self.player_names(),
        )

    def player_names(self) -> list[str]:
        names = []
        for pid in range(self.world.n_players):
            if pid in self.peers:
                names.append(self.peers[pid].name)
            elif pid in self.virtual:
                names.append(self.virtual[pid].name)
            else:
                bi = pid - self.n_remote - self.n_virtual
                names.append(f"{self.bot_specs[bi].partition(':')[0]}_{pid}")
        return names

    def scoreboard(self) -> dict:
        rows = []
        names = self.player_names()
        for pid in range(self.world.n_players):
            c = self.world.counters[pid]
            s = PlayerStats(names[pid], c)
            rows.append({
                "id": pid, "name": names[pid], "frags": s.frags,
                "kills": c.kills, "suicides": c.suicides, "deaths": c.deaths,
                "alive": self.world.actors[pid].alive,
            })
        rows.sort(key=lambda r: (-r["frags"], r["deaths"], r["id"]))
        return {"tic": self.world.tic, "players": rows}
