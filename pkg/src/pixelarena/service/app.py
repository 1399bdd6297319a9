"""FastAPI service wrapping the arena: environment sessions over HTTP,
match hosting, the websocket spectator bridge, benchmarks, and replay
statistics. The CLI is a thin client of this service for the long-running
surfaces; batch work (tournaments, replay export) runs in-process.
"""
from __future__ import annotations

import asyncio
import base64
import dataclasses
import logging
import struct
from pathlib import Path

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.responses import Response
from fastapi.staticfiles import StaticFiles

from .. import ffi
from ..env import EnvError, EpisodeFinished
from ..render import render_frame
from ..replay import ReplayError, replay
from ..scenario import Button, ScenarioError, attach_map, load_scenario, parse_config
from ..netplay.host import HostSession
from ..render.bench import run_bench
from ..stats import PlayerStats, rank_rows
from .models import (
    ActionRequest, ActionResponse, BenchRequest, BenchResponse, BufferModel,
    CreateEnvRequest, CreateMatchRequest, EnvCreated, EnvStateResponse,
    LabelEntryModel, MatchCreated, MatchStatus, ReplayStatsRequest,
    ReplayStatsResponse, RespawnResponse, Scoreboard, StatsRow,
)

log = logging.getLogger(__name__)

WS_BUFFER_KINDS = {"screen": 0, "depth": 1, "labels": 2, "automap": 3}
_WS_HEADER = struct.Struct("<IHHBB6x")  # tic, width, height, kind, format


class Match:
    def __init__(self, match_id: int, session: HostSession, duration: int):
        self.id = match_id
        self.session = session
        self.duration = duration
        self.task: asyncio.Task | None = None
        self.report = None
        self.error: str | None = None

    @property
    def state(self) -> str:
        if self.error:
            return "failed"
        if self.report is not None:
            return "finished"
        if self.session.started.is_set():
            return "running"
        return "waiting"


class MatchManager:
    """Registry of hosted matches; shared by the HTTP endpoints and the CLI
    host command so the websocket bridge reaches either."""

    def __init__(self):
        self.matches: dict[int, Match] = {}
        self._next = 0

    def start(self, session: HostSession, duration: int) -> Match:
        self._next += 1
        match = Match(self._next, session, duration)
        self.matches[match.id] = match

        async def runner():
            try:
                match.report = await session.run()
            except Exception as e:
                log.exception("match %d failed", match.id)
                match.error = str(e)

        match.task = asyncio.create_task(runner())
        return match


def create_app(scenario_dir: str | Path | None = None,
               ui_dir: str | Path | None = None,
               manager: MatchManager | None = None) -> FastAPI:
    app = FastAPI(title="pixelarena", version="0.1.0")
    if manager is None:
        manager = MatchManager()
    matches = manager.matches
    app.state.manager = manager

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    # -- environment sessions ------------------------------------------------

    @app.post("/envs", response_model=EnvCreated)
    def create_env(req: CreateEnvRequest) -> EnvCreated:
        try:
            handle = ffi.env_create(req.config_text, req.map_text, req.extra_args)
        except (ScenarioError, EnvError) as e:
            raise HTTPException(status_code=422, detail=str(e)) from None
        return EnvCreated(env_id=handle)

    def _state_response(handle: int) -> EnvStateResponse:
        try:
            s = ffi.env_get_state(handle)
        except ffi.InvalidHandle as e:
            raise HTTPException(status_code=404, detail=str(e)) from None
        except EpisodeFinished as e:
            raise HTTPException(status_code=409, detail=str(e)) from None
        buffers = {}
        for name in ("screen", "depth", "labels", "automap"):
            buf = s[name]
            if buf is not None:
                buffers[name] = BufferModel(
                    shape=buf["shape"],
                    data_base64=base64.b64encode(buf["data"]).decode(),
                )
        return EnvStateResponse(
            tic=s["tic"], game_variables=s["game_variables"],
            last_action=s["last_action"],
            episode_finished=s["episode_finished"], player_dead=s["player_dead"],
            buffers=buffers,
            label_entries=[LabelEntryModel(**e) for e in s["label_entries"]],
        )

    @app.get("/envs/{env_id}/state", response_model=EnvStateResponse)
    def get_state(env_id: int) -> EnvStateResponse:
        return _state_response(env_id)

    @app.post("/envs/{env_id}/action", response_model=ActionResponse)
    def act(env_id: int, req: ActionRequest) -> ActionResponse:
        try:
            reward = ffi.env_make_action(env_id, req.action, req.skip)
            return ActionResponse(
                reward=reward,
                episode_finished=ffi.env_is_episode_finished(env_id),
                player_dead=ffi.env_is_player_dead(env_id),
            )
        except ffi.InvalidHandle as e:
            raise HTTPException(status_code=404, detail=str(e)) from None
        except EpisodeFinished as e:
            raise HTTPException(status_code=409, detail=str(e)) from None
        except EnvError as e:
            raise HTTPException(status_code=422, detail=str(e)) from None

    @app.post("/envs/{env_id}/respawn", response_model=RespawnResponse)
    def respawn(env_id: int) -> RespawnResponse:
        try:
            return RespawnResponse(respawned=ffi.env_respawn_player(env_id))
        except ffi.InvalidHandle as e:
            raise HTTPException(status_code=404, detail=str(e)) from None

    @app.delete("/envs/{env_id}")
    def close_env(env_id: int) -> dict:
        try:
            ffi.env_close(env_id)
        except ffi.InvalidHandle as e:
            raise HTTPException(status_code=404, detail=str(e)) from None
        return {"closed": env_id}

    # -- tools -----------------------------------------------------------------

    @app.post("/bench", response_model=BenchResponse)
    def bench(req: BenchRequest) -> BenchResponse:
        rep = run_bench(req.width, req.height, req.tics, req.buffers)
        return BenchResponse(
            width=rep.width, height=rep.height, frames=rep.frames,
            fps=rep.fps, ms_per_frame=rep.ms_per_frame, breakdown=rep.breakdown,
        )

    @app.post("/replays/stats", response_model=ReplayStatsResponse)
    def replay_stats(req: ReplayStatsRequest) -> ReplayStatsResponse:
        path = Path(req.path)
        if not path.exists():
            raise HTTPException(status_code=404, detail=f"no such replay: {path}")
        try:
            result = replay(path)
        except ReplayError as e:
            raise HTTPException(status_code=422, detail=str(e)) from None
        rows = [PlayerStats(f"player_{i}", c) for i, c in enumerate(result.counters)]
        out = []
        for place, r in enumerate(rank_rows(rows), start=1):
            c = r.counters
            out.append(StatsRow(
                place=place, bot=r.name, frags=r.frags, fd_ratio=r.fd,
                kills=c.kills, suicides=c.suicides, deaths=c.deaths,
                avg_speed_kmh=r.speed_kmh, attacks=c.attacks,
                shooting_precision=r.shooting_precision,
                detection_precision=r.detection_precision,
                hits_taken=c.hits_taken, damage_taken=c.damage_taken_hp,
                ammo_picked=c.picked_ammo, medikits_picked=c.picked_medikits,
                armors_picked=c.picked_armors,
            ))
        return ReplayStatsResponse(final_tic=result.final_tic, rows=out)

    # -- hosted matches ----------------------------------------------------------

    def _build_config(req: CreateMatchRequest):
        if req.config_path:
            base = Path(scenario_dir) if scenario_dir else Path(".")
            path = Path(req.config_path)
            if not path.is_absolute():
                path = base / path
            cfg = load_scenario(path)
        elif req.config_text and req.map_text:
            cfg = parse_config(req.config_text)
            attach_map(cfg, req.map_text)
        else:
            raise HTTPException(
                status_code=422,
                detail="provide config_path or config_text + map_text")
        if req.seed is not None:
            cfg.seed = req.seed
        return cfg

    @app.post("/matches", response_model=MatchCreated)
    async def create_match(req: CreateMatchRequest) -> MatchCreated:
        try:
            cfg = _build_config(req)
        except ScenarioError as e:
            raise HTTPException(status_code=422, detail=str(e)) from None
        total = req.remote_players + req.virtual_players + len(req.bots)
        if not 1 <= total <= 16:
            raise HTTPException(status_code=422,
                                detail=f"player count {total} out of range 1..16")
        recorder = None
        if req.record_path:
            from ..replay import ReplayWriter
            recorder = ReplayWriter(open(req.record_path, "wb"))
        try:
            session = HostSession(
                cfg, n_remote=req.remote_players, bot_specs=req.bots,
                n_virtual=req.virtual_players, duration_tics=req.duration_tics,
                port=req.tcp_port, recorder=recorder)
        except ValueError as e:
            raise HTTPException(status_code=422, detail=str(e)) from None
        match = manager.start(session, req.duration_tics)
        return MatchCreated(match_id=match.id, tcp_port=req.tcp_port,
                            ws_path=f"/matches/{match.id}/ws")

    def _match_or_404(match_id: int) -> Match:
        m = matches.get(match_id)
        if m is None:
            raise HTTPException(status_code=404, detail=f"no match {match_id}")
        return m

    @app.get("/matches/{match_id}", response_model=MatchStatus)
    def match_status(match_id: int) -> MatchStatus:
        m = _match_or_404(match_id)
        report = m.report
        return MatchStatus(
            match_id=m.id, state=m.state, tic=m.session.world.tic,
            duration_tics=m.duration,
            scoreboard=Scoreboard(**m.session.scoreboard()),
            realized_tic_rate=report.realized_tic_rate if report else None,
            end_reason=report.end_reason if report else None,
            error=m.error,
        )

    @app.get("/matches/{match_id}/frame.ppm")
    def match_frame(match_id: int, player: int = 0) -> Response:
        """Debug peek: current first-person frame of one player."""
        m = _match_or_404(match_id)
        world = m.session.world
        if not 0 <= player < world.n_players:
            raise HTTPException(status_code=422, detail="bad player id")
        bundle = render_frame(world, player, m.session.cfg.render)
        import io
        buf = io.BytesIO()
        h, w = bundle.screen.shape[:2]
        buf.write(f"P6\n{w} {h}\n255\n".encode())
        if bundle.screen.ndim == 2:
            import numpy as np
            buf.write(np.repeat(bundle.screen[:, :, None], 3, axis=2).tobytes())
        else:
            buf.write(bundle.screen.tobytes())
        return Response(content=buf.getvalue(), media_type="image/x-portable-pixmap")

    # -- websocket bridge ---------------------------------------------------------

    @app.websocket("/matches/{match_id}/ws")
    async def bridge(ws: WebSocket, match_id: int) -> None:
        m = matches.get(match_id)
        if m is None:
            await ws.close(code=4404)
            return
        await ws.accept()
        session = m.session
        try:
            hello = await ws.receive_json()
        except Exception:
            await ws.close(code=4400, reason="expected a join_as JSON message")
            return
        role = hello.get("join_as")
        if role not in ("spectator", "player"):
            await ws.send_json({"type": "error", "error": "join_as must be spectator or player"})
            await ws.close(code=4400)
            return
        pid = None
        if role == "player":
            free = [p for p, peer in session.virtual.items() if not peer.ready]
            if not free:
                await ws.send_json({"type": "error", "error": "no free player slots"})
                await ws.close(code=4409)
                return
            pid = free[0]
            session.virtual[pid].ready = True
            session.virtual[pid].name = str(hello.get("name", f"ws_{pid}"))[:32]

        opts = session.cfg.render
        view = {"kind": "screen", "watch": pid if pid is not None else 0}
        await ws.send_json({
            "type": "welcome", "role": role, "player_id": pid,
            "width": opts.width, "height": opts.height,
            "format": opts.format.value, "tic_rate": 35,
            "buttons": [b.name for b in session.cfg.available_buttons],
        })

        queue: asyncio.Queue = asyncio.Queue(maxsize=8)

        def on_tic(world, actions, events):
            try:
                queue.put_nowait(world.tic)
            except asyncio.QueueFull:
                pass  # slow consumer: drop frames, never stall the match

        session.on_tic_hooks.append(on_tic)

        async def pump_frames():
            while True:
                tic = await queue.get()
                frame = _render_view(session, view)
                if frame is not None:
                    await ws.send_bytes(frame)
                if tic % 35 == 0 or tic >= m.duration:
                    await ws.send_json({"type": "scoreboard", **session.scoreboard()})

        pump = asyncio.create_task(pump_frames())
        try:
            while True:
                msg = await ws.receive_json()
                if "input" in msg and pid is not None:
                    action = _decode_ws_input(session, msg["input"])
                    session.submit_virtual(pid, action)
                if "view" in msg and msg["view"] in WS_BUFFER_KINDS:
                    view["kind"] = msg["view"]
                if "watch" in msg and isinstance(msg["watch"], int):
                    if 0 <= msg["watch"] < session.world.n_players:
                        view["watch"] = msg["watch"]
        except WebSocketDisconnect:
            pass
        except Exception as e:
            log.info("bridge connection closed: %s", e)
        finally:
            pump.cancel()
            session.on_tic_hooks.remove(on_tic)

    def _decode_ws_input(session: HostSession, payload: dict) -> tuple[int, int]:
        values = payload.get("buttons", [])
        delta = float(payload.get("turn_delta", 0.0))
        mask = 0
        turn_cd = 0
        buttons = session.cfg.available_buttons
        for b, v in zip(buttons, values):
            if b is Button.TURN_DELTA:
                continue
            if v:
                mask |= 1 << b.value
        limit = session.cfg.tuning.turn_delta_limit_centideg
        turn_cd = max(-limit, min(limit, int(round(delta * 100.0))))
        return (mask, turn_cd)

    def _render_view(session: HostSession, view: dict) -> bytes | None:
        kind = view["kind"]
        watch = view["watch"]
        world = session.world
        opts = session.cfg.render
        need = dataclasses.replace(
            opts,
            depth_enabled=opts.depth_enabled or kind == "depth",
            labels_enabled=opts.labels_enabled or kind == "labels",
            automap_enabled=opts.automap_enabled or kind == "automap",
            automap_full=True if kind == "automap" else opts.automap_full,
        )
        bundle = render_frame(world, watch, need)
        buf = {
            "screen": bundle.screen,
            "depth": bundle.depth,
            "labels": bundle.labels,
            "automap": bundle.automap,
        }[kind]
        if buf is None:
            return None
        channels = 1 if buf.ndim == 2 else buf.shape[2]
        fmt = 0 if channels == 3 else 1
        header = _WS_HEADER.pack(world.tic, buf.shape[1], buf.shape[0],
                                 WS_BUFFER_KINDS[kind], fmt)
        return header + buf.tobytes()

    # -- static UI -----------------------------------------------------------------

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
