"""Pydantic request/response schemas for the HTTP service."""
from __future__ import annotations

from pydantic import BaseModel, Field


class CreateEnvRequest(BaseModel):
    config_text: str
    map_text: str
    extra_args: str = ""


class EnvCreated(BaseModel):
    env_id: int


class BufferModel(BaseModel):
    shape: tuple[int, int, int]  # height, width, channels
    data_base64: str


class LabelEntryModel(BaseModel):
    object_id: int
    name: str
    x: int
    y: int
    width: int
    height: int
    world_x: float
    world_y: float
    angle_deg: float
    velocity: tuple[float, float]


class EnvStateResponse(BaseModel):
    tic: int
    game_variables: list[float]
    last_action: list[float]
    episode_finished: bool
    player_dead: bool
    buffers: dict[str, BufferModel]
    label_entries: list[LabelEntryModel]


class ActionRequest(BaseModel):
    action: list[float]
    skip: int = Field(default=1, ge=1)


class ActionResponse(BaseModel):
    reward: float
    episode_finished: bool
    player_dead: bool


class RespawnResponse(BaseModel):
    respawned: bool


class BenchRequest(BaseModel):
    width: int = Field(default=320, ge=1)
    height: int = Field(default=240, ge=1)
    tics: int = Field(default=1000, ge=1)
    buffers: bool = True


class BenchResponse(BaseModel):
    width: int
    height: int
    frames: int
    fps: float
    ms_per_frame: float
    breakdown: dict[str, float]


class ReplayStatsRequest(BaseModel):
    path: str


class StatsRow(BaseModel):
    place: int
    bot: str
    frags: int
    fd_ratio: float
    kills: int
    suicides: int
    deaths: int
    avg_speed_kmh: float
    attacks: int
    shooting_precision: float
    detection_precision: float
    hits_taken: int
    damage_taken: int
    ammo_picked: int
    medikits_picked: int
    armors_picked: int


class ReplayStatsResponse(BaseModel):
    final_tic: int
    rows: list[StatsRow]


class CreateMatchRequest(BaseModel):
    config_text: str | None = None
    map_text: str | None = None
    config_path: str | None = None
    bots: list[str] = Field(default_factory=list)
    remote_players: int = 0
    virtual_players: int = 0
    duration_tics: int = Field(default=21000, ge=1)
    tcp_port: int = 5029
    seed: int | None = None
    record_path: str | None = None


class MatchCreated(BaseModel):
    match_id: int
    tcp_port: int
    ws_path: str


class ScoreboardRow(BaseModel):
    id: int
    name: str
    frags: int
    kills: int
    suicides: int
    deaths: int
    alive: bool


class Scoreboard(BaseModel):
    tic: int
    players: list[ScoreboardRow]


class MatchStatus(BaseModel):
    match_id: int
    state: str  # waiting | running | finished | failed
    tic: int
    duration_tics: int
    scoreboard: Scoreboard
    realized_tic_rate: float | None = None
    end_reason: str | None = None
    error: str | None = None
