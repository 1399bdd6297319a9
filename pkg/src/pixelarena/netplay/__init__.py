"""Deterministic lockstep multiplayer over TCP, plus the websocket bridge
schema consumed by the spectator UI (served by the FastAPI service)."""
from .host import DEFAULT_PORT, HASH_INTERVAL, HostReport, HostSession
from .client import ClientReport, JoinError, join_match
from . import protocol

__all__ = [
    "DEFAULT_PORT", "HASH_INTERVAL", "HostReport", "HostSession",
    "ClientReport", "JoinError", "join_match", "protocol",
]
