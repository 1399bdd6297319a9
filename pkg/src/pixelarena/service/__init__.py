"""FastAPI service exposing environments, hosted matches, the websocket
spectator bridge, benchmarks, and replay statistics."""
from .app import MatchManager, create_app

__all__ = ["MatchManager", "create_app"]
