"""PixelArena: a deterministic multi-agent raycast arena with an RL-friendly
API, lockstep netplay, bit-exact replays, and a deathmatch tournament harness.
"""
import logging
import os

__version__ = "0.1.0"


def configure_logging() -> None:
    """Honor the PIXELARENA_LOG environment variable (debug/info/warning/...)."""
    level_name = os.environ.get("PIXELARENA_LOG", "warning").upper()
    level = getattr(logging, level_name, logging.WARNING)
    logging.basicConfig(level=level, format="%(asctime)s %(name)s %(levelname)s %(message)s")
