"""
Configuration for the interference Bayesian network engine
----------------------------------------------------------
Settings are read from the environment (optionally via a .env file) once and
cached. Explicit function arguments always take precedence over settings.
"""

import logging
import os
from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv
from pydantic import BaseModel

# Load environment variables
load_dotenv()

ROOT_DIR = Path(__file__).resolve().parent.parent


class Settings(BaseModel):
    max_configurations: int = 2 ** 20
    row_tolerance: float = 1e-9
    search_step: float = 0.1
    sweep_step: float = 0.0001
    restarts: int = 100
    seed: int = 0
    precision: int = 4
    networks_dir: Path = ROOT_DIR / "networks"
    log_level: str = "WARNING"


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Build settings from QBN_* environment variables"""
    overrides = {}
    for field_name in Settings.model_fields:
        value = os.getenv(f"QBN_{field_name.upper()}")
        if value is not None:
            overrides[field_name] = value
    return Settings(**overrides)


def configure_logging(level=None) -> None:
    """Install a single stderr handler; called by the CLI only"""
    level = level or get_settings().log_level
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
