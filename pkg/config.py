"""
Configuration
Values come from the environment (a local .env file is loaded first), with defaults
"""
import os
from dataclasses import dataclass

from dotenv import load_dotenv

load_dotenv()

VERSION = "1.0.0"

DEFAULT_PRIME = 2147483647


@dataclass(frozen=True)
class Settings:
    field: str
    seed: int
    jobs: int
    max_genus: int
    out: str
    log_level: str
    retries: int


def _int_env(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name}={raw!r} is not an integer")


def load_settings() -> Settings:
    """Read FIBERCHECK_* variables; command-line flags override these later"""
    return Settings(
        field=os.environ.get("FIBERCHECK_FIELD", "rational"),
        seed=_int_env("FIBERCHECK_SEED", 0),
        jobs=_int_env("FIBERCHECK_JOBS", 1),
        max_genus=_int_env("FIBERCHECK_MAX_GENUS", 4),
        out=os.environ.get("FIBERCHECK_OUT", "reports"),
        log_level=os.environ.get("FIBERCHECK_LOG_LEVEL", "WARNING").upper(),
        retries=_int_env("FIBERCHECK_RETRIES", 4),
    )
