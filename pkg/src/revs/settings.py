"""Settings read from the environment and an optional '.env' file."""

from pathlib import Path
from typing import Optional

from pydantic import BaseSettings


class Settings(BaseSettings):

    # Scenario config used when a command gets no '--config'.
    config: Optional[Path] = None
    log_level: str = "WARNING"

    class Config:
        env_prefix = "REVS_"
        env_file = ".env"
