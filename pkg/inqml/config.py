from __future__ import annotations

import logging
from functools import lru_cache

import coloredlogs
from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

load_dotenv()

log = logging.getLogger("inqml_config")

LOG_FORMAT = "%(asctime)s %(name)s %(levelname)s %(message)s"


class Settings(BaseSettings):
    """Runtime knobs, read from INQML_* environment variables (and .env)."""

    model_config = SettingsConfigDict(env_prefix="INQML_", extra="ignore")

    # Upper bound on |W| for anything that enumerates 2^|W| subsets
    cap: int = Field(default=16, ge=1, le=24)
    # Upper bound on the second sort of relational encodings; 2**cap when unset
    state_limit: int | None = Field(default=None, ge=1)
    log_level: str = "WARNING"
    fuzz_jobs: int = Field(default=1, ge=1)

    @property
    def effective_state_limit(self) -> int:
        return self.state_limit if self.state_limit is not None else 1 << self.cap


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    settings = Settings()
    log.debug(f"Settings loaded: cap={settings.cap}, state_limit={settings.effective_state_limit}")
    return settings


def reset_settings() -> None:
    get_settings.cache_clear()


def setup_logging(level: str | None = None) -> None:
    """Install coloured console logging for the CLI. Library code never calls this."""
    level = (level or get_settings().log_level).upper()
    coloredlogs.install(level=level, fmt=LOG_FORMAT)
