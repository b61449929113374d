import os
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Annotated, List, Optional

from pydantic import Field, PositiveInt, field_validator
from pydantic_settings import BaseSettings, NoDecode, PydanticBaseSettingsSource, SettingsConfigDict

from .constants import CHUNK_SIZE, DEFAULT_BINS, ENV_PREFIX, SEED_ENV_VAR


class Settings(BaseSettings):
    # App Settings
    APP_NAME: str = "spherical-rmt"
    LOG_LEVEL: str = "INFO"
    LOG_DIR: Optional[Path] = None

    # Monte Carlo Settings
    DEFAULT_BINS: int = DEFAULT_BINS
    CHUNK_SIZE: int = CHUNK_SIZE  # part of the reproducibility key, recorded in manifests

    # Quadrature Settings
    QUADRATURE_NODES: int = 256  # Gauss-Legendre nodes in r for the forward operator
    GRID_POINTS: int = 801  # abscissae of GUE-scale output grids
    ORACLE_NODES: int = 64  # per axis, Selberg quadrature oracles

    model_config = SettingsConfigDict(
        env_prefix=ENV_PREFIX,
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )


@lru_cache()
def get_settings() -> Settings:
    return Settings()


class Command(str, Enum):
    DENSITY = "density"
    VERIFY_SELBERG = "verify-selberg"
    VERIFY_INTEGRAL_EQ = "verify-integral-eq"
    SEMICIRCLE_REPORT = "semicircle-report"
    RATIO = "ratio"
    SAMPLE = "sample"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class SeedEnvironmentSource(PydanticBaseSettingsSource):
    """Only the master seed; it outranks every flag."""

    def get_field_value(self, field, field_name):
        return os.environ.get(SEED_ENV_VAR), field_name, False

    def __call__(self):
        value = os.environ.get(SEED_ENV_VAR)
        return {} if value is None else {"seed": value}


class CliConfig(BaseSettings):
    """Resolved CLI configuration.

    Priority, highest first: SPHERICAL_RMT_SEED, flags, config file, the
    other SPHERICAL_RMT_* variables. Flags and file values both arrive as
    init kwargs; the CLI merges them before construction.
    """

    command: Command
    N: Annotated[List[PositiveInt], NoDecode] = Field(default_factory=lambda: [10])
    samples: PositiveInt = 10000
    bins: PositiveInt = DEFAULT_BINS
    seed: int = Field(default=0, ge=0, lt=2**64)
    streams: PositiveInt = 1
    out_dir: Path = Path("output")
    format: OutputFormat = OutputFormat.CSV
    ensemble: str = "fixed_trace"
    method: str = "dense"

    model_config = SettingsConfigDict(
        env_prefix=ENV_PREFIX, case_sensitive=False, extra="ignore"
    )

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls,
        init_settings,
        env_settings,
        dotenv_settings,
        file_secret_settings,
    ):
        return SeedEnvironmentSource(settings_cls), init_settings, env_settings

    @field_validator("N", mode="before")
    @classmethod
    def split_sizes(cls, value):
        if isinstance(value, str):
            return [int(part) for part in value.split(",") if part.strip()]
        if isinstance(value, int):
            return [value]
        return value

    @field_validator("ensemble")
    @classmethod
    def check_ensemble(cls, value: str) -> str:
        if value not in ("fixed_trace", "gue"):
            raise ValueError("ensemble must be 'fixed_trace' or 'gue'")
        return value

    @field_validator("method")
    @classmethod
    def check_method(cls, value: str) -> str:
        if value not in ("dense", "tridiagonal"):
            raise ValueError("method must be 'dense' or 'tridiagonal'")
        return value

    @field_validator("out_dir")
    @classmethod
    def check_out_dir(cls, value: Path) -> Path:
        value.mkdir(parents=True, exist_ok=True)
        if not os.access(value, os.W_OK):
            raise ValueError(f"output directory {value} is not writable")
        return value
