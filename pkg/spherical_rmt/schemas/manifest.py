from typing import List

from pydantic import BaseModel, Field, PositiveInt

from ..core.constants import CHUNK_SIZE, DEFAULT_BINS, ENTRY_VARIANCE_CONVENTION, SCHEMA_VERSION
from .spectrum import Ensemble


class SamplingPlan(BaseModel):
    """Everything that determines a Monte Carlo run's random draws."""

    master_seed: int = Field(default=0, ge=0, lt=2**64)
    N: PositiveInt
    num_samples: PositiveInt
    num_streams: PositiveInt = 1
    chunk_size: PositiveInt = CHUNK_SIZE
    ensemble: Ensemble = Ensemble.FIXED_TRACE
    method: str = "dense"


class OutputRecord(BaseModel):
    path: str
    sha256: str


class RunManifest(BaseModel):
    schema_version: int = SCHEMA_VERSION
    command: str
    master_seed: int
    N: List[int]
    num_samples: int
    num_streams: int
    bin_count: int = DEFAULT_BINS
    chunk_size: int = CHUNK_SIZE
    ensemble: str = Ensemble.FIXED_TRACE.value
    method: str = "dense"
    entry_variance_convention: str = ENTRY_VARIANCE_CONVENTION
    eigensolver_retries: int = 0
    outputs: List[OutputRecord] = Field(default_factory=list)
