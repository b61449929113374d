from enum import Enum
from typing import Iterator, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from ..utils.exceptions import DomainError

SPHERE_TOLERANCE = 1e-12


class Ensemble(str, Enum):
    GUE = "gue"
    FIXED_TRACE = "fixed_trace"


class SpectrumSample(BaseModel):
    model_config = ConfigDict(frozen=True)

    eigenvalues: Tuple[float, ...]
    ensemble: Ensemble
    seed_path: Tuple[int, int]  # (stream id, sample index)

    @field_validator("eigenvalues", mode="before")
    @classmethod
    def as_tuple(cls, value):
        return tuple(float(v) for v in np.asarray(value, dtype=float).ravel())

    @model_validator(mode="after")
    def check_invariants(self):
        values = np.asarray(self.eigenvalues)
        if values.size == 0:
            raise DomainError("a spectrum needs at least one eigenvalue")
        if np.any(np.diff(values) < 0):
            raise DomainError("eigenvalues must be sorted ascending")
        if self.ensemble is Ensemble.FIXED_TRACE:
            if abs(float(np.sum(values**2)) - 1.0) > SPHERE_TOLERANCE:
                raise DomainError("fixed-trace spectrum is off the unit sphere")
        return self

    @property
    def N(self) -> int:
        return len(self.eigenvalues)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.eigenvalues)


class SpectrumBatch(BaseModel):
    """Many spectra of one size and ensemble, one sorted row per sample."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    eigenvalues: np.ndarray
    ensemble: Ensemble
    stream_id: int = 0
    first_index: int = 0

    @field_validator("eigenvalues", mode="before")
    @classmethod
    def as_matrix(cls, value):
        array = np.array(value, dtype=float)
        if array.ndim == 1:
            array = array[None, :]
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def check_shape(self):
        if self.eigenvalues.ndim != 2 or self.eigenvalues.shape[1] == 0:
            raise DomainError("a spectrum batch is a (samples, N) array")
        return self

    @property
    def N(self) -> int:
        return self.eigenvalues.shape[1]

    @property
    def num_samples(self) -> int:
        return self.eigenvalues.shape[0]

    @classmethod
    def from_samples(cls, samples: Sequence[SpectrumSample]) -> "SpectrumBatch":
        if not samples:
            raise DomainError("no samples given")
        sizes = {s.N for s in samples}
        ensembles = {s.ensemble for s in samples}
        if len(sizes) != 1 or len(ensembles) != 1:
            raise DomainError("samples must share N and ensemble")
        return cls(
            eigenvalues=np.array([s.eigenvalues for s in samples]),
            ensemble=samples[0].ensemble,
            stream_id=samples[0].seed_path[0],
            first_index=samples[0].seed_path[1],
        )

    def samples(self) -> Iterator[SpectrumSample]:
        for offset, row in enumerate(self.eigenvalues):
            yield SpectrumSample(
                eigenvalues=row,
                ensemble=self.ensemble,
                seed_path=(self.stream_id, self.first_index + offset),
            )


def as_batch(samples) -> SpectrumBatch:
    if isinstance(samples, SpectrumBatch):
        return samples
    return SpectrumBatch.from_samples(list(samples))


class Estimate(BaseModel):
    """A Monte Carlo estimate with its standard error."""

    value: float
    stderr: float
    num_samples: int


class RatioEstimate(Estimate):
    numerator: float
    denominator: float


def concat_batches(batches: List[SpectrumBatch]) -> SpectrumBatch:
    return SpectrumBatch(
        eigenvalues=np.concatenate([b.eigenvalues for b in batches]),
        ensemble=batches[0].ensemble,
        stream_id=batches[0].stream_id,
        first_index=batches[0].first_index,
    )
