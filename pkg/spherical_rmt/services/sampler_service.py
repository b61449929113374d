"""Seeded Monte Carlo sampling of GUE and fixed-trace spectra.

Randomness is keyed by chunk: chunk c of a run draws from
Generator(SeedSequence(master_seed, spawn_key=(c,))). Worker threads
("streams") only decide who processes which chunk, and results are merged by
chunk index, so outputs do not depend on the number of streams.
"""

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np
from scipy.linalg import LinAlgError, eigvalsh_tridiagonal

from ..core.config import get_settings
from ..core.constants import CLIP_LIMIT, MAX_EIGEN_RETRIES, MAX_MOMENT_TUPLES, MIN_BINS
from ..core.logger import logger
from ..schemas.density import DensityGrid
from ..schemas.manifest import SamplingPlan
from ..schemas.spectrum import (
    Ensemble,
    Estimate,
    RatioEstimate,
    SpectrumBatch,
    SpectrumSample,
    as_batch,
    concat_batches,
)
from ..utils.decorators import log_execution_time
from ..utils.exceptions import DomainError, SamplingError
from .gue_service import default_support

T = TypeVar("T")
Samples = Union[SpectrumBatch, Sequence[SpectrumSample]]

METHODS = ("dense", "tridiagonal")
# complex entries per dense sub-block, bounds memory for large N
DENSE_BLOCK_ENTRIES = 2**22


def stream_rng(master_seed: int, stream_id: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(stream_id,)))


class SampleStream:
    """An independent random stream identified by (master_seed, stream id)."""

    def __init__(self, master_seed: int, stream_id: int = 0):
        self.master_seed = master_seed
        self.stream_id = stream_id
        self.rng = stream_rng(master_seed, stream_id)
        self.index = 0

    def next_path(self, count: int = 1) -> Tuple[int, int]:
        path = (self.stream_id, self.index)
        self.index += count
        return path


def _dense_block(N: int, rng: np.random.Generator, size: int) -> np.ndarray:
    # density exp(-tr M^2): diagonal var 1/2, off-diagonal real/imag var 1/4
    X = rng.standard_normal((size, N, N)) + 1j * rng.standard_normal((size, N, N))
    X *= math.sqrt(0.5)
    H = (X + np.conj(np.swapaxes(X, -1, -2))) / 2.0
    return np.linalg.eigvalsh(H)


def _tridiagonal_block(N: int, rng: np.random.Generator, size: int) -> np.ndarray:
    # beta=2 tridiagonal model scaled to exp(-sum x^2)
    diagonal = rng.normal(0.0, math.sqrt(0.5), size=(size, N))
    if N == 1:
        return diagonal
    dof = 2.0 * np.arange(N - 1, 0, -1)
    off = np.sqrt(rng.chisquare(dof, size=(size, N - 1))) / 2.0
    return np.array([eigvalsh_tridiagonal(d, e) for d, e in zip(diagonal, off)])


def draw_gue_block(
    N: int, rng: np.random.Generator, size: int, method: str = "dense"
) -> Tuple[np.ndarray, int]:
    """`size` sorted GUE spectra as a (size, N) array, plus the number of eigensolver retries."""
    if N < 1:
        raise DomainError(f"N must be positive, got {N}")
    if method not in METHODS:
        raise DomainError(f"unknown sampling method {method!r}")

    solver = _dense_block if method == "dense" else _tridiagonal_block
    step = max(1, DENSE_BLOCK_ENTRIES // (N * N)) if method == "dense" else size
    blocks, retries = [], 0
    for start in range(0, size, step):
        count = min(step, size - start)
        for attempt in range(MAX_EIGEN_RETRIES):
            try:
                blocks.append(solver(N, rng, count))
                break
            except (LinAlgError, np.linalg.LinAlgError) as e:
                retries += 1
                logger.warning(f"Eigensolver attempt {attempt + 1}/{MAX_EIGEN_RETRIES} failed: {str(e)}")
        else:
            raise SamplingError(f"eigensolver did not converge after {MAX_EIGEN_RETRIES} fresh draws")
    return np.concatenate(blocks), retries


def sample_gue_spectrum(N: int, stream: SampleStream, method: str = "dense") -> SpectrumSample:
    eigenvalues, _ = draw_gue_block(N, stream.rng, 1, method)
    return SpectrumSample(
        eigenvalues=eigenvalues[0], ensemble=Ensemble.GUE, seed_path=stream.next_path()
    )


def _unit_rows(eigenvalues: np.ndarray) -> np.ndarray:
    norms = np.sqrt(np.sum(eigenvalues**2, axis=-1, keepdims=True))
    if np.any(norms == 0):
        raise SamplingError("cannot project the zero spectrum onto the unit sphere")
    return eigenvalues / norms


def project_fixed_trace(sample: SpectrumSample) -> SpectrumSample:
    """x/|x|: the radial part of e^{−Σx²}Δ² is independent of the direction."""
    if sample.ensemble is not Ensemble.GUE:
        raise DomainError("only GUE spectra can be projected")
    return SpectrumSample(
        eigenvalues=_unit_rows(sample.as_array()),
        ensemble=Ensemble.FIXED_TRACE,
        seed_path=sample.seed_path,
    )


def project_batch(batch: SpectrumBatch) -> SpectrumBatch:
    if batch.ensemble is not Ensemble.GUE:
        raise DomainError("only GUE spectra can be projected")
    return SpectrumBatch(
        eigenvalues=_unit_rows(batch.eigenvalues),
        ensemble=Ensemble.FIXED_TRACE,
        stream_id=batch.stream_id,
        first_index=batch.first_index,
    )


class HistogramAccumulator:
    """Per-bin sums of eigenvalue counts and squared counts over samples."""

    def __init__(self, bins: int, support: Tuple[float, float]):
        if bins < MIN_BINS:
            raise DomainError(f"at least {MIN_BINS} bins are required, got {bins}")
        self.bins = bins
        self.support = (float(support[0]), float(support[1]))
        self.counts = np.zeros(bins, dtype=np.int64)
        self.counts_sq = np.zeros(bins, dtype=np.int64)
        self.num_samples = 0
        self.num_values = 0
        self.clipped = 0
        self.N: Optional[int] = None
        self.ensemble: Optional[Ensemble] = None

    def _check(self, N: int, ensemble: Ensemble) -> None:
        if self.N is None:
            self.N, self.ensemble = N, ensemble
        elif (self.N, self.ensemble) != (N, ensemble):
            raise DomainError("all samples must share N and ensemble")

    def add(self, batch: SpectrumBatch) -> "HistogramAccumulator":
        self._check(batch.N, batch.ensemble)
        lo, hi = self.support
        x = batch.eigenvalues
        index = np.floor((x - lo) / (hi - lo) * self.bins).astype(np.int64)
        index[x == hi] = self.bins - 1
        inside = (index >= 0) & (index < self.bins)

        rows = np.broadcast_to(np.arange(x.shape[0])[:, None], x.shape)
        per_sample = np.bincount(
            (rows[inside] * self.bins + index[inside]), minlength=x.shape[0] * self.bins
        ).reshape(x.shape[0], self.bins)
        self.counts += per_sample.sum(axis=0)
        self.counts_sq += (per_sample**2).sum(axis=0)
        self.num_samples += x.shape[0]
        self.num_values += x.size
        self.clipped += int(x.size - np.count_nonzero(inside))
        return self

    def merge(self, other: "HistogramAccumulator") -> "HistogramAccumulator":
        if other.N is not None:
            self._check(other.N, other.ensemble)
        self.counts += other.counts
        self.counts_sq += other.counts_sq
        self.num_samples += other.num_samples
        self.num_values += other.num_values
        self.clipped += other.clipped
        return self

    def to_grid(self) -> DensityGrid:
        if self.num_samples == 0:
            raise SamplingError("no samples were accumulated")
        clipped_fraction = self.clipped / self.num_values
        if clipped_fraction > CLIP_LIMIT:
            raise SamplingError(
                f"{clipped_fraction:.4%} of eigenvalues fell outside {self.support}"
            )
        if self.clipped:
            logger.warning(f"{self.clipped} eigenvalues clipped outside {self.support}")

        lo, hi = self.support
        width = (hi - lo) / self.bins
        centers = lo + width * (np.arange(self.bins) + 0.5)
        S = self.num_samples
        mean = self.counts / S
        variance = np.clip(self.counts_sq / S - mean**2, 0.0, None)
        return DensityGrid(
            points=centers,
            values=mean / width,
            errors=np.sqrt(variance / S) / width,
            mass=float(self.N),
            N=self.N,
            kind=self.ensemble.value,
            support=self.support,
            clipped_fraction=clipped_fraction,
        )


def estimate_density(
    samples: Samples, bins: Optional[int] = None, support: Optional[Tuple[float, float]] = None
) -> DensityGrid:
    """Histogram level density with mass N and per-bin standard errors."""
    batch = as_batch(samples)
    bins = bins or get_settings().DEFAULT_BINS
    support = support or default_support(batch.N, batch.ensemble)
    return HistogramAccumulator(bins, support).add(batch).to_grid()


def _jackknife_mean(values: np.ndarray) -> Estimate:
    S = values.size
    total = float(np.sum(values))
    if S < 2:
        return Estimate(value=total / max(S, 1), stderr=0.0, num_samples=S)
    leave_one_out = (total - values) / (S - 1)
    stderr = math.sqrt((S - 1) / S * float(np.sum((leave_one_out - leave_one_out.mean()) ** 2)))
    return Estimate(value=total / S, stderr=stderr, num_samples=S)


def _index_tuples(N: int, k: int) -> np.ndarray:
    count = math.perm(N, k)
    if count <= MAX_MOMENT_TUPLES:
        return np.array(list(itertools.permutations(range(N), k)), dtype=np.int64)
    # fixed subset of ordered index tuples
    rng = np.random.default_rng(0)
    return np.array([rng.permutation(N)[:k] for _ in range(MAX_MOMENT_TUPLES)], dtype=np.int64)


def estimate_mixed_moment(samples: Samples, powers: Sequence[int]) -> Estimate:
    """⟨Π x_{σ(i)}^{p_i}⟩ averaged over ordered distinct index choices σ."""
    batch = as_batch(samples)
    powers = np.asarray(list(powers), dtype=float)
    if powers.size == 0 or powers.size > batch.N:
        raise DomainError(f"between 1 and N={batch.N} exponents are required")

    tuples = _index_tuples(batch.N, powers.size)
    x = batch.eigenvalues
    per_sample = np.zeros(x.shape[0])
    sample_block = max(1, 2**22 // (len(tuples) * powers.size))
    for start in range(0, x.shape[0], sample_block):
        rows = x[start : start + sample_block]
        per_sample[start : start + len(rows)] = np.prod(rows[:, tuples] ** powers, axis=-1).mean(axis=-1)
    return _jackknife_mean(per_sample)


def radial_angular_correlation(samples: Samples) -> Estimate:
    """Correlation of |x| with max_i |x_i|/|x| over GUE spectra."""
    batch = as_batch(samples)
    if batch.ensemble is not Ensemble.GUE:
        raise DomainError("radial/angular correlation needs GUE spectra")
    radius = np.sqrt(np.sum(batch.eigenvalues**2, axis=1))
    angular = np.max(np.abs(batch.eigenvalues), axis=1) / radius
    corr = float(np.corrcoef(radius, angular)[0, 1])
    return Estimate(value=corr, stderr=1.0 / math.sqrt(batch.num_samples), num_samples=batch.num_samples)


class MonteCarloService:
    """Chunked, thread-parallel execution of a SamplingPlan."""

    def __init__(self, plan: SamplingPlan):
        self.plan = plan
        self.retries = 0

    def chunks(self) -> List[Tuple[int, int, int]]:
        size = self.plan.chunk_size
        return [
            (chunk_id, start, min(size, self.plan.num_samples - start))
            for chunk_id, start in enumerate(range(0, self.plan.num_samples, size))
        ]

    def draw_chunk(self, chunk_id: int, start: int, size: int) -> Tuple[SpectrumBatch, int]:
        rng = stream_rng(self.plan.master_seed, chunk_id)
        eigenvalues, retries = draw_gue_block(self.plan.N, rng, size, self.plan.method)
        batch = SpectrumBatch(
            eigenvalues=eigenvalues, ensemble=Ensemble.GUE, stream_id=chunk_id, first_index=start
        )
        if self.plan.ensemble is Ensemble.FIXED_TRACE:
            batch = project_batch(batch)
        return batch, retries

    def map_chunks(self, reducer: Callable[[SpectrumBatch], T]) -> List[T]:
        """Apply `reducer` to every chunk's batch; results come back in chunk order."""

        def work(chunk):
            batch, retries = self.draw_chunk(*chunk)
            return reducer(batch), retries

        chunks = self.chunks()
        with ThreadPoolExecutor(max_workers=self.plan.num_streams) as executor:
            outcomes = list(executor.map(work, chunks))
        self.retries += sum(retries for _, retries in outcomes)
        return [result for result, _ in outcomes]

    @log_execution_time
    def collect(self) -> SpectrumBatch:
        return concat_batches(self.map_chunks(lambda batch: batch))

    @log_execution_time
    def density(self, bins: Optional[int] = None, support: Optional[Tuple[float, float]] = None) -> DensityGrid:
        bins = bins or get_settings().DEFAULT_BINS
        support = support or default_support(self.plan.N, self.plan.ensemble)
        partials = self.map_chunks(lambda batch: HistogramAccumulator(bins, support).add(batch))
        total = HistogramAccumulator(bins, support)
        for partial in partials:
            total.merge(partial)
        return total.to_grid()

    @log_execution_time
    def top_eigenvalue_ratio(self) -> RatioEstimate:
        def reducer(batch: SpectrumBatch):
            squares = batch.eigenvalues**2
            return squares.max(axis=1), squares.mean(axis=1)

        parts = self.map_chunks(reducer)
        top = np.concatenate([p[0] for p in parts])
        average = np.concatenate([p[1] for p in parts])
        return _jackknife_ratio(top, average)


def _jackknife_ratio(numerator: np.ndarray, denominator: np.ndarray) -> RatioEstimate:
    S = numerator.size
    A, B = float(np.sum(numerator)), float(np.sum(denominator))
    ratio = A / B
    stderr = 0.0
    if S > 1:
        leave_one_out = (A - numerator) / (B - denominator)
        stderr = math.sqrt((S - 1) / S * float(np.sum((leave_one_out - leave_one_out.mean()) ** 2)))
    return RatioEstimate(
        value=ratio, stderr=stderr, num_samples=S, numerator=A / S, denominator=B / S
    )


def top_eigenvalue_ratio(
    N: int, num_samples: int, master_seed: int = 0, num_streams: int = 1, method: str = "dense"
) -> RatioEstimate:
    """⟨max_i x_i²⟩/⟨x_1²⟩ over GUE spectra, ⟨x_1²⟩ taken as ⟨Σx²⟩/N."""
    plan = SamplingPlan(
        master_seed=master_seed,
        N=N,
        num_samples=num_samples,
        num_streams=num_streams,
        chunk_size=get_settings().CHUNK_SIZE,
        ensemble=Ensemble.GUE,
        method=method,
    )
    return MonteCarloService(plan).top_eigenvalue_ratio()
