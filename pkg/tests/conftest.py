import pytest
from dotenv import load_dotenv
from pathlib import Path

from spherical_rmt.core.config import get_settings
from spherical_rmt.schemas.manifest import SamplingPlan
from spherical_rmt.schemas.spectrum import Ensemble
from spherical_rmt.services.sampler_service import MonteCarloService


# Load test environment variables
test_env_path = Path(__file__).parent / ".env.test"
load_dotenv(test_env_path)


@pytest.fixture
def settings():
    return get_settings()


@pytest.fixture
def out_dir(tmp_path):
    path = tmp_path / "output"
    path.mkdir()
    return path


@pytest.fixture(autouse=True)
def clean_cli_environment(monkeypatch):
    """CLI values in the environment would override every flag under test"""
    for key in ("SEED", "N", "SAMPLES", "BINS", "STREAMS", "OUT_DIR", "FORMAT", "ENSEMBLE", "METHOD"):
        monkeypatch.delenv(f"SPHERICAL_RMT_{key}", raising=False)


def _plan(N, num_samples, ensemble=Ensemble.FIXED_TRACE, master_seed=0, num_streams=1, method="dense"):
    return SamplingPlan(
        master_seed=master_seed,
        N=N,
        num_samples=num_samples,
        num_streams=num_streams,
        ensemble=ensemble,
        method=method,
    )


@pytest.fixture(scope="session")
def fixed_trace_n2_density():
    """Fixed-trace N=2 histogram from 2e5 samples"""
    return MonteCarloService(_plan(2, 200_000, master_seed=11, num_streams=4)).density(200)


@pytest.fixture(scope="session")
def fixed_trace_n10_density():
    """Fixed-trace N=10 histogram from 2e5 samples"""
    return MonteCarloService(_plan(10, 200_000, master_seed=5, num_streams=4)).density(200)


@pytest.fixture
def plan_factory():
    return _plan
