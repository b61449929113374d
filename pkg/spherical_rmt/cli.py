"""Command-line front end.

Every subcommand takes the same options. SPHERICAL_RMT_SEED outranks --seed;
otherwise flags beat the key=value file given by --config, which beats the
other SPHERICAL_RMT_* variables.
Exit status is 0 when everything passes, 1 when a verification fails and 2
for usage errors.
"""

import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import click
from dotenv import dotenv_values
from pydantic import ValidationError

from .core.config import CliConfig, Command, get_settings
from .core.constants import GNUPLOT_RECIPE, MANIFEST_FILE
from .core.logger import logger, setup_logging
from .repositories.artifact_repository import ArtifactRepository
from .schemas.manifest import RunManifest, SamplingPlan
from .schemas.report import RatioReport, SelbergReport
from .schemas.spectrum import Ensemble
from .services import gue_service, integral_eq_service, oracle_service, sampler_service
from .utils.exceptions import DomainError, SphericalRMTException

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

CONFIG_KEYS = ("N", "samples", "bins", "seed", "streams", "out_dir", "format", "ensemble", "method")


class RunOutcome:
    """Accumulates pass/fail and eigensolver retries over one command."""

    def __init__(self, config: CliConfig):
        self.config = config
        self.repository = ArtifactRepository(config.out_dir)
        self.passed = True
        self.retries = 0
        self.summary: List[Dict[str, Any]] = []

    def plan(self, N: int, ensemble: Optional[Ensemble] = None) -> SamplingPlan:
        return SamplingPlan(
            master_seed=self.config.seed,
            N=N,
            num_samples=self.config.samples,
            num_streams=self.config.streams,
            chunk_size=get_settings().CHUNK_SIZE,
            ensemble=ensemble or Ensemble(self.config.ensemble),
            method=self.config.method,
        )

    def report(self, name: str, report, passed: Optional[bool] = None) -> None:
        self.repository.write_json(name, report)
        self.summary.append(report.model_dump(mode="json", by_alias=True))
        if passed is False:
            self.passed = False

    def finish(self) -> int:
        manifest = RunManifest(
            command=self.config.command.value,
            master_seed=self.config.seed,
            N=list(self.config.N),
            num_samples=self.config.samples,
            num_streams=self.config.streams,
            bin_count=self.config.bins,
            chunk_size=get_settings().CHUNK_SIZE,
            ensemble=self.config.ensemble,
            method=self.config.method,
            eigensolver_retries=self.retries,
        )
        self.repository.save_manifest(manifest)
        if self.summary:
            click.echo(json.dumps(self.summary, indent=2, sort_keys=True))
        return EXIT_OK if self.passed else EXIT_FAILED


def _density(outcome: RunOutcome) -> None:
    config = outcome.config
    for N in config.N:
        service = sampler_service.MonteCarloService(outcome.plan(N))
        grid = service.density(config.bins)
        outcome.retries += service.retries
        outcome.repository.write_grid(f"density_{config.ensemble}_N{N}", grid, config.format)
        if service.plan.ensemble is Ensemble.GUE:
            outcome.repository.write_overlay_csv(
                f"density_gue_N{N}_overlay.csv",
                grid.points,
                grid.values,
                gue_service.gue_level_density(N, grid.points),
                meta={"N": N, "kind": "gue"},
            )


def _verify_selberg(outcome: RunOutcome) -> None:
    rows = oracle_service.run_selberg_suite(seed=outcome.config.seed)
    passed = all(row.passed for row in rows)
    outcome.report("selberg_report.json", SelbergReport(rows=rows, passed=passed), passed)


def _verify_integral_eq(outcome: RunOutcome) -> None:
    config = outcome.config
    for N in config.N:
        check = integral_eq_service.verify_integral_equation(
            N,
            config.samples,
            bins=config.bins,
            master_seed=config.seed,
            num_streams=config.streams,
            method=config.method,
        )
        outcome.repository.write_overlay_csv(
            f"integral_eq_N{N}.csv",
            check.exact.points,
            check.forward.values,
            check.exact.values,
            meta={"N": N, "kind": "forward_vs_gue"},
        )
        outcome.report(f"integral_eq_N{N}.json", check.report, check.report.passed)
        sigma_zero = integral_eq_service.sigma_v_zero_report(N, check.sigma_v)
        outcome.report(f"sigma_v_zero_N{N}.json", sigma_zero)


def _gnuplot_recipe(files: List[str]) -> str:
    lines = [
        "# gnuplot -persist semicircle.gp",
        'set datafile separator ","',
        'set xlabel "x"',
        'set ylabel "rho"',
        "set xrange [-1.1:1.1]",
        "plot \\",
    ]
    for name in files:
        lines.append(f'  "{name}" skip 2 using 1:2 with steps title "{name}", \\')
    lines.append(f'  "{files[-1]}" skip 2 using 1:3 with lines lw 2 title "semicircle"')
    return "\n".join(lines) + "\n"


def _semicircle_report(outcome: RunOutcome) -> None:
    config = outcome.config
    run = integral_eq_service.semicircle_convergence_report(
        config.N,
        config.samples,
        bins=config.bins,
        master_seed=config.seed,
        num_streams=config.streams,
        method=config.method,
    )
    files = []
    for row, rho in zip(run.report.rows, run.overlays):
        name = f"semicircle_N{row.N}.csv"
        outcome.repository.write_overlay_csv(
            name, rho.points, rho.values, gue_service.semicircle(rho.points), meta={"N": row.N, "kind": "rho_v"}
        )
        files.append(name)
    outcome.repository.write_text(GNUPLOT_RECIPE, _gnuplot_recipe(files))
    outcome.report("semicircle_report.json", run.report, run.report.passed)


def _ratio(outcome: RunOutcome) -> None:
    config = outcome.config
    for N in config.N:
        service = sampler_service.MonteCarloService(outcome.plan(N, Ensemble.GUE))
        estimate = service.top_eigenvalue_ratio()
        outcome.retries += service.retries
        report = RatioReport(
            N=N,
            samples=config.samples,
            ratio=estimate.value,
            stderr=estimate.stderr,
            numerator=estimate.numerator,
            denominator=estimate.denominator,
        )
        outcome.report(f"ratio_N{N}.json", report)


def _sample(outcome: RunOutcome) -> None:
    config = outcome.config
    for N in config.N:
        service = sampler_service.MonteCarloService(outcome.plan(N))
        batch = service.collect()
        outcome.retries += service.retries
        outcome.repository.write_samples(
            f"samples_{config.ensemble}_N{N}.csv", batch, meta={"N": N, "ensemble": config.ensemble}
        )


COMMANDS = {
    Command.DENSITY: _density,
    Command.VERIFY_SELBERG: _verify_selberg,
    Command.VERIFY_INTEGRAL_EQ: _verify_integral_eq,
    Command.SEMICIRCLE_REPORT: _semicircle_report,
    Command.RATIO: _ratio,
    Command.SAMPLE: _sample,
}


def run(config: CliConfig) -> int:
    """Execute one command; returns the process exit status."""
    logger.info(f"Running {config.command.value} for N={config.N} seed={config.seed}")
    outcome = RunOutcome(config)
    COMMANDS[config.command](outcome)
    return outcome.finish()


def build_config(command: Command, config_file: Optional[str], flags: Dict[str, Any]) -> CliConfig:
    values: Dict[str, Any] = {}
    if config_file:
        for key, value in dotenv_values(config_file).items():
            key = key.strip().replace("-", "_")
            key = "N" if key.lower() == "n" else key.lower()
            if key not in CONFIG_KEYS:
                raise click.UsageError(f"unknown key {key!r} in {config_file}")
            values[key] = value
    values.update({k: v for k, v in flags.items() if v is not None})
    try:
        return CliConfig(command=command, **values)
    except ValidationError as e:
        raise click.UsageError(str(e))


def common_options(func):
    options = [
        click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False), default=None,
                     help="key=value file with default option values"),
        click.option("--N", "N", default=None, help="matrix size, or a comma-separated list"),
        click.option("--samples", type=int, default=None, help="Monte Carlo samples per N"),
        click.option("--bins", type=int, default=None, help="histogram bins"),
        click.option("--seed", type=int, default=None, help="master seed (0 <= seed < 2**64); SPHERICAL_RMT_SEED overrides it"),
        click.option("--streams", type=int, default=None, help="worker threads"),
        click.option("--out-dir", "out_dir", default=None, help="output directory"),
        click.option("--format", "format", type=click.Choice(["csv", "json"]), default=None),
        click.option("--ensemble", type=click.Choice(["fixed_trace", "gue"]), default=None),
        click.option("--method", type=click.Choice(["dense", "tridiagonal"]), default=None),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _invoke(command: Command, config_file: Optional[str], **flags) -> None:
    config = build_config(command, config_file, flags)
    try:
        status = run(config)
    except DomainError as e:
        raise click.UsageError(str(e))
    except SphericalRMTException as e:
        logger.error(f"{command.value} failed: {str(e)}")
        click.echo(json.dumps({"command": command.value, "error": str(e)}), err=True)
        sys.exit(EXIT_FAILED)
    sys.exit(status)


@click.group(invoke_without_command=True)
@click.option("--verify-manifest", type=click.Path(exists=True, dir_okay=True), default=None,
              help=f"recompute the digests listed in a {MANIFEST_FILE}")
@click.option("--log-level", default=None, help="console log level")
@click.pass_context
def main(ctx: click.Context, verify_manifest: Optional[str], log_level: Optional[str]) -> None:
    """Fixed-trace and GUE spectra: sampling, densities and verification suites."""
    settings = get_settings()
    setup_logging(log_level or settings.LOG_LEVEL, settings.LOG_DIR)

    if verify_manifest:
        path = Path(verify_manifest)
        if path.is_dir():
            path = path / MANIFEST_FILE
        try:
            mismatches = ArtifactRepository.verify_manifest(path)
        except SphericalRMTException as e:
            click.echo(json.dumps({"manifest": str(path), "error": str(e)}), err=True)
            ctx.exit(EXIT_FAILED)
        click.echo(json.dumps({"manifest": str(path), "mismatches": mismatches}, indent=2))
        ctx.exit(EXIT_FAILED if mismatches else EXIT_OK)
    elif ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())


@main.command("density")
@common_options
def density(config_file, **flags):
    """Histogram level density of fixed-trace (or GUE) spectra."""
    _invoke(Command.DENSITY, config_file, **flags)


@main.command("verify-selberg")
@common_options
def verify_selberg(config_file, **flags):
    """Closed-form Selberg-type integrals against quadrature and Monte Carlo."""
    _invoke(Command.VERIFY_SELBERG, config_file, **flags)


@main.command("verify-integral-eq")
@common_options
def verify_integral_eq(config_file, **flags):
    """Radial mixing of the sampled fixed-trace density against the exact GUE density."""
    _invoke(Command.VERIFY_INTEGRAL_EQ, config_file, **flags)


@main.command("semicircle-report")
@common_options
def semicircle_report(config_file, **flags):
    """Rescaled fixed-trace densities against the semicircle, one overlay per N."""
    _invoke(Command.SEMICIRCLE_REPORT, config_file, **flags)


@main.command("ratio")
@common_options
def ratio(config_file, **flags):
    """Mean of the largest squared GUE eigenvalue over the mean squared eigenvalue."""
    _invoke(Command.RATIO, config_file, **flags)


@main.command("sample")
@common_options
def sample(config_file, **flags):
    """Write the sampled spectra themselves."""
    _invoke(Command.SAMPLE, config_file, **flags)


if __name__ == "__main__":
    main()
