"""
Command-Line Interface

click command group ``smcdma``. Scenario subcommands load an optional flat
TOML configuration, apply the command-line overrides, run the scenario and
print a one-line summary.

Exit codes: 0 success, 2 configuration error (and click usage errors),
3 numerical error during a run.
"""

import logging
import os
import re
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

import click

from .. import __version__
from ..models.config import ExperimentConfig
from ..models.errors import ConfigError, NumericalError, UnsupportedDegreeError
from ..services.analysis import complexity_per_symbol, step_bounds
from ..services.cdma_model import build_convolution_matrix, gold_family
from ..services.harness import run_scenario
from ..utils.export import write_codes
from ..utils.logging import configure_logging

logger = logging.getLogger(__name__)

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

# Commas inside "(...)" belong to the parameters of one algorithm.
_ALGO_SPLIT = re.compile(r",(?![^()]*\))")

SCENARIO_COMMANDS = {
    "interference-tracking": "track-interference",
    "sinr-convergence": "sinr",
    "ber-vs-snr": "ber-snr",
    "ber-vs-users": "ber-users",
    "ber-vs-doppler": "ber-doppler",
}


def split_algorithms(values: Sequence[str]) -> list:
    """Split ``--algo`` values into algorithm strings."""
    names = []
    for value in values:
        names.extend(part.strip() for part in _ALGO_SPLIT.split(value) if part.strip())
    return names


def load_config(scenario: Optional[str], config_path: Optional[Path],
                overrides: Dict[str, Any]) -> ExperimentConfig:
    """Defaults < configuration file < command-line overrides."""
    values = {key: value for key, value in overrides.items() if value is not None}
    if scenario is not None:
        values["scenario"] = scenario
    if config_path is not None:
        return ExperimentConfig.from_file(config_path, values)
    return ExperimentConfig.build(values)


def _fail(message: str, code: int) -> None:
    click.echo(f"Error: {message}", err=True)
    click.get_current_context().exit(code)


def _scenario_command(scenario: str, help_text: str, with_family: bool = False):
    """Build a scenario subcommand with the shared options."""

    @click.option("--config", "config_path", type=click.Path(path_type=Path), default=None,
                  help="Flat TOML configuration file.")
    @click.option("--seed", type=click.IntRange(min=0), default=None, help="Master seed.")
    @click.option("--runs", type=click.IntRange(min=1), default=None, help="Monte-Carlo runs.")
    @click.option("--out", "out_dir", type=click.Path(path_type=Path), default=None,
                  help="Output directory.")
    @click.option("--algo", multiple=True, help='Algorithms, e.g. "nlms,sm-nlms:pidb(alpha=8)".')
    @click.option("--workers", type=click.IntRange(min=1), default=None, help="Worker processes.")
    @click.option("--trace", is_flag=True, default=False, help="Also write run-0 traces.")
    def command(config_path, seed, runs, out_dir, algo, workers, trace, family=None):
        overrides = {
            "seed": seed,
            "runs": runs,
            "workers": workers,
            "trace": trace or None,
            "family": family,
            "algorithms": split_algorithms(algo) or None,
        }
        try:
            config = load_config(scenario, config_path, overrides)
            target = out_dir or Path(os.getenv("SMCDMA_OUT_DIR", "results")) / scenario
            artifact = run_scenario(config, target)
        except ConfigError as e:
            _fail(str(e), EXIT_CONFIG)
            return
        except NumericalError as e:
            _fail(f"{type(e).__name__}: {e}", EXIT_NUMERICAL)
            return
        click.echo(artifact.summary_line())

    if with_family:
        command = click.option("--family", type=click.Choice(["nlms", "ap", "beacon"]), default=None,
                               help="Algorithm set of the comparison.")(command)
    return click.command(SCENARIO_COMMANDS[scenario], help=help_text)(command)


@click.group()
@click.option("--log-level", default=None, help="Logging level (default: SMCDMA_LOG_LEVEL or WARNING).")
@click.version_option(version=__version__, prog_name="smcdma")
def cli(log_level):
    """Set-membership adaptive receivers for DS-CDMA downlinks."""
    try:
        configure_logging(log_level)
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint="--log-level")


cli.add_command(_scenario_command("interference-tracking", "Track the interference power at the RAKE output."))
cli.add_command(_scenario_command("sinr-convergence", "SINR convergence of one algorithm family.", with_family=True))
cli.add_command(_scenario_command("ber-vs-snr", "BER and update rate versus Eb/N0."))
cli.add_command(_scenario_command("ber-vs-users", "BER and update rate versus number of users."))
cli.add_command(_scenario_command("ber-vs-doppler", "BER and update rate versus fdT."))


@cli.command("codes")
@click.option("--degree", type=int, default=5, show_default=True, help="Shift-register degree.")
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=Path("codes.csv"),
              show_default=True, help="CSV file.")
def codes_command(degree, out_path):
    """Write the Gold code family, one +1/-1 row per code."""
    try:
        codes = gold_family(degree)
    except UnsupportedDegreeError as e:
        _fail(str(e), EXIT_CONFIG)
        return
    write_codes(codes, out_path)
    click.echo(f"{len(codes)} codes of length {codes[0].N} written to {out_path}")


@cli.command("bounds-report")
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None,
              help="Flat TOML configuration file.")
def bounds_report_command(config_path):
    """Print the step-size stability limits of the desired user's estimators."""
    try:
        config = load_config(None, config_path, {})
        code = gold_family(config.gold_degree)[config.desired_user]
        C = build_convolution_matrix(code, config.channel_span)
        report = step_bounds(C)
    except ConfigError as e:
        _fail(str(e), EXIT_CONFIG)
        return
    except NumericalError as e:
        _fail(f"{type(e).__name__}: {e}", EXIT_NUMERICAL)
        return

    click.echo(report.to_text())
    M = C.M
    click.echo(f"mu_h default = {config.mu_h_scale * report.mu_h_max:.10g}")
    click.echo(f"mu_A default = {config.mu_A_scale * report.mu_A_max:.10g}")
    for spec in config.algorithm_specs():
        cost = complexity_per_symbol(spec.family, M, spec.P)
        click.echo(f"{spec.label}: {cost['check']:g} + UR x {cost['update']:g} multiplications/symbol")
