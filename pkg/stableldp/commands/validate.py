import click
from flask import Blueprint

from stableldp import __version__
from stableldp.errors import ValidationFailure
from stableldp.services import ldp_harness
from stableldp.services.export import write_report, write_rows
from stableldp.utils.decorators import command_errors, require_seed
from stableldp.utils.options import (
    build_run_config, header, output_file, params_from, run_options, sampler_from, sampler_options,
)

bp = Blueprint("validate", __name__, cli_group=None)

BRIDGE_ENDPOINTS = (0.0, -1.0, 1.0)
BRIDGE_TIMES = (0.25, 0.5)
SUITES = ("bridge", "excursion", "control", "increments")


def _run_suite(suite, params, N, n, seed, config):
    if suite == "bridge":
        checks = ldp_harness.validate_bridge_marginals(params, BRIDGE_ENDPOINTS, BRIDGE_TIMES, N, seed, config=config)
        checks.append(ldp_harness.validate_bridge_reversal(params, 0.25, N, seed + 100, config=config))
        return checks
    if suite == "excursion":
        N_ex = ldp_harness.EXCURSION_FACTOR * N
        return [ldp_harness.validate_excursion_transition(params, N_ex, seed, n=n, config=config)]
    if suite == "control":
        return [ldp_harness.validate_scaling_negative_control(params, N, seed, n=n, config=config)]
    return [ldp_harness.validate_increment_scaling(params, 0.25, N, seed)]


@bp.cli.command("validate")
@click.option("--alpha", type=float, default=None)
@click.option("--suite", type=click.Choice(("all",) + SUITES), default="all")
@sampler_options
@run_options
@command_errors("validate")
def validate_command(alpha, suite, n, N, seed, midpoint_method, workers, config_path, output_dir):
    """Validazioni KS dei campionatori; esce con 1 se un test fallisce."""
    rc = build_run_config(
        "validate",
        {"alpha": alpha, "suite": suite, "n": n, "N": N, "seed": seed,
         "midpoint_method": midpoint_method, "workers": workers},
        config_path, output_dir,
    )
    seed = require_seed(rc)
    params = params_from(rc)
    config = sampler_from(rc, default_n=64)
    N, n = int(rc.get("N", 100_000)), config.n
    suites = SUITES if rc.get("suite", "all") == "all" else (rc.get("suite"),)

    checks = []
    for offset, name in enumerate(suites):
        checks.extend(_run_suite(name, params, N, n, seed + 1000 * offset, config))

    rows = [
        {"name": c.name, "statistic": c.statistic, "threshold": c.threshold,
         "n_samples": c.n_samples, "passed": c.passed}
        for c in checks
    ]
    write_rows(output_file(rc, "validate.csv"), rows, header(rc))
    write_report(output_file(rc, "validate_report.json"), rc, __version__, {"checks": checks})
    for c in checks:
        click.echo(f"{'ok  ' if c.passed else 'FAIL'} {c.name}: {c.statistic:.4f} (soglia {c.threshold:.4g})")

    failed = [c.name for c in checks if not c.passed]
    if failed:
        raise ValidationFailure(f"{len(failed)} validazioni fallite: {', '.join(failed)}")
