import logging

import click
from flask import Blueprint

from stableldp import __version__
from stableldp.errors import FitError
from stableldp.services import ldp_harness
from stableldp.services.export import write_report, write_rows
from stableldp.services.rate_functions import theory_slope
from stableldp.utils.decorators import command_errors, require_seed
from stableldp.utils.options import (
    build_run_config, float_list, header, output_file, params_from, run_options,
    sampler_from, sampler_options,
)

logger = logging.getLogger(__name__)

bp = Blueprint("tails", __name__, cli_group=None)


def _fit_or_none(params, estimate, theory, label):
    try:
        return ldp_harness.fit_ldp_slope(params, estimate, theory)
    except FitError as e:
        logger.warning(f"fit {label} non disponibile: {e}")
        return None


@bp.cli.command("tails")
@click.option("--functional", type=click.Choice(["area", "sup"]), required=True)
@click.option("--kind", type=click.Choice(["excursion", "bridge"]), default="excursion")
@click.option("--alpha", type=float, default=None)
@click.option("--thresholds", default=None, help="Soglie crescenti separate da virgole.")
@click.option("--two-grid", "two_grid", is_flag=True, default=False, help="Ripete il fit sulla griglia 2n.")
@click.option("--moments", "n_max", type=int, default=None, help="Crescita dei momenti fino a k = n_max.")
@click.option("--laplace", "laplace", default=None, help="Valori di t per log E[exp(tX)] / t^alpha.")
@sampler_options
@run_options
@command_errors("tails")
def tails_command(functional, kind, alpha, thresholds, two_grid, n_max, laplace,
                  n, N, seed, midpoint_method, workers, config_path, output_dir):
    """Code Monte Carlo di area o sup con il fit della pendenza LDP."""
    rc = build_run_config(
        "tails",
        {"functional": functional, "kind": kind, "alpha": alpha, "thresholds": thresholds,
         "two_grid": two_grid or None, "n_max": n_max, "laplace": laplace,
         "n": n, "N": N, "seed": seed, "midpoint_method": midpoint_method, "workers": workers},
        config_path, output_dir,
    )
    seed = require_seed(rc)
    params = params_from(rc)
    config = sampler_from(rc)
    n, N = config.n, int(rc.require("N"))
    two_grid = str(rc.get("two_grid", False)).lower() in ("true", "1", "yes")
    xs = float_list(rc, "thresholds")
    theory = theory_slope(params, functional, kind)

    samples = ldp_harness.simulate_functionals(params, kind, N, n, seed, config, two_grid=two_grid)
    estimate = ldp_harness.estimate_tail(params, functional, kind, xs, samples=samples[functional])
    write_rows(output_file(rc, f"tails_{functional}_{kind}.csv"), estimate.rows(), header(rc))

    results = {"theory_slope": theory, "table": estimate.rows()}
    fit = _fit_or_none(params, estimate, theory, f"{functional}/{kind} n={n}")
    results["fit"] = fit
    if fit is not None:
        click.echo(f"slope={fit.slope:.6f} theory={theory:.6f} deviation={fit.relative_deviation:.1%}")
        if int(estimate.usable.sum()) >= 6:
            shift = ldp_harness.window_shift_report(params, estimate, theory)
            results["window_shift"] = shift
            click.echo(f"window_shift_shrinks={str(shift['shrinks']).lower()}")
    else:
        click.echo("slope=unavailable")

    if two_grid:
        fine = ldp_harness.estimate_tail(params, functional, kind, xs, samples=samples[f"{functional}_2n"])
        fit_fine = _fit_or_none(params, fine, theory, f"{functional}/{kind} n={2 * n}")
        results["fit_2n"] = fit_fine
        if fit is not None and fit_fine is not None:
            guard = ldp_harness.two_grid_guard(fit, fit_fine)
            results["two_grid_guard"] = guard
            click.echo(f"two_grid_guard={'pass' if guard['passed'] else 'fail'}")

    if rc.get("n_max") is not None:
        rows = ldp_harness.moment_growth(params, functional, int(rc.get("n_max")), samples[functional], kind)
        write_rows(output_file(rc, f"moments_{functional}_{kind}.csv"), rows, header(rc))
        results["moments"] = rows
    if rc.get("laplace") is not None:
        rows = ldp_harness.laplace_growth(params, functional, float_list(rc, "laplace"), samples[functional], kind)
        write_rows(output_file(rc, f"laplace_{functional}_{kind}.csv"), rows, header(rc))
        results["laplace"] = rows

    write_report(output_file(rc, f"tails_{functional}_{kind}_report.json"), rc, __version__, results)
