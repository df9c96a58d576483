import click
import numpy as np
from flask import Blueprint

from stableldp import __version__
from stableldp.models import CadlagPath
from stableldp.services.export import write_path_csv, write_report
from stableldp.services.variational import (
    BUILTIN_FUNCTIONALS, analytic_maximizer, gamma_area, gamma_numeric, gamma_sup,
)
from stableldp.utils.decorators import command_errors
from stableldp.utils.options import build_run_config, header, output_file, params_from, run_options

bp = Blueprint("gamma", __name__, cli_group=None)

ANALYTIC = {"area": gamma_area, "sup": gamma_sup}


@bp.cli.command("gamma")
@click.option("--functional", type=click.Choice(sorted(BUILTIN_FUNCTIONALS)), required=True)
@click.option("--alpha", type=float, default=None)
@click.option("--n", "n", type=int, default=None, help="Passi della griglia (default 1024).")
@click.option("--starts", type=int, default=None, help="Numero di partenze (default 8).")
@run_options
@command_errors("gamma")
def gamma_command(functional, alpha, n, starts, config_path, output_dir):
    """gamma_Phi numerica e analitica, con il massimizzatore in CSV."""
    rc = build_run_config(
        "gamma", {"functional": functional, "alpha": alpha, "n": n, "starts": starts},
        config_path, output_dir,
    )
    params = params_from(rc)
    n = int(rc.get("n", 1024))
    starts = int(rc.get("starts", 8))

    result = gamma_numeric(params, BUILTIN_FUNCTIONALS[functional], n=n, seeds=range(starts))
    exact = ANALYTIC[functional](params)
    reference = analytic_maximizer(params, functional, n)
    l2_gap = float(np.sqrt(np.mean((result.maximizer - reference) ** 2)))

    grid = np.linspace(0.0, 1.0, n + 1)
    write_path_csv(
        output_file(rc, f"gamma_{functional}_maximizer.csv"),
        CadlagPath.linear(grid, result.maximizer), header(rc),
    )
    results = {
        "functional": functional,
        "numeric": result.gamma,
        "analytic": exact,
        "gap": result.gamma - exact,
        "maximizer_l2_gap": l2_gap,
        "iterations": result.iterations,
        "constraint_residual": result.residual,
    }
    write_report(output_file(rc, f"gamma_{functional}_report.json"), rc, __version__, results)
    click.echo(f"numeric={result.gamma:.12f}")
    click.echo(f"analytic={exact:.12f}")
    click.echo(f"gap={result.gamma - exact:.3e}")
    click.echo(f"maximizer_l2_gap={l2_gap:.3e}")
