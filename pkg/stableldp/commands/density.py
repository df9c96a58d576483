import click
import numpy as np
from flask import Blueprint

from stableldp import __version__
from stableldp.services.export import write_columns, write_density_table, write_report
from stableldp.services.stable_math import (
    build_density_table, density, density_at_zero, log_density,
)
from stableldp.utils.decorators import command_errors
from stableldp.utils.options import (
    build_run_config, header, output_file, params_from, quad_from, run_options,
)

bp = Blueprint("density", __name__, cli_group=None)

SIDECAR_POINTS = 24


def _asymptotic_columns(params, xmin, xmax, quad):
    """x^(alpha+1) p_1(x) e -log p_1(-x) / x^alpha' su una griglia geometrica.

    Ogni colonna copre solo la parte della griglia dentro l'intervallo richiesto.
    """
    reach = max(abs(xmin), xmax, 1.0)
    xs = np.geomspace(min(0.5, reach), reach, SIDECAR_POINTS)
    right = [
        x ** (params.alpha + 1.0) * density(params, 1.0, x, quad) if x <= xmax else np.nan
        for x in xs
    ]
    left = [
        -log_density(params, 1.0, -x, quad) / x ** params.alpha_prime if x <= -xmin else np.nan
        for x in xs
    ]
    return {"x": xs, "right_tail": right, "left_tail": left}


@bp.cli.command("density")
@click.option("--alpha", type=float, default=None)
@click.option("--t", "t", type=float, default=None, help="Tempo (default 1).")
@click.option("--xmin", type=float, default=None)
@click.option("--xmax", type=float, default=None)
@click.option("--points", type=int, default=None, help="Numero di righe (default 2048).")
@run_options
@command_errors("density")
def density_command(alpha, t, xmin, xmax, points, config_path, output_dir):
    """Tabella x,pdf,cdf di p_t con il file delle asintotiche di p_1."""
    rc = build_run_config(
        "density", {"alpha": alpha, "t": t, "xmin": xmin, "xmax": xmax, "points": points},
        config_path, output_dir,
    )
    params = params_from(rc)
    quad = quad_from(rc)
    t = float(rc.get("t", 1.0))
    xmin, xmax = float(rc.require("xmin")), float(rc.require("xmax"))
    points = int(rc.get("points", 2048))

    table = build_density_table(params, t, (xmin, xmax), points, quad, require_coverage=False)
    uncovered = abs(1.0 - table.total_mass)
    write_density_table(output_file(rc, "density.csv"), table, header(rc))
    write_columns(
        output_file(rc, "density_asymptotics.csv"),
        _asymptotic_columns(params, xmin, xmax, quad), header(rc),
    )
    results = {
        "rows": points,
        "total_mass": table.total_mass,
        "uncovered_mass": uncovered,
        "median": table.median,
        "p1_at_zero": density_at_zero(params),
        "alpha_prime": params.alpha_prime,
        "c_alpha": params.c_alpha,
        "C_alpha": params.C_alpha,
        "density_tail_constant": params.alpha * params.C_alpha,
    }
    write_report(output_file(rc, "density_report.json"), rc, __version__, results)
    click.echo(f"rows={points}")
    click.echo(f"total_mass={table.total_mass:.17g}")
    click.echo(f"uncovered_mass={uncovered:.3e}")
