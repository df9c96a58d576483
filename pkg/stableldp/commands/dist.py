import click
from flask import Blueprint

from stableldp import __version__
from stableldp.services.export import read_path_csv, write_report
from stableldp.services.path_space import j1_oscillation, m1_distance, m_oscillation
from stableldp.utils.decorators import command_errors
from stableldp.utils.options import build_run_config, output_file, run_options

bp = Blueprint("dist", __name__, cli_group=None)


@bp.cli.command("dist")
@click.option("--a", "a_file", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--b", "b_file", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--tol", type=float, default=None, help="Tolleranza della bisezione (default 1e-6).")
@click.option("--delta", type=float, default=None, help="Finestra per w_M e omega_J1.")
@run_options
@command_errors("dist")
def dist_command(a_file, b_file, tol, delta, config_path, output_dir):
    """Distanza M1' tra due cammini letti da CSV."""
    rc = build_run_config(
        "dist", {"a_path": a_file, "b_path": b_file, "tol": tol, "delta": delta},
        config_path, output_dir,
    )
    first, second = read_path_csv(a_file), read_path_csv(b_file)
    tol = float(rc.get("tol", 1e-6))
    distance = m1_distance(first, second, tol)
    click.echo(f"{distance:.17g}")

    results = {"distance": distance, "tol": tol}
    if rc.get("delta") is not None:
        delta = float(rc.get("delta"))
        for label, path in (("a", first), ("b", second)):
            wm, wj = m_oscillation(path, delta), j1_oscillation(path, delta)
            results[f"w_M_{label}"] = wm
            results[f"omega_J1_{label}"] = wj
            click.echo(f"w_M[{label}]={wm:.17g} omega_J1[{label}]={wj:.17g}")
    write_report(output_file(rc, "dist_report.json"), rc, __version__, results)
