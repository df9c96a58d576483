import click
from flask import Blueprint

from stableldp import __version__
from stableldp.services.export import read_path_csv, write_report
from stableldp.services.rate_functions import describe, dyadic_rate, rate_bridge, rate_excursion
from stableldp.utils.decorators import command_errors
from stableldp.utils.options import build_run_config, output_file, params_from, run_options

bp = Blueprint("rate", __name__, cli_group=None)


@bp.cli.command("rate")
@click.option("--path", "path_file", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--alpha", type=float, default=None)
@click.option("--kind", type=click.Choice(["excursion", "bridge"]), default="excursion")
@click.option("--a", "a", type=float, default=None, help="Estremo del ponte (default 0).")
@click.option("--dyadic", type=int, default=None, help="Calcola anche il tasso sullo scheletro a n punti.")
@run_options
@command_errors("rate")
def rate_command(path_file, alpha, kind, a, dyadic, config_path, output_dir):
    """Funzione di tasso di un cammino letto da CSV."""
    rc = build_run_config(
        "rate", {"path": path_file, "alpha": alpha, "kind": kind, "a": a, "dyadic": dyadic},
        config_path, output_dir,
    )
    params = params_from(rc)
    path = read_path_csv(path_file)
    if kind == "bridge":
        a = float(rc.get("a", 0.0))
        rate = rate_bridge(params, path, a)
    else:
        rate = rate_excursion(params, path)
    click.echo(describe(rate))

    results = {"kind": kind, "value": rate.value, "reason": rate.reason}
    if rc.get("dyadic") is not None:
        dyadic = int(rc.get("dyadic"))
        approx = dyadic_rate(params, path, dyadic)
        results["dyadic"] = {"n": dyadic, "value": approx.value, "reason": approx.reason}
        click.echo(f"dyadic[{dyadic}]={describe(approx)}")
    write_report(output_file(rc, "rate_report.json"), rc, __version__, results)
