import click
import numpy as np
from flask import Blueprint

from stableldp import __version__
from stableldp.services.export import write_report, write_skeleton_csv
from stableldp.services.sampling import sample_bridges, sample_excursions, sample_free_paths
from stableldp.utils.decorators import command_errors, require_seed
from stableldp.utils.options import (
    build_run_config, header, output_file, params_from, run_options, sampler_from, sampler_options,
)

bp = Blueprint("sample", __name__, cli_group=None)

# tolleranza sugli invarianti dell'escursione
EXCURSION_TOL = 1e-9


@bp.cli.command("sample")
@click.option("--kind", type=click.Choice(["free", "bridge", "excursion"]), required=True)
@click.option("--alpha", type=float, default=None)
@click.option("--a", "a", type=float, default=None, help="Estremo finale del ponte (default 0).")
@sampler_options
@run_options
@command_errors("sample")
def sample_command(kind, alpha, a, n, N, seed, midpoint_method, workers, config_path, output_dir):
    """Campiona N scheletri su n+1 punti e li scrive in CSV."""
    rc = build_run_config(
        "sample",
        {"kind": kind, "alpha": alpha, "a": a, "n": n, "N": N, "seed": seed,
         "midpoint_method": midpoint_method, "workers": workers},
        config_path, output_dir,
    )
    seed = require_seed(rc)
    params = params_from(rc)
    config = sampler_from(rc)
    n = config.n
    N = int(rc.require("N"))

    if kind == "bridge":
        a = float(rc.get("a", 0.0))
        batch = sample_bridges(params, a, n, N, seed, config)
    elif kind == "excursion":
        batch = sample_excursions(params, n, N, seed, config)
    else:
        batch = sample_free_paths(params, n, N, seed, config)

    values = batch.values
    results = {"rows": len(batch), "n": batch.n, "min": float(values.min()), "max": float(values.max())}
    if kind == "excursion":
        results["negative_violations"] = int(np.sum(values.min(axis=1) < -EXCURSION_TOL))
        results["endpoint_violations"] = int(np.sum(np.abs(values[:, -1]) > EXCURSION_TOL))
    if kind == "bridge":
        results["endpoint_violations"] = int(np.sum(values[:, -1] != batch.a))

    write_skeleton_csv(output_file(rc, f"sample_{kind}.csv"), batch, header(rc))
    write_report(output_file(rc, f"sample_{kind}_report.json"), rc, __version__, results)
    click.echo(f"rows={len(batch)} n={batch.n}")
    for key in ("negative_violations", "endpoint_violations"):
        if key in results:
            click.echo(f"{key}={results[key]}")
