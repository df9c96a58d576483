"""Opzioni condivise dai comandi e costruzione degli oggetti di configurazione."""

import os

import click
from flask import current_app

from stableldp import __version__
from stableldp.config import load_run_config
from stableldp.errors import DomainError
from stableldp.models import QuadratureSpec, SamplerConfig
from stableldp.services.stable_math import make_params


def run_options(f):
    """--config FILE e --out DIR, presenti su tutti i comandi."""
    f = click.option("--out", "output_dir", default=None, help="Cartella dei file prodotti.")(f)
    f = click.option(
        "--config", "config_path", default=None,
        type=click.Path(exists=True, dir_okay=False),
        help="File key=value con i parametri del comando.",
    )(f)
    return f


def sampler_options(f):
    f = click.option("--workers", type=int, default=None)(f)
    f = click.option("--method", "midpoint_method", type=click.Choice(["rejection", "table"]), default=None)(f)
    f = click.option("--seed", type=int, default=None, help="Obbligatorio (flag o file di configurazione).")(f)
    f = click.option("--N", "N", type=int, default=None, help="Numero di campioni.")(f)
    f = click.option("--n", "n", type=int, default=None, help="Passi della griglia.")(f)
    return f


def build_run_config(command, flags, config_path=None, output_dir=None):
    flags = dict(flags)
    flags["output_dir"] = output_dir
    return load_run_config(command, flags, config_path)


def params_from(run_config):
    return make_params(run_config.require("alpha"))


def quad_from(run_config):
    cfg = current_app.config
    return QuadratureSpec(
        rel_tol=float(run_config.get("quad_rel_tol", cfg["QUAD_REL_TOL"])),
        abs_tol=float(run_config.get("quad_abs_tol", cfg["QUAD_ABS_TOL"])),
        max_subdivisions=int(run_config.get("quad_max_subdivisions", cfg["QUAD_MAX_SUBDIVISIONS"])),
    )


def sampler_from(run_config, default_n=None):
    """SamplerConfig dai parametri del comando; n viene da --n, poi default_n, poi SAMPLER_N."""
    cfg = current_app.config
    return SamplerConfig(
        n=int(run_config.get("n", default_n or cfg["SAMPLER_N"])),
        table_points=int(run_config.get("table_points", cfg["SAMPLER_TABLE_POINTS"])),
        rejection_cap=int(run_config.get("rejection_cap", cfg["SAMPLER_REJECTION_CAP"])),
        depth_cap=int(run_config.get("depth_cap", cfg["SAMPLER_DEPTH_CAP"])),
        batch_size=int(run_config.get("batch_size", cfg["SAMPLER_BATCH_SIZE"])),
        workers=int(run_config.get("workers", cfg["WORKERS"])),
        midpoint_method=run_config.get("midpoint_method", cfg["SAMPLER_MIDPOINT_METHOD"]),
        quad=quad_from(run_config),
    )


def float_list(run_config, key, default=None):
    """Lista di reali da una stringa '1.0,1.2,1.4' (flag o file)."""
    raw = run_config.get(key, default)
    if raw is None:
        raise DomainError(f"parametro obbligatorio mancante: {key}")
    if isinstance(raw, (list, tuple)):
        return [float(v) for v in raw]
    try:
        return [float(v) for v in str(raw).split(",") if v.strip()]
    except ValueError:
        raise DomainError(f"{key}: lista di numeri non valida {raw!r}")


def output_file(run_config, name):
    return os.path.join(run_config.output_dir, name)


def header(run_config):
    return run_config.header_lines(__version__)
