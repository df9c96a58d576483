from dataclasses import dataclass, field
from typing import Optional

from dotenv import dotenv_values

from stableldp.errors import DomainError


class Config:
    # Quadratura
    QUAD_REL_TOL = 1e-8
    QUAD_ABS_TOL = 1e-12
    QUAD_MAX_SUBDIVISIONS = 200

    # Campionamento
    SAMPLER_N = 1024
    SAMPLER_TABLE_POINTS = 512
    SAMPLER_REJECTION_CAP = 64
    SAMPLER_DEPTH_CAP = 16
    SAMPLER_BATCH_SIZE = 2048
    SAMPLER_MIDPOINT_METHOD = "rejection"
    WORKERS = 1

    # Harness Monte Carlo
    MIN_FIT_HITS = 30
    JACKKNIFE_BATCHES = 50
    PROBE_MIN_HITS = 10

    # Output
    OUTPUT_DIR = "output"


# Chiavi numeriche riconosciute nei file di configurazione
_INT_KEYS = {"seed", "n", "N", "points", "workers", "batch_size", "n_max", "dyadic"}
_FLOAT_KEYS = {"alpha", "t", "xmin", "xmax", "a", "tol", "delta"}


@dataclass
class RunConfig:
    """Configurazione effettiva di un comando, riportata in testa a ogni file."""

    command: str
    alpha: Optional[float] = None
    seed: Optional[int] = None
    n: Optional[int] = None
    N: Optional[int] = None
    output_dir: str = Config.OUTPUT_DIR
    extra: dict = field(default_factory=dict)

    def get(self, key, default=None):
        if key in ("alpha", "seed", "n", "N", "output_dir"):
            value = getattr(self, key)
            return default if value is None else value
        return self.extra.get(key, default)

    def require(self, key):
        value = self.get(key)
        if value is None:
            raise DomainError(f"parametro obbligatorio mancante: {key}")
        return value

    def as_dict(self):
        out = {"command": self.command, "output_dir": self.output_dir}
        for key in ("alpha", "seed", "n", "N"):
            out[key] = getattr(self, key)
        out.update(self.extra)
        return out

    def header_lines(self, version):
        lines = [f"# stableldp {version}"]
        for key, value in sorted(self.as_dict().items(), key=lambda kv: kv[0].lower()):
            lines.append(f"# {key}={'none' if value is None else value}")
        return lines


def _coerce(key, raw):
    if raw is None:
        return None
    if not isinstance(raw, str):
        return raw
    raw = raw.strip()
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
    except ValueError:
        raise DomainError(f"valore non valido per {key}: {raw!r}")
    return raw


def load_run_config(command, flags, path=None):
    """Costruisce la RunConfig: default < file key=value < flag espliciti.

    I flag con valore None non sovrascrivono il file. Il file non viene
    caricato nell'ambiente del processo.
    """
    values = {}
    if path:
        file_values = dotenv_values(path)
        values.update({k: _coerce(k, v) for k, v in file_values.items() if v is not None})
    values.update({k: _coerce(k, v) for k, v in flags.items() if v is not None})

    core = {key: values.pop(key, None) for key in ("alpha", "seed", "n", "N")}
    output_dir = values.pop("output_dir", None) or Config.OUTPUT_DIR
    return RunConfig(command=command, output_dir=str(output_dir), extra=values, **core)
