"""Scrittura e lettura dei file CSV/JSON prodotti dai comandi.

Ogni file comincia con le righe di commento della RunConfig. I reali dei
cammini sono scritti con repr (round-trip esatto), quelli degli scheletri
con 17 cifre significative.
"""

import csv
import dataclasses
import json
import math
import os

import numpy as np

from stableldp.errors import FormatError
from stableldp.models import CadlagPath, INTERPOLATIONS, SKELETON_KINDS, SkeletonBatch


def _open_for_write(path):
    folder = os.path.dirname(path)
    if folder:
        os.makedirs(folder, exist_ok=True)
    return open(path, "w", newline="", encoding="utf-8")


def _write_header(handle, header_lines):
    for line in header_lines or ():
        handle.write(line if line.startswith("#") else f"# {line}")
        handle.write("\n")


def _fmt(value):
    return f"{float(value):.17g}"


def _split_comments(path):
    """Righe di commento (senza '#') e righe di dati non vuote."""
    try:
        with open(path, encoding="utf-8") as handle:
            lines = [ln.rstrip("\r\n") for ln in handle]
    except OSError as e:
        raise FormatError(f"impossibile leggere {path}: {e}")
    comments = [ln[1:].strip() for ln in lines if ln.startswith("#")]
    data = [ln for ln in lines if ln.strip() and not ln.startswith("#")]
    return comments, data


def _parse_float(raw, where):
    try:
        return float(raw)
    except ValueError:
        raise FormatError(f"{where}: valore non numerico {raw!r}")


# ---------------------------------------------------------------------------
# Cammini cadlag
# ---------------------------------------------------------------------------

def write_path_csv(path, cadlag, header_lines=None):
    with _open_for_write(path) as handle:
        _write_header(handle, header_lines)
        handle.write(f"# interpolation={cadlag.interpolation}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["t", "left", "right"])
        for t, lo, hi in zip(cadlag.times, cadlag.left, cadlag.right):
            writer.writerow([repr(float(t)), repr(float(lo)), repr(float(hi))])


def read_path_csv(path):
    """Legge un cammino `t,left,right`; senza metadato l'interpolazione e' step."""
    comments, data = _split_comments(path)
    interpolation = "step"
    for c in comments:
        if c.startswith("interpolation="):
            interpolation = c.split("=", 1)[1].strip()
    if interpolation not in INTERPOLATIONS:
        raise FormatError(f"{path}: interpolazione sconosciuta {interpolation!r}")
    rows = list(csv.reader(data))
    if not rows or [h.strip() for h in rows[0]] != ["t", "left", "right"]:
        raise FormatError(f"{path}: intestazione attesa 't,left,right'")
    cols = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise FormatError(f"{path}: riga {lineno} con {len(row)} colonne invece di 3")
        cols.append([_parse_float(v, f"{path} riga {lineno}") for v in row])
    if len(cols) < 2:
        raise FormatError(f"{path}: servono almeno due breakpoint")
    arr = np.array(cols)
    try:
        return CadlagPath(arr[:, 0], arr[:, 1], arr[:, 2], interpolation)
    except ValueError as e:
        raise FormatError(f"{path}: cammino non valido: {e}")


# ---------------------------------------------------------------------------
# Scheletri simulati
# ---------------------------------------------------------------------------

def skeleton_metadata(batch):
    meta = f"alpha={_fmt(batch.alpha)}, n={batch.n}, seed={batch.seed}, kind={batch.kind}"
    if batch.kind == "bridge":
        meta += f", a={_fmt(batch.a)}"
    return meta


def write_skeleton_csv(path, batch, header_lines=None):
    with _open_for_write(path) as handle:
        _write_header(handle, header_lines)
        handle.write(f"# {skeleton_metadata(batch)}\n")
        writer = csv.writer(handle, lineterminator="\n")
        for row in batch.values:
            writer.writerow([_fmt(v) for v in row])


def read_skeleton_csv(path):
    comments, data = _split_comments(path)
    meta = None
    for c in comments:
        if c.startswith("alpha="):
            meta = dict(part.strip().split("=", 1) for part in c.split(","))
    if meta is None or "kind" not in meta:
        raise FormatError(f"{path}: manca la riga di metadati '# alpha=..., n=..., seed=..., kind=...'")
    if meta["kind"] not in SKELETON_KINDS:
        raise FormatError(f"{path}: tipo di scheletro sconosciuto {meta['kind']!r}")
    n = int(meta["n"])
    rows = []
    for lineno, row in enumerate(csv.reader(data), start=1):
        if len(row) != n + 1:
            raise FormatError(f"{path}: il campione {lineno} ha {len(row)} valori invece di {n + 1}")
        rows.append([_parse_float(v, f"{path} campione {lineno}") for v in row])
    seed = None if meta.get("seed") in (None, "None") else int(meta["seed"])
    a = float(meta["a"]) if "a" in meta else None
    return SkeletonBatch(np.array(rows).reshape(len(rows), n + 1), meta["kind"], float(meta["alpha"]), seed, a)


# ---------------------------------------------------------------------------
# Tabelle e report
# ---------------------------------------------------------------------------

def write_density_table(path, table, header_lines=None):
    write_columns(path, {"x": table.x, "pdf": table.pdf, "cdf": table.cdf}, header_lines)


def write_columns(path, columns, header_lines=None):
    """CSV a colonne: `columns` e' un dict nome -> vettore, tutti della stessa lunghezza."""
    names = list(columns)
    data = [np.asarray(columns[k], dtype=float) for k in names]
    with _open_for_write(path) as handle:
        _write_header(handle, header_lines)
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(names)
        for row in zip(*data):
            writer.writerow([_fmt(v) for v in row])


def write_rows(path, rows, header_lines=None, columns=None):
    """CSV da una lista di dict; le colonne seguono l'ordine della prima riga."""
    columns = columns or (list(rows[0]) if rows else [])
    with _open_for_write(path) as handle:
        _write_header(handle, header_lines)
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(c, "")) for c in columns])


def _cell(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _fmt(value)
    return str(value)


def _jsonable(value):
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: _jsonable(getattr(value, f.name)) for f in dataclasses.fields(value)
                if not callable(getattr(value, f.name))}
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        # JSON non ha inf/nan
        return value if math.isfinite(value) else str(value)
    return value


def write_report(path, run_config, version, results):
    """Report JSON unico per esecuzione, con la configurazione effettiva."""
    report = {
        "tool": "stableldp",
        "version": version,
        "config": run_config.as_dict(),
        "results": results,
    }
    with _open_for_write(path) as handle:
        json.dump(_jsonable(report), handle, indent=2, sort_keys=True)
        handle.write("\n")
    return report
