"""Campionamento di incrementi stabili, cammini liberi, ponti ed escursioni normalizzate.

Gli incrementi usano Chambers-Mallows-Stuck con la scala gia' inclusa. Il
ponte verso a si costruisce per bisezione sui tempi diadici: il punto medio tra
(u, y) e (v, z) ha densita' proporzionale a p_h(x - y) p_h(z - x), h = (v-u)/2,
quindi lo scheletro e' esatto sulla griglia. L'escursione e' lo shift di
Vervaat del ponte verso 0.

Ogni blocco di campioni ha il proprio flusso (seed, indice del blocco): il
risultato non dipende dal numero di worker.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy import integrate

from stableldp.errors import DomainError
from stableldp.models import PathSkeleton, RngStream, SamplerConfig, SkeletonBatch
from stableldp.services.stable_math import tabulate_density

logger = logging.getLogger(__name__)

# Ampiezza della tabella di ripiego, in scarti interquartili oltre gli estremi
TABLE_SPREAD = 12.0
# Righe per blocco quando si costruiscono tabelle vettoriali
_TABLE_CHUNK = 4096


# ---------------------------------------------------------------------------
# Incrementi
# ---------------------------------------------------------------------------

def _unit_draws(params, size, generator):
    """L_1 con Laplace exp(lambda^alpha): CMS per beta = +1 con sigma incorporata."""
    alpha = params.alpha
    v = generator.uniform(-math.pi / 2.0, math.pi / 2.0, size)
    w = generator.standard_exponential(size)
    b = math.pi / 2.0 - math.pi / alpha
    return (
        np.sin(alpha * (v + b)) / np.cos(v) ** (1.0 / alpha)
        * (np.cos(v - alpha * (v + b)) / w) ** ((1.0 - alpha) / alpha)
    )


def stable_increments(params, t, size, generator):
    if not t > 0:
        raise DomainError(f"stable_increment: il tempo deve essere positivo, ricevuto t={t}")
    return t ** (1.0 / params.alpha) * _unit_draws(params, size, generator)


def stable_increment(params, t, rng):
    """Una estrazione dalla legge di L_t."""
    return float(stable_increments(params, t, None, rng.generator))


# ---------------------------------------------------------------------------
# Punto medio del ponte
# ---------------------------------------------------------------------------

def _inverse_rows(grid, cdf, u):
    """Inversa riga per riga di cumulate crescenti (interpolazione lineare)."""
    target = u * cdf[:, -1]
    idx = np.clip((cdf < target[:, None]).sum(axis=1), 1, grid.shape[1] - 1)
    rows = np.arange(grid.shape[0])
    c0, c1 = cdf[rows, idx - 1], cdf[rows, idx]
    x0, x1 = grid[rows, idx - 1], grid[rows, idx]
    width = c1 - c0
    frac = np.where(width > 0, (target - c0) / np.where(width > 0, width, 1.0), 0.0)
    return x0 + np.clip(frac, 0.0, 1.0) * (x1 - x0)


def _table_midpoints(law, d, generator, points):
    """Inversa della cumulata di p_1(w) p_1(D - w) su una tabella per ogni D."""
    out = np.empty(d.size)
    spread = TABLE_SPREAD * law.iqr
    s = np.linspace(0.0, 1.0, points)
    for start in range(0, d.size, _TABLE_CHUNK):
        dd = d[start:start + _TABLE_CHUNK]
        lo = np.minimum(dd, 0.0) - spread
        hi = np.maximum(dd, 0.0) + spread
        grid = lo[:, None] + (hi - lo)[:, None] * s[None, :]
        log_prod = law.log_pdf1(grid) + law.log_pdf1(dd[:, None] - grid)
        prod = np.exp(log_prod - log_prod.max(axis=1, keepdims=True))
        cdf = integrate.cumulative_trapezoid(prod, grid, axis=1, initial=0.0)
        out[start:start + dd.size] = _inverse_rows(grid, cdf, generator.random(dd.size))
    return out


def _rejection_midpoints(params, law, d, generator, config):
    """Rigetto con proposta 1/2 p_1(w) + 1/2 p_1(D - w); ripiego sulla tabella."""
    out = np.empty(d.size)
    pending = np.arange(d.size)
    bound = law.half_bound(d)
    rounds = 0
    while pending.size and rounds < config.rejection_cap:
        rounds += 1
        dp = d[pending]
        draws = _unit_draws(params, pending.size, generator)
        flip = generator.random(pending.size) < 0.5
        u = np.where(flip, dp - draws, draws)
        pu, pv = law.pdf1(u), law.pdf1(dp - u)
        accept = generator.random(pending.size) * bound[pending] * (pu + pv) <= pu * pv
        out[pending[accept]] = u[accept]
        pending = pending[~accept]
    if pending.size:
        logger.debug(f"punto medio: {pending.size} estrazioni passano alla tabella dopo {rounds} turni")
        out[pending] = _table_midpoints(law, d[pending], generator, config.table_points)
    return out


def _bridge_block(params, a, n, count, generator, config, law):
    levels = int(round(math.log2(n)))
    if levels > config.depth_cap:
        raise DomainError(f"n={n} richiede {levels} livelli di bisezione, oltre il limite {config.depth_cap}")
    vals = np.zeros((count, n + 1))
    vals[:, n] = a
    step = n
    while step > 1:
        half = step // 2
        h = half / n
        scale = h ** (1.0 / params.alpha)
        left = vals[:, 0:n:step]
        right = vals[:, step:n + 1:step]
        d = ((right - left) / scale).ravel()
        if config.midpoint_method == "table":
            w = _table_midpoints(law, d, generator, config.table_points)
        else:
            w = _rejection_midpoints(params, law, d, generator, config)
        vals[:, half:n:step] = left + scale * w.reshape(left.shape)
        step = half
    vals[:, n] = a
    return vals


def vervaat(values):
    """Shift ciclico di ponti verso 0 nel minimo (primo indice in caso di parita')."""
    values = np.atleast_2d(np.asarray(values, dtype=float))
    n = values.shape[1] - 1
    m = np.argmin(values[:, :n], axis=1)
    idx = (m[:, None] + np.arange(n)[None, :]) % n
    rows = np.arange(values.shape[0])[:, None]
    out = np.empty_like(values)
    out[:, :n] = values[rows, idx] - values[rows, m[:, None]]
    out[:, n] = 0.0
    return out


def _check_grid(kind, n):
    if n < 1:
        raise DomainError(f"la griglia deve avere almeno un passo, ricevuto n={n}")
    if kind != "free" and n & (n - 1):
        raise DomainError(f"la bisezione richiede n potenza di 2, ricevuto {n}")


def sample_block(params, kind, count, n, generator, config, a=0.0):
    """Matrice (count, n+1) di scheletri del tipo richiesto."""
    if kind == "free":
        incs = stable_increments(params, 1.0 / n, (count, n), generator)
        return np.concatenate((np.zeros((count, 1)), np.cumsum(incs, axis=1)), axis=1)
    law = tabulate_density(params, config.quad)
    if kind == "bridge":
        return _bridge_block(params, float(a), n, count, generator, config, law)
    if kind == "excursion":
        return vervaat(_bridge_block(params, 0.0, n, count, generator, config, law))
    raise DomainError(f"tipo di scheletro sconosciuto: {kind}")


def map_blocks(params, kind, N, n, seed, config=None, reducer=None, a=0.0):
    """Campiona N scheletri a blocchi e applica `reducer` a ogni blocco.

    Il blocco b usa RngStream(seed, (b,)): l'output e' identico con 1 o piu' worker.
    """
    config = config or SamplerConfig()
    if N < 1:
        raise DomainError(f"serve almeno un campione, ricevuto N={N}")
    _check_grid(kind, n)
    sizes = [config.batch_size] * (N // config.batch_size)
    if N % config.batch_size:
        sizes.append(N % config.batch_size)
    streams = RngStream(seed).spawn(len(sizes))
    if kind != "free":
        # la tabella va costruita una volta sola, prima dei thread
        tabulate_density(params, config.quad)

    def run(job):
        size, stream = job
        block = sample_block(params, kind, size, n, stream.generator, config, a)
        return reducer(block) if reducer is not None else block

    jobs = list(zip(sizes, streams))
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(job) for job in jobs]
    logger.info(f"campionati {N} scheletri {kind} (alpha={params.alpha:.6g}, n={n}, seed={seed}) in {len(sizes)} blocchi")
    return results


# ---------------------------------------------------------------------------
# API per batch e per singolo campione
# ---------------------------------------------------------------------------

def sample_bridges(params, a, n, N, seed, config=None):
    values = np.vstack(map_blocks(params, "bridge", N, n, seed, config, a=a))
    return SkeletonBatch(values, "bridge", params.alpha, seed, float(a))


def sample_excursions(params, n, N, seed, config=None):
    values = np.vstack(map_blocks(params, "excursion", N, n, seed, config))
    return SkeletonBatch(values, "excursion", params.alpha, seed)


def sample_free_paths(params, n, N, seed, config=None):
    values = np.vstack(map_blocks(params, "free", N, n, seed, config))
    return SkeletonBatch(values, "free", params.alpha, seed)


def _single(params, kind, n, rng, config, a=0.0):
    config = config or SamplerConfig()
    _check_grid(kind, n)
    values = sample_block(params, kind, 1, n, rng.generator, config, a)[0]
    return PathSkeleton(values, kind, params.alpha, rng.seed, float(a) if kind == "bridge" else None)


def sample_bridge(params, a, n, rng, config=None):
    """Scheletro esatto del ponte verso a sui tempi k/n."""
    return _single(params, "bridge", n, rng, config, a)


def sample_excursion(params, n, rng, config=None):
    return _single(params, "excursion", n, rng, config)


def sample_free_path(params, n, rng, config=None):
    return _single(params, "free", n, rng, config)


# ---------------------------------------------------------------------------
# Funzionali sugli scheletri
# ---------------------------------------------------------------------------

def area_values(values):
    """Somma di Riemann sinistra, una per riga."""
    values = np.atleast_2d(values)
    n = values.shape[1] - 1
    return values[:, :n].sum(axis=1) / n


def sup_values(values):
    return np.atleast_2d(values).max(axis=1)


def functional_area(skeleton):
    return float(area_values(skeleton.values)[0])


def functional_sup(skeleton):
    """Massimo sui nodi: sottostima il sup del cammino continuo."""
    return float(sup_values(skeleton.values)[0])
