"""Funzioni di tasso dell'LDP per escursione e ponte, esatte su cammini lineari a tratti.

Gli integrali c_alpha * int |f_down'|^alpha' sono somme finite sui segmenti
discendenti: nessuna quadratura. Fuori dal dominio ammissibile il valore e'
+inf con il motivo nel RateValue.
"""

import logging

import numpy as np

from stableldp.errors import DomainError
from stableldp.models import RateValue, Subdivision

logger = logging.getLogger(__name__)

# Tolleranza sui confronti con 0 (valori negativi, estremo finale, salti verso il basso)
ZERO_TOL = 1e-12


def _drop_sum(alpha_prime, times, values):
    """Somma di len * ((x_i - x_{i+1})_+ / len)^alpha' sui passi consecutivi."""
    span = np.diff(np.asarray(times, dtype=float))
    drops = np.maximum(-np.diff(np.asarray(values, dtype=float)), 0.0)
    active = drops > 0
    return float(np.sum(span[active] * (drops[active] / span[active]) ** alpha_prime))


def _down_integral(params, path):
    """int |f_down'|^alpha' sui segmenti discendenti di un cammino senza salti in giu'."""
    if path.interpolation == "step":
        return 0.0
    _, drifts = path.increments()
    span = np.diff(path.times)
    down = np.maximum(-drifts, 0.0)
    return float(np.sum(span * (down / span) ** params.alpha_prime))


def _has_down_jump(path):
    jumps, _ = path.increments()
    return bool(np.any(jumps < -ZERO_TOL))


def _finite_values(path):
    return bool(np.all(np.isfinite(path.left)) and np.all(np.isfinite(path.right)))


def rate_excursion(params, path):
    """I_ex(f) = c_alpha int (f_down')^alpha', +inf fuori da {f >= 0, f(1) = 0, f_down assolutamente continua}."""
    if not _finite_values(path):
        return RateValue.infinite("unbounded-variation-proxy")
    if path.min_value() < -ZERO_TOL:
        return RateValue.infinite("negative-values")
    if abs(path.right[-1]) > ZERO_TOL:
        return RateValue.infinite("endpoint-mismatch")
    if _has_down_jump(path):
        return RateValue.infinite("singular-down-part")
    return RateValue.finite(params.c_alpha * _down_integral(params, path))


def rate_bridge(params, path, a):
    """I_br,a(f) = c_alpha (int |f_down'|^alpha' - (a_-)^alpha'), senza vincolo di segno sul cammino."""
    if not _finite_values(path):
        return RateValue.infinite("unbounded-variation-proxy")
    if abs(path.right[-1] - a) > ZERO_TOL:
        return RateValue.infinite("endpoint-mismatch")
    if _has_down_jump(path):
        return RateValue.infinite("singular-down-part")
    a_minus = max(-float(a), 0.0)
    value = params.c_alpha * (_down_integral(params, path) - a_minus ** params.alpha_prime)
    return RateValue.finite(max(value, 0.0))


def _as_subdivision(sigma):
    return sigma if isinstance(sigma, Subdivision) else Subdivision(tuple(sigma))


def _check_lengths(sigma, values):
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size != len(sigma):
        raise DomainError(
            f"servono tanti valori quanti tempi della suddivisione: {values.size} contro {len(sigma)}"
        )
    return values


def finite_dim_rate_excursion(params, sigma, values):
    """J_sigma(x) con le convenzioni x_{n+1} = 0 e t_{n+1} = 1."""
    sigma = _as_subdivision(sigma)
    values = _check_lengths(sigma, values)
    if np.any(values < 0):
        return RateValue.infinite("negative-values")
    times = np.concatenate((sigma.times, [1.0]))
    path_values = np.concatenate((values, [0.0]))
    return RateValue.finite(params.c_alpha * _drop_sum(params.alpha_prime, times, path_values))


def finite_dim_rate_bridge(params, sigma, values, a):
    """Tasso delle marginali del ponte: tratti 0 -> x_1 -> ... -> x_n -> a, meno (a_-)^alpha'."""
    sigma = _as_subdivision(sigma)
    values = _check_lengths(sigma, values)
    times = np.concatenate(([0.0], sigma.times, [1.0]))
    path_values = np.concatenate(([0.0], values, [float(a)]))
    a_minus = max(-float(a), 0.0)
    total = _drop_sum(params.alpha_prime, times, path_values) - a_minus ** params.alpha_prime
    return RateValue.finite(max(params.c_alpha * total, 0.0))


def dyadic_rate(params, path, n):
    """Tasso sullo scheletro f(0), f(1/n), ..., f(1) del cammino.

    L'ultimo valore e' f(1) del cammino stesso: un cammino non decrescente vale 0.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"dyadic_rate: n deve essere un intero >= 1, ricevuto {n}")
    n = int(n)
    grid = np.arange(n + 1) / n
    values = np.asarray(path.value(grid[:-1]), dtype=float)
    values = np.concatenate((values, [float(path.right[-1])]))
    if not np.all(np.isfinite(values)):
        return RateValue.infinite("unbounded-variation-proxy")
    if np.any(values < -ZERO_TOL):
        return RateValue.infinite("negative-values")
    return RateValue.finite(params.c_alpha * _drop_sum(params.alpha_prime, grid, values))


def functional_rate(params, x, gamma):
    """J_Phi(x) = c_alpha (x / gamma)^alpha'."""
    if not gamma > 0:
        raise DomainError(f"functional_rate: gamma deve essere positiva, ricevuta {gamma}")
    if x < 0:
        raise DomainError(f"functional_rate: x deve essere non negativo, ricevuto {x}")
    return params.c_alpha * (x / gamma) ** params.alpha_prime


def theory_slope(params, functional, kind="excursion"):
    """Costante della coda -log P(X > x) ~ slope * x^alpha'."""
    if functional == "area" and kind == "excursion":
        return params.c_alpha * (params.alpha + 1.0) ** (1.0 / (params.alpha - 1.0))
    if functional == "sup" and kind in ("excursion", "bridge"):
        return params.c_alpha
    raise DomainError(f"nessuna pendenza teorica per il funzionale {functional!r} su {kind!r}")


def gamma_from_slope(params, slope):
    """Inverte J_Phi: la gamma che produce la pendenza data."""
    if not slope > 0:
        raise DomainError(f"pendenza non positiva: {slope}")
    return (params.c_alpha / slope) ** (1.0 / params.alpha_prime)


def describe(rate):
    """Rappresentazione testuale usata dalla CLI."""
    if rate.is_finite:
        return f"{rate.value:.17g}"
    return f"inf ({rate.reason})"
