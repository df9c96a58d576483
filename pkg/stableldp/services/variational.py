"""Costanti variazionali gamma_Phi = max {Phi(f) : f in K_ex}.

Per funzionali monotoni basta cercare tra i cammini f(t) = int_t^1 g(s) ds con
g >= 0 e int g^alpha' <= 1: sulla griglia uniforme f_i = Delta * sum_{j>=i} g_j.
Il massimo si cerca con ascesa del gradiente proiettato e piu' partenze.
"""

import logging

import numpy as np
from scipy import integrate, optimize

from stableldp.errors import DomainError, FunctionalError, UnsupportedFunctionalError
from stableldp.models import CadlagPath, GridFunctional, VariationalResult
from stableldp.services.path_space import jordan
from stableldp.services.rate_functions import gamma_from_slope, theory_slope

logger = logging.getLogger(__name__)

HOMOGENEITY_TOL = 1e-10
DEFAULT_SEEDS = tuple(range(8))
MAX_ITERATIONS = 10_000
RELATIVE_STOP = 1e-9


# ---------------------------------------------------------------------------
# Valori chiusi
# ---------------------------------------------------------------------------

def gamma_area(params):
    return (params.alpha + 1.0) ** (-1.0 / params.alpha)


def gamma_sup(params):
    return 1.0


def gamma_bridge_sup(params):
    """gamma del sup del ponte, ricavata invertendo la costante di coda c_alpha x^alpha'."""
    return gamma_from_slope(params, theory_slope(params, "sup", "bridge"))


# ---------------------------------------------------------------------------
# Funzionali su griglia
# ---------------------------------------------------------------------------

def _values_from_density(g, delta):
    """f_i = Delta * sum_{j >= i} g_j, con f_n = 0."""
    tail = np.cumsum(g[::-1])[::-1] * delta
    return np.concatenate((tail, [0.0]))


def constraint_norm(g, p, delta):
    return float(np.sum(np.maximum(g, 0.0) ** p) * delta)


def _probe_paths(n, rng, count=5):
    grid = np.linspace(0.0, 1.0, n + 1)
    paths = [1.0 - grid]
    for _ in range(count):
        g = rng.random(n)
        paths.append(_values_from_density(g, 1.0 / n))
    return paths


def register_functional(name, evaluate, monotone, gradient=None, probe_n=64):
    """Crea un GridFunctional dopo aver verificato omogeneita' e positivita' su K_ex."""
    rng = np.random.default_rng(20240611)
    values = []
    for f in _probe_paths(probe_n, rng):
        base = float(evaluate(f))
        for lam in (0.5, 2.0, 3.7):
            scaled = float(evaluate(lam * f))
            if abs(scaled - lam * base) > HOMOGENEITY_TOL * max(1.0, abs(lam * base)):
                raise FunctionalError(
                    f"funzionale {name!r} non positivamente omogeneo: "
                    f"Phi({lam} f) = {scaled:.12g}, {lam} Phi(f) = {lam * base:.12g}"
                )
        values.append(base)
    if max(values) <= 0.0:
        raise FunctionalError(f"funzionale {name!r} nullo sui cammini di prova di K_ex")
    return GridFunctional(name=name, evaluate=evaluate, monotone=bool(monotone), gradient=gradient)


def _area(values):
    values = np.asarray(values, dtype=float)
    return float(integrate.trapezoid(values, dx=1.0 / (values.size - 1)))


def _area_gradient(values):
    n = values.size - 1
    weights = np.full(n + 1, 1.0 / n)
    weights[[0, -1]] *= 0.5
    return weights


def _sup(values):
    return float(np.max(values))


def _sup_gradient(values):
    grad = np.zeros(values.size)
    grad[int(np.argmax(values))] = 1.0
    return grad


AREA = register_functional("area", _area, monotone=True, gradient=_area_gradient)
SUPREMUM = register_functional("sup", _sup, monotone=True, gradient=_sup_gradient)
BUILTIN_FUNCTIONALS = {"area": AREA, "sup": SUPREMUM}


def monotone_reduction(values):
    """f~ = f_down(1) - f_down sulla griglia: non decresce Phi per Phi monotono."""
    values = np.asarray(values, dtype=float)
    grid = np.linspace(0.0, 1.0, values.size)
    down = jordan(CadlagPath.linear(grid, values, left=values)).down
    return down.right[-1] - down.right


# ---------------------------------------------------------------------------
# Ottimizzazione
# ---------------------------------------------------------------------------

def _solve_shrink(y, kappa, p):
    """Risolve g + kappa g^(p-1) = y per y > 0 con Newton partendo da sopra."""
    g = np.minimum(y, (y / kappa) ** (1.0 / (p - 1.0)))
    for _ in range(100):
        h = g + kappa * g ** (p - 1.0) - y
        dh = 1.0 + kappa * (p - 1.0) * g ** (p - 2.0)
        step = h / dh
        g = np.maximum(g - step, 0.0)
        if np.max(np.abs(step)) <= 1e-15 * max(1.0, float(np.max(y))):
            break
    return g


def project_ball(y, p, delta):
    """Proiezione euclidea su {g >= 0, sum g^p Delta <= 1}."""
    y = np.asarray(y, dtype=float)
    g = np.maximum(y, 0.0)
    if constraint_norm(g, p, delta) <= 1.0:
        return g
    positive = y > 0
    yp = y[positive]

    def excess(lam):
        if lam == 0.0:
            return constraint_norm(yp, p, delta) - 1.0
        return constraint_norm(_solve_shrink(yp, lam * p * delta, p), p, delta) - 1.0

    hi = 1.0
    while excess(hi) > 0.0:
        hi *= 2.0
    lam = optimize.brentq(excess, 0.0, hi, xtol=1e-300, rtol=1e-13, maxiter=200)
    out = np.zeros_like(y)
    out[positive] = _solve_shrink(yp, lam * p * delta, p)
    norm = constraint_norm(out, p, delta)
    if norm > 1.0:
        out *= norm ** (-1.0 / p)
    return out


def _numeric_gradient(phi, values):
    h = 1e-6 * max(1.0, float(np.max(np.abs(values))))
    grad = np.empty(values.size)
    for i in range(values.size):
        up, down = values.copy(), values.copy()
        up[i] += h
        down[i] -= h
        grad[i] = (phi.evaluate(up) - phi.evaluate(down)) / (2.0 * h)
    return grad


def _objective(phi, g, delta):
    values = _values_from_density(g, delta)
    return float(phi.evaluate(values)), values


def _density_gradient(phi, values, delta):
    """Regola della catena: dPhi/dg_j = Delta * sum_{i<=j} dPhi/df_i."""
    grad_f = phi.gradient(values) if phi.gradient is not None else _numeric_gradient(phi, values)
    return delta * np.cumsum(np.asarray(grad_f, dtype=float)[:-1])


def _ascend(phi, g, p, delta, max_iter):
    value, values = _objective(phi, g, delta)
    grad = _density_gradient(phi, values, delta)
    scale = float(np.max(np.abs(grad)))
    if scale == 0.0:
        return g, value, 0
    step = 1.0 / scale
    floor = step * 1e-12
    iterations = 0
    while iterations < max_iter:
        iterations += 1
        candidate = project_ball(g + step * grad, p, delta)
        cand_value, cand_values = _objective(phi, candidate, delta)
        if cand_value > value:
            improvement = (cand_value - value) / max(abs(value), 1e-300)
            g, value, values = candidate, cand_value, cand_values
            grad = _density_gradient(phi, values, delta)
            step *= 2.0
            if improvement < RELATIVE_STOP:
                break
        else:
            step *= 0.5
            if step < floor:
                break
    return g, value, iterations


def gamma_numeric(params, phi, n=1024, seeds=DEFAULT_SEEDS, max_iter=MAX_ITERATIONS):
    """Massimo numerico di Phi su K_ex discretizzato con n+1 punti."""
    if not phi.monotone:
        raise UnsupportedFunctionalError(
            f"gamma_numeric supporta solo funzionali monotoni, {phi.name!r} non lo e'"
        )
    if int(n) != n or n < 64:
        raise DomainError(f"gamma_numeric: serve una griglia con n >= 64, ricevuto {n}")
    n = int(n)
    p = params.alpha_prime
    delta = 1.0 / n

    best = None
    total_iterations = 0
    for seed in seeds:
        rng = np.random.default_rng(seed)
        start = rng.random(n)
        start *= constraint_norm(start, p, delta) ** (-1.0 / p)
        g, value, iterations = _ascend(phi, start, p, delta, max_iter)
        total_iterations += iterations
        logger.debug(f"gamma_numeric[{phi.name}] partenza {seed}: {value:.12g} in {iterations} iterazioni")
        if best is None or value > best[1]:
            best = (g, value)

    g, value = best
    maximizer = _values_from_density(g, delta)
    residual = max(constraint_norm(g, p, delta) - 1.0, 0.0)
    logger.info(
        f"gamma_numeric[{phi.name}] alpha={params.alpha:.6g} n={n}: gamma={value:.10f}, "
        f"residuo {residual:.2e}, {total_iterations} iterazioni"
    )
    return VariationalResult(
        functional=phi.name, gamma=value, maximizer=maximizer,
        iterations=total_iterations, residual=residual,
    )


def analytic_maximizer(params, functional, n):
    """Massimizzatori esatti sulla griglia: area -> c (1 - s^alpha), sup -> 1 - t."""
    grid = np.linspace(0.0, 1.0, n + 1)
    if functional == "area":
        alpha = params.alpha
        return (alpha + 1.0) ** (1.0 / params.alpha_prime) / alpha * (1.0 - grid ** alpha)
    if functional == "sup":
        return 1.0 - grid
    raise DomainError(f"nessun massimizzatore noto per {functional!r}")
