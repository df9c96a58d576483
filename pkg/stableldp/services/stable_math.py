"""Densita' della legge stabile spettralmente positiva e quantita' collegate.

p_t e' la densita' di L_t, con E[exp(-lambda L_t)] = exp(t lambda^alpha) e
alpha in (1,2). Internamente L_1 ha legge S1(alpha, beta=+1, scala sigma,
posizione 0) con sigma = |cos(pi alpha / 2)|^(1/alpha); la densita' standard
si valuta con la rappresentazione integrale di Zolotarev (un solo integrale
senza oscillazioni su ogni semiasse). Sul semiasse negativo vale
g(y; beta) = g(-y; -beta).

Ogni densita' p_t passa da p_1: density(t, x) = t^(-1/alpha) p_1(t^(-1/alpha) x).
"""

import dataclasses
import logging
import math
from functools import lru_cache

import numpy as np
from scipy import integrate, interpolate, optimize, special

from stableldp.errors import CoverageError, DomainError, QuadratureError
from stableldp.models import DensityTable, QuadratureSpec, StableParams

logger = logging.getLogger(__name__)

# Soglia oltre la quale un valore negativo non e' rumore ma un guasto della quadratura
NEGATIVE_CLAMP = 1e-10
# Massa fuori dall'intervallo tollerata da build_density_table
COVERAGE_TOL = 1e-4
# Sotto questa distanza da 0 si usa la formula chiusa in y = 0
_ZERO_BAND = 1e-12
# Sotto questo valore di log p_1 la coda sinistra usa il punto di sella
LEFT_TAIL_LOG = -200.0


def make_params(alpha):
    """Costanti alpha', c_alpha, C_alpha per alpha in (1,2)."""
    try:
        alpha = float(alpha)
    except (TypeError, ValueError):
        raise DomainError(f"alpha non numerico: {alpha!r}")
    if not (1.0 < alpha < 2.0):
        raise DomainError(f"make_params: alpha={alpha} non valido, serve alpha nell'intervallo aperto (1,2)")
    alpha_prime = alpha / (alpha - 1.0)
    c_alpha = (alpha - 1.0) / alpha ** alpha_prime
    C_alpha = -1.0 / float(special.gamma(1.0 - alpha))
    return StableParams(alpha, alpha_prime, c_alpha, C_alpha)


def _default(quad):
    return quad if quad is not None else QuadratureSpec()


def _quad(func, a, b, quad, what):
    """scipy quad con controllo esplicito della convergenza."""
    result = integrate.quad(
        func, a, b,
        epsabs=quad.abs_tol, epsrel=quad.rel_tol, limit=quad.max_subdivisions,
        full_output=1,
    )
    value, abserr = result[0], result[1]
    if len(result) > 3:
        target = max(quad.abs_tol, quad.rel_tol * abs(value))
        message = str(result[3]).strip().splitlines()[0]
        if not math.isfinite(value) or abserr > 10.0 * target:
            raise QuadratureError(
                f"{what}: quadratura non convergente su [{a:.6g}, {b:.6g}] ({message}); "
                f"errore stimato {abserr:.3e}",
                abserr,
            )
        logger.debug(f"{what}: avviso di quadratura accettato ({message}), errore {abserr:.2e}")
    return value, abserr


# ---------------------------------------------------------------------------
# Densita' standard S1 via Zolotarev, nella variabile w = distanza dal polo di V
# ---------------------------------------------------------------------------

def _zolotarev_frame(alpha, beta):
    """Angoli della rappresentazione in forma esatta per beta = +1 o -1.

    Con u = pi/2 - theta e w = ampiezza - u il fattore sin(A - alpha u) diventa
    sin(alpha w) per entrambi i segni, senza cancellazioni vicino al polo w = 0.
    Restituisce (ampiezza in w, log cos(alpha theta0)/(alpha-1), funzione cos(B - (alpha-1) u)).
    """
    log_c = math.log(-math.cos(math.pi * alpha / 2.0)) / (alpha - 1.0)
    if beta > 0:
        width = math.pi - math.pi / alpha

        def cos_b(u):
            return math.cos(alpha * math.pi - 1.5 * math.pi - (alpha - 1.0) * u)
    else:
        width = math.pi / alpha

        def cos_b(u):
            return math.sin((alpha - 1.0) * u)
    return width, log_c, cos_b


def _make_log_v(alpha, beta):
    width, log_c, cos_b = _zolotarev_frame(alpha, beta)
    ap = alpha / (alpha - 1.0)

    def log_v(u, w):
        # u + w = ampiezza: ognuna delle due coordinate arriva esatta dal suo lato
        su, sa, cb = math.sin(u), math.sin(alpha * w), cos_b(u)
        if sa <= 0.0:
            return math.inf
        if su <= 0.0 or cb <= 0.0:
            return -math.inf
        return log_c + ap * (math.log(su) - math.log(sa)) + math.log(cb) - math.log(su)

    return width, log_v


def _v_floor(alpha, beta):
    """Valore di V all'estremo u -> 0: positivo per beta = -1, nullo per beta = +1."""
    if beta > 0:
        return 0.0
    ap = alpha / (alpha - 1.0)
    return (-math.cos(math.pi * alpha / 2.0)) ** (1.0 / (alpha - 1.0)) * (alpha - 1.0) * alpha ** (-ap)


def _standard_at_zero(alpha):
    zeta = -math.tan(math.pi * alpha / 2.0)
    theta0 = math.atan(math.tan(math.pi * alpha / 2.0)) / alpha
    return math.gamma(1.0 + 1.0 / alpha) * math.cos(theta0) / (
        math.pi * (1.0 + zeta * zeta) ** (1.0 / (2.0 * alpha))
    )


def _half_edges(log_s, shift, half):
    """Tagli per la quadratura su (0, half): livelli exp(s) - shift = 1, 30 e passi geometrici oltre il picco."""

    def level(c):
        target = math.log(shift + c)
        lo, hi = half * 1e-15, half
        f_lo, f_hi = log_s(lo) - target, log_s(hi) - target
        if not (math.isfinite(f_lo) and math.isfinite(f_hi)) or (f_lo > 0.0) == (f_hi > 0.0):
            return None
        return optimize.brentq(lambda z: log_s(z) - target, lo, hi, xtol=1e-3 * lo, rtol=1e-13)

    peak = level(1.0)
    cuts = {c for c in (peak, level(30.0)) if c is not None}
    if peak is not None:
        # vicino all'estremo la massa sta a distanza ~peak: tagli geometrici fino a meta' intervallo
        step = 10.0 * peak
        while step < half:
            cuts.add(step)
            step *= 10.0
    return [0.0] + sorted(cuts) + [half]


def _log_standard(alpha, beta, y, quad):
    """log g(y; alpha, beta) per y > 0 nella parametrizzazione S1 standard.

    L'intervallo si divide a meta': la meta' vicina al polo di V si integra in w,
    l'altra in u, cosi' nessun estremo perde cifre.
    """
    ap = alpha / (alpha - 1.0)
    width, log_v = _make_log_v(alpha, beta)
    half = 0.5 * width
    log_y = ap * math.log(y)
    # il fattore exp(-Y V_min) viene estratto per non perdere la coda sinistra
    shift = math.exp(log_y) * _v_floor(alpha, beta)
    # p e' proporzionale a total / y: la tolleranza assoluta va riferita a p
    quad = dataclasses.replace(quad, abs_tol=quad.abs_tol * min(1.0, y))

    def in_w(w):
        return log_y + log_v(width - w, w)

    def in_u(u):
        return log_y + log_v(u, width - u)

    total = 0.0
    for log_s in (in_w, in_u):
        def integrand(z, log_s=log_s):
            s = log_s(z)
            if s > 700.0:
                return 0.0
            return math.exp(s - (math.exp(s) - shift))

        edges = _half_edges(log_s, shift, half)
        for a, b in zip(edges[:-1], edges[1:]):
            if b > a:
                total += _quad(integrand, a, b, quad, "density")[0]
    if total <= 0.0:
        return -math.inf
    return math.log(alpha / (math.pi * (alpha - 1.0))) - math.log(y) - shift + math.log(total)


def _saddle_log_p1(params, z):
    """log p_1(-z) per z > 0 dal punto di sella della trasformata di Laplace."""
    alpha = params.alpha
    lam0 = (z / alpha) ** (1.0 / (alpha - 1.0))
    curvature = alpha * (alpha - 1.0) * lam0 ** (alpha - 2.0)
    return -params.c_alpha * z ** params.alpha_prime - 0.5 * math.log(2.0 * math.pi * curvature)


def _log_p1(params, x, quad):
    if x < 0.0:
        saddle = _saddle_log_p1(params, -x)
        if saddle < LEFT_TAIL_LOG:
            return saddle
    sigma = params.scale
    y = x / sigma
    if abs(y) < _ZERO_BAND:
        return math.log(_standard_at_zero(params.alpha)) - math.log(sigma)
    beta = 1.0 if y > 0 else -1.0
    return _log_standard(params.alpha, beta, abs(y), quad) - math.log(sigma)


def density(params, t, x, quad=None):
    """p_t(x), calcolata riscalando p_1."""
    if not t > 0:
        raise DomainError(f"density: il tempo deve essere positivo, ricevuto t={t}")
    quad = _default(quad)
    scale = t ** (-1.0 / params.alpha)
    return scale * math.exp(_log_p1(params, scale * float(x), quad))


def log_density(params, t, x, quad=None):
    if not t > 0:
        raise DomainError(f"log_density: il tempo deve essere positivo, ricevuto t={t}")
    quad = _default(quad)
    scale = t ** (-1.0 / params.alpha)
    return math.log(scale) + _log_p1(params, scale * float(x), quad)


def density_at_zero(params):
    """Formula chiusa p_1(0) = 1 / (alpha Gamma(1 - 1/alpha))."""
    return 1.0 / (params.alpha * math.gamma(1.0 - 1.0 / params.alpha))


def laplace_transform(params, lam, quad=None):
    """Integrale di exp(-lambda x) p_1(x); deve coincidere con exp(lambda^alpha)."""
    if not lam > 0:
        raise DomainError(f"laplace_transform: lambda deve essere positivo, ricevuto {lam}")
    quad = _default(quad)

    def integrand(x):
        return math.exp(-lam * x + _log_p1(params, x, quad))

    # picco dell'integrando sul semiasse negativo
    z_peak = (lam / (params.c_alpha * params.alpha_prime)) ** (params.alpha - 1.0)
    z_far = 2.0 * z_peak + 5.0
    pieces = [(-np.inf, -z_far), (-z_far, -z_peak), (-z_peak, 0.0), (0.0, 50.0), (50.0, np.inf)]
    return sum(_quad(integrand, a, b, quad, "laplace_transform")[0] for a, b in pieces)


def hitting_density(params, x, t, quad=None):
    """q_x(t) = (x/t) p_t(-x): densita' del primo passaggio in 0 partendo da x."""
    if not (x > 0 and t > 0):
        raise DomainError(f"hitting_density: servono x > 0 e t > 0, ricevuti x={x}, t={t}")
    return (x / t) * density(params, t, -x, quad)


def killed_transition(params, t, x, y, quad=None, density_fn=None):
    """Densita' di transizione del processo ucciso all'uscita da (0, inf).

    p_t(y - x) - integrale su (0, t) di q_x(s) p_{t-s}(y) ds. `density_fn(t, x)`
    permette di usare una densita' tabulata al posto di quella esatta.
    """
    if not (t > 0 and x > 0 and y > 0):
        raise DomainError(f"killed_transition: servono t, x, y > 0, ricevuti t={t}, x={x}, y={y}")
    quad = _default(quad)
    if density_fn is None:
        def density_fn(s, z):
            return density(params, s, z, quad)

    direct = float(density_fn(t, y - x))

    def integrand(s):
        return (x / s) * float(density_fn(s, -x)) * float(density_fn(t - s, y))

    removed, abserr = _quad(integrand, 0.0, t, quad, "killed_transition")
    value = direct - removed
    if value < 0.0:
        if value >= -NEGATIVE_CLAMP:
            return 0.0
        raise QuadratureError(
            f"killed_transition: valore {value:.3e} sotto -{NEGATIVE_CLAMP:g} "
            f"(t={t}, x={x}, y={y})",
            abserr,
        )
    return value


def _table_grid(params, t, xmin, xmax, n_points):
    """Griglia x = w sinh(u), u uniforme: fitta nel corpo, geometrica nelle code."""
    width = t ** (1.0 / params.alpha)
    u = np.linspace(math.asinh(xmin / width), math.asinh(xmax / width), int(n_points))
    x = width * np.sinh(u)
    x[0], x[-1] = xmin, xmax
    return x


def build_density_table(params, t, x_range, n_points, quad=None, require_coverage=True):
    """Tabella x, p_t(x), cumulata dei trapezi sull'intervallo dato (griglia non uniforme).

    Se la massa fuori dall'intervallo supera 1e-4 si solleva CoverageError;
    con require_coverage=False si registra solo un avviso.
    """
    xmin, xmax = (float(v) for v in x_range)
    if not xmax > xmin:
        raise DomainError(f"build_density_table: intervallo vuoto [{xmin}, {xmax}]")
    if n_points < 2:
        raise DomainError(f"build_density_table: servono almeno 2 punti, ricevuti {n_points}")
    quad = _default(quad)
    x = _table_grid(params, t, xmin, xmax, n_points)
    pdf = np.array([density(params, t, xi, quad) for xi in x])
    cdf = integrate.cumulative_trapezoid(pdf, x, initial=0.0)
    uncovered = abs(1.0 - cdf[-1])
    if uncovered > COVERAGE_TOL:
        message = (
            f"build_density_table: massa fuori da [{xmin:g}, {xmax:g}] pari a {uncovered:.2e} "
            f"(tolleranza {COVERAGE_TOL:g})"
        )
        if require_coverage:
            raise CoverageError(message, uncovered)
        logger.warning(message)
    return DensityTable(x, pdf, np.minimum(cdf, 1.0))


def density_band(params, xs, quad=None):
    """Minimo e massimo di p_1(x) (1+x)^(alpha+1) sui punti x >= 0 dati."""
    xs = np.asarray(xs, dtype=float)
    if np.any(xs < 0):
        raise DomainError("density_band: i punti devono essere non negativi")
    band = np.array([density(params, 1.0, x, quad) * (1.0 + x) ** (params.alpha + 1.0) for x in xs])
    return float(band.min()), float(band.max())


# ---------------------------------------------------------------------------
# Densita' tabulata veloce (campionatori e curve di riferimento)
# ---------------------------------------------------------------------------

class TabulatedDensity:
    """Spline di log p_1 con code analitiche oltre gli estremi della tabella.

    A destra dell'ultimo nodo si usa la coda C x^(-alpha-1) raccordata al nodo,
    a sinistra del primo il decadimento exp(-c_alpha |x|^alpha').
    """

    RIGHT_EDGE = 400.0
    CORE_EDGE = 20.0
    CORE_STEP = 0.02

    def __init__(self, params, quad=None):
        self.params = params
        quad = _default(quad)
        alpha, ap = params.alpha, params.alpha_prime
        self.x_left = -((40.0 / params.c_alpha) ** (1.0 / ap))
        self.x_right = self.RIGHT_EDGE
        n_core = int(math.ceil((self.CORE_EDGE - self.x_left) / self.CORE_STEP)) + 1
        grid = np.concatenate((
            np.linspace(self.x_left, self.CORE_EDGE, n_core),
            np.geomspace(self.CORE_EDGE, self.x_right, 161)[1:],
        ))
        log_pdf = np.array([_log_p1(params, x, quad) for x in grid])
        self._spline = interpolate.CubicSpline(grid, log_pdf)
        self._log_left = float(log_pdf[0])
        self._log_right = float(log_pdf[-1])

        fine = np.concatenate((
            np.linspace(self.x_left, self.CORE_EDGE, 8 * n_core),
            np.geomspace(self.CORE_EDGE, self.x_right, 4001)[1:],
        ))
        fine_pdf = np.exp(self._spline(fine))
        self._fine = fine
        self._fine_cdf = integrate.cumulative_trapezoid(fine_pdf, fine, initial=0.0)
        self._right_mass = math.exp(self._log_right) * self.x_right / alpha
        top = int(np.argmax(fine_pdf))
        self.mode = float(fine[top])
        self.peak = float(fine_pdf[top])
        total = self._fine_cdf[-1] + self._right_mass
        logger.info(
            f"densita' tabulata per alpha={alpha:.6g}: {grid.size} nodi, "
            f"massa totale {total:.8f}, moda {self.mode:.4f}"
        )

    def log_pdf1(self, x):
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        inside = (x >= self.x_left) & (x <= self.x_right)
        right = x > self.x_right
        left = x < self.x_left
        out[inside] = self._spline(x[inside])
        out[right] = self._log_right - (self.params.alpha + 1.0) * np.log(x[right] / self.x_right)
        ap = self.params.alpha_prime
        out[left] = self._log_left - self.params.c_alpha * (
            np.abs(x[left]) ** ap - abs(self.x_left) ** ap
        )
        return float(out) if out.ndim == 0 else out

    def pdf1(self, x):
        return np.exp(self.log_pdf1(x))

    def pdf(self, t, x):
        """p_t(x) tabulata, via la stessa riscalatura della densita' esatta."""
        scale = np.asarray(t, dtype=float) ** (-1.0 / self.params.alpha)
        out = scale * self.pdf1(scale * np.asarray(x, dtype=float))
        return float(out) if np.ndim(out) == 0 else out

    def cdf1(self, x):
        x = np.asarray(x, dtype=float)
        out = np.interp(x, self._fine, self._fine_cdf)
        beyond = x > self.x_right
        out = np.where(
            beyond,
            1.0 - self._right_mass * (np.maximum(x, self.x_right) / self.x_right) ** (-self.params.alpha),
            out,
        )
        return float(out) if out.ndim == 0 else out

    def quantile1(self, u):
        u = np.asarray(u, dtype=float)
        body = np.interp(u, self._fine_cdf, self._fine)
        top = self._fine_cdf[-1]
        tail = self.x_right * (np.maximum(1.0 - u, 1e-300) / self._right_mass) ** (-1.0 / self.params.alpha)
        out = np.where(u > top, tail, body)
        return float(out) if out.ndim == 0 else out

    @property
    def iqr(self):
        return float(self.quantile1(0.75) - self.quantile1(0.25))

    def half_bound(self, d):
        """sup di p_1(v) per v >= d/2, con un piccolo margine."""
        d = np.asarray(d, dtype=float)
        half = 0.5 * d
        return 1.001 * np.where(half <= self.mode, self.peak, self.pdf1(np.maximum(half, self.mode)))


@lru_cache(maxsize=16)
def _tabulate(params, quad):
    return TabulatedDensity(params, quad)


def tabulate_density(params, quad=None):
    """Densita' tabulata condivisa (una per coppia params, quadratura)."""
    return _tabulate(params, _default(quad))


# ---------------------------------------------------------------------------
# Curve di riferimento per le validazioni Monte Carlo
# ---------------------------------------------------------------------------

def bridge_marginal_density(params, a, t, xs, law=None):
    """Densita' del ponte verso a al tempo t: p_t(x) p_{1-t}(a-x) / p_1(a)."""
    if not 0.0 < t < 1.0:
        raise DomainError(f"bridge_marginal_density: serve 0 < t < 1, ricevuto {t}")
    law = law or tabulate_density(params)
    xs = np.asarray(xs, dtype=float)
    return law.pdf(t, xs) * law.pdf(1.0 - t, a - xs) / law.pdf(1.0, a)


def excursion_transition_density(params, x, s, rest, ys, law=None, quad=None):
    """Legge di L^ex al tempo t+s dato L^ex_t = x, con `rest` = 1 - t - s.

    p^{(0,inf)}_s(x, y) q_y(rest) / q_x(s + rest): l'entrance law si semplifica.
    """
    law = law or tabulate_density(params)
    quad = _default(quad)

    def q(z, time):
        return (z / time) * law.pdf(time, -z)

    norm = q(x, s + rest)
    out = []
    for y in np.asarray(ys, dtype=float):
        kt = killed_transition(params, s, x, float(y), quad, density_fn=law.pdf)
        out.append(kt * q(float(y), rest) / norm)
    return np.array(out)
