"""Verifiche Monte Carlo delle asintotiche logaritmiche di coda.

Stima delle code con intervalli di Wilson, fit della pendenza di -log P(X > x)
contro x^alpha', crescita dei momenti e della trasformata di Laplace, controlli
di tightness, sonda J1 a due salti e validazioni KS dei campionatori.
Tutto e' deterministico dato il seed; ogni riga riporta il suo errore MC.
"""

import logging
import math

import numpy as np
from scipy import integrate, special, stats

from stableldp.errors import DomainError, FitError
from stableldp.models import KSCheck, SamplerConfig, SlopeFit, TailEstimate, TightnessReport
from stableldp.services import variational
from stableldp.services.rate_functions import theory_slope
from stableldp.services.sampling import (
    area_values, map_blocks, stable_increments, sup_values, vervaat,
)
from stableldp.services.stable_math import (
    bridge_marginal_density, excursion_transition_density, tabulate_density,
)

logger = logging.getLogger(__name__)

Z95 = float(stats.norm.ppf(0.975))
MIN_FIT_HITS = 30
PROBE_MIN_HITS = 10
MIN_CONDITIONED = 100_000
# circa l'8% delle escursioni cade nella finestra di condizionamento x +- 0.05
EXCURSION_FACTOR = 20
JACKKNIFE_BATCHES = 50
TOP_WEIGHT_GUARD = 0.5
KAPPA_BAND = (0.5, 2.0)
KAPPA_LAMBDA = 2.0

FUNCTIONALS = ("area", "sup")


def wilson_interval(k, N, z=Z95):
    """Intervallo di Wilson al 95% per k successi su N prove (vettoriale)."""
    k = np.asarray(k, dtype=float)
    if N <= 0:
        raise DomainError(f"wilson_interval: N deve essere positivo, ricevuto {N}")
    p = k / N
    z2 = z * z
    denom = 1.0 + z2 / N
    center = (p + z2 / (2.0 * N)) / denom
    margin = z * np.sqrt(p * (1.0 - p) / N + z2 / (4.0 * N * N)) / denom
    lower = np.where(k <= 0, 0.0, np.maximum(center - margin, 0.0))
    upper = np.where(k >= N, 1.0, np.minimum(center + margin, 1.0))
    return lower, upper


def _gamma_for(params, functional, kind):
    if functional == "area" and kind == "excursion":
        return variational.gamma_area(params)
    if functional == "sup":
        return variational.gamma_bridge_sup(params) if kind == "bridge" else variational.gamma_sup(params)
    raise DomainError(f"nessuna gamma per {functional!r} su {kind!r}")


def _normalize_kind(kind):
    if kind == "bridge-sup":
        return "bridge"
    if kind not in ("excursion", "bridge"):
        raise DomainError(f"tipo sconosciuto per la stima di coda: {kind}")
    return kind


def _functionals_reducer(values):
    return {"area": area_values(values), "sup": sup_values(values)}


# ---------------------------------------------------------------------------
# Simulazione condivisa
# ---------------------------------------------------------------------------

def simulate_functionals(params, kind, N, n, seed, config=None, two_grid=False):
    """Area e sup di N scheletri; con two_grid anche sulla griglia n/2 degli stessi campioni.

    Con two_grid i ponti sono campionati su 2n e sottocampionati su n (numeri
    casuali comuni); per l'escursione lo shift di Vervaat si applica su ciascuna griglia.
    """
    kind = _normalize_kind(kind)
    shift = vervaat if kind == "excursion" else (lambda v: v)

    def reducer(values):
        coarse = values[:, ::2] if two_grid else values
        out = _functionals_reducer(shift(coarse))
        if two_grid:
            out.update({f"{k}_2n": v for k, v in _functionals_reducer(shift(values)).items()})
        return out

    blocks = map_blocks(params, "bridge", N, 2 * n if two_grid else n, seed, config, reducer=reducer)
    return {key: np.concatenate([b[key] for b in blocks]) for key in blocks[0]}


# ---------------------------------------------------------------------------
# Code e pendenze
# ---------------------------------------------------------------------------

def estimate_tail(params, functional, kind, thresholds, N=None, n=1024, seed=None,
                  config=None, samples=None, min_hits=MIN_FIT_HITS):
    """Tabella di P(X > x) con intervalli di Wilson; `samples` evita di ricampionare."""
    if functional not in FUNCTIONALS:
        raise DomainError(f"funzionale sconosciuto: {functional}")
    kind = _normalize_kind(kind)
    if kind == "bridge" and functional != "sup":
        raise DomainError("per il ponte e' prevista solo la coda del sup")
    thresholds = np.asarray(thresholds, dtype=float)
    if thresholds.ndim != 1 or thresholds.size == 0 or np.any(np.diff(thresholds) <= 0):
        raise DomainError("le soglie devono essere strettamente crescenti")
    if samples is None:
        if N is None or seed is None:
            raise DomainError("servono N e seed, oppure campioni gia' simulati")
        samples = simulate_functionals(params, kind, N, n, seed, config)[functional]
    samples = np.asarray(samples, dtype=float)
    total = samples.size
    counts = (samples[:, None] > thresholds[None, :]).sum(axis=0)
    estimates = counts / total
    lower, upper = wilson_interval(counts, total)
    if estimates[0] < 1e-3:
        logger.warning(
            f"coda {functional}/{kind}: la soglia piu' bassa ha stima {estimates[0]:.2e} < 1e-3"
        )
    excluded = int(np.sum(counts < min_hits))
    if excluded:
        logger.info(f"coda {functional}/{kind}: {excluded} soglie con meno di {min_hits} successi escluse dal fit")
    return TailEstimate(
        functional=functional, kind=kind, thresholds=thresholds, counts=counts,
        n_samples=total, estimates=estimates, lower=lower, upper=upper, min_hits=min_hits,
    )


def fit_ldp_slope(params, estimate, theory):
    """Minimi quadrati di -log(stima) contro x^alpha' sulle soglie utilizzabili."""
    usable = estimate.usable & (estimate.estimates > 0)
    if int(usable.sum()) < 3:
        raise FitError(f"servono almeno 3 soglie con >= {estimate.min_hits} successi, disponibili {int(usable.sum())}")
    x = estimate.thresholds[usable] ** params.alpha_prime
    y = -np.log(estimate.estimates[usable])
    if np.ptp(y) == 0.0 or np.ptp(x) == 0.0:
        raise FitError("fit degenere: stime tutte uguali")
    fit = stats.linregress(x, y)
    slope = float(fit.slope)
    return SlopeFit(
        slope=slope, intercept=float(fit.intercept), r_squared=float(fit.rvalue ** 2),
        theory_slope=float(theory), relative_deviation=abs(slope - theory) / theory,
        stderr=float(fit.stderr), n_points=int(usable.sum()),
    )


def two_grid_guard(fit_n, fit_2n):
    """Le pendenze su n e 2n devono differire meno di 3 errori standard."""
    diff = abs(fit_n.slope - fit_2n.slope)
    bound = 3.0 * max(fit_n.stderr, fit_2n.stderr)
    return {"difference": diff, "bound": bound, "passed": bool(diff < bound)}


def _sub_estimate(estimate, mask):
    return TailEstimate(
        functional=estimate.functional, kind=estimate.kind,
        thresholds=estimate.thresholds[mask], counts=estimate.counts[mask],
        n_samples=estimate.n_samples, estimates=estimate.estimates[mask],
        lower=estimate.lower[mask], upper=estimate.upper[mask], min_hits=estimate.min_hits,
    )


def window_shift_report(params, estimate, theory):
    """Deviazione dalla teoria nella meta' bassa e nella meta' alta delle soglie utilizzabili."""
    idx = np.flatnonzero(estimate.usable & (estimate.estimates > 0))
    if idx.size < 6:
        raise FitError(f"servono almeno 6 soglie utilizzabili per confrontare due finestre, disponibili {idx.size}")
    half = idx.size // 2
    masks = []
    for part in (idx[:half], idx[half:]):
        mask = np.zeros(estimate.thresholds.size, dtype=bool)
        mask[part] = True
        masks.append(mask)
    lower_fit = fit_ldp_slope(params, _sub_estimate(estimate, masks[0]), theory)
    upper_fit = fit_ldp_slope(params, _sub_estimate(estimate, masks[1]), theory)
    return {
        "lower": lower_fit,
        "upper": upper_fit,
        "shrinks": bool(upper_fit.relative_deviation < lower_fit.relative_deviation),
    }


# ---------------------------------------------------------------------------
# Momenti e trasformata di Laplace
# ---------------------------------------------------------------------------

def _jackknife(samples, batches, statistic):
    """Statistica sul campione intero ed errore jackknife a blocchi (leave-one-batch-out)."""
    parts = np.array_split(samples, batches)
    estimates = np.array([
        statistic(np.concatenate([p for i, p in enumerate(parts) if i != b]))
        for b in range(batches)
    ])
    se = math.sqrt((batches - 1) / batches * float(np.sum((estimates - estimates.mean()) ** 2)))
    return statistic(samples), se


def moment_growth(params, functional, n_max, samples, kind="excursion", batches=JACKKNIFE_BATCHES):
    """E[X^k]^(1/k) / (k/e)^(1/alpha') per k = 1..n_max, con errori jackknife."""
    if not 1 <= n_max <= 12:
        raise DomainError(f"moment_growth: n_max deve stare tra 1 e 12, ricevuto {n_max}")
    samples = np.asarray(samples, dtype=float)
    kind = _normalize_kind(kind)
    limit = params.alpha ** (1.0 / params.alpha) * _gamma_for(params, functional, kind)
    rows = []
    for k in range(1, n_max + 1):
        norm = (k / math.e) ** (1.0 / params.alpha_prime)

        def ratio(x, k=k, norm=norm):
            return float(np.mean(x ** k)) ** (1.0 / k) / norm

        value, se = _jackknife(samples, batches, ratio)
        rel = se / value if value > 0 else math.inf
        flagged = rel > 0.5
        if flagged:
            logger.warning(f"momento k={k} di {functional}: errore jackknife relativo {rel:.0%}")
        rows.append({
            "k": k, "ratio": value, "stderr": se, "limit": limit,
            "gap": value - limit, "flagged": bool(flagged),
        })
    return rows


def laplace_growth(params, functional, t_grid, samples, kind="excursion"):
    """log E[exp(tX)] / t^alpha con la quota di massa dei 10 campioni maggiori."""
    samples = np.asarray(samples, dtype=float)
    kind = _normalize_kind(kind)
    limit = _gamma_for(params, functional, kind) ** params.alpha
    top = np.sort(samples)[-10:]
    rows = []
    for t in t_grid:
        if not t > 0:
            raise DomainError(f"laplace_growth: t deve essere positivo, ricevuto {t}")
        log_total = float(special.logsumexp(t * samples))
        log_mgf = log_total - math.log(samples.size)
        guard = math.exp(float(special.logsumexp(t * top)) - log_total)
        trusted = guard < TOP_WEIGHT_GUARD
        if not trusted:
            logger.warning(f"laplace {functional} t={t}: i 10 campioni maggiori pesano {guard:.0%}, voce non affidabile")
        rows.append({
            "t": float(t), "log_mgf": log_mgf, "ratio": log_mgf / t ** params.alpha,
            "limit": limit, "top_share": guard, "trusted": bool(trusted),
        })
    return rows


# ---------------------------------------------------------------------------
# Tightness e sonda J1
# ---------------------------------------------------------------------------

def _log_mean_exp(values):
    """log E[exp(v)] e il suo errore standard (metodo delta)."""
    shift = float(values.max())
    w = np.exp(values - shift)
    mean = float(w.mean())
    se = float(w.std(ddof=1) / math.sqrt(w.size)) / mean if w.size > 1 else 0.0
    return shift + math.log(mean), se


def tightness_moment_check(params, N, triples, lambdas, seed, n=256, config=None,
                           kind="excursion", deltas=(0.2, 0.1, 0.05), level=0.5, kappa_band=KAPPA_BAND):
    """log E[exp(lambda M(L_t1, L_t, L_t2))] <= log c + (t2 - t1) lambda^alpha per ogni terna.

    log c si calibra al lambda positivo piu' piccolo. kappa e' la pendenza di
    lhs contro (t2 - t1) lambda^alpha sulle terne, a lambda = 2 se presente
    (altrimenti al lambda massimo), e deve cadere in kappa_band. Il controllo vicino a 1
    verifica che P(sup_[1-delta, 1] L > level) non cresca al restringersi di delta.
    """
    triples = [tuple(float(v) for v in tr) for tr in triples]
    for t1, t, t2 in triples:
        if not (0.0 <= t1 < t < t2 <= 0.9):
            raise DomainError(f"terna non valida {(t1, t, t2)}: serve 0 <= t1 < t < t2 <= 0.9")
    lambdas = sorted(float(v) for v in lambdas)
    positive = [v for v in lambdas if v > 0]
    if not positive:
        raise DomainError("serve almeno un lambda positivo")
    kind = _normalize_kind(kind)
    sample_kind = "excursion" if kind == "excursion" else "bridge"
    deltas = sorted(deltas, reverse=True)
    index = [tuple(int(round(v * n)) for v in tr) for tr in triples]

    def reducer(values):
        out = {}
        for j, (i1, i, i2) in enumerate(index):
            a, b, c = values[:, i1], values[:, i], values[:, i2]
            lo, hi = np.minimum(a, c), np.maximum(a, c)
            out[f"m{j}"] = np.maximum(np.maximum(lo - b, b - hi), 0.0)
        for d in deltas:
            start = int(math.floor((1.0 - d) * n))
            out[f"end{d}"] = values[:, start:].max(axis=1) > level
        return out

    blocks = map_blocks(params, sample_kind, N, n, seed, config, reducer=reducer)
    data = {key: np.concatenate([b[key] for b in blocks]) for key in blocks[0]}

    rows = []
    for j, (t1, t, t2) in enumerate(triples):
        mv = data[f"m{j}"]
        for lam in lambdas:
            lhs, se = _log_mean_exp(lam * mv) if lam > 0 else (0.0, 0.0)
            rows.append({"t1": t1, "t": t, "t2": t2, "lambda": lam, "lhs": lhs, "stderr": se})

    lam0 = positive[0]
    log_c = max(0.0, max(r["lhs"] - (r["t2"] - r["t1"]) * lam0 ** params.alpha
                         for r in rows if r["lambda"] == lam0))
    for r in rows:
        r["bound"] = log_c + (r["t2"] - r["t1"]) * r["lambda"] ** params.alpha
        r["ok"] = bool(r["lhs"] <= r["bound"] + 3.0 * r["stderr"])

    lam_k = KAPPA_LAMBDA if KAPPA_LAMBDA in positive else positive[-1]
    top_rows = [r for r in rows if r["lambda"] == lam_k]
    xs = np.array([(r["t2"] - r["t1"]) * lam_k ** params.alpha for r in top_rows])
    ys = np.array([r["lhs"] for r in top_rows])
    kappa = float(stats.linregress(xs, ys).slope) if np.ptp(xs) > 0 else math.nan

    near = []
    for d in deltas:
        hits = int(data[f"end{d}"].sum())
        lo, hi = wilson_interval(hits, N)
        near.append({"delta": d, "hits": hits, "estimate": hits / N, "lower": float(lo), "upper": float(hi)})
    monotone = all(b["estimate"] <= a["estimate"] for a, b in zip(near, near[1:]))

    lo_k, hi_k = kappa_band
    kappa_ok = bool(lo_k <= kappa <= hi_k)  # nan: falso
    passed = all(r["ok"] for r in rows) and monotone and kappa_ok
    logger.info(f"tightness {kind}: log c={log_c:.4f}, kappa={kappa:.3f} a lambda={lam_k:g} "
                f"(banda [{lo_k}, {hi_k}]), esito {'ok' if passed else 'FALLITO'}")
    return TightnessReport(
        kind=kind, log_c=log_c, exponent_coefficient=kappa,
        rows=rows, near_endpoint=near, passed=passed,
    )


def j1_floor(params, delta):
    """Esponente minimo -c_alpha (3 / (1 - 2 delta))^alpha' della sonda a due salti."""
    return -params.c_alpha * (3.0 / (1.0 - 2.0 * delta)) ** params.alpha_prime


def j1_two_jump_probe(params, delta, eps_grid, N, seed, n=256, config=None, min_hits=PROBE_MIN_HITS):
    """eps^alpha' log P(L_delta in [1/eps, 2/eps], L_2delta in [3/eps, 4/eps])."""
    if not 0.0 < delta < 0.5:
        raise DomainError(f"delta deve stare in (0, 1/2), ricevuto {delta}")
    i1, i2 = int(round(delta * n)), int(round(2.0 * delta * n))
    if i1 < 1 or i2 <= i1:
        raise DomainError(f"griglia n={n} troppo grossolana per delta={delta}")
    eps_grid = [float(e) for e in eps_grid]

    def reducer(values):
        return {"a": values[:, i1], "b": values[:, i2]}

    blocks = map_blocks(params, "excursion", N, n, seed, config, reducer=reducer)
    first = np.concatenate([b["a"] for b in blocks])
    second = np.concatenate([b["b"] for b in blocks])
    floor = j1_floor(params, delta)
    rows = []
    for eps in eps_grid:
        event = (first >= 1.0 / eps) & (first <= 2.0 / eps) & (second >= 3.0 / eps) & (second <= 4.0 / eps)
        hits = int(event.sum())
        lo, _ = wilson_interval(hits, N)
        weight = eps ** params.alpha_prime
        probe = weight * math.log(hits / N) if hits else -math.inf
        probe_lower = weight * math.log(float(lo)) if lo > 0 else -math.inf
        flagged = hits < min_hits
        if flagged:
            logger.warning(f"sonda J1 eps={eps}: solo {hits} successi su {N}")
        rows.append({
            "eps": eps, "hits": hits, "estimate": hits / N, "probe": probe,
            "probe_lower": probe_lower, "floor": floor,
            "above_floor": bool(probe_lower >= floor), "flagged": bool(flagged),
        })
    return rows


def entrance_law_tail(params, t, xs, N, seed, n=256, config=None, min_hits=MIN_FIT_HITS):
    """x^alpha P(L^ex_t > x t^(1/alpha)) e la sua dispersione relativa sulle soglie alte."""
    if not 0.0 < t < 1.0:
        raise DomainError(f"t deve stare in (0, 1), ricevuto {t}")
    i = int(round(t * n))
    if i < 1:
        raise DomainError(f"griglia n={n} troppo grossolana per t={t}")
    xs = np.asarray(xs, dtype=float)
    blocks = map_blocks(params, "excursion", N, n, seed, config, reducer=lambda v: v[:, i])
    values = np.concatenate(blocks)
    scale = (i / n) ** (1.0 / params.alpha)
    counts = (values[:, None] > xs[None, :] * scale).sum(axis=0)
    lo, hi = wilson_interval(counts, N)
    rows = [
        {
            "x": float(x), "hits": int(k), "estimate": k / N,
            "scaled": x ** params.alpha * k / N,
            "scaled_lower": x ** params.alpha * float(l), "scaled_upper": x ** params.alpha * float(h),
            "usable": bool(k >= min_hits),
        }
        for x, k, l, h in zip(xs, counts, lo, hi)
    ]
    usable = [r["scaled"] for r in rows if r["usable"]]
    tail = usable[len(usable) // 2:]
    spread = (max(tail) - min(tail)) / np.mean(tail) if len(tail) >= 2 else math.nan
    return {"rows": rows, "plateau_spread": float(spread)}


# ---------------------------------------------------------------------------
# Validazioni KS dei campionatori
# ---------------------------------------------------------------------------

def _reference_cdf(xs, pdf):
    cdf = integrate.cumulative_trapezoid(pdf, xs, initial=0.0)
    total = float(cdf[-1])
    return cdf / total, total


def validate_bridge_marginals(params, a_values, times, N, seed, n=4, config=None, threshold=0.02):
    """KS tra marginali simulate del ponte e p_t(x) p_{1-t}(a-x) / p_1(a)."""
    law = tabulate_density(params, (config or SamplerConfig()).quad)
    checks = []
    for j, a in enumerate(a_values):
        values = np.vstack(map_blocks(params, "bridge", N, n, seed + j, config, a=a))
        for t in times:
            i = int(round(t * n))
            if not (0 < i < n) or abs(i / n - t) > 1e-12:
                raise DomainError(f"t={t} non e' un nodo della griglia n={n}")
            sample = values[:, i]
            xs = np.linspace(sample.min() - 3.0, sample.max() + 3.0, 8001)
            cdf, total = _reference_cdf(xs, bridge_marginal_density(params, a, t, xs, law))
            result = stats.kstest(sample, lambda x: np.interp(x, xs, cdf))
            checks.append(KSCheck(
                name=f"ponte a={a:g} t={t:g}", statistic=float(result.statistic),
                threshold=threshold, n_samples=int(sample.size),
                passed=bool(result.statistic < threshold),
                detail={"alpha": params.alpha, "a": a, "t": t, "reference_mass": total},
            ))
    for check in checks:
        logger.info(f"{check.name}: KS={check.statistic:.4f} (soglia {check.threshold})")
    return checks


def validate_bridge_reversal(params, t, N, seed, n=4, config=None, level=1e-3):
    """Ponte verso 0: b_(1-t) ha la legge di -b_t (KS a due campioni)."""
    values = np.vstack(map_blocks(params, "bridge", N, n, seed, config, a=0.0))
    i, j = int(round(t * n)), int(round((1.0 - t) * n))
    result = stats.ks_2samp(values[:, i], -values[:, j])
    return KSCheck(
        name=f"inversione temporale t={t:g}", statistic=float(result.statistic),
        threshold=level, n_samples=N, passed=bool(result.pvalue > level),
        detail={"pvalue": float(result.pvalue)},
    )


def _window_weights(values, lo, hi, nodes):
    """Pesi a cappello dei valori osservati sui nodi equispaziati di [lo, hi]."""
    pos = np.clip((values - lo) / (hi - lo) * (nodes - 1), 0.0, nodes - 1)
    left = np.minimum(np.floor(pos).astype(int), nodes - 2)
    frac = pos - left
    weights = np.bincount(left, weights=1.0 - frac, minlength=nodes)
    weights += np.bincount(left + 1, weights=frac, minlength=nodes)
    return weights / weights.sum()


def validate_excursion_transition(params, N, seed, n=64, config=None, x=1.0, window=0.05,
                                  tolerance=0.03, y_max=6.0, y_points=481, nodes=11,
                                  min_conditioned=MIN_CONDITIONED):
    """Legge di L^ex_(3/4) dato L^ex_(1/2) nella finestra x +- window.

    Il riferimento e' il nucleo ucciso normalizzato mescolato sui valori
    condizionanti osservati (pesi a cappello su `nodes` punti della finestra).
    Con meno di min_conditioned campioni condizionati la verifica non passa.
    """
    i_mid, i_late = n // 2, (3 * n) // 4
    if n % 4:
        raise DomainError(f"serve n multiplo di 4, ricevuto {n}")
    if nodes < 2 or not 0.0 < window < x:
        raise DomainError(f"finestra non valida: x={x}, window={window}, nodes={nodes}")

    def reducer(values):
        keep = np.abs(values[:, i_mid] - x) <= window
        return np.column_stack((values[keep, i_mid], values[keep, i_late]))

    pairs = np.vstack(map_blocks(params, "excursion", N, n, seed, config, reducer=reducer))
    m = int(pairs.shape[0])
    if m < 50:
        raise DomainError(f"solo {m} campioni condizionati: aumentare N")
    enough = m >= min_conditioned
    if not enough:
        logger.warning(f"transizione dell'escursione: {m} campioni condizionati, ne servono {min_conditioned}")

    law = tabulate_density(params, (config or SamplerConfig()).quad)
    lo, hi = x - window, x + window
    starts = np.linspace(lo, hi, nodes)
    weights = _window_weights(pairs[:, 0], lo, hi, nodes)
    ys = np.linspace(0.0, y_max, y_points)
    cdf = np.zeros_like(ys)
    mass = 0.0
    for start, w in zip(starts, weights):
        if w == 0.0:
            continue
        pdf = np.zeros_like(ys)
        pdf[1:] = excursion_transition_density(params, float(start), 0.25, 0.25, ys[1:], law)
        node_cdf, total = _reference_cdf(ys, pdf)
        cdf += w * node_cdf
        mass += w * total
    result = stats.kstest(pairs[:, 1], lambda v: np.interp(v, ys, cdf))
    check = KSCheck(
        name="transizione dell'escursione", statistic=float(result.statistic), threshold=tolerance,
        n_samples=m, passed=bool(enough and result.statistic < tolerance),
        detail={"x": x, "window": window, "reference_mass": mass,
                "min_conditioned": min_conditioned, "enough_samples": bool(enough)},
    )
    logger.info(f"{check.name}: KS={check.statistic:.4f} su {m} campioni (soglia {tolerance})")
    return check


def validate_scaling_negative_control(params, N, seed, n=64, config=None, threshold=0.1):
    """Controllo negativo: il primo quarto riscalato non e' un'escursione completa.

    Confronta 4^(1/alpha) L^ex_(1/4 - 1/n) con L^ex_(1 - 4/n): la verifica
    passa se il KS a due campioni rileva la differenza.
    """
    if n % 4 or n < 16:
        raise DomainError(f"serve n multiplo di 4 e >= 16, ricevuto {n}")
    i_quarter, i_full = n // 4 - 1, n - 4

    def reducer(values):
        return np.column_stack((4.0 ** (1.0 / params.alpha) * values[:, i_quarter], values[:, i_full]))

    data = np.vstack(map_blocks(params, "excursion", N, n, seed, config, reducer=reducer))
    result = stats.ks_2samp(data[:, 0], data[:, 1])
    return KSCheck(
        name="controllo negativo di scala", statistic=float(result.statistic), threshold=threshold,
        n_samples=N, passed=bool(result.statistic > threshold),
        detail={"pvalue": float(result.pvalue)},
    )


def validate_increment_scaling(params, t, N, seed, level=1e-3):
    """KS a due campioni tra L_t e t^(1/alpha) L_1."""
    generator = np.random.default_rng(seed)
    direct = stable_increments(params, t, N, generator)
    scaled = t ** (1.0 / params.alpha) * stable_increments(params, 1.0, N, generator)
    result = stats.ks_2samp(direct, scaled)
    return KSCheck(
        name=f"autosimilarita' t={t:g}", statistic=float(result.statistic), threshold=level,
        n_samples=N, passed=bool(result.pvalue > level), detail={"pvalue": float(result.pvalue)},
    )
