"""Cammini cadlag a breakpoint finiti: Jordan, oscillazioni M e J1, distanza M1'.

Tutti i cammini seguono la convenzione f(0-) = 0: un salto iniziale fa parte
del grafo. Le oscillazioni sono estremi superiori esatti, calcolati cella per
cella (tratto di t1, tratto di t, tratto di t2) invece che su una griglia.
"""

import itertools
import logging

import numpy as np

from stableldp.errors import DomainError
from stableldp.models import AugmentedGraph, CadlagPath, JordanDecomposition

logger = logging.getLogger(__name__)

# Tolleranza geometrica per intervalli liberi e vertici ammissibili
_SLACK = 1e-12
# Valore "non raggiungibile" per l'estremo inferiore di un bordo di cella
_BLOCKED = 2.0


def jordan(path):
    """Decomposizione minimale f = up - down, con l'atomo in 0 assegnato a up."""
    jumps, drifts = path.increments()
    m = path.n_breakpoints
    parts = {}
    for name, sign in (("up", 1.0), ("down", -1.0)):
        pos_jumps = np.maximum(sign * jumps, 0.0)
        pos_drifts = np.maximum(sign * drifts, 0.0)
        left = np.zeros(m)
        right = np.zeros(m)
        right[0] = pos_jumps[0]
        for i in range(1, m):
            left[i] = right[i - 1] + pos_drifts[i - 1]
            right[i] = left[i] + pos_jumps[i]
        parts[name] = CadlagPath(path.times, left, right, path.interpolation)
    return JordanDecomposition(up=parts["up"], down=parts["down"])


def m_value(x, y, z):
    """Distanza di y dall'intervallo chiuso di estremi x e z."""
    lo, hi = min(x, z), max(x, z)
    return max(lo - y, y - hi, 0.0)


def augmented_graph(path):
    """Catena (tempo, valore) di Gamma_0(f), partendo da (0, 0)."""
    vertices = [(0.0, 0.0)]
    for t, lv, rv in zip(path.times, path.left, path.right):
        for point in ((float(t), float(lv)), (float(t), float(rv))):
            if point != vertices[-1]:
                vertices.append(point)
    return AugmentedGraph(np.array(vertices))


# ---------------------------------------------------------------------------
# Oscillazioni
# ---------------------------------------------------------------------------

def _pieces(path):
    """Rampe affini sui tratti [t_i, t_{i+1}]: valore = base + slope * t."""
    t = path.times
    span = np.diff(t)
    slope = (path.left[1:] - path.right[:-1]) / span
    base = path.right[:-1] - slope * t[:-1]
    return t, base, slope


def _cell_vertices(bounds, delta, balances):
    """Vertici dell'arrangiamento di piani che delimitano una cella.

    `bounds` = ((lo1, hi1), (lo, hi), (lo2, hi2)) per le tre variabili,
    `balances` = piani di bilanciamento (normale, termine noto).
    """
    planes = []
    for axis, (lo, hi) in enumerate(bounds):
        e = np.zeros(3)
        e[axis] = 1.0
        planes.append((e, lo))
        planes.append((e, hi))
    planes.append((np.array([1.0, -1.0, 0.0]), 0.0))
    planes.append((np.array([0.0, 1.0, -1.0]), 0.0))
    planes.append((np.array([-1.0, 0.0, 1.0]), delta))
    planes.extend(balances)

    normals = np.array([p[0] for p in planes])
    rhs = np.array([p[1] for p in planes])
    combos = np.array(list(itertools.combinations(range(len(planes)), 3)))
    mats = normals[combos]
    det = np.linalg.det(mats)
    ok = np.abs(det) > 1e-14
    if not np.any(ok):
        return np.empty((0, 3))
    pts = np.linalg.solve(mats[ok], rhs[combos[ok]][..., None])[..., 0]

    keep = np.ones(len(pts), dtype=bool)
    for axis, (lo, hi) in enumerate(bounds):
        keep &= (pts[:, axis] >= lo - _SLACK) & (pts[:, axis] <= hi + _SLACK)
    keep &= pts[:, 0] <= pts[:, 1] + _SLACK
    keep &= pts[:, 1] <= pts[:, 2] + _SLACK
    keep &= pts[:, 2] - pts[:, 0] <= delta + _SLACK
    return pts[keep]


def _check_window(name, value):
    if not (0.0 < value <= 1.0):
        raise DomainError(f"{name} deve stare in (0, 1], ricevuto {value}")


def m_oscillation(path, delta):
    """w_M(f, delta): sup di M(f(t1-), f(t), f(t2)) con t1 < t < t2, t2 - t1 < delta."""
    _check_window("delta", delta)
    t, base, slope = _pieces(path)
    m = path.n_breakpoints - 1

    # tratti di t1: -1 e' la radice t1 = 0 con f(0-) = 0
    def t1_end(i):
        return 0.0 if i < 0 else t[i + 1]

    def t2_start(j):
        return t[j] if j < m else 1.0

    if path.interpolation == "step":
        a_vals = {i: (0.0 if i < 0 else float(path.right[i])) for i in range(-1, m)}
        b_vals = path.right[:m]
        best = 0.0
        for i in range(-1, m):
            lo_k = max(i, 0)
            bmin, bmax = np.inf, -np.inf
            for j in range(lo_k, m + 1):
                if t2_start(j) - t1_end(i) >= delta:
                    break
                k_top = min(j, m - 1)
                # massimo e minimo di b_k per k in [lo_k, k_top], aggiornati incrementalmente
                if k_top >= lo_k:
                    bmin = min(bmin, float(b_vals[k_top]))
                    bmax = max(bmax, float(b_vals[k_top]))
                c = float(path.right[j]) if j < m else float(path.right[m])
                a = a_vals[i]
                lo, hi = min(a, c), max(a, c)
                best = max(best, lo - bmin, bmax - hi)
        return float(best)

    best = 0.0
    for i in range(-1, m):
        for k in range(max(i, 0), m):
            for j in range(k, m + 1):
                if t2_start(j) - t1_end(i) >= delta:
                    break
                bounds = (
                    (0.0, 0.0) if i < 0 else (t[i], t[i + 1]),
                    (t[k], t[k + 1]),
                    (1.0, 1.0) if j == m else (t[j], t[j + 1]),
                )
                a0, a1 = (0.0, 0.0) if i < 0 else (base[i], slope[i])
                c0, c1 = (float(path.right[m]), 0.0) if j == m else (base[j], slope[j])
                # piano A(t1) = C(t2)
                balance = (np.array([a1, 0.0, -c1]), c0 - a0)
                pts = _cell_vertices(bounds, delta, [balance])
                if len(pts) == 0:
                    continue
                A = a0 + a1 * pts[:, 0]
                B = base[k] + slope[k] * pts[:, 1]
                C = c0 + c1 * pts[:, 2]
                vals = np.maximum(np.maximum(np.minimum(A, C) - B, B - np.maximum(A, C)), 0.0)
                best = max(best, float(vals.max()))
    return best


def j1_oscillation(path, eta):
    """omega_J1(f, eta): sup di |f(u)-f(t)| ^ |f(t)-f(s)| con s < t < u, u - s <= eta."""
    _check_window("eta", eta)
    t, base, slope = _pieces(path)
    m = path.n_breakpoints - 1

    def t2_start(j):
        return t[j] if j < m else 1.0

    if path.interpolation == "step":
        vals = path.right
        best = 0.0
        for i in range(m):
            for j in range(i, m + 1):
                if t2_start(j) - t[i + 1] >= eta:
                    break
                k_top = min(j, m - 1)
                b = vals[i:k_top + 1]
                score = np.minimum(np.abs(vals[j] - b), np.abs(b - vals[i]))
                best = max(best, float(score.max()))
        return best

    best = 0.0
    for i in range(m):
        for k in range(i, m):
            for j in range(k, m + 1):
                if t2_start(j) - t[i + 1] >= eta:
                    break
                bounds = (
                    (t[i], t[i + 1]),
                    (t[k], t[k + 1]),
                    (1.0, 1.0) if j == m else (t[j], t[j + 1]),
                )
                a0, a1 = base[i], slope[i]
                b0, b1 = base[k], slope[k]
                c0, c1 = (float(path.right[m]), 0.0) if j == m else (base[j], slope[j])
                balances = [
                    (np.array([a1, 0.0, -c1]), c0 - a0),
                    (np.array([a1, -2.0 * b1, c1]), 2.0 * b0 - a0 - c0),
                ]
                pts = _cell_vertices(bounds, eta, balances)
                if len(pts) == 0:
                    continue
                A = a0 + a1 * pts[:, 0]
                B = b0 + b1 * pts[:, 1]
                C = c0 + c1 * pts[:, 2]
                best = max(best, float(np.minimum(np.abs(C - B), np.abs(B - A)).max()))
    return best


# ---------------------------------------------------------------------------
# Distanza M1' (Frechet sotto la metrica del massimo sui grafi aumentati)
# ---------------------------------------------------------------------------

def _free_interval(p, a, b, eps):
    """Parametri lambda in [0,1] con |a + lambda (b - a) - p|_inf <= eps, o None."""
    lo, hi = 0.0, 1.0
    bound = eps + _SLACK
    for c in range(2):
        d = b[c] - a[c]
        off = p[c] - a[c]
        if abs(d) < 1e-15:
            if abs(off) > bound:
                return None
            continue
        x1, x2 = (off - bound) / d, (off + bound) / d
        if x1 > x2:
            x1, x2 = x2, x1
        lo, hi = max(lo, x1), min(hi, x2)
        if lo > hi:
            return None
    return lo, hi


def _frechet_decision(P, Q, eps):
    """Vero se esiste un accoppiamento monotono delle due catene a distanza <= eps."""
    bound = eps + _SLACK
    if np.max(np.abs(P[0] - Q[0])) > bound or np.max(np.abs(P[-1] - Q[-1])) > bound:
        return False
    n, m = len(P) - 1, len(Q) - 1

    # estremi inferiori raggiungibili sui bordi sinistro (L) e inferiore (B) di ogni cella
    left_free = [[_free_interval(P[i], Q[j], Q[j + 1], eps) for j in range(m)] for i in range(n + 1)]
    bottom_free = [[_free_interval(Q[j], P[i], P[i + 1], eps) for j in range(m + 1)] for i in range(n)]
    L = np.full((n + 1, m), _BLOCKED)
    B = np.full((n, m + 1), _BLOCKED)

    # prima colonna e prima riga: si sale finche' il bordo e' libero da 0 a 1
    for j in range(m):
        iv = left_free[0][j]
        if iv is None or iv[0] > 0.0:
            break
        L[0, j] = 0.0
        if iv[1] < 1.0 - _SLACK:
            break
    for i in range(n):
        iv = bottom_free[i][0]
        if iv is None or iv[0] > 0.0:
            break
        B[i, 0] = 0.0
        if iv[1] < 1.0 - _SLACK:
            break

    for i in range(n):
        for j in range(m):
            from_left = L[i, j] <= 1.0
            from_bottom = B[i, j] <= 1.0
            right = left_free[i + 1][j]
            if right is not None:
                if from_bottom:
                    L[i + 1, j] = right[0]
                elif from_left and right[1] >= L[i, j]:
                    L[i + 1, j] = max(right[0], L[i, j])
            top = bottom_free[i][j + 1]
            if top is not None:
                if from_left:
                    B[i, j + 1] = top[0]
                elif from_bottom and top[1] >= B[i, j]:
                    B[i, j + 1] = max(top[0], B[i, j])

    corner_left = left_free[n][m - 1]
    corner_bottom = bottom_free[n - 1][m]
    return bool(
        (L[n, m - 1] <= 1.0 and corner_left is not None and corner_left[1] >= 1.0 - _SLACK)
        or (B[n - 1, m] <= 1.0 and corner_bottom is not None and corner_bottom[1] >= 1.0 - _SLACK)
    )


def m1_distance(p1, p2, tol=1e-6):
    """Distanza M1' entro `tol`, per bisezione sulla decisione di Frechet."""
    if not tol > 0:
        raise DomainError(f"m1_distance: tol deve essere positiva, ricevuta {tol}")
    P = augmented_graph(p1).vertices
    Q = augmented_graph(p2).vertices
    # ordine canonico: il risultato non dipende dall'ordine degli argomenti
    if (len(P), P.tobytes()) > (len(Q), Q.tobytes()):
        P, Q = Q, P
    if _frechet_decision(P, Q, 0.0):
        return 0.0
    lo, hi = 0.0, 1.0 + float(np.max(np.abs(P[:, 1]))) + float(np.max(np.abs(Q[:, 1])))
    steps = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _frechet_decision(P, Q, mid):
            hi = mid
        else:
            lo = mid
        steps += 1
    logger.debug(f"m1_distance: {steps} bisezioni su catene di {len(P)} e {len(Q)} vertici")
    return 0.5 * (lo + hi)
