"""Tipi di dominio: parametri stabili, cammini cadlag, valori di rate, campioni MC."""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from stableldp.errors import DomainError

INTERPOLATIONS = ("step", "linear")
RATE_REASONS = (
    "none",
    "negative-values",
    "endpoint-mismatch",
    "unbounded-variation-proxy",
    "singular-down-part",
)
SKELETON_KINDS = ("free", "bridge", "excursion")


def _frozen_array(values, name):
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise DomainError(f"{name} deve essere un vettore, ricevuto shape {arr.shape}")
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# stable_math
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StableParams:
    """Costanti del processo con E[exp(-lambda L_t)] = exp(t lambda^alpha)."""

    alpha: float
    alpha_prime: float
    c_alpha: float
    C_alpha: float

    @property
    def scale(self):
        """Scala della legge di L_1 nella parametrizzazione S1 con beta=+1."""
        return (-math.cos(math.pi * self.alpha / 2.0)) ** (1.0 / self.alpha)


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError(f"tolleranze di quadratura non positive: {self.rel_tol}, {self.abs_tol}")
        if self.max_subdivisions < 1:
            raise DomainError(f"max_subdivisions deve essere >= 1, ricevuto {self.max_subdivisions}")


@dataclass(frozen=True, eq=False)
class DensityTable:
    """Densita' tabulata con la sua cumulata (regola dei trapezi)."""

    x: np.ndarray
    pdf: np.ndarray
    cdf: np.ndarray

    def __post_init__(self):
        for name in ("x", "pdf", "cdf"):
            object.__setattr__(self, name, _frozen_array(getattr(self, name), name))
        if not (self.x.size == self.pdf.size == self.cdf.size) or self.x.size < 2:
            raise DomainError("griglia, densita' e cumulata devono avere la stessa lunghezza (>= 2)")
        if np.any(np.diff(self.x) <= 0):
            raise DomainError("le ascisse della tabella devono essere strettamente crescenti")

    @property
    def total_mass(self):
        return float(self.cdf[-1])

    def cdf_at(self, x):
        return np.interp(x, self.x, self.cdf)

    def quantile(self, u):
        """Inversa della cumulata, lineare dentro ogni cella della griglia."""
        u = np.asarray(u, dtype=float)
        idx = np.clip(np.searchsorted(self.cdf, u, side="left"), 1, self.x.size - 1)
        lo_c, hi_c = self.cdf[idx - 1], self.cdf[idx]
        width = hi_c - lo_c
        frac = np.where(width > 0, (u - lo_c) / np.where(width > 0, width, 1.0), 0.0)
        out = self.x[idx - 1] + np.clip(frac, 0.0, 1.0) * (self.x[idx] - self.x[idx - 1])
        return float(out) if out.ndim == 0 else out

    @property
    def median(self):
        return self.quantile(0.5)


# ---------------------------------------------------------------------------
# path_space
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CadlagPath:
    """Funzione cadlag a breakpoint finiti, con la convenzione f(0-) = 0.

    `left[i]` e' il limite sinistro in `times[i]` (per i = 0 vale sempre 0),
    `right[i]` il valore f(times[i]). Tra due breakpoint il cammino e' costante
    (step) oppure lineare da right[i] a left[i+1] (linear).
    """

    times: np.ndarray
    left: np.ndarray
    right: np.ndarray
    interpolation: str = "step"

    def __post_init__(self):
        for name in ("times", "left", "right"):
            object.__setattr__(self, name, _frozen_array(getattr(self, name), name))
        t = self.times
        if not (t.size == self.left.size == self.right.size) or t.size < 2:
            raise DomainError("times, left e right devono avere la stessa lunghezza (>= 2)")
        if t[0] != 0.0 or t[-1] != 1.0 or np.any(np.diff(t) <= 0):
            raise DomainError("i breakpoint devono crescere strettamente da 0 a 1")
        if self.interpolation not in INTERPOLATIONS:
            raise DomainError(f"interpolazione sconosciuta: {self.interpolation}")
        if self.left[0] != 0.0:
            raise DomainError("convenzione f(0-)=0 violata: left[0] deve essere 0")
        if self.interpolation == "step" and np.any(self.left[1:] != self.right[:-1]):
            raise DomainError("cammino a gradini: left[i+1] deve coincidere con right[i]")

    @classmethod
    def step(cls, times, values):
        values = np.asarray(values, dtype=float)
        left = np.concatenate(([0.0], values[:-1]))
        return cls(times, left, values, "step")

    @classmethod
    def linear(cls, times, values, left=None):
        """Lineare a tratti e continuo, salvo il salto iniziale da f(0-)=0 e i salti in `left`."""
        values = np.asarray(values, dtype=float)
        if left is None:
            left = values.copy()
        left = np.array(left, dtype=float)
        left[0] = 0.0
        return cls(times, left, values, "linear")

    @property
    def n_breakpoints(self):
        return int(self.times.size)

    def value(self, t):
        """Valore destro-continuo f(t)."""
        t = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(self.times, t, side="right") - 1, 0, self.times.size - 1)
        out = self.right[idx].copy() if idx.ndim else np.array(self.right[idx])
        if self.interpolation == "linear":
            inner = idx < self.times.size - 1
            j = np.where(inner, idx, 0)
            span = self.times[j + 1] - self.times[j]
            frac = (t - self.times[j]) / span
            ramp = self.right[j] + (self.left[j + 1] - self.right[j]) * frac
            out = np.where(inner, ramp, out)
        return float(out) if out.ndim == 0 else out

    def left_limit(self, t):
        """Limite sinistro f(t-), con f(0-) = 0."""
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.times, t, side="left") - 1
        j = np.clip(idx, 0, self.times.size - 2)
        if self.interpolation == "linear":
            span = self.times[j + 1] - self.times[j]
            ramp = self.right[j] + (self.left[j + 1] - self.right[j]) * (t - self.times[j]) / span
        else:
            ramp = self.right[j]
        out = np.where(idx < 0, 0.0, ramp)
        return float(out) if out.ndim == 0 else out

    def sup_abs(self):
        return float(max(np.max(np.abs(self.left)), np.max(np.abs(self.right))))

    def min_value(self):
        return float(min(np.min(self.left[1:], initial=np.inf), np.min(self.right)))

    def max_value(self):
        return float(max(np.max(self.left[1:], initial=-np.inf), np.max(self.right)))

    def increments(self):
        """Salti nei breakpoint e variazioni lungo i segmenti."""
        jumps = self.right - self.left
        drifts = self.left[1:] - self.right[:-1]
        return jumps, drifts

    def total_variation(self):
        jumps, drifts = self.increments()
        return float(np.sum(np.abs(jumps)) + np.sum(np.abs(drifts)))


@dataclass(frozen=True, eq=False)
class JordanDecomposition:
    up: CadlagPath
    down: CadlagPath


@dataclass(frozen=True, eq=False)
class AugmentedGraph:
    """Catena poligonale (tempo, valore) che percorre Gamma_0(f) nell'ordine del grafo."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 2:
            raise DomainError(f"vertici non validi, shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    def __len__(self):
        return int(self.vertices.shape[0])


# ---------------------------------------------------------------------------
# rate_functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RateValue:
    """Reale esteso non negativo: valore finito oppure +inf con un motivo."""

    value: float
    reason: str = "none"

    def __post_init__(self):
        if self.reason not in RATE_REASONS:
            raise DomainError(f"motivo sconosciuto: {self.reason}")
        if (self.reason == "none") != math.isfinite(self.value):
            raise DomainError("il motivo e' 'none' se e solo se il valore e' finito")

    @classmethod
    def finite(cls, value):
        return cls(float(value), "none")

    @classmethod
    def infinite(cls, reason):
        return cls(math.inf, reason)

    @property
    def is_finite(self):
        return self.reason == "none"


@dataclass(frozen=True)
class Subdivision:
    times: tuple

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        if not times:
            raise DomainError("la suddivisione non puo' essere vuota")
        if any(not (0.0 < t < 1.0) for t in times):
            raise DomainError("i tempi della suddivisione devono stare in (0,1)")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise DomainError("i tempi della suddivisione devono essere strettamente crescenti")
        object.__setattr__(self, "times", times)

    def __len__(self):
        return len(self.times)


# ---------------------------------------------------------------------------
# variational
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridFunctional:
    """Funzionale valutato sui valori di un cammino su una griglia uniforme di n+1 punti.

    `gradient`, se presente, restituisce il (sotto)gradiente rispetto ai valori.
    """

    name: str
    evaluate: Callable[[np.ndarray], float]
    monotone: bool
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None


@dataclass(frozen=True, eq=False)
class VariationalResult:
    functional: str
    gamma: float
    maximizer: np.ndarray
    iterations: int
    residual: float

    @property
    def n(self):
        return int(self.maximizer.size - 1)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

@dataclass
class RngStream:
    """Flusso PCG64 riproducibile; i figli si ottengono estendendo la spawn key."""

    seed: int
    spawn_key: tuple = ()
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        if not (0 <= int(self.seed) < 2 ** 64):
            raise DomainError(f"il seed deve essere un intero a 64 bit non negativo, ricevuto {self.seed}")
        self.seed = int(self.seed)
        seq = np.random.SeedSequence(self.seed, spawn_key=tuple(self.spawn_key))
        self.generator = np.random.Generator(np.random.PCG64(seq))

    def spawn(self, k):
        return [RngStream(self.seed, tuple(self.spawn_key) + (i,)) for i in range(k)]


@dataclass(frozen=True)
class SamplerConfig:
    n: int = 1024
    table_points: int = 512
    rejection_cap: int = 64
    depth_cap: int = 16
    batch_size: int = 2048
    workers: int = 1
    midpoint_method: str = "rejection"
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"n deve essere almeno 1, ricevuto {self.n}")
        if min(self.table_points, self.rejection_cap, self.depth_cap, self.batch_size, self.workers) < 1:
            raise DomainError("i limiti del campionatore devono essere >= 1")
        if self.midpoint_method not in ("rejection", "table"):
            raise DomainError(f"metodo per il punto medio sconosciuto: {self.midpoint_method}")


@dataclass(frozen=True, eq=False)
class PathSkeleton:
    """Valori simulati su una griglia uniforme di n+1 punti, con provenienza."""

    values: np.ndarray
    kind: str
    alpha: float
    seed: Optional[int] = None
    a: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values, "values"))
        if self.kind not in SKELETON_KINDS:
            raise DomainError(f"tipo di scheletro sconosciuto: {self.kind}")

    @property
    def n(self):
        return int(self.values.size - 1)

    @property
    def times(self):
        return np.linspace(0.0, 1.0, self.n + 1)

    def to_path(self, interpolation="linear"):
        if interpolation == "step":
            return CadlagPath.step(self.times, self.values)
        return CadlagPath.linear(self.times, self.values)


@dataclass(frozen=True, eq=False)
class SkeletonBatch:
    """Blocco di scheletri con la stessa provenienza, una riga per campione."""

    values: np.ndarray
    kind: str
    alpha: float
    seed: Optional[int] = None
    a: Optional[float] = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise DomainError(f"un batch di scheletri e' una matrice, ricevuto shape {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.kind not in SKELETON_KINDS:
            raise DomainError(f"tipo di scheletro sconosciuto: {self.kind}")

    def __len__(self):
        return int(self.values.shape[0])

    @property
    def n(self):
        return int(self.values.shape[1] - 1)

    def skeleton(self, i):
        return PathSkeleton(self.values[i], self.kind, self.alpha, self.seed, self.a)


# ---------------------------------------------------------------------------
# ldp_harness
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TailEstimate:
    functional: str
    kind: str
    thresholds: np.ndarray
    counts: np.ndarray
    n_samples: int
    estimates: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    min_hits: int = 30

    @property
    def usable(self):
        return self.counts >= self.min_hits

    @property
    def excluded(self):
        return ~self.usable

    def rows(self):
        return [
            {
                "x": float(x), "hits": int(k), "estimate": float(p),
                "lower": float(lo), "upper": float(hi), "excluded": bool(ex),
            }
            for x, k, p, lo, hi, ex in zip(
                self.thresholds, self.counts, self.estimates, self.lower, self.upper, self.excluded
            )
        ]


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    r_squared: float
    theory_slope: float
    relative_deviation: float
    stderr: float = float("nan")
    n_points: int = 0


@dataclass(frozen=True)
class KSCheck:
    name: str
    statistic: float
    threshold: float
    n_samples: int
    passed: bool
    detail: dict = field(default_factory=dict)


@dataclass(frozen=True)
class TightnessReport:
    kind: str
    log_c: float
    exponent_coefficient: float
    rows: list
    near_endpoint: list
    passed: bool
