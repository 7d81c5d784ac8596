"""Classical scalability laws and the model's closed-form special cases.

The closed forms double as independent oracles for the numeric steady-state
solver: each one is the stable fixed point of the ODE system under a specific
rate pattern, reached from the all-solo start.

Note on near-identities: the contention-limited special case has denominator
1 + (k2/k4) N while Amdahl's law uses 1 + sigma (N - 1), and the
diminishing-returns approximation uses N and N^2 terms where the USL uses
N (N - 1).  These pairs are similar, not equal, and no cross-equality is
asserted anywhere in this package.
"""

import math
from dataclasses import dataclass

from .errors import SingularFixedPointError, UndefinedSpeedupError
from .model import Contribution, FixedPoint, Rates, _rhs, classify_stability

__all__ = [
    "AmdahlParams",
    "GustafsonParams",
    "UslParams",
    "SwarmParams",
    "amdahl_speedup",
    "gustafson_speedup",
    "usl_speedup",
    "swarm_performance",
    "throughput",
    "speedup",
    "fp_ideal_concurrency",
    "fp_amdahl",
    "fp_diminishing",
    "usl_approx_speedup",
]

# k2 within this relative distance of 2*k1 routes to the singular Amdahl form.
AMDAHL_SINGULARITY_RTOL = 1e-9


@dataclass(frozen=True)
class AmdahlParams:
    """Serial fraction sigma in [0, 1]."""

    sigma: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and 0.0 <= self.sigma <= 1.0):
            raise ValueError(f"sigma must be in [0, 1], got {self.sigma!r}")


@dataclass(frozen=True)
class GustafsonParams:
    """Serial fraction sigma in [0, 1]."""

    sigma: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and 0.0 <= self.sigma <= 1.0):
            raise ValueError(f"sigma must be in [0, 1], got {self.sigma!r}")


@dataclass(frozen=True)
class UslParams:
    """Contention sigma (negative values model synergy) and coherency
    delay kappa >= 0."""

    sigma: float
    kappa: float

    def __post_init__(self):
        if not math.isfinite(self.sigma):
            raise ValueError("sigma must be finite")
        if not (math.isfinite(self.kappa) and self.kappa >= 0.0):
            raise ValueError(f"kappa must be >= 0, got {self.kappa!r}")


@dataclass(frozen=True)
class SwarmParams:
    """Swarm performance constants: a > 0, b > 0, c < 0."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0):
            raise ValueError(f"a must be > 0, got {self.a!r}")
        if not (math.isfinite(self.b) and self.b > 0):
            raise ValueError(f"b must be > 0, got {self.b!r}")
        if not (math.isfinite(self.c) and self.c < 0):
            raise ValueError(f"c must be < 0, got {self.c!r}")


def _check_n(n):
    if not (math.isfinite(n) and n >= 1.0):
        raise ValueError(f"n must be >= 1, got {n!r}")


def amdahl_speedup(p: AmdahlParams, n: float) -> float:
    """N / (1 + sigma (N - 1)): bounded speedup, saturating near 1/sigma."""
    _check_n(n)
    return n / (1.0 + p.sigma * (n - 1.0))


def gustafson_speedup(p: GustafsonParams, n: float) -> float:
    """N + (1 - N) sigma: unbounded growth for sigma < 1."""
    _check_n(n)
    return n + (1.0 - n) * p.sigma


def usl_speedup(p: UslParams, n: float) -> float:
    """N / (1 + sigma (N - 1) + kappa N (N - 1)).

    With kappa = 0 this is exactly Amdahl's law.  Negative sigma can drive
    the denominator to zero or below; that is outside the model's domain and
    raises.
    """
    _check_n(n)
    denom = 1.0 + p.sigma * (n - 1.0) + p.kappa * n * (n - 1.0)
    if denom <= 0.0:
        raise ValueError(f"non-positive USL denominator {denom!r} at n={n!r}")
    return n / denom


def swarm_performance(p: SwarmParams, n: float) -> float:
    """a N^b exp(c N): collaboration potential vs interference decay.

    The continuous argmax sits at N = -b/c.
    """
    _check_n(n)
    return p.a * n**p.b * math.exp(p.c * n)


def throughput(fp: FixedPoint, c: Contribution) -> float:
    """X = c_s s* + c_g g*; fermo units contribute nothing."""
    return c.c_s * fp.s_star + c.c_g * fp.g_star


def speedup(fp: FixedPoint, c: Contribution) -> float:
    """X(N)/X(1) = s* + (c_g/c_s) g*, defined only for c_s > 0.

    For c_s = 0 the ratio diverges (a lone unit produces nothing), so this
    refuses rather than returning infinity; throughput stays available.
    """
    if c.c_s == 0.0:
        raise UndefinedSpeedupError("speedup is undefined for c_s = 0")
    return fp.s_star + (c.c_g / c.c_s) * fp.g_star


def _make_fp(rates: Rates, n, s, g, f):
    """FixedPoint with the residual and stability computed at the point.

    Rate sets that freeze fermo (k5 = k6 = k7 = 0) have an exactly-zero
    Jacobian eigenvalue along f, so their points classify as marginal even
    though the dynamics on the f = 0 manifold are attracting.
    """
    d = _rhs(s, g, f, *rates.as_tuple())
    residual = max(abs(d[0]), abs(d[1]), abs(d[2]))
    return FixedPoint(s, g, f, classify_stability(s, f, rates, n), residual)


def fp_ideal_concurrency(k1: float, k4: float, n: float) -> FixedPoint:
    """Stable fixed point with only k1, k4 active (ideal-concurrency regime).

    s* = (sqrt(k4^2 + 8 k1 k4 N) - k4) / (4 k1), g* = N - s*, f* = 0,
    evaluated in the equivalent rationalized form 2 k4 N / (k4 + sqrt(...)),
    which is exact at k1 = 0 (where the textbook form is 0/0 and the point
    degenerates to (N, 0, 0)).
    """
    _check_rate("k1", k1, allow_zero=True)
    _check_rate("k4", k4)
    _check_size(n)
    s = 2.0 * k4 * n / (k4 + math.sqrt(k4 * k4 + 8.0 * k1 * k4 * n))
    s = min(s, n)
    return _make_fp(Rates(k1=k1, k4=k4), n, s, n - s, 0.0)


def fp_amdahl(k1: float, k2: float, k4: float, n: float) -> FixedPoint:
    """Stable fixed point with k1, k2, k4 active (contention-limited regime).

    At k2 = 2 k1 the general quadratic root degenerates and the point takes
    the Amdahl-like form s* = k4 N / (k4 + k2 N); nearby parameters are
    routed to that form as well (relative gap below AMDAHL_SINGULARITY_RTOL).
    The general branch uses the rationalized root, which is immune to the
    cancellation the raw quadratic formula suffers near the singularity.
    """
    _check_rate("k1", k1)
    _check_rate("k2", k2)
    _check_rate("k4", k4)
    _check_size(n)
    if abs(k2 - 2.0 * k1) <= AMDAHL_SINGULARITY_RTOL * max(k2, 2.0 * k1):
        s = k4 * n / (k4 + k2 * n)
    else:
        disc = k4 * k4 + 8.0 * k1 * k4 * n - 2.0 * k2 * k4 * n + k2 * k2 * n * n
        s = 2.0 * k4 * n / (k4 + k2 * n + math.sqrt(disc))
    s = min(s, n)
    return _make_fp(Rates(k1=k1, k2=k2, k4=k4), n, s, n - s, 0.0)


def fp_diminishing(k1: float, k4: float, n: float) -> FixedPoint:
    """Stable fixed point under k2 = k3 = k5 = k6 = 2 k1 and k7 = k4.

    The f* expression has denominator 8 k1^2 k4 N - 16 k1^3 N^2, which
    vanishes at k4 = 2 k1 N; that is a removable 0/0 of the published form,
    but this function follows the formula as written and raises
    SingularFixedPointError there so callers can fall back to integration.
    """
    _check_rate("k1", k1)
    _check_rate("k4", k4)
    _check_size(n)
    radicand = (
        16.0 * k1**4 * n**4
        + 48.0 * k4 * k1**3 * n**3
        - 4.0 * k4**2 * k1**2 * n**2
        + 4.0 * k4**3 * k1 * n
        + k4**4
    )
    root = math.sqrt(radicand)
    s = 2.0 * k4 * k4 * n / (4.0 * k1 * k1 * n * n + root + 2.0 * k4 * k1 * n + k4 * k4)
    denom = 8.0 * k1 * k1 * k4 * n - 16.0 * k1**3 * n * n
    scale = 8.0 * k1 * k1 * n * max(k4, 2.0 * k1 * n)
    if abs(denom) <= 1e-12 * scale:
        raise SingularFixedPointError(
            f"f* formula is singular at k4 = 2 k1 N (k1={k1!r}, k4={k4!r}, n={n!r}); "
            "use integrate_to_steady instead"
        )
    f = -(24.0 * k1**3 * n**3 - (2.0 * k1 * n + k4) * root + 4.0 * k4 * k4 * k1 * n + k4**3) / denom
    k2 = 2.0 * k1
    rates = Rates(k1=k1, k2=k2, k3=k2, k4=k4, k5=k2, k6=k2, k7=k4)
    return _make_fp(rates, n, s, n - s - f, f)


def usl_approx_speedup(k2: float, k4: float, n: float) -> float:
    """Diminishing-returns speedup approximation
    N / ((k2/k4)^2 N^2 + (k2/k4) N + 1).

    USL-like with sigma = k2/k4 and kappa = sigma^2 (so kappa can never be
    negative), but with N, N^2 in place of the USL's N (N - 1) terms.
    """
    if not (math.isfinite(k2) and k2 >= 0):
        raise ValueError(f"k2 must be >= 0, got {k2!r}")
    _check_rate("k4", k4)
    _check_size(n)
    sigma = k2 / k4
    return n / (sigma * sigma * n * n + sigma * n + 1.0)


def _check_rate(name, value, allow_zero=False):
    if not math.isfinite(value) or value < 0 or (value == 0 and not allow_zero):
        bound = ">= 0" if allow_zero else "> 0"
        raise ValueError(f"{name} must be {bound} and finite, got {value!r}")


def _check_size(n):
    if not (math.isfinite(n) and n > 0):
        raise ValueError(f"n must be > 0, got {n!r}")
