"""Bodies K = conv(A, p) with A = rho*B_2^n ∩ {|x_1| <= 1}, p = n^c e_n, rho = n^beta.

Support: h_K = max(h_A, <p, theta>). For rho <= 1 the slab is inactive and
h_A = rho. Otherwise the maximiser of <x, theta> over A either is rho*theta
(when rho*|theta_1| <= 1) or sits on the slab face x_1 = sign(theta_1), which
gives h_A = |theta_1| + sqrt(rho^2 - 1) * sqrt(1 - theta_1^2).

Gauge: x lies in tK iff x = (1 - lam) a + lam t p for some a in tA and
lam in [0, 1). Writing u = 1/(1 - lam) >= 1 the point a runs along the ray

    y(u) = t p + u (x - t p),   u >= 1.

Only e_n carries the apex, so y_1(u) = u x_1 and the slab gives u <= t/|x_1|.
The ball gives the quadratic |d|^2 u^2 + 2 t <p, d> u + t^2 (|p|^2 - rho^2) <= 0
with d = x - t p, whose constant term is positive because c > beta. So the
feasible u form an interval and membership reduces to comparing its ends.
Membership is monotone in t, and t is bisected between |x|/n^c and |x|/r.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .counts import FCount
from .errors import DegenerateInput, InvalidParameter, HypothesisViolated
from .fitting import SlopeFit, fit_loglog
from .hanner import FamilyReport
from .rng import derive_seed
from .sphere import MCEstimate, cap_measure_exact, mc_M, mc_mean_width

GAUGE_RTOL = 1e-10
SUPPORT_TOL = 1e-12
UNIT_TOL = 1e-9


@dataclass(frozen=True)
class GeomBody:
    n: int
    c: float
    beta: float
    scale: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise InvalidParameter("n must be an integer >= 2")
        if not 0 < self.c < 1:
            raise InvalidParameter("c must lie in (0, 1)")
        if not self.c - 0.5 < self.beta < self.c:
            raise InvalidParameter("beta must lie in (c - 1/2, c)")
        if not self.scale > 0:
            raise InvalidParameter("scale must be positive")

    @property
    def dim(self) -> int:
        return self.n

    @property
    def apex(self) -> float:
        return float(self.n) ** self.c

    @property
    def rho(self) -> float:
        return float(self.n) ** self.beta

    @property
    def inradius(self) -> float:
        return self.scale * min(1.0, self.rho)

    @property
    def circumradius(self) -> float:
        return self.scale * self.apex

    counts = None

    def support(self, theta, method: str = "closed"):
        return support_K(self, theta, method)

    def gauge(self, x):
        return gauge_K(self, x)


def _unit_rows(K: GeomBody, theta) -> np.ndarray:
    th = np.asarray(theta, dtype=float)
    if th.shape[-1] != K.n:
        raise InvalidParameter(f"expected {K.n} coordinates, got {th.shape[-1]}")
    norms = np.linalg.norm(th, axis=-1)
    if np.any(np.abs(norms - 1.0) > UNIT_TOL):
        raise InvalidParameter("support_K expects unit directions")
    return th


def _support_a_closed(rho: float, t1: np.ndarray) -> np.ndarray:
    if rho <= 1.0:
        return np.full_like(t1, rho)
    w = np.sqrt(np.clip(1.0 - t1 * t1, 0.0, None))
    face = t1 + math.sqrt(rho * rho - 1.0) * w
    return np.where(rho * t1 <= 1.0, rho, face)


def _support_a_bisect(rho: float, t1: np.ndarray) -> np.ndarray:
    # maximise t1*s + sqrt(rho^2 - s^2)*w over s in [0, min(1, rho)]; the
    # derivative t1 - s*w/sqrt(rho^2 - s^2) is decreasing in s
    w = np.sqrt(np.clip(1.0 - t1 * t1, 0.0, None))
    top = min(1.0, rho)

    def deriv(s):
        return t1 - s * w / np.sqrt(np.maximum(rho * rho - s * s, 1e-300))

    lo = np.zeros_like(t1)
    hi = np.full_like(t1, top)
    at_top = deriv(hi) >= 0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        up = deriv(mid) > 0
        lo = np.where(up, mid, lo)
        hi = np.where(up, hi, mid)
        if np.all(hi - lo <= SUPPORT_TOL):
            break
    s = np.where(at_top, top, 0.5 * (lo + hi))
    return t1 * s + np.sqrt(np.maximum(rho * rho - s * s, 0.0)) * w


def support_K(K: GeomBody, theta, method: str = "closed"):
    th = _unit_rows(K, theta)
    t1 = np.abs(th[..., 0])
    if method == "closed":
        ha = _support_a_closed(K.rho, t1)
    elif method == "bisect":
        ha = _support_a_bisect(K.rho, t1)
    else:
        raise InvalidParameter(f"unknown support method {method!r}")
    h = K.scale * np.maximum(ha, K.apex * th[..., -1])
    return float(h) if np.ndim(h) == 0 else h


def _member(K: GeomBody, t, perp2, x1, xn) -> np.ndarray:
    """Is x in tK, given |x|^2 - x_n^2, |x_1| and x_n (all arrays)."""
    P, rho = K.apex, K.rho
    tp = t * P
    # |x - tp|^2 without cancellation near the apex
    d2 = perp2 + (xn - tp) ** 2
    b = tp * (xn - tp)
    cst = t * t * (P * P - rho * rho)
    disc = b * b - d2 * cst
    at_apex = d2 <= (1e-14 * tp) ** 2
    ok = disc >= 0
    sq = np.sqrt(np.where(ok, disc, 0.0))
    # stable roots of d2 u^2 + 2 b u + cst
    q = -(b + np.where(b >= 0, sq, -sq))
    safe_q = np.where(q == 0, 1.0, q)
    safe_d2 = np.where(d2 > 0, d2, 1.0)
    r1, r2 = q / safe_d2, cst / safe_q
    u_lo, u_hi = np.minimum(r1, r2), np.maximum(r1, r2)
    with np.errstate(divide="ignore"):
        slab = np.where(x1 > 0, t / np.where(x1 > 0, x1, 1.0), np.inf)
    upper = np.minimum(u_hi, slab)
    lower = np.maximum(1.0, u_lo)
    return at_apex | (ok & (q != 0) & (lower <= upper * (1 + 1e-15)))


def gauge_K(K: GeomBody, x):
    arr = np.asarray(x, dtype=float)
    if arr.shape[-1] != K.n:
        raise InvalidParameter(f"expected {K.n} coordinates, got {arr.shape[-1]}")
    y = np.atleast_2d(arr) / K.scale
    perp2 = np.einsum("ij,ij->i", y[:, :-1], y[:, :-1])
    x1 = np.abs(y[:, 0])
    xn = y[:, -1]
    norm = np.sqrt(perp2 + xn * xn)
    lo = norm / K.apex
    # x / hi lies on the inner sphere, so widen slightly against rounding
    hi = norm / min(1.0, K.rho) * (1 + 1e-12)
    if np.any(~_member(K, hi, perp2, x1, xn)):
        raise DegenerateInput("gauge bracket failed: x not in (|x|/r) K")
    nz = norm > 0
    for _ in range(200):
        active = nz & (hi - lo > GAUGE_RTOL * hi)
        if not np.any(active):
            break
        mid = 0.5 * (lo + hi)
        inside = _member(K, mid, perp2, x1, xn)
        hi = np.where(active & inside, mid, hi)
        lo = np.where(active & ~inside, mid, lo)
    out = np.where(nz, hi, 0.0)
    return float(out[0]) if arr.ndim == 1 else out


# -- Dvoretzky dimensions ------------------------------------------------------


@dataclass(frozen=True)
class DvReport:
    n: int
    M: MCEstimate
    Mstar: MCEstimate
    r: float
    R: float

    @property
    def dvS(self) -> float:
        return self.n * (self.M.mean * self.r) ** 2

    @property
    def dvP(self) -> float:
        return self.n * (self.Mstar.mean / self.R) ** 2

    @property
    def eq4(self) -> float:
        return self.dvS * self.dvP * (self.R / self.r) ** 2 / self.n**2

    @property
    def mm(self) -> float:
        return self.M.mean * self.Mstar.mean

    @property
    def mm_err(self) -> float:
        return math.hypot(self.M.mean * self.Mstar.stderr, self.Mstar.mean * self.M.stderr)

    def eq4_identity_ok(self, rtol: float = 1e-9) -> bool:
        return math.isclose(self.eq4, self.mm**2, rel_tol=rtol)

    def eq4_lower_ok(self, k: float = 3.0) -> bool:
        # (MM*)^2 >= 1 - k sigma, with sigma from the delta method on the square
        return self.eq4 >= 1.0 - k * 2.0 * self.mm * self.mm_err

    def row(self) -> dict:
        return {
            "n": self.n, "M": self.M.mean, "M_err": self.M.stderr,
            "Mstar": self.Mstar.mean, "Mstar_err": self.Mstar.stderr,
            "dvS": self.dvS, "dvP": self.dvP, "eq4": self.eq4,
        }


def dv_report(K, samples: int, seed: int, workers: int | None = None) -> DvReport:
    M = mc_M(K.gauge, K.dim, samples, derive_seed(seed, "M"), workers)
    Ms = mc_mean_width(K.support, K.dim, samples, derive_seed(seed, "Mstar"), workers)
    return DvReport(K.dim, M, Ms, K.inradius, K.circumradius)


@dataclass
class GeomSweep:
    report: FamilyReport
    dv: list[DvReport]
    mstar_fit: SlopeFit | None
    m_fit: SlopeFit | None
    flags: dict = field(default_factory=dict)


def _check_ns(n_list) -> list[int]:
    ns = [int(n) for n in n_list]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise InvalidParameter("n_list must be strictly ascending")
    return ns


def geom_sweep(c: float, beta: float, n_list, samples: int, seed: int, workers: int | None = None) -> GeomSweep:
    ns = _check_ns(n_list)
    dv = [dv_report(GeomBody(n, c, beta), samples, derive_seed(seed, "geom", n), workers) for n in ns]
    columns = ("n", "M", "M_err", "Mstar", "Mstar_err", "dvS", "dvP", "eq4")
    rows = [tuple(d.row()[k] for k in columns) for d in dv]
    report = FamilyReport({"c": c, "beta": beta, "samples": samples, "seed": seed}, columns, rows)
    fits = len(ns) >= 3
    ms_fit = fit_loglog((d.n, d.Mstar.mean) for d in dv) if fits else None
    m_fit = fit_loglog((d.n, d.M.mean) for d in dv) if fits else None
    flags = {"slow_convergence": beta <= 0}
    return GeomSweep(report, dv, ms_fit, m_fit, flags)


# -- the (a, b, c) proposition -------------------------------------------------


@dataclass
class GeomFlmReport:
    a: float
    b: float
    c: float
    beta: float
    sweep: GeomSweep
    dvP_fit: SlopeFit | None
    dvS_fit: SlopeFit | None
    ratio_sq: list[float]


def check_abc(a: float, b: float, c: float, tol: float = 1e-9) -> float:
    """Validate (a, b, c) and return beta = c + (a - 1)/2."""
    if not (a < 1 and b < 1 and c < 1):
        raise HypothesisViolated("need a, b, c < 1")
    if abs(a + b + 2 * c - 2) > tol:
        raise HypothesisViolated(f"need a + b + 2c = 2, got {a + b + 2 * c!r}")
    if a < 1 - 2 * c - tol or b < 1 - 2 * c - tol:
        raise HypothesisViolated("need a, b >= 1 - 2c")
    if not c > 0:
        raise HypothesisViolated("need c > 0")
    beta = c + (a - 1) / 2
    if not c - 0.5 < beta < c:
        raise HypothesisViolated(f"beta = {beta} leaves (c - 1/2, c); need 0 < a < 1")
    return beta


def prop_geometric_flm(a: float, b: float, c: float, n_list, samples: int, seed: int,
                       workers: int | None = None) -> GeomFlmReport:
    beta = check_abc(a, b, c)
    sweep = geom_sweep(c, beta, n_list, samples, seed, workers)
    fits = len(sweep.dv) >= 3
    dvp = fit_loglog((d.n, d.dvP) for d in sweep.dv) if fits else None
    dvs = fit_loglog((d.n, d.dvS) for d in sweep.dv) if fits else None
    ratio = [(d.R / d.r) ** 2 for d in sweep.dv]
    return GeomFlmReport(a, b, c, beta, sweep, dvp, dvs, ratio)


def dv_refined_ratio(dvP: float, dvS: float, n: int, alpha: float) -> float:
    """dv_P * dv_S / (n log n / log(1 + alpha)), recorded for polytope inputs."""
    return dvP * dvS * math.log1p(alpha) / (n * math.log(n))


# -- radius-ratio lower bound ----------------------------------------------------


@dataclass(frozen=True)
class Thm43Report:
    n: int
    v_ratio: float
    f_ratio: float
    floor: float

    @property
    def flagged(self) -> bool:
        return min(self.v_ratio, self.f_ratio) < self.floor


def thm43_check(counts: FCount, r: float, R: float, floor: float = 0.2) -> Thm43Report:
    """log|V| and log|F| against n (r/R)^2."""
    if not 0 < r <= R:
        raise InvalidParameter("need 0 < r <= R")
    n = counts.dim
    scale = n * (r / R) ** 2
    return Thm43Report(n, counts.log_v / scale, counts.log_f / scale, floor)


# -- the slab set on the sphere ----------------------------------------------------


@dataclass(frozen=True)
class SlabCapSet:
    n: int
    beta: float
    threshold: float
    measure: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.measure >= self.bound


def slab_cap_measure(K: GeomBody) -> SlabCapSet:
    """sigma{x on the sphere : |x_1| <= n^-beta} and its 1 - exp(-n^(1-2beta)/2) floor."""
    if K.beta >= 0.5:
        raise InvalidParameter("slab bound is vacuous for beta >= 1/2")
    n, t = K.n, float(K.n) ** (-K.beta)
    measure = 1.0 - 2.0 * cap_measure_exact(n, t) if t < 1 else 1.0
    bound = 1.0 - math.exp(-0.5 * float(n) ** (1 - 2 * K.beta))
    return SlabCapSet(n, K.beta, t, measure, bound)
