"""Sphere sampling, exact cap measures, Monte Carlo M / M*, and the
inequality checkers built on them."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import config as _config
from .counts import FCount
from .errors import HypothesisViolated, InvalidParameter
from .rng import BLOCK, block_rng, blocks

_SPHERE_STREAM = 0
_REDRAW_STREAM = 7


def sphere_block(n: int, seed: int, block: int) -> np.ndarray:
    """The ``block``-th run of BLOCK uniform unit vectors in R^n."""
    g = block_rng(seed, block, _SPHERE_STREAM).standard_normal((BLOCK, n))
    norms = np.linalg.norm(g, axis=1)
    bad = norms == 0.0
    attempt = 0
    while bad.any():
        attempt += 1
        rng = block_rng(seed, block, _REDRAW_STREAM + attempt)
        g[bad] = rng.standard_normal((int(bad.sum()), n))
        norms[bad] = np.linalg.norm(g[bad], axis=1)
        bad = norms == 0.0
    return g / norms[:, None]


def sample_sphere(n: int, seed: int, count: int, start: int = 0) -> np.ndarray:
    """Unit vectors with indices [start, start+count) of the stream for ``seed``.

    Sample ``i`` depends only on (n, seed, i).
    """
    if n < 1:
        raise InvalidParameter("dimension must be >= 1")
    out = np.empty((count, n))
    pos = 0
    for b, off, length in blocks(start, count):
        out[pos : pos + length] = sphere_block(n, seed, b)[off : off + length]
        pos += length
    return out


# -- regularized incomplete beta ---------------------------------------------

_TINY = 1e-300


def _betacf(a: float, b: float, x: float, eps: float = 1e-16, maxit: int = 100_000) -> float:
    """Continued fraction for I_x(a, b) (modified Lentz)."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    d = 1.0 / (d if abs(d) > _TINY else _TINY)
    h = d
    for m in range(1, maxit + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > _TINY else _TINY)
        c = 1.0 + aa / c
        c = c if abs(c) > _TINY else _TINY
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > _TINY else _TINY)
        c = 1.0 + aa / c
        c = c if abs(c) > _TINY else _TINY
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if a <= 0 or b <= 0:
        raise InvalidParameter("beta parameters must be positive")
    if not 0.0 <= x <= 1.0:
        raise InvalidParameter(f"x={x} outside [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def cap_measure_exact(n: int, t: float) -> float:
    """sigma({theta in S^{n-1} : <theta, u> >= t}).

    The first coordinate of a uniform point has density proportional to
    (1 - s^2)^((n-3)/2), whose tail is (1/2) I_{1-t^2}((n-1)/2, 1/2).
    """
    if n < 2:
        raise InvalidParameter("cap measure needs n >= 2")
    if not -1.0 <= t <= 1.0:
        raise InvalidParameter(f"t={t} outside [-1, 1]")
    if t < 0:
        return 1.0 - cap_measure_exact(n, -t)
    return 0.5 * betainc_reg((n - 1) / 2.0, 0.5, 1.0 - t * t)


def concentration_violations(ns=range(2, 51), eps_grid=None) -> list[tuple[int, float, float, float]]:
    """Grid points where cap(n, eps) > exp(-n eps^2 / 2); empty when the bound holds."""
    if eps_grid is None:
        eps_grid = [round(0.05 * k, 2) for k in range(1, 20)]
    bad = []
    for n in ns:
        for eps in eps_grid:
            cap = cap_measure_exact(n, eps)
            bound = math.exp(-n * eps * eps / 2.0)
            if cap > bound:
                bad.append((n, eps, cap, bound))
    return bad


# -- Monte Carlo -------------------------------------------------------------


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    samples: int
    seed: int

    def lower(self, k: float = 3.0) -> float:
        return self.mean - k * self.stderr

    def upper(self, k: float = 3.0) -> float:
        return self.mean + k * self.stderr


def _summarize(values: np.ndarray, seed: int) -> MCEstimate:
    # fsum is exactly rounded, so the result ignores summation order
    n = len(values)
    mean = math.fsum(values) / n
    if n > 1:
        var = math.fsum((values - mean) ** 2) / (n - 1)
    else:
        var = 0.0
    return MCEstimate(mean, math.sqrt(var / n), n, seed)


def sphere_values(
    fn: Callable[[np.ndarray], np.ndarray], n: int, samples: int, seed: int, workers: int | None = None
) -> np.ndarray:
    """Evaluate ``fn`` on sample_sphere(n, seed, samples), block by block."""
    if samples <= 0:
        raise InvalidParameter("samples must be positive")
    workers = workers or _config.current().mc_workers
    spans = list(blocks(0, samples))

    def one(span):
        b, off, length = span
        vals = np.asarray(fn(sphere_block(n, seed, b)[off : off + length]), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise ArithmeticError("oracle returned a non-finite value")
        return vals

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(one, spans))
    else:
        parts = [one(s) for s in spans]
    return np.concatenate(parts)


def mc_mean(fn, n: int, samples: int, seed: int, workers: int | None = None) -> MCEstimate:
    return _summarize(sphere_values(fn, n, samples, seed, workers), seed)


def mc_mean_width(support_fn, n: int, samples: int | None = None, seed: int = 0, workers=None) -> MCEstimate:
    """M* = average of the support function over the sphere."""
    samples = samples or _config.current().mc_samples
    return mc_mean(support_fn, n, samples, seed, workers)


def mc_M(gauge_fn, n: int, samples: int | None = None, seed: int = 0, workers=None) -> MCEstimate:
    """M = average of the gauge over the sphere."""
    samples = samples or _config.current().mc_samples
    return mc_mean(gauge_fn, n, samples, seed, workers)


@dataclass(frozen=True)
class ProductEstimate:
    """M * M* from independent estimates, with a delta-method stderr."""

    m: MCEstimate
    mstar: MCEstimate

    @property
    def value(self) -> float:
        return self.m.mean * self.mstar.mean

    @property
    def stderr(self) -> float:
        return math.hypot(self.m.mean * self.mstar.stderr, self.mstar.mean * self.m.stderr)

    def at_least_one(self, k: float = 3.0) -> bool:
        return self.value >= 1.0 - k * self.stderr


def mm_star(gauge_fn, support_fn, n: int, samples: int, seed: int) -> ProductEstimate:
    from .rng import derive_seed

    m = mc_M(gauge_fn, n, samples, derive_seed(seed, "M"))
    ms = mc_mean_width(support_fn, n, samples, derive_seed(seed, "Mstar"))
    return ProductEstimate(m, ms)


# -- inequality checkers -----------------------------------------------------


@dataclass(frozen=True)
class Lemma22Result:
    lhs: MCEstimate | None
    rhs: float
    hypothesis: bool
    passed: bool
    note: str = ""


def lemma22_rhs(R: float, num_vertices: int, n: int) -> float:
    return R * (math.sqrt(3.0 * math.log(num_vertices) / n) + 1.0 / math.sqrt(num_vertices))


def lemma22_check(P, samples: int | None = None, seed: int = 0, R: float | None = None,
                  margin: float | None = None, strict: bool = False) -> Lemma22Result:
    """Mean-width bound for a V-polytope inside R*B with log|V| < n/3.

    When the hypothesis fails the result is a report with ``hypothesis``
    False (nothing to check) unless ``strict`` asks for an exception.
    """
    from .polytope import circumradius, support

    cfg = _config.current()
    samples = samples or cfg.mc_samples
    margin = cfg.mc_margin if margin is None else margin
    n, nv = P.dim, len(P)
    R = circumradius(P) if R is None else R
    rhs = lemma22_rhs(R, nv, n)
    if not math.log(nv) < n / 3.0:
        if strict:
            raise HypothesisViolated(f"log|V| = {math.log(nv):.3f} >= n/3 = {n / 3:.3f}")
        return Lemma22Result(None, rhs, False, True, "hypothesis log|V| < n/3 violated")
    lhs = mc_mean_width(lambda x: support(P, x), n, samples, seed)
    return Lemma22Result(lhs, rhs, True, lhs.lower(margin) <= rhs)


def lemma22_hypothesis(num_vertices, n: int) -> bool:
    from .counts import ExactCount

    return ExactCount.of(num_vertices).log() < n / 3.0


@dataclass(frozen=True)
class FlmReport:
    n: int
    logV: float
    logF: float
    r: float
    R: float
    certificate: float
    alpha: float
    mm: ProductEstimate | None = None
    mm_pass: bool | None = None
    extra: dict = field(default_factory=dict)

    def row(self) -> dict:
        out = {
            "n": self.n, "logV": self.logV, "logF": self.logF, "r": self.r, "R": self.R,
            "certificate": self.certificate, "alpha": self.alpha,
        }
        if self.mm is not None:
            out.update(MMstar=self.mm.value, MMstar_err=self.mm.stderr, mm_pass=self.mm_pass)
        return out


def flm_certificate(counts: FCount, r: float, R: float, *, gauge_fn=None, support_fn=None,
                    samples: int | None = None, seed: int = 0, margin: float | None = None) -> FlmReport:
    """logV * logF * (R/r)^2 / n^2 plus, if oracles are given, the M*M* >= 1 check."""
    if counts is None:
        raise InvalidParameter("FLM certificate needs vertex and facet counts")
    if not 0 < r <= R * (1 + 1e-12):
        raise InvalidParameter(f"need 0 < r <= R, got r={r}, R={R}")
    cfg = _config.current()
    n = counts.dim
    logv, logf = counts.log_v, counts.log_f
    cert = logv * logf * (R / r) ** 2 / n**2
    alpha = _exp_or_inf(logf - math.log(n))
    mm = mm_pass = None
    if gauge_fn is not None and support_fn is not None:
        mm = mm_star(gauge_fn, support_fn, n, samples or cfg.mc_samples, seed)
        mm_pass = mm.at_least_one(cfg.mc_margin if margin is None else margin)
    return FlmReport(n, logv, logf, r, R, cert, alpha, mm, mm_pass)


def _exp_or_inf(x: float) -> float:
    return math.exp(x) if x < 700 else math.inf


def _log1p_exp(x: float) -> float:
    # log(1 + e^x) without overflow
    return x + math.log1p(math.exp(-x)) if x > 0 else math.log1p(math.exp(x))


@dataclass(frozen=True)
class RefinedFlmReport:
    n: int
    alpha: float
    ratio: float
    ratio_eq2: float | None


def refined_flm_check(counts: FCount, r: float, R: float, rtol: float = 1e-9) -> RefinedFlmReport:
    """logV*logF / (n log(alpha n)/log(1+alpha)) for a body with B <= P <= sqrt(n) B
    after scaling by 1/r, plus the (R/r)^2-weighted variant."""
    n = counts.dim
    if R / r > math.sqrt(n) * (1 + rtol):
        raise InvalidParameter(f"R/r = {R / r:.6g} exceeds sqrt(n) = {math.sqrt(n):.6g}; cannot normalize")
    logv, logf = counts.log_v, counts.log_f
    log_alpha = logf - math.log(n)
    alpha = _exp_or_inf(log_alpha)
    target = n * logf / _log1p_exp(log_alpha)  # log(alpha n) = log|F|
    ratio = logv * logf / target
    ratio2 = logv * logf * (R / r) ** 2 / (n * target)
    return RefinedFlmReport(n, alpha, ratio, ratio2)
