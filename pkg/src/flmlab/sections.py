"""Random subspaces, sections of H-polytopes and projections of V-polytopes,
plus the section experiments built on them.

Each trial draws its subspace from ``derive_seed(seed, experiment, trial)``.
A trial whose section is degenerate (a measure-zero event for Gaussian
subspaces) is re-drawn from the next derived seed and the re-draw is logged.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import QhullError
from scipy.spatial.distance import pdist

from . import config as _config
from . import hanner
from . import polytope as pc
from .bodies import EuclideanBall, StandardBody
from .enumeration import canonicalize_h, canonicalize_v, vertex_enum
from .errors import DegenerateInput, DimensionMismatch, InvalidParameter, UnboundedBody
from .rng import block_rng, derive_seed
from .sphere import MCEstimate, mc_mean_width

log = logging.getLogger(__name__)

_SUBSPACE_STREAM = 11
MAX_REDRAWS = 16


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Orthonormal basis of a k-dimensional subspace E, stored as n x k columns."""

    n: int
    k: int
    columns: np.ndarray
    seed: int
    attempt: int = 0

    @property
    def lam(self) -> float:
        return self.k / self.n

    def coords(self, x) -> np.ndarray:
        """Coordinates in E of the orthogonal projection of x."""
        return np.asarray(x, dtype=float) @ self.columns

    def lift(self, y) -> np.ndarray:
        return np.asarray(y, dtype=float) @ self.columns.T


def random_subspace(n: int, k: int, seed: int) -> SubspaceBasis:
    """Gaussian n x k matrix, orthonormalized by QR with diag(R) > 0."""
    if not 1 <= k <= n:
        raise InvalidParameter(f"need 1 <= k <= n, got k={k}, n={n}")
    for attempt in range(MAX_REDRAWS):
        s = seed if attempt == 0 else derive_seed(seed, "redraw", attempt)
        g = block_rng(s, 0, _SUBSPACE_STREAM).standard_normal((n, k))
        q, r = np.linalg.qr(g)
        d = np.diag(r)
        if np.min(np.abs(d)) <= 1e-10 * np.max(np.abs(d)):
            log.info("rank-deficient Gaussian draw (seed %d, attempt %d); re-drawing", seed, attempt)
            continue
        return SubspaceBasis(n, k, q * np.sign(d), seed, attempt)
    raise DegenerateInput("could not draw a full-rank Gaussian matrix")


def _check_dims(P, B: SubspaceBasis):
    if P.dim != B.n:
        raise DimensionMismatch(f"body has dimension {P.dim}, subspace lives in R^{B.n}")


def section_h(P: pc.HPolytope, B: SubspaceBasis, cfg=None) -> pc.HPolytope:
    """P ∩ E in the coordinates of E, with redundant halfspaces removed."""
    _check_dims(P, B)
    return canonicalize_h(pc.HPolytope(B.coords(P.normals)), cfg)


def project_v(P: pc.VPolytope, B: SubspaceBasis, cfg=None) -> pc.VPolytope:
    """Orthogonal projection of P onto E, reduced to its extreme points."""
    _check_dims(P, B)
    return canonicalize_v(pc.VPolytope(B.coords(P.vertices)), cfg)


# -- trial records -------------------------------------------------------------

COLUMNS = ("trial", "V", "F", "r", "R", "diam", "bound", "pass")


@dataclass(frozen=True)
class SectionTrial:
    trial: int
    seed: int
    V: int
    F: int
    r: float
    R: float
    diam: float
    bound: float
    passed: bool
    extra: dict = field(default_factory=dict)

    def row(self) -> dict:
        out = {"trial": self.trial, "V": self.V, "F": self.F, "r": self.r, "R": self.R,
               "diam": self.diam, "bound": self.bound, "pass": self.passed}
        out.update(self.extra)
        return out


@dataclass
class SectionStats:
    name: str
    params: dict
    records: list[SectionTrial]
    summary: dict = field(default_factory=dict)

    def values(self, key: str) -> np.ndarray:
        return np.array([rec.row()[key] for rec in self.records], dtype=float)

    def aggregate(self, key: str) -> tuple[float, float, float]:
        v = np.sort(self.values(key))
        return float(v[0]), float(np.median(v)), float(v[-1])

    @property
    def all_pass(self) -> bool:
        return all(rec.passed for rec in self.records)

    def invariants_ok(self, tol: float = 1e-9) -> bool:
        return all(
            rec.r <= rec.R * (1 + tol) and rec.R <= rec.diam * (1 + tol) and rec.diam <= 2 * rec.R * (1 + tol)
            for rec in self.records
        )

    @property
    def columns(self) -> tuple[str, ...]:
        extra = tuple(self.records[0].extra) if self.records else ()
        return COLUMNS + extra

    def rows(self) -> list[tuple]:
        return [tuple(rec.row()[c] for c in self.columns) for rec in self.records]


@dataclass(frozen=True)
class SectionGeometry:
    Q: pc.HPolytope
    V: pc.VPolytope
    basis: SubspaceBasis
    seed: int

    @property
    def inradius(self) -> float:
        return 1.0 / float(np.max(np.linalg.norm(self.Q.normals, axis=1)))

    @property
    def circumradius(self) -> float:
        return float(np.max(np.linalg.norm(self.V.vertices, axis=1)))

    @property
    def diameter(self) -> float:
        return float(np.max(pdist(self.V.vertices)))


def random_section(P: pc.HPolytope, k: int, seed: int, cfg=None) -> SectionGeometry:
    """Section by a random k-space with both representations enumerated."""
    for attempt in range(MAX_REDRAWS):
        s = seed if attempt == 0 else derive_seed(seed, "generic", attempt)
        B = random_subspace(P.dim, k, s)
        try:
            Q = section_h(P, B, cfg)
            V = vertex_enum(Q, cfg)
        except (DegenerateInput, UnboundedBody, QhullError) as exc:
            log.info("degenerate section (seed %d, attempt %d): %s; re-drawing", seed, attempt, exc)
            continue
        return SectionGeometry(Q, V, B, s)
    raise DegenerateInput("no generic section after repeated re-draws")


def _trial_seed(seed: int, name: str, trial: int) -> int:
    return derive_seed(seed, name, trial)


def _check_trials(trials: int):
    if trials < 1:
        raise InvalidParameter("trials must be positive")


# -- experiments ----------------------------------------------------------------


def cross_section_experiment(n: int, trials: int, seed: int, cfg=None) -> SectionStats:
    """n-dimensional random sections of the cross-polytope B_1^{2n}."""
    _check_trials(trials)
    P = pc.cross_h(2 * n)
    bound = 4**n
    floor = 1.0 / math.sqrt(2 * n)
    recs = []
    for t in range(trials):
        g = random_section(P, n, _trial_seed(seed, "cross-section", t), cfg)
        r, R = g.inradius, g.circumradius
        ok = len(g.Q) <= bound and R <= 1 + 1e-9 and r >= floor * (1 - 1e-12)
        recs.append(SectionTrial(t, g.seed, len(g.V), len(g.Q), r, R, g.diameter, bound, ok))
    stats = SectionStats("cross-section", {"n": n, "trials": trials, "seed": seed}, recs)
    med_r = stats.aggregate("r")[1]
    stats.summary = {"median_r": med_r, "median_r_floor": 1.2 * floor, "median_r_ok": med_r >= 1.2 * floor}
    return stats


def simplex_mstar(n: int, samples: int | None = None, seed: int = 0) -> MCEstimate:
    """M* of the regular simplex with inradius 1, from its vertex list."""
    V = pc.simplex_v(n)
    return mc_mean_width(lambda x: pc.support(V, x), n, samples, seed)


def _resolve_f(f, n: int) -> int:
    value = f(n) if callable(f) else int(f)
    if value < 1:
        raise InvalidParameter("f(n) must be at least 1")
    return int(value)


def simplex_section_experiment(n: int, f, trials: int, seed: int, samples: int | None = None,
                               cfg=None) -> SectionStats:
    """Sections of the regular simplex S_n by random (n - f(n))-spaces."""
    _check_trials(trials)
    fn = _resolve_f(f, n)
    k = n - fn
    if k < 2:
        raise InvalidParameter(f"section dimension n - f(n) = {k} must be at least 2")
    P = pc.simplex_h(n)
    ms = simplex_mstar(n, samples, derive_seed(seed, "simplex-mstar", n))
    pred_R = math.sqrt(n / fn) * ms.mean
    log_binom = math.log(math.comb(n, fn))
    recs = []
    for t in range(trials):
        g = random_section(P, k, _trial_seed(seed, "simplex-section", t), cfg)
        r, R = g.inradius, g.circumradius
        ok = len(g.Q) <= n + 1 and r >= 1 - 1e-9
        extra = {"R_over_pred": R / pred_R, "logV_over_binom": math.log(len(g.V)) / log_binom}
        recs.append(SectionTrial(t, g.seed, len(g.V), len(g.Q), r, R, g.diameter, n + 1, ok, extra))
    params = {"n": n, "f": fn, "k": k, "trials": trials, "seed": seed}
    summary = {"mstar": ms.mean, "mstar_err": ms.stderr, "pred_R": pred_R, "log_binom": log_binom}
    return SectionStats("simplex-section", params, recs, summary)


def hanner_section_experiment(a, n: int, mode: str = "full-half", trials: int = 10, seed: int = 0,
                              delta: float | None = None, samples: int | None = None,
                              cfg=None) -> SectionStats:
    """Random sections of the normalized Hanner body P^a.

    ``full-half``: n-dimensional sections of P^a_{2n}.
    ``delta``: floor(n - n^delta)-dimensional sections of P^a_n.
    """
    _check_trials(trials)
    if mode == "full-half":
        N, k = 2 * n, n
    elif mode == "delta":
        if delta is None or not 0 < delta < 1:
            raise InvalidParameter("delta mode needs 0 < delta < 1")
        N, k = n, math.floor(n - n**delta)
    else:
        raise InvalidParameter(f"unknown mode {mode!r}")
    if k < 1:
        raise InvalidParameter("section dimension must be positive")
    tree = hanner.build_general_n(N, a)
    Vp, Hp = hanner.materialize(tree, normalize=True, cfg=cfg)
    ms = mc_mean_width(lambda x: pc.support(Vp, x), N, samples, derive_seed(seed, "hanner-mstar", N))
    fv = tree.f_vector
    faces_total = sum(fv[:-1])
    faces_codim = fv[N - k] if N > k else 1
    F_P = len(Hp)
    scale = N ** (1 - float(a))
    recs = []
    for t in range(trials):
        g = random_section(Hp, k, _trial_seed(seed, "hanner-section", t), cfg)
        r, R = g.inradius, g.circumradius
        ok = len(g.Q) <= F_P and len(g.V) <= faces_total
        extra = {
            "R_over_mstar": R / ms.mean,
            "logF_over_scale": math.log(len(g.Q)) / scale,
            "V_over_faces": len(g.V) / faces_codim,
        }
        recs.append(SectionTrial(t, g.seed, len(g.V), len(g.Q), r, R, g.diameter, F_P, ok, extra))
    params = {"a": float(a), "n": n, "ambient": N, "k": k, "mode": mode, "trials": trials, "seed": seed}
    if delta is not None:
        params["delta"] = delta
    stats = SectionStats("hanner-section", params, recs)
    within = float(np.mean(stats.values("R_over_mstar") <= 4.0))
    stats.summary = {
        "mstar": ms.mean, "mstar_err": ms.stderr, "F_P": F_P, "faces_total": faces_total,
        "faces_codim": faces_codim, "frac_R_within_4mstar": within, "high_prob_ok": within >= 0.8,
    }
    return stats


def _as_h_body(body):
    if isinstance(body, StandardBody):
        return body.h, body.support, body.circumradius
    if isinstance(body, pc.HPolytope):
        V = vertex_enum(body)
        return body, (lambda x: pc.support(V, x)), pc.circumradius(V)
    raise InvalidParameter(f"cannot section {body!r}")


def low_mstar_check(body, lam: float, trials: int, seed: int, samples: int | None = None,
                    cfg=None) -> SectionStats:
    """Empirical constant diam(K ∩ E) * sqrt(1 - lam) / M*(K) over random sections."""
    _check_trials(trials)
    if not 0 < lam <= 1:
        raise InvalidParameter("lambda must lie in (0, 1]")
    n = body.dim
    k = math.ceil(lam * n - 1e-12)
    shrink = math.sqrt(1 - lam)
    params = {"n": n, "k": k, "lam": lam, "trials": trials, "seed": seed}
    recs = []
    if isinstance(body, EuclideanBall):
        rad = body.radius
        for t in range(trials):
            extra = {"constant": 2 * shrink}
            recs.append(SectionTrial(t, _trial_seed(seed, "low-mstar", t), 0, 0, rad, rad, 2 * rad,
                                     2 * rad, True, extra))
        return SectionStats("low-mstar", params, recs, {"mstar": rad})
    H, support_fn, R_K = _as_h_body(body)
    samples = samples or _config.current().mc_samples
    ms = mc_mean_width(support_fn, n, samples, derive_seed(seed, "low-mstar-mstar"))
    for t in range(trials):
        g = random_section(H, k, _trial_seed(seed, "low-mstar", t), cfg)
        diam = g.diameter
        extra = {"constant": diam * shrink / ms.mean}
        ok = diam <= 2 * R_K * (1 + 1e-9)
        recs.append(SectionTrial(t, g.seed, len(g.V), len(g.Q), g.inradius, g.circumradius, diam,
                                 2 * R_K, ok, extra))
    return SectionStats("low-mstar", params, recs, {"mstar": ms.mean, "mstar_err": ms.stderr})


def example4_sweep(ns, deltas, trials: int, seed: int, cfg=None) -> SectionStats:
    """Record R/r against n/log n for simplex sections; asserts nothing."""
    _check_trials(trials)
    recs = []
    idx = 0
    for n in ns:
        for d in deltas:
            fn = max(1, math.floor(n**d))
            k = n - fn
            if k < 2:
                continue
            P = pc.simplex_h(n)
            for t in range(trials):
                g = random_section(P, k, _trial_seed(seed, f"example4/{n}/{d}", t), cfg)
                r, R = g.inradius, g.circumradius
                extra = {
                    "n": n, "k": k, "delta": d,
                    "ratio_over_target": (R / r) / (n / math.log(n)),
                    "certificate": math.log(len(g.V)) * math.log(len(g.Q)) * (R / r) ** 2 / k**2,
                }
                recs.append(SectionTrial(idx, g.seed, len(g.V), len(g.Q), r, R, g.diameter, n / math.log(n),
                                         True, extra))
                idx += 1
    return SectionStats("example4-sweep", {"ns": list(ns), "deltas": list(deltas), "seed": seed}, recs)
