"""Brute-force combinatorial enumeration at desk scale.

Facets of a V-polytope and vertices of an H-polytope are the same problem
read through polarity: find every ``a`` with ``<x_i, a> = 1`` on ``dim``
linearly independent rows ``x_i`` and ``<x_j, a> <= 1`` on all rows. The
default route tries all ``dim``-subsets of rows, vectorized in batches.
When the subset count exceeds ``enum.brute_max_subsets`` the candidate
hyperplanes come from Qhull instead, and each one is re-verified against
the same feasibility and incidence conditions.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.spatial import ConvexHull, cKDTree

from . import _lp
from . import config as _config
from .counts import FCount
from .errors import DegenerateInput, EnumerationLimit, InvalidParameter, NotOriginInterior
from .polytope import EPS_REL, HPolytope, VPolytope, eps_geom, gauge
from .rng import BLOCK, block_rng, blocks

log = logging.getLogger(__name__)

_BATCH = 1 << 15
# |det| / prod(row norms) below this marks a subset as singular
_HADAMARD_MIN = 1e-10


def _limits(cfg):
    return cfg or _config.current()


def _check_limits(m: int, n: int, cfg) -> None:
    cfg = _limits(cfg)
    if n > cfg.enum_max_dim:
        raise EnumerationLimit(f"dimension {n} exceeds enum.max_dim={cfg.enum_max_dim}")
    if m > cfg.enum_max_points:
        raise EnumerationLimit(f"{m} rows exceed enum.max_points={cfg.enum_max_points}")


def unique_rows(x: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Indices of a representative (first occurrence) per cluster of coincident rows."""
    if len(x) == 0:
        return np.zeros(0, dtype=int)
    tol = eps_geom(x) if tol is None else tol
    # collapse exact grid-cell repeats first: brute force finds each facet
    # once per tight subset, and the pair search is quadratic in repeats
    keys = np.floor(x / tol).astype(np.int64)
    _, first = np.unique(keys, axis=0, return_index=True)
    first = np.sort(first)
    pairs = cKDTree(x[first]).query_pairs(tol, output_type="ndarray")
    parent = np.arange(len(first))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in pairs:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    roots = np.array([find(i) for i in range(len(first))])
    return first[roots == np.arange(len(first))]


def _combination_batches(m: int, k: int, batch: int = _BATCH):
    it = itertools.combinations(range(m), k)
    while True:
        chunk = np.fromiter(itertools.chain.from_iterable(itertools.islice(it, batch)), dtype=np.intp)
        if chunk.size == 0:
            return
        yield chunk.reshape(-1, k)


def _rhs_tol(x: np.ndarray) -> float:
    return EPS_REL * (1.0 + float(np.abs(x).max()))


def _brute_dual(x: np.ndarray) -> np.ndarray:
    """All a with <x_i,a> = 1 on n independent rows and <x_j,a> <= 1 everywhere."""
    m, n = x.shape
    tol = _rhs_tol(x) * 10
    row_norm = np.linalg.norm(x, axis=1)
    found = []
    for idx in _combination_batches(m, n):
        mats = x[idx]
        det = np.abs(np.linalg.det(mats))
        scale = np.prod(row_norm[idx], axis=1)
        ok = det > _HADAMARD_MIN * np.where(scale > 0, scale, 1.0)
        ok &= scale > 0
        if not ok.any():
            continue
        mats = mats[ok]
        sol = np.linalg.solve(mats, np.ones((mats.shape[0], n, 1)))[..., 0]
        feasible = (sol @ x.T <= 1.0 + tol).all(axis=1)
        if feasible.any():
            found.append(sol[feasible])
    if not found:
        return np.zeros((0, n))
    sols = np.vstack(found)
    return sols[unique_rows(sols, eps_geom(sols))]


def _qhull(points: np.ndarray) -> ConvexHull:
    n = points.shape[1]
    # no Qbb: with triangulated output it corrupts offsets of degenerate facets
    opts = "Qc Qx Q12" if n > 4 else "Qc Q12"
    return ConvexHull(points, qhull_options=opts)


def _qhull_dual(x: np.ndarray) -> np.ndarray:
    m, n = x.shape
    hull = _qhull(x)
    eq = hull.equations
    off = -eq[:, -1]
    # degenerate triangulation pieces can carry junk equations; all survivors are re-verified
    good = off > EPS_REL * (1.0 + float(np.abs(x).max()))
    if not good.any():
        raise NotOriginInterior("origin is not interior to the hull")
    cand = eq[good, :-1] / off[good, None]
    cand = cand[unique_rows(cand, eps_geom(cand))]
    tol = _rhs_tol(x) * 10
    vals = cand @ x.T
    keep = (vals <= 1.0 + tol).all(axis=1)
    for i in np.flatnonzero(keep):
        tight = x[np.abs(vals[i] - 1.0) <= tol]
        if len(tight) < n or np.linalg.matrix_rank(tight, tol=1e-8 * (1 + np.abs(tight).max())) < n:
            keep[i] = False
    return cand[keep]


def _dual_solutions(x: np.ndarray, cfg=None, method: str = "auto") -> np.ndarray:
    cfg = _limits(cfg)
    m, n = x.shape
    _check_limits(m, n, cfg)
    if method == "auto":
        method = "brute" if n == 1 or math.comb(m, n) <= cfg.enum_brute_max_subsets else "qhull"
    if method == "brute":
        if math.comb(m, n) > cfg.enum_brute_max_subsets and n > 1:
            raise EnumerationLimit(f"C({m},{n}) subsets exceed enum.brute_max_subsets")
        return _brute_dual(x)
    if method == "qhull":
        log.debug("qhull route for %d rows in R^%d", m, n)
        return _qhull_dual(x)
    raise InvalidParameter(f"unknown enumeration method {method!r}")


def facet_enum(P: VPolytope, cfg=None, method: str = "auto") -> HPolytope:
    """Irredundant H-representation of conv(vertices)."""
    if not P.origin_interior:
        raise NotOriginInterior("facet normals with rhs 1 need the origin interior")
    normals = _dual_solutions(P.vertices, cfg, method)
    return HPolytope(normals)


def vertex_enum(P: HPolytope, cfg=None, method: str = "auto") -> VPolytope:
    """Vertices of {x : <a_i,x> <= 1}. A vertex lying on more than dim facets
    is found once per defining subset and deduplicated."""
    verts = _dual_solutions(P.normals, cfg, method)
    if len(verts) < P.dim + 1:
        raise DegenerateInput("vertex enumeration produced a lower-dimensional set")
    return VPolytope(verts)


def is_extreme(points, i: int) -> bool:
    """Whether ``points[i]`` is a vertex of conv(points), by a separating LP."""
    pts = np.asarray(points, dtype=float)
    if len(pts) < 2:
        raise InvalidParameter("need at least two points")
    tol = eps_geom(pts)
    return _lp.separation_margin(pts, i, tol) > tol


def extreme_indices(points, cfg=None) -> np.ndarray:
    """Indices of the extreme points of conv(points), one per coincident cluster."""
    cfg = _limits(cfg)
    pts = np.asarray(points, dtype=float)
    m, n = pts.shape
    _check_limits(m, n, cfg)
    reps = unique_rows(pts)
    if len(reps) <= 1:
        return reps
    sub = pts[reps]
    if n == 1:
        return reps[np.unique([sub[:, 0].argmin(), sub[:, 0].argmax()])]
    if len(sub) <= cfg.enum_lp_max_points:
        tol = eps_geom(sub)
        keep = [k for k in range(len(sub)) if _lp.separation_margin(sub, k, tol) > tol]
        return reps[np.array(keep, dtype=int)]
    return reps[_qhull_extreme(sub)]


def _qhull_extreme(sub: np.ndarray) -> np.ndarray:
    n = sub.shape[1]
    hull = _qhull(sub)
    eq = hull.equations
    eq = eq[unique_rows(eq, 1e-9)]
    tol = eps_geom(sub) * 10
    keep = []
    for k in hull.vertices:
        tight = eq[np.abs(eq[:, :-1] @ sub[k] + eq[:, -1]) <= tol, :-1]
        if len(tight) >= n and np.linalg.matrix_rank(tight, tol=1e-8) == n:
            keep.append(k)
    return np.array(sorted(keep), dtype=int)


def canonicalize_v(P: VPolytope, cfg=None) -> VPolytope:
    return VPolytope(P.vertices[extreme_indices(P.vertices, cfg)])


def canonicalize_h(P: HPolytope, cfg=None) -> HPolytope:
    """Drop redundant halfspaces: a halfspace is irredundant iff its normal
    is a vertex of conv(normals), the polar body."""
    a = P.normals
    nz = np.linalg.norm(a, axis=1) > eps_geom(a)
    a = a[nz]
    return HPolytope(a[extreme_indices(a, cfg)])


def canonicalize(P, cfg=None):
    if isinstance(P, VPolytope):
        return canonicalize_v(P, cfg)
    return canonicalize_h(P, cfg)


def membership(P: HPolytope, x) -> bool | np.ndarray:
    x = np.asarray(x, dtype=float)
    return gauge(P, x) <= 1.0 + eps_geom(x)


def incidence(V: VPolytope, H: HPolytope) -> np.ndarray:
    """Boolean (vertex, facet) incidence matrix."""
    vals = V.vertices @ H.normals.T
    return np.abs(vals - 1.0) <= _rhs_tol(V.vertices) * 10


def fcount(P: VPolytope | HPolytope, cfg=None) -> FCount:
    """Vertex and facet counts by enumeration of the missing representation."""
    if isinstance(P, VPolytope):
        V = canonicalize_v(P, cfg)
        H = facet_enum(V, cfg)
    else:
        H = canonicalize_h(P, cfg)
        V = vertex_enum(H, cfg)
    return FCount(len(V), len(H), P.dim)


def face_f_vector(V: VPolytope, H: HPolytope | None = None) -> list[int]:
    """f-vector (f_0, ..., f_dim) of all nonempty faces including the polytope,
    found as intersections of facet vertex-sets."""
    if H is None:
        H = facet_enum(V)
    inc = incidence(V, H)
    n = V.dim
    facets = [frozenset(np.flatnonzero(inc[:, j]).tolist()) for j in range(inc.shape[1])]
    whole = frozenset(range(len(V)))
    seen = {whole}
    frontier = set(facets)
    while frontier:
        seen |= frontier
        nxt = set()
        for face in frontier:
            for f in facets:
                g = face & f
                if g and g not in seen:
                    nxt.add(g)
        frontier = nxt
    counts = [0] * (n + 1)
    for face in seen:
        pts = V.vertices[sorted(face)]
        d = _affine_dim(pts)
        counts[d] += 1
    return counts


def _affine_dim(pts: np.ndarray) -> int:
    if len(pts) == 1:
        return 0
    centered = pts - pts[0]
    return int(np.linalg.matrix_rank(centered, tol=1e-8 * (1 + np.abs(pts).max())))


# -- Monte Carlo volume ------------------------------------------------------


@dataclass(frozen=True)
class VolumeEstimate:
    ratio_to_ball: float
    stderr: float
    samples: int
    seed: int


def _membership_oracle(body, dim):
    if isinstance(body, HPolytope):
        return body.dim, lambda x: membership(body, x)
    if isinstance(body, VPolytope):
        H = facet_enum(body)
        return H.dim, lambda x: membership(H, x)
    if callable(body):
        if dim is None:
            raise InvalidParameter("callable membership oracle needs dim")
        return dim, body
    raise InvalidParameter(f"no membership oracle for {type(body).__name__}")


def volume_mc(body, r_bound: float, samples: int, seed: int, dim: int | None = None) -> VolumeEstimate:
    """Hit-or-miss estimate of Vol(P)/Vol(B_2^n) using uniform points of r_bound*B_2^n.

    ``body`` is an H- or V-polytope or a vectorized membership callable
    (then ``dim`` is required). Points are drawn per fixed-size block, so
    the estimate depends only on (body, r_bound, samples, seed).
    """
    if samples <= 0:
        raise InvalidParameter("samples must be positive")
    from .sphere import sphere_block

    n, inside = _membership_oracle(body, dim)
    hits = 0
    for b, off, length in blocks(0, samples):
        dirs = sphere_block(n, seed, b)[off : off + length]
        u = block_rng(seed, b, stream=1).random(BLOCK)[off : off + length]
        pts = dirs * (r_bound * u ** (1.0 / n))[:, None]
        hits += int(np.count_nonzero(inside(pts)))
    p = hits / samples
    vol = r_bound**n
    return VolumeEstimate(p * vol, vol * math.sqrt(p * (1 - p) / samples), samples, seed)


MembershipOracle = Callable[[np.ndarray], np.ndarray]
