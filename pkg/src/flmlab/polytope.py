"""Polytope representations and exact metric evaluations.

Two representations are used throughout:

* :class:`VPolytope` -- the convex hull of a finite point list.
* :class:`HPolytope` -- ``{x : <a_i, x> <= 1 for all i}``. Right-hand sides
  are fixed to 1, so the origin is always interior and the polar body is
  simply ``conv(a_i)``.

Canonicalization (dropping non-extreme points or redundant halfspaces) is
never implicit; call :func:`canonicalize`.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _lp
from .errors import (
    DegenerateInput,
    DimensionMismatch,
    NotOriginInterior,
    RepresentationMismatch,
    UnboundedBody,
)

EPS_REL = 1e-9


def eps_geom(arr) -> float:
    """Point-identity tolerance: 1e-9 * (1 + largest coordinate magnitude)."""
    arr = np.asarray(arr, dtype=float)
    scale = float(np.abs(arr).max()) if arr.size else 0.0
    return EPS_REL * (1.0 + scale)


def _as_matrix(rows, name: str) -> np.ndarray:
    arr = np.array(rows, dtype=float)
    if arr.ndim != 2 or arr.shape[1] < 1:
        raise DegenerateInput(f"{name} must be a 2-D array with at least one column")
    if not np.all(np.isfinite(arr)):
        raise DegenerateInput(f"{name} contains non-finite values")
    arr.setflags(write=False)
    return arr


def _affine_rank(points: np.ndarray) -> int:
    centered = points - points.mean(axis=0)
    if not centered.any():
        return 0
    s = np.linalg.svd(centered, compute_uv=False)
    return int((s > EPS_REL * max(1.0, s[0])).sum())


@dataclass(frozen=True, eq=False)
class VPolytope:
    vertices: np.ndarray

    def __post_init__(self):
        v = _as_matrix(self.vertices, "vertices")
        object.__setattr__(self, "vertices", v)
        m, n = v.shape
        if m < n + 1 or _affine_rank(v) < n:
            raise DegenerateInput(f"{m} points do not span R^{n}")

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def __len__(self):
        return self.vertices.shape[0]

    @cached_property
    def origin_interior(self) -> bool:
        return _lp.origin_depth(self.vertices) > EPS_REL

    def __repr__(self):
        return f"VPolytope(dim={self.dim}, points={len(self)})"


@dataclass(frozen=True, eq=False)
class HPolytope:
    normals: np.ndarray

    def __post_init__(self):
        a = _as_matrix(self.normals, "normals")
        object.__setattr__(self, "normals", a)
        if not self.bounded:
            raise UnboundedBody(f"{a.shape[0]} halfspaces do not bound a region of R^{a.shape[1]}")

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    def __len__(self):
        return self.normals.shape[0]

    @cached_property
    def bounded(self) -> bool:
        a = self.normals
        if a.shape[0] < a.shape[1] + 1:
            return False
        if np.linalg.matrix_rank(a) < a.shape[1]:
            return False
        return _lp.origin_depth(a) > EPS_REL

    @property
    def origin_interior(self) -> bool:
        return True

    def __repr__(self):
        return f"HPolytope(dim={self.dim}, halfspaces={len(self)})"


def _check_x(dim: int, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != dim:
        raise DimensionMismatch(f"expected vectors of length {dim}, got shape {x.shape}")
    return x


def support(P: VPolytope, x) -> float | np.ndarray:
    """h_P(x) = max over vertices of <v, x>. ``x`` may be a batch of rows."""
    x = _check_x(P.dim, x)
    return (x @ P.vertices.T).max(axis=-1)


def gauge(P: HPolytope, x) -> float | np.ndarray:
    """Minkowski functional max(0, max_i <a_i, x>); exact since all rhs are 1."""
    x = _check_x(P.dim, x)
    return np.maximum((x @ P.normals.T).max(axis=-1), 0.0)


def dualize(P: VPolytope | HPolytope) -> HPolytope | VPolytope:
    """Polar body. V -> H keeps every vertex as a normal; H -> V keeps the
    extreme normals only."""
    if isinstance(P, VPolytope):
        if not P.origin_interior:
            raise NotOriginInterior("cannot polarize: origin is not interior")
        return HPolytope(P.vertices)
    if isinstance(P, HPolytope):
        from .enumeration import canonicalize_v

        return canonicalize_v(VPolytope(P.normals))
    raise RepresentationMismatch(f"cannot dualize {type(P).__name__}")


def _same_rep(P, Q):
    if type(P) is not type(Q) or not isinstance(P, (VPolytope, HPolytope)):
        raise RepresentationMismatch(f"{type(P).__name__} vs {type(Q).__name__}")


def _pairs(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ia = np.repeat(np.arange(len(a)), len(b))
    ib = np.tile(np.arange(len(b)), len(a))
    return np.hstack([a[ia], b[ib]])


def _pad(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    top = np.hstack([a, np.zeros((len(a), b.shape[1]))])
    bottom = np.hstack([np.zeros((len(b), a.shape[1])), b])
    return np.vstack([top, bottom])


def product(P, Q):
    """Cartesian product; |V| multiplies and |F| adds."""
    _same_rep(P, Q)
    if isinstance(P, VPolytope):
        return VPolytope(_pairs(P.vertices, Q.vertices))
    return HPolytope(_pad(P.normals, Q.normals))


def free_sum(P, Q):
    """conv(P + 0, 0 + Q) over complementary coordinates; |V| adds and |F| multiplies."""
    _same_rep(P, Q)
    if isinstance(P, VPolytope):
        if not (P.origin_interior and Q.origin_interior):
            raise NotOriginInterior("free sum needs the origin interior to both summands")
        return VPolytope(_pad(P.vertices, Q.vertices))
    return HPolytope(_pairs(P.normals, Q.normals))


def scale(P, t: float):
    if t <= 0:
        raise ValueError("scale factor must be positive")
    if isinstance(P, VPolytope):
        return VPolytope(P.vertices * t)
    if isinstance(P, HPolytope):
        return HPolytope(P.normals / t)
    raise RepresentationMismatch(type(P).__name__)


def circumradius(P) -> float:
    """Smallest R with P inside R*B about the origin. H-rep routes through vertex enumeration."""
    if isinstance(P, HPolytope):
        from .enumeration import vertex_enum

        P = vertex_enum(P)
    return float(np.linalg.norm(P.vertices, axis=1).max())


def inradius(P) -> float:
    """Largest r with r*B inside P about the origin. V-rep routes through facet enumeration."""
    if isinstance(P, VPolytope):
        from .enumeration import facet_enum

        P = facet_enum(P)
    norms = np.linalg.norm(P.normals, axis=1)
    return float(1.0 / norms.max())


# -- standard bodies ---------------------------------------------------------


def _sign_matrix(n: int) -> np.ndarray:
    idx = np.arange(2**n)[:, None]
    bits = (idx >> np.arange(n - 1, -1, -1)) & 1
    return 1.0 - 2.0 * bits


def cube_v(n: int) -> VPolytope:
    return VPolytope(_sign_matrix(n))


def cube_h(n: int) -> HPolytope:
    return HPolytope(np.vstack([np.eye(n), -np.eye(n)]))


def cross_v(n: int) -> VPolytope:
    return VPolytope(np.vstack([np.eye(n), -np.eye(n)]))


def cross_h(n: int) -> HPolytope:
    return HPolytope(_sign_matrix(n))


def simplex_vertices(n: int) -> np.ndarray:
    """Regular simplex with inradius 1 and circumradius n, centred at 0."""
    if n < 1:
        raise ValueError("simplex dimension must be >= 1")
    pts = np.eye(n + 1) - 1.0 / (n + 1)
    coords = pts @ _hyperplane_basis(n + 1)
    coords *= n / np.linalg.norm(coords[0])
    return coords


def _hyperplane_basis(m: int) -> np.ndarray:
    # Helmert columns: m x (m-1), orthonormal, spanning {x : sum x = 0}
    a = np.zeros((m, m - 1))
    for j in range(m - 1):
        a[: j + 1, j] = 1.0
        a[j + 1, j] = -(j + 1)
    return a / np.linalg.norm(a, axis=0)


def simplex_v(n: int) -> VPolytope:
    return VPolytope(simplex_vertices(n))


def simplex_h(n: int) -> HPolytope:
    # facet opposite v_i lies on <-v_i/|v_i|, x> = r = 1 and |v_i| = n
    return HPolytope(-simplex_vertices(n) / n)
