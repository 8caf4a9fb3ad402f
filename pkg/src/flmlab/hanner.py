"""Hanner-type polytopes as symbolic construction trees.

A tree is built from segments ``[-1, 1]`` by Cartesian products and free
sums. Trees share subtrees freely (``FreeSum(P, P)`` holds one child
object twice), and every derived quantity is cached per node, so a dyadic
tree of dimension ``2**40`` costs only 40 nodes.

Face-vector convention: ``f_vector(e)[k]`` counts the k-dimensional faces
for ``k = 0..dim``, so the last entry is 1 (the polytope itself) and the
empty face is not counted.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import config as _config
from .counts import FCount
from .errors import EnumerationLimit, InvalidParameter
from .polytope import HPolytope, VPolytope


class HannerExpr:
    """Base class for construction-tree nodes. Nodes are immutable and
    compared by identity."""

    @cached_property
    def dim(self) -> int:
        return self.left.dim + self.right.dim

    @cached_property
    def counts(self) -> FCount:
        return self._counts()

    @cached_property
    def f_vector(self) -> tuple[int, ...]:
        return tuple(self._fp[1:])

    @cached_property
    def _fp(self) -> list[int]:
        # face counts by dimension -1..dim, empty face included
        return self._face_poly()

    def radii(self, normalize: bool = False) -> tuple[float, float]:
        """(inradius, circumradius) about the origin, without materializing.

        With ``normalize`` the children of every node are first rescaled
        (r = 1 under a product, R = 1 under a free sum); counts are
        unchanged and the result always has R/r = sqrt(dim).
        """
        return self._radii_norm if normalize else self._radii_raw

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"


@dataclass(frozen=True, eq=False, repr=False)
class Leaf(HannerExpr):
    @cached_property
    def dim(self) -> int:
        return 1

    def _counts(self):
        return FCount(2, 2, 1)

    def _face_poly(self):
        # [empty, vertices, edge]
        return [1, 2, 1]

    _radii_raw = (1.0, 1.0)
    _radii_norm = (1.0, 1.0)


@dataclass(frozen=True, eq=False, repr=False)
class Product(HannerExpr):
    left: HannerExpr
    right: HannerExpr

    def _counts(self):
        a, b = self.left.counts, self.right.counts
        return FCount(a.num_vertices * b.num_vertices, a.num_facets + b.num_facets, self.dim)

    def _face_poly(self):
        # nonempty faces of P x Q are F x G with dims adding
        a, b = self.left._fp, self.right._fp
        return [1] + _convolve(a[1:], b[1:])

    @cached_property
    def _radii_raw(self):
        (rl, Rl), (rr, Rr) = self.left._radii_raw, self.right._radii_raw
        return min(rl, rr), math.hypot(Rl, Rr)

    @cached_property
    def _radii_norm(self):
        (rl, Rl), (rr, Rr) = self.left._radii_norm, self.right._radii_norm
        return 1.0, math.hypot(Rl / rl, Rr / rr)


@dataclass(frozen=True, eq=False, repr=False)
class FreeSum(HannerExpr):
    left: HannerExpr
    right: HannerExpr

    def _counts(self):
        a, b = self.left.counts, self.right.counts
        return FCount(a.num_vertices + b.num_vertices, a.num_facets * b.num_facets, self.dim)

    def _face_poly(self):
        # proper faces (empty included) are joins F * G, dim F + dim G + 1
        a, b = self.left._fp, self.right._fp
        return _convolve(a[:-1], b[:-1]) + [1]

    @cached_property
    def _radii_raw(self):
        (rl, Rl), (rr, Rr) = self.left._radii_raw, self.right._radii_raw
        return 1.0 / math.hypot(1.0 / rl, 1.0 / rr), max(Rl, Rr)

    @cached_property
    def _radii_norm(self):
        (rl, Rl), (rr, Rr) = self.left._radii_norm, self.right._radii_norm
        return 1.0 / math.hypot(Rl / rl, Rr / rr), 1.0


def _convolve(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


LEAF = Leaf()


def counts(e: HannerExpr) -> FCount:
    return e.counts


def f_vector(e: HannerExpr) -> tuple[int, ...]:
    return e.f_vector


def dual(e: HannerExpr, _memo=None) -> HannerExpr:
    """Polar tree: products and free sums swap."""
    memo = {} if _memo is None else _memo
    key = id(e)
    if key in memo:
        return memo[key]
    if isinstance(e, Leaf):
        out = e
    elif isinstance(e, Product):
        out = FreeSum(dual(e.left, memo), dual(e.right, memo))
    else:
        out = Product(dual(e.left, memo), dual(e.right, memo))
    memo[key] = out
    return out


def cube_tree(n: int) -> HannerExpr:
    e = LEAF
    for _ in range(n - 1):
        e = Product(e, LEAF)
    return e


def cross_tree(n: int) -> HannerExpr:
    e = LEAF
    for _ in range(n - 1):
        e = FreeSum(e, LEAF)
    return e


# -- builders ----------------------------------------------------------------


def _check_density(a) -> Fraction:
    try:
        fa = Fraction(a)
    except (TypeError, ValueError):
        raise InvalidParameter(f"density must be a real number, got {a!r}") from None
    if not 0 < fa < 1:
        raise InvalidParameter(f"density a={a} must lie in (0, 1)")
    return fa


def product_step(a, step: int) -> bool:
    """Whether doubling step ``step`` takes a Cartesian product.

    Steps with floor((step+1)a) > floor(step*a) are products, so exactly
    floor(m*a) of the first m steps are products; for a = 1/2 the steps
    alternate free sum, product, free sum, ...
    """
    fa = _check_density(a)
    return math.floor((step + 1) * fa) > math.floor(step * fa)


def build_dyadic(a, m: int) -> HannerExpr:
    """P_{2^m}: m doubling steps from a segment, products with frequency a."""
    fa = _check_density(a)
    if m < 0:
        raise InvalidParameter("m must be >= 0")
    e = LEAF
    for step in range(m):
        e = Product(e, e) if product_step(fa, step) else FreeSum(e, e)
    return e


def build_general_n(n: int, a) -> HannerExpr:
    """Product of dyadic pieces over the binary expansion of n, largest first."""
    if n < 1:
        raise InvalidParameter("n must be >= 1")
    exps = [r for r in range(n.bit_length() - 1, -1, -1) if n >> r & 1]
    e = build_dyadic(a, exps[0])
    for r in exps[1:]:
        e = Product(e, build_dyadic(a, r))
    return e


def product_power(e: HannerExpr, copies: int) -> HannerExpr:
    """e x e x ... x e (``copies`` factors) as a balanced, shared tree."""
    if copies < 1:
        raise InvalidParameter("copies must be >= 1")
    if copies == 1:
        return e
    half = product_power(e, copies // 2)
    out = Product(half, half)
    return Product(out, e) if copies % 2 else out


@dataclass(frozen=True)
class GrowthFn:
    """Integer growth profile f(n).

    kinds: ``log`` (floor log n), ``power`` (floor n^delta),
    ``const_log`` (floor eps log n), ``const`` (floor value) and ``table``
    (explicit values keyed by n).
    """

    kind: str
    param: float = 0.0
    table: dict = field(default_factory=dict)

    def value(self, n: int) -> float:
        if self.kind == "log":
            return math.log(n)
        if self.kind == "power":
            return n**self.param
        if self.kind == "const_log":
            return self.param * math.log(n)
        if self.kind == "const":
            return self.param
        if self.kind == "table":
            try:
                return float(self.table[n])
            except KeyError:
                raise InvalidParameter(f"growth table has no entry for n={n}") from None
        raise InvalidParameter(f"unknown growth kind {self.kind!r}")

    def __call__(self, n: int) -> int:
        return int(math.floor(self.value(n) + 1e-12))

    def check(self, n: int) -> int:
        f = self(n)
        if f < 1 or f >= math.sqrt(n / 2.0):
            raise InvalidParameter(f"f({n}) = {f} outside [1, sqrt(n/2))")
        return f

    @classmethod
    def log(cls):
        return cls("log")

    @classmethod
    def power(cls, delta):
        return cls("power", delta)

    @classmethod
    def const_log(cls, eps):
        return cls("const_log", eps)

    @classmethod
    def const(cls, value):
        return cls("const", value)


def build_padded(f: GrowthFn, N: int) -> tuple[HannerExpr, int]:
    """Product of floor(N/n) copies of P_n (a = 1/2), n = floor(f(N))^2.

    Returns the tree and its dimension k = n * floor(N/n), N/2 <= k <= N.
    """
    fN = f.check(N)
    n = fN * fN
    if n > N:
        raise InvalidParameter(f"f(N)^2 = {n} exceeds N = {N}")
    base = build_general_n(n, Fraction(1, 2))
    copies = N // n
    return product_power(base, copies), n * copies


# -- reports -----------------------------------------------------------------


@dataclass(frozen=True)
class FamilyReport:
    params: dict
    columns: tuple[str, ...]
    rows: list[tuple]


def dyadic_family(a, max_exp: int) -> FamilyReport:
    rows = []
    e = LEAF
    fa = _check_density(a)
    for m in range(max_exp + 1):
        if m:
            e = Product(e, e) if product_step(fa, m - 1) else FreeSum(e, e)
        c = e.counts
        rows.append((m, e.dim, c.log_v, c.log_f))
    return FamilyReport({"a": float(a), "max_exp": max_exp}, ("m", "dim", "logV", "logF"), rows)


def padded_ratio(e: HannerExpr, k: int, f: GrowthFn) -> float:
    """log|V_k| log|F_k| / (k (1 + log k / f(k)))."""
    c = e.counts
    return c.log_v * c.log_f / (k * (1.0 + math.log(k) / f(k)))


def padded_family(f: GrowthFn, Ns) -> FamilyReport:
    rows = []
    for N in Ns:
        e, k = build_padded(f, N)
        c = e.counts
        rows.append((N, k, f(N), c.log_v, c.log_f, padded_ratio(e, k, f)))
    return FamilyReport({"f": f.kind, "param": f.param}, ("N", "k", "fN", "logV", "logF", "ratio"), rows)


# -- materialization ---------------------------------------------------------


def materialize_v(e: HannerExpr, normalize: bool = False, cfg=None) -> VPolytope:
    cfg = cfg or _config.current()
    nv = e.counts.num_vertices
    if nv > cfg.enum_max_points:
        raise EnumerationLimit(f"{nv} vertices exceed enum.max_points={cfg.enum_max_points}")
    return VPolytope(_vertices(e, normalize, {}))


def materialize_h(e: HannerExpr, normalize: bool = False, cfg=None) -> HPolytope:
    cfg = cfg or _config.current()
    nf = e.counts.num_facets
    if e.dim > cfg.enum_max_dim or nf > cfg.enum_max_points:
        raise EnumerationLimit(f"H side of dim {e.dim} with {nf} facets exceeds enum limits")
    return HPolytope(_normals(e, normalize, {}))


def materialize(e: HannerExpr, normalize: bool = False, cfg=None) -> tuple[VPolytope, HPolytope]:
    return materialize_v(e, normalize, cfg), materialize_h(e, normalize, cfg)


def _child_scales(e, normalize):
    if not normalize:
        return 1.0, 1.0
    (rl, Rl), (rr, Rr) = e.left._radii_norm, e.right._radii_norm
    if isinstance(e, Product):
        return 1.0 / rl, 1.0 / rr
    return 1.0 / Rl, 1.0 / Rr


def _pairs(a, b):
    return np.hstack([np.repeat(a, len(b), axis=0), np.tile(b, (len(a), 1))])


def _pad(a, b):
    return np.vstack([
        np.hstack([a, np.zeros((len(a), b.shape[1]))]),
        np.hstack([np.zeros((len(b), a.shape[1])), b]),
    ])


def _vertices(e, normalize, memo):
    if id(e) in memo:
        return memo[id(e)]
    if isinstance(e, Leaf):
        out = np.array([[1.0], [-1.0]])
    else:
        sl, sr = _child_scales(e, normalize)
        a = _vertices(e.left, normalize, memo) * sl
        b = _vertices(e.right, normalize, memo) * sr
        out = _pairs(a, b) if isinstance(e, Product) else _pad(a, b)
    memo[id(e)] = out
    return out


def _normals(e, normalize, memo):
    if id(e) in memo:
        return memo[id(e)]
    if isinstance(e, Leaf):
        out = np.array([[1.0], [-1.0]])
    else:
        sl, sr = _child_scales(e, normalize)
        a = _normals(e.left, normalize, memo) / sl
        b = _normals(e.right, normalize, memo) / sr
        out = _pad(a, b) if isinstance(e, Product) else _pairs(a, b)
    memo[id(e)] = out
    return out


def all_trees(dim: int) -> list[HannerExpr]:
    """Every construction tree with exactly ``dim`` leaves."""
    if dim == 1:
        return [LEAF]
    out = []
    for k in range(1, dim):
        for left in all_trees(k):
            for right in all_trees(dim - k):
                out.append(Product(left, right))
                out.append(FreeSum(left, right))
    return out
