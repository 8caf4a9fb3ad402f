from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from flmlab import polytope as pc
from flmlab.enumeration import canonicalize_v, facet_enum, fcount, vertex_enum
from flmlab.errors import DimensionMismatch, NotOriginInterior, RepresentationMismatch, UnboundedBody
from flmlab.hanner import FreeSum, LEAF, Product, materialize_v


def _same_set(a, b, tol=1e-9):
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        return False
    d = np.linalg.norm(a[:, None] - b[None], axis=2)
    return d.min(axis=1).max() <= tol and d.min(axis=0).max() <= tol


def test_support_axis_and_cross():
    assert pc.support(pc.cube_v(2), [1.0, 0.0]) == 1.0
    x = np.array([1, 2, 3]) / math.sqrt(14)
    assert pc.support(pc.cross_v(3), x) == pytest.approx(3 / math.sqrt(14), rel=1e-15)


def test_support_p4_matches_vertex_max_and_dual_gauge(rng):
    P4 = Product(FreeSum(LEAF, LEAF), FreeSum(LEAF, LEAF))
    V = materialize_v(P4)
    assert len(V) == 16
    x = rng.normal(size=(100, 4))
    brute = np.array([max(v @ xi for v in V.vertices) for xi in x])
    assert np.allclose(pc.support(V, x), brute, rtol=0, atol=1e-14)
    H = pc.dualize(V)
    assert np.allclose(pc.gauge(H, x), brute, atol=1e-14)


def test_gauge_examples():
    assert pc.gauge(pc.cube_h(2), [0.5, -0.5]) == 0.5
    assert pc.gauge(pc.cross_h(2), [0.3, 0.4]) == pytest.approx(0.7)
    assert pc.gauge(pc.cube_h(3), np.zeros(3)) == 0.0


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        pc.support(pc.cube_v(3), [1.0, 0.0])
    with pytest.raises(DimensionMismatch):
        pc.gauge(pc.cube_h(2), [1.0, 0.0, 0.0])


def test_dualize_cube_gives_cross():
    H = pc.dualize(pc.cube_v(3))
    assert len(H) == 8
    V = vertex_enum(H)
    assert _same_set(V.vertices, pc.cross_v(3).vertices)


def test_dualize_requires_origin_interior():
    P = pc.VPolytope(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]) + 0.1)
    assert not P.origin_interior
    with pytest.raises(NotOriginInterior):
        pc.dualize(P)


def test_unbounded_halfspaces_rejected():
    with pytest.raises(UnboundedBody):
        pc.HPolytope(np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]]))


@pytest.mark.parametrize("body", ["cube", "cross", "simplex"])
@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_involution_and_count_swap(body, n):
    V = getattr(pc, f"{body}_v")(n) if body != "simplex" else pc.simplex_v(n)
    H = facet_enum(V)
    Vd = pc.dualize(H)
    assert len(Vd) == len(H)
    back = pc.dualize(pc.dualize(V))
    assert _same_set(back.vertices, V.vertices)
    c, cd = fcount(V), fcount(pc.dualize(V))
    assert cd.as_tuple() == c.swapped().as_tuple()


def test_radii_duality():
    for V in (pc.cube_v(3), pc.cross_v(4), pc.simplex_v(5)):
        assert pc.circumradius(V) * pc.inradius(pc.dualize(V)) == pytest.approx(1.0, rel=1e-9)


def test_product_and_free_sum_counts():
    seg = pc.VPolytope(np.array([[-1.0], [1.0]]))
    sq = pc.product(seg, seg)
    assert fcount(sq).as_tuple() == (4, 4)
    d = pc.free_sum(seg, seg)
    assert fcount(d).as_tuple() == (4, 4)
    b1 = pc.cross_v(2)
    assert fcount(pc.product(b1, b1)).as_tuple() == (16, 8)


def test_product_free_sum_duality():
    P, Q = pc.cube_v(2), pc.simplex_v(2)
    lhs = pc.dualize(pc.product(P, Q))
    rhs = pc.free_sum(pc.dualize(P), pc.dualize(Q))
    assert _same_set(lhs.normals, rhs.normals)
    lhs2 = pc.dualize(pc.free_sum(P, Q))
    rhs2 = pc.product(pc.dualize(P), pc.dualize(Q))
    assert _same_set(lhs2.normals, rhs2.normals)


def test_p4_free_sum_gives_p8_counts():
    p4 = materialize_v(Product(FreeSum(LEAF, LEAF), FreeSum(LEAF, LEAF)))
    p8 = pc.free_sum(p4, p4)
    assert len(canonicalize_v(p8)) == 32
    # facets of P_8 are the vertices of the dual product
    d = pc.product(pc.dualize(p4), pc.dualize(p4))
    assert len(vertex_enum(d)) == 64


def test_count_laws_by_enumeration_mixed():
    pairs = [(pc.cube_v(2), pc.cross_v(3)), (pc.simplex_v(2), pc.simplex_v(3)), (pc.cross_v(2), pc.simplex_v(4))]
    for P, Q in pairs:
        cp, cq = fcount(P), fcount(Q)
        prod = fcount(pc.product(P, Q))
        fs = fcount(pc.free_sum(P, Q))
        assert prod.as_tuple() == (int(cp.num_vertices) * int(cq.num_vertices), int(cp.num_facets) + int(cq.num_facets))
        assert fs.as_tuple() == (int(cp.num_vertices) + int(cq.num_vertices), int(cp.num_facets) * int(cq.num_facets))


def test_representation_mismatch():
    with pytest.raises(RepresentationMismatch):
        pc.product(pc.cube_v(2), pc.cube_h(2))


def test_radii_of_standard_bodies():
    assert pc.circumradius(pc.cube_v(3)) == pytest.approx(math.sqrt(3))
    assert pc.inradius(pc.cube_h(3)) == pytest.approx(1.0)
    assert pc.circumradius(pc.cross_v(3)) == pytest.approx(1.0)
    assert pc.inradius(pc.cross_h(3)) == pytest.approx(1 / math.sqrt(3))
    # opposite representations go through enumeration
    assert pc.circumradius(pc.cube_h(3)) == pytest.approx(math.sqrt(3))
    assert pc.inradius(pc.cross_v(3)) == pytest.approx(1 / math.sqrt(3))


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_simplex_radii_and_regularity(n):
    V = pc.simplex_v(n)
    assert np.allclose(np.linalg.norm(V.vertices, axis=1), n, rtol=1e-12)
    # facet distances from the enumerated H-rep, not the constructor
    H = facet_enum(V)
    assert pc.inradius(H) == pytest.approx(1.0, rel=1e-9)
    d = np.linalg.norm(V.vertices[:, None] - V.vertices[None], axis=2)
    off = d[~np.eye(n + 1, dtype=bool)]
    assert off.max() / off.min() - 1 <= 1e-10
    assert np.allclose(V.vertices.sum(axis=0), 0, atol=1e-12)


@given(st.lists(st.floats(-3, 3), min_size=3, max_size=3), st.floats(0, 10))
def test_gauge_homogeneity(x, t):
    H = pc.cross_h(3)
    x = np.array(x)
    assert pc.gauge(H, t * x) == pytest.approx(t * pc.gauge(H, x), rel=1e-12, abs=1e-12)


def test_gauge_support_duality_random(rng):
    V = canonicalize_v(pc.VPolytope(rng.normal(size=(20, 4))))
    assert V.origin_interior
    H = pc.dualize(V)
    x = rng.normal(size=(100, 4))
    s = pc.support(V, x)
    assert np.allclose(pc.gauge(H, x), s, rtol=1e-9)
