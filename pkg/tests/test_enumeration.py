from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.spatial import ConvexHull
from scipy.stats import special_ortho_group

from flmlab import config
from flmlab import enumeration as en
from flmlab import polytope as pc
from flmlab.errors import EnumerationLimit, InvalidParameter
from flmlab.hanner import FreeSum, LEAF, Product, materialize_v
from flmlab.sphere import sample_sphere

P4 = Product(FreeSum(LEAF, LEAF), FreeSum(LEAF, LEAF))


def _same_set(a, b, tol=1e-9):
    if a.shape != b.shape:
        return False
    d = np.linalg.norm(a[:, None] - b[None], axis=2)
    return d.min(axis=1).max() <= tol and d.min(axis=0).max() <= tol


def test_facet_enum_cube_and_cross():
    H = en.facet_enum(pc.cube_v(3))
    assert _same_set(H.normals, np.vstack([np.eye(3), -np.eye(3)]))
    H = en.facet_enum(pc.cross_v(3))
    assert len(H) == 8
    assert np.allclose(np.abs(H.normals), 1.0)


def test_facet_enum_p4():
    assert len(en.facet_enum(materialize_v(P4))) == 8


def test_vertex_enum_cross_incidence():
    V = en.vertex_enum(pc.cross_h(3))
    assert len(V) == 6
    inc = en.incidence(V, pc.cross_h(3))
    assert (inc.sum(axis=1) == 4).all()


def test_vertex_enum_rotated_cube():
    Q = special_ortho_group.rvs(3, random_state=7)
    H = pc.HPolytope(pc.cube_h(3).normals @ Q)
    V = en.vertex_enum(H)
    assert _same_set(V.vertices, pc.cube_v(3).vertices @ Q)


@pytest.mark.parametrize("make", [pc.cube_v, pc.cross_v, pc.simplex_v])
@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_round_trip(make, n):
    V = make(n)
    back = en.vertex_enum(en.facet_enum(V))
    assert _same_set(back.vertices, V.vertices)


def test_brute_force_matches_qhull(rng):
    for n, m in [(3, 15), (4, 20), (5, 18)]:
        V = en.canonicalize_v(pc.VPolytope(rng.normal(size=(m, n))))
        a = en.facet_enum(V, method="brute").normals
        b = en.facet_enum(V, method="qhull").normals
        assert _same_set(a, b)
        # independent oracle: scipy hull facets (merged coplanar pieces)
        hull = ConvexHull(V.vertices)
        eq = hull.equations
        normals = eq[:, :-1] / -eq[:, -1:]
        assert len(en.unique_rows(normals, 1e-7)) == len(a)


def test_limits_enforced():
    cfg = config.Config(enum_max_dim=3)
    with pytest.raises(EnumerationLimit):
        en.facet_enum(pc.cube_v(4), cfg)
    cfg = config.Config(enum_max_points=10)
    with pytest.raises(EnumerationLimit):
        en.facet_enum(pc.cube_v(4), cfg)


def test_qhull_fallback_past_subset_limit(rng):
    cfg = config.Config(enum_brute_max_subsets=10)
    V = pc.cross_v(4)
    assert len(en.facet_enum(V, cfg)) == 16


def test_is_extreme():
    pts = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1], [0, 0]], dtype=float)
    assert not en.is_extreme(pts, 4)
    assert all(en.is_extreme(pts, i) for i in range(4))
    S = pc.simplex_v(4).vertices
    assert all(en.is_extreme(S, i) for i in range(5))
    with pytest.raises(InvalidParameter):
        en.is_extreme(pts[:1], 0)


def test_extreme_filter_matches_facet_route_on_projection(rng):
    from flmlab.hanner import build_general_n
    from flmlab.sections import random_subspace

    V8 = materialize_v(build_general_n(8, 0.5))
    B = random_subspace(8, 4, 99)
    pts = V8.vertices @ B.columns
    ext = en.extreme_indices(pts)
    H = en.facet_enum(pc.VPolytope(pts), method="qhull")
    tight = np.abs(pts @ H.normals.T - 1) <= 1e-8
    # a vertex of the hull lies on at least dim facets with full-rank normals
    on_facets = [i for i in range(len(pts)) if tight[i].sum() >= 4
                 and np.linalg.matrix_rank(H.normals[tight[i]]) == 4]
    assert sorted(ext.tolist()) == sorted(on_facets)


def test_membership():
    H = pc.cube_h(3)
    assert en.membership(H, np.zeros(3))
    assert not en.membership(H, [1, 1, 1.0001])
    x = np.random.default_rng(3).normal(size=(1000, 3))
    x *= (0.99 * np.random.default_rng(4).random(1000) / pc.gauge(H, x))[:, None]
    assert en.membership(H, x).all()


def test_face_f_vector_cube():
    assert en.face_f_vector(pc.cube_v(3)) == [8, 12, 6, 1]


def test_volume_ball_and_cross():
    ball = lambda x: np.linalg.norm(x, axis=1) <= 1.0
    est = en.volume_mc(ball, 1.0, 20_000, 1, dim=3)
    assert est.ratio_to_ball == 1.0 and est.stderr == 0.0
    est = en.volume_mc(pc.cross_h(3), 1.0, 100_000, 2)
    assert abs(est.ratio_to_ball - 1 / math.pi) <= 3 * est.stderr


def test_volume_deterministic_and_monotone():
    a = en.volume_mc(pc.cross_h(3), 1.8, 30_000, 5)
    b = en.volume_mc(pc.cross_h(3), 1.8, 30_000, 5)
    assert a == b
    c = en.volume_mc(pc.cube_h(3), 1.8, 30_000, 6)
    assert a.ratio_to_ball <= c.ratio_to_ball + 3 * (a.stderr + c.stderr)
    with pytest.raises(InvalidParameter):
        en.volume_mc(pc.cube_h(3), 2.0, 0, 1)


def test_volume_random_hull_root_bound():
    # (Vol(P_N)/Vol(B))^(1/n) <= C sqrt(log(1 + N/n)/n) with C = 4
    n, N = 3, 12
    bound = 4 * math.sqrt(math.log(1 + N / n) / n)
    for seed in range(20):
        V = pc.VPolytope(sample_sphere(n, seed, N))
        if not V.origin_interior:
            continue
        est = en.volume_mc(V, 1.0, 5_000, seed)
        assert est.ratio_to_ball ** (1 / n) <= bound
