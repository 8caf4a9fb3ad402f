from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from scipy.spatial import ConvexHull

from flmlab import polytope as pc
from flmlab import sections as sc
from flmlab.bodies import make_standard
from flmlab.enumeration import facet_enum, vertex_enum
from flmlab.errors import DimensionMismatch, InvalidParameter
from flmlab.hanner import GrowthFn


def _coordinate_basis(n, idx):
    cols = np.eye(n)[:, idx]
    return sc.SubspaceBasis(n, len(idx), cols, seed=0)


def _same_set(a, b, tol=1e-8):
    if a.shape != b.shape:
        return False
    d = np.linalg.norm(a[:, None] - b[None], axis=2)
    return d.min(axis=1).max() <= tol and d.min(axis=0).max() <= tol


@pytest.mark.parametrize("n,k", [(3, 1), (6, 3), (10, 10), (20, 4)])
def test_orthonormal_and_reproducible(n, k):
    B = sc.random_subspace(n, k, 42)
    assert np.abs(B.columns.T @ B.columns - np.eye(k)).max() <= 1e-10
    assert np.array_equal(B.columns, sc.random_subspace(n, k, 42).columns)
    with pytest.raises(InvalidParameter):
        sc.random_subspace(n, n + 1, 0)


def test_rotation_invariance_statistic():
    n = 5
    vals = np.array([sc.random_subspace(n, 2, s).columns[0, 0] ** 2 for s in range(10_000)])
    assert abs(vals.mean() - 1 / n) <= 3 * vals.std() / math.sqrt(len(vals))


def test_full_dimension_preserves_ball_radii():
    B = sc.random_subspace(4, 4, 3)
    Q = sc.section_h(pc.cube_h(4), B)
    assert pc.inradius(Q) == pytest.approx(1.0, abs=1e-9)
    assert pc.circumradius(vertex_enum(Q)) == pytest.approx(2.0, abs=1e-9)


def test_cube_coordinate_plane():
    B = _coordinate_basis(3, [0, 1])
    Q = sc.section_h(pc.cube_h(3), B)
    assert len(Q) == 4
    Pv = sc.project_v(pc.cube_v(3), B)
    assert len(Pv) == 4
    assert _same_set(Pv.vertices, pc.cube_v(2).vertices)


def test_cross6_projection_matches_hull():
    # short images of basis vectors can fall inside the hull, so 12 is only the maximum
    counts = []
    for s in range(40):
        B = sc.random_subspace(6, 3, s)
        proj = sc.project_v(pc.cross_v(6), B)
        hull = ConvexHull(B.coords(pc.cross_v(6).vertices))
        assert len(proj) == len(hull.vertices)
        assert len(proj) % 2 == 0 and len(proj) <= 12
        counts.append(len(proj))
    assert 12 in counts


def test_projection_adjointness(rng):
    P = pc.VPolytope(rng.normal(size=(15, 5)))
    B = sc.random_subspace(5, 3, 1)
    y = rng.normal(size=(50, 3))
    assert np.allclose(pc.support(sc.project_v(P, B), y), pc.support(P, B.lift(y)))


def test_dimension_check():
    with pytest.raises(DimensionMismatch):
        sc.section_h(pc.cube_h(3), sc.random_subspace(4, 2, 0))


@pytest.mark.parametrize("seed", range(4))
def test_cross_section_inradius_against_sign_vectors(seed):
    n = 3
    g = sc.random_section(pc.cross_h(2 * n), n, seed)
    # every facet of B_1^{2n} has normal s in {-1, 1}^{2n}; its distance in E is 1/|P_E s|
    signs = np.array(list(itertools.product((-1.0, 1.0), repeat=2 * n)))
    oracle = 1.0 / np.linalg.norm(g.basis.coords(signs), axis=1).max()
    assert g.inradius == pytest.approx(oracle, rel=1e-9)
    assert len(g.Q) <= 4**n
    assert g.circumradius <= 1 + 1e-9
    assert g.inradius >= 1 / math.sqrt(2 * n)


def test_section_contains_inball_and_inside_projection(rng):
    P = make_standard("hanner:a=0.5,dim=6")
    B = sc.random_subspace(6, 3, 7)
    Q = sc.section_h(P.h, B)
    Pr = sc.project_v(P.v, B)
    assert pc.inradius(Q) >= P.inradius * (1 - 1e-9)
    assert len(Q) <= len(P.h) and len(Pr) <= len(P.v)
    x = rng.normal(size=(100, 3))
    # section inside projection: gauge of projection <= gauge of section
    assert np.all(pc.gauge(facet_enum(Pr), x) <= pc.gauge(Q, x) * (1 + 1e-9))


@pytest.mark.parametrize("body", ["cube:4", "cross:4", "simplex:4", "hanner:a=0.5,dim=4"])
def test_section_projection_duality(body):
    K = make_standard(body)
    B = sc.random_subspace(K.dim, 2, 5)
    lhs = pc.dualize(sc.section_h(K.h, B))
    rhs = sc.project_v(pc.dualize(K.h), B)
    assert _same_set(lhs.vertices, rhs.vertices)


def test_cross_section_experiment_small():
    stats = sc.cross_section_experiment(3, 4, 1)
    assert stats.all_pass and stats.invariants_ok()
    assert stats.columns == sc.COLUMNS
    again = sc.cross_section_experiment(3, 4, 1)
    assert stats.rows() == again.rows()


def test_simplex_section_examples():
    stats = sc.simplex_section_experiment(8, 2, 10, 0, samples=5000)
    assert all(rec.F <= 9 for rec in stats.records)
    assert all(rec.r >= 1 - 1e-9 for rec in stats.records)
    stats = sc.simplex_section_experiment(8, GrowthFn.log(), 2, 0, samples=5000)
    assert stats.params["f"] == 2
    with pytest.raises(InvalidParameter):
        sc.simplex_section_experiment(3, 2, 1, 0)


@pytest.mark.parametrize("n", [4, 8, 16])
def test_simplex_mstar_bracket(n):
    est = sc.simplex_mstar(n, 20_000, n)
    assert 0.5 <= est.mean / math.sqrt(n * math.log(n)) <= 3.0


def test_hanner_section_small():
    stats = sc.hanner_section_experiment(0.5, 4, "full-half", 10, 0, samples=20_000)
    assert stats.all_pass
    assert all(rec.F <= 64 for rec in stats.records)
    assert stats.summary["frac_R_within_4mstar"] >= 0.8
    stats = sc.hanner_section_experiment(0.5, 8, "delta", 2, 0, delta=0.5, samples=5000)
    assert stats.params["k"] == 5


def test_low_mstar():
    ball = sc.low_mstar_check(make_standard("ball:5"), 0.4, 3, 0)
    assert np.allclose(ball.values("constant"), 2 * math.sqrt(0.6))
    cross = sc.low_mstar_check(make_standard("cross:6"), 0.5, 20, 0, samples=20_000)
    assert cross.all_pass and cross.values("constant").max() <= 10
    cube = sc.low_mstar_check(make_standard("cube:3"), 2 / 3, 5, 0, samples=20_000)
    assert cube.params["k"] == 2 and cube.all_pass


def test_example4_sweep_records_only():
    stats = sc.example4_sweep([6, 8], [0.5], 2, 0)
    assert len(stats.records) == 4 and stats.all_pass
