from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from flmlab import hanner as hn
from flmlab.enumeration import face_f_vector, fcount
from flmlab.errors import InvalidParameter
from flmlab.fitting import fit_line
from flmlab.hanner import LEAF, Product


def _log2_counts(a, m):
    """Float recursion on (log2 V, log2 F), independent of the big-integer path."""
    lv, lf = 1.0, 1.0
    out = [(lv, lf)]
    fa = Fraction(a)
    for step in range(m):
        if math.floor((step + 1) * fa) > math.floor(step * fa):
            lv, lf = 2 * lv, lf + 1
        else:
            lv, lf = lv + 1, 2 * lf
        out.append((lv, lf))
    return out


def test_table_a_half():
    got = [hn.build_dyadic(0.5, m).counts.as_tuple() for m in range(5)]
    assert got == [(2, 2), (4, 4), (16, 8), (32, 64), (1024, 128)]


def test_cube_and_cross_trees():
    for n in range(1, 9):
        assert hn.cube_tree(n).counts.as_tuple() == (2**n, 2 * n)
        assert hn.cross_tree(n).counts.as_tuple() == (2 * n, 2**n)


def test_general_n():
    e = hn.build_general_n(6, 0.5)
    assert e.counts.as_tuple() == (64, 12)
    for n in range(1, 40):
        assert hn.build_general_n(n, 0.3).dim == n
    with pytest.raises(InvalidParameter):
        hn.build_general_n(0, 0.5)
    with pytest.raises(InvalidParameter):
        hn.build_dyadic(1.0, 3)


def test_product_frequency():
    for a in (0.25, 0.5, 0.75, 0.3):
        for m in (4, 10, 40):
            steps = sum(hn.product_step(a, s) for s in range(m))
            assert steps == math.floor(m * Fraction(a))


@pytest.mark.parametrize("dim", [1, 2, 3, 4])
def test_counts_match_enumeration(dim):
    for e in hn.all_trees(dim):
        V = hn.materialize_v(e)
        assert fcount(V).as_tuple() == e.counts.as_tuple()


def test_all_trees_count():
    # 2 * Catalan-like recursion: T(n) = sum 2 T(k) T(n-k)
    T = {1: 1}
    for n in range(2, 6):
        T[n] = sum(2 * T[k] * T[n - k] for k in range(1, n))
    for n in range(1, 6):
        assert len(hn.all_trees(n)) == T[n]


def test_dim8_via_dual_extremes():
    e = hn.build_dyadic(0.5, 3)
    assert fcount(hn.materialize_v(e)).num_vertices == 32
    assert fcount(hn.materialize_v(hn.dual(e))).num_vertices == 64


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_f_vector_matches_face_enumeration(dim):
    for e in hn.all_trees(dim):
        assert list(e.f_vector) == face_f_vector(hn.materialize_v(e))


def test_f_vector_examples():
    assert Product(LEAF, LEAF).f_vector == (4, 4, 1)
    assert hn.cube_tree(3).f_vector == (8, 12, 6, 1)
    assert hn.cross_tree(3).f_vector == (6, 12, 8, 1)


@given(st.integers(1, 7), st.randoms(use_true_random=False))
def test_dual_swaps_counts_and_reverses_f_vector(dim, rnd):
    trees = hn.all_trees(min(dim, 4))
    e = trees[rnd.randrange(len(trees))]
    d = hn.dual(e)
    assert d.counts.as_tuple() == e.counts.swapped().as_tuple()
    assert d.f_vector[:-1] == tuple(reversed(e.f_vector[:-1]))
    assert hn.dual(d).counts.as_tuple() == e.counts.as_tuple()


@pytest.mark.parametrize("a", [0.25, 0.5, 0.75])
def test_log_counts_match_float_oracle(a):
    oracle = _log2_counts(a, 40)
    for m in (0, 5, 17, 40):
        c = hn.build_dyadic(a, m).counts
        assert c.num_vertices.log2() == pytest.approx(oracle[m][0], rel=1e-12)
        assert c.num_facets.log2() == pytest.approx(oracle[m][1], rel=1e-12)


@pytest.mark.parametrize("a", [0.25, 0.5, 0.75])
def test_slopes(a):
    rows = _log2_counts(a, 40)[10:]
    m = np.arange(10, 41)
    sv = fit_line(m, np.log2([r[0] for r in rows])).slope
    sf = fit_line(m, np.log2([r[1] for r in rows])).slope
    assert abs(sv - a) <= 0.1 and abs(sf - (1 - a)) <= 0.1
    rep = hn.dyadic_family(a, 40)
    lv = np.array([r[2] for r in rep.rows[10:]]) / math.log(2)
    assert fit_line(m, np.log2(lv)).slope == pytest.approx(sv, rel=1e-9)


def test_half_gap_bounded_by_log2_3():
    # log2 log2 |V| - m/2 increases to log2(3) for odd m
    gaps = [math.log2(lv) - m / 2 for m, (lv, _) in enumerate(_log2_counts(0.5, 40))]
    assert max(gaps) < math.log2(3)
    assert max(gaps) > 1.5


def test_half_factor_four():
    for m in range(41):
        c = hn.build_dyadic(0.5, m).counts
        ref = 2 ** (m / 2) * math.log(2)
        assert ref / 4 <= c.log_v <= 4 * ref
        assert ref / 4 <= c.log_f <= 4 * ref


def test_padded_n1000():
    e, k = hn.build_padded(hn.GrowthFn.log(), 1000)
    assert k == 972 and e.dim == 972
    base = hn.build_general_n(36, 0.5).counts
    assert int(e.counts.num_facets) == 27 * int(base.num_facets)
    assert e.counts.num_vertices == base.num_vertices ** 27


def test_padded_ratio_bracket():
    rep = hn.padded_family(hn.GrowthFn.log(), [2**j for j in range(8, 17)])
    for N, k, fN, lv, lf, ratio in rep.rows:
        assert N / 2 <= k <= N
        assert 0.05 <= ratio <= 20


def test_padded_constant_profile_is_exponential():
    f = hn.GrowthFn.const(4)
    ks, lvs = [], []
    for j in range(8, 17):
        e, k = hn.build_padded(f, 2**j)
        ks.append(k)
        lvs.append(e.counts.log_v)
    fit = fit_line(np.log(ks), np.log(lvs))
    assert abs(fit.slope - 1) <= 0.2


def test_growth_out_of_range():
    with pytest.raises(InvalidParameter):
        hn.build_padded(hn.GrowthFn.const(20), 100)


def test_normalized_radii():
    for e in hn.all_trees(4):
        r, R = e.radii(normalize=True)
        assert R / r == pytest.approx(2.0)
