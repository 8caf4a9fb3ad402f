"""Small linear programs used as exact-up-to-tolerance geometric predicates."""
from __future__ import annotations

import numpy as np
from scipy.optimize import linprog


def origin_depth(points: np.ndarray) -> float:
    """Largest delta with sum(lam) = 1, lam >= delta, sum(lam_i p_i) = 0.

    Positive iff the origin is a strictly positive convex combination of
    all points, which together with full rank means 0 is interior to the
    hull (equivalently: the rows, read as normals, bound a polytope).
    """
    m, n = points.shape
    c = np.zeros(m + 1)
    c[-1] = -1.0
    a_eq = np.zeros((n + 1, m + 1))
    a_eq[:n, :m] = points.T
    a_eq[n, :m] = 1.0
    b_eq = np.zeros(n + 1)
    b_eq[n] = 1.0
    a_ub = np.hstack([-np.eye(m), np.ones((m, 1))])
    b_ub = np.zeros(m)
    bounds = [(0, None)] * m + [(None, 1.0)]
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if res.status != 0:
        return 0.0
    return float(-res.fun)


def separation_margin(points: np.ndarray, i: int, tol: float) -> float:
    """max s such that some c in [-1,1]^n has <c, p_j - p_i> + s <= 0 for all j.

    Points within ``tol`` of ``p_i`` are treated as the same point.
    ``p_i`` is a vertex of the hull iff the margin is positive.
    """
    p = points[i]
    diff = points - p
    others = np.linalg.norm(diff, axis=1) > tol
    diff = diff[others]
    n = points.shape[1]
    if diff.shape[0] == 0:
        return np.inf
    c = np.zeros(n + 1)
    c[-1] = -1.0
    a_ub = np.hstack([diff, np.ones((diff.shape[0], 1))])
    b_ub = np.zeros(diff.shape[0])
    bounds = [(-1.0, 1.0)] * n + [(None, 1.0)]
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if res.status != 0:
        return 0.0
    return float(-res.fun)
