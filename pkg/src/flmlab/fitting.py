from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    r_squared: float
    points: int

    def within(self, target: float, tol: float) -> bool:
        return abs(self.slope - target) <= tol


def fit_loglog(points) -> SlopeFit:
    """Least-squares line through (log x, log y)."""
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
        raise InvalidParameter("slope fit needs at least 3 (x, y) points")
    if not np.all(np.isfinite(pts)) or np.any(pts <= 0):
        raise InvalidParameter("slope fit needs finite positive coordinates")
    lx, ly = np.log(pts[:, 0]), np.log(pts[:, 1])
    return fit_line(lx, ly)


def fit_line(x, y) -> SlopeFit:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 3 or len(x) != len(y):
        raise InvalidParameter("line fit needs at least 3 paired points")
    xm, ym = x.mean(), y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    if sxx == 0:
        raise InvalidParameter("line fit needs distinct x values")
    slope = float(np.sum((x - xm) * (y - ym))) / sxx
    intercept = ym - slope * xm
    syy = float(np.sum((y - ym) ** 2))
    resid = float(np.sum((y - intercept - slope * x) ** 2))
    r2 = 1.0 if syy == 0 else min(1.0, max(0.0, 1.0 - resid / syy))
    return SlopeFit(slope, float(intercept), r2, len(x))


def log_log_slope(xs, ys) -> SlopeFit:
    return fit_loglog(zip(xs, ys))
