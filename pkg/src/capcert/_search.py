"""Scalar maximization over an open interval: dense grid, then golden-section refinement."""

import numpy as np
from scipy import optimize

GRID_POINTS = 512
EDGE_GUARD = 1e-12


def interval_grid(lo, hi, points=GRID_POINTS):
    """Grid on ``(lo, hi)`` that is geometric towards both endpoints and uniform in between.

    Optima of the finite-size corrections sit very close to an endpoint when
    the number of modes is large, so a purely uniform grid would miss them.
    """
    width = hi - lo
    guard = EDGE_GUARD * width
    near = np.geomspace(guard, width / 2, points)
    pts = np.concatenate([lo + near, hi - near, np.linspace(lo, hi, points + 2)[1:-1]])
    pts = pts[(pts > lo) & (pts < hi)]
    return np.unique(pts)


def maximize_on_interval(f, lo, hi, points=GRID_POINTS, xtol=1e-9):
    """Return ``(x_star, f(x_star))`` for the supremum of ``f`` over ``(lo, hi)``.

    ``f`` may return ``-inf`` or ``nan`` at infeasible points; those are
    skipped. Returns ``(None, -inf)`` if no grid point is feasible.
    """
    xs = interval_grid(lo, hi, points)
    vals = np.array([f(x) for x in xs], dtype=float)
    vals[~np.isfinite(vals)] = -np.inf
    i = int(np.argmax(vals))
    if not np.isfinite(vals[i]):
        return None, -np.inf
    best_x, best_v = xs[i], vals[i]
    if 0 < i < len(xs) - 1:
        a, c = xs[i - 1], xs[i + 1]

        def neg(x):
            v = f(x)
            return -v if np.isfinite(v) else np.inf

        # scipy's xtol is relative to the abscissa
        rel = min(xtol / max(abs(best_x), 1e-300), 1e-6 * (c - a) / max(abs(best_x), 1e-300))
        try:
            res = optimize.minimize_scalar(neg, bracket=(a, best_x, c), method="golden",
                                           options={"xtol": max(rel, 1e-15)})
            if a < res.x < c and -res.fun > best_v:
                best_x, best_v = float(res.x), float(-res.fun)
        except ValueError:
            pass
    return float(best_x), float(best_v)
