"""Independent reference computations for the test-suite.

Nothing here calls into the solvers under test: divergences come from
``scipy.special.rel_entr`` and confidence endpoints from exhaustive grids.
"""

import numpy as np
from scipy.special import rel_entr

GRID_STEP = 1e-6
_FINE = 1_000_000
_COARSE = 1_000


def kl_vec(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return rel_entr(x, y) + rel_entr(1.0 - x, 1.0 - y)


def _fine_points(k_coarse):
    lo = k_coarse * (_FINE // _COARSE)
    hi = min(_FINE, lo + _FINE // _COARSE)
    return np.arange(lo, hi + 1) / _FINE


def _grid_extreme(feasible, largest):
    """Extreme grid point ``q = k * 1e-6`` where ``feasible(q)`` holds.

    Feasible sets here are intervals, so the extreme point is located on a
    1e-3 grid first and refined on the 1e-6 grid between its neighbours.
    Falls back to the full fine grid when no coarse point is feasible.
    """
    coarse = np.arange(_COARSE + 1) / _COARSE
    ok = feasible(coarse)
    if not ok.any():
        fine = np.arange(_FINE + 1) / _FINE
        ok = feasible(fine)
        if not ok.any():
            return None
        idx = np.flatnonzero(ok)
        return fine[idx[-1] if largest else idx[0]]
    idx = np.flatnonzero(ok)
    k = idx[-1] if largest else idx[0]
    if largest:
        pts = _fine_points(k)
    else:
        pts = _fine_points(k - 1) if k > 0 else _fine_points(0)
    good = pts[feasible(pts)]
    return good.max() if largest else good.min()


def grid_upper(lam, n, budget):
    """Largest feasible point of the 1e-6 grid, with ``lam`` itself as a candidate."""
    q = _grid_extreme(lambda q: (q >= lam) & (n * kl_vec(lam, q) <= budget), largest=True)
    return lam if q is None else max(q, lam)


def grid_lower(lam, n, budget):
    q = _grid_extreme(lambda q: (q <= lam) & (n * kl_vec(lam, q) <= budget), largest=False)
    return lam if q is None else min(q, lam)


def grid_index(lam, n, budget, forward):
    """Largest ``q`` in [0, 1] with ``n * d(lam, g(q)) <= budget`` on the 1e-6 grid.

    When no grid point qualifies, returns the grid point minimizing the
    constraint (the admissible reward closest to the confidence set).
    """
    def feasible(q):
        return n * kl_vec(lam, forward(q)) <= budget

    q = _grid_extreme(feasible, largest=True)
    if q is None:
        fine = np.arange(_FINE + 1) / _FINE
        q = fine[np.argmin(kl_vec(lam, forward(fine)))]
    return q


def grid_argmin(lam, forward):
    fine = np.arange(_FINE + 1) / _FINE
    return fine[np.argmin(kl_vec(lam, forward(fine)))]
