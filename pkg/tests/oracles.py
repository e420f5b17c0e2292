"""Independent oracles the implementation is checked against.

These deliberately avoid the code paths they verify: scalar golden
section and candidate enumeration for the vector seminorms, per-column
medians for the p=1 formula, derivative-free minimization for p=2, and
a refining dense grid for the p=infinity LP.
"""

import numpy as np
from scipy.optimize import minimize

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def golden_section(f, lo, hi, iters=200):
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return min(fc, fd)


def vector_seminorm_oracle(x, p):
    """min_c ||x - c 1||_p by 1-D search (enumeration at p = 1)."""
    x = np.asarray(x, dtype=float)
    if p == 1:
        return min(np.abs(x - c).sum() for c in x)
    if p == 2:
        f = lambda c: np.linalg.norm(x - c)
    else:
        f = lambda c: np.abs(x - c).max()
    lo, hi = float(x.min()), float(x.max())
    if lo == hi:
        return 0.0
    return golden_section(f, lo, hi)


def metric_p1_oracle(m):
    """Max over columns of absolute deviations from the column median."""
    med = np.median(m, axis=0)
    return float(np.abs(m - med).sum(axis=0).max())


def metric_p2_oracle(m, starts=(0,)):
    """min_c ||M - 1c||_2 by Nelder-Mead (the problem is convex in c)."""
    m = np.asarray(m, dtype=float)
    n, cols = m.shape
    ones = np.ones((n, 1))

    def f(c):
        return np.linalg.norm(m - ones @ c.reshape(1, -1), 2)

    best = np.inf
    rng = np.random.default_rng(0)
    for s in starts:
        x0 = np.zeros(cols) if s == 0 else rng.standard_normal(cols)
        res = minimize(f, x0, method="Nelder-Mead",
                       options=dict(xatol=1e-9, fatol=1e-12,
                                    maxiter=40000, maxfev=40000))
        best = min(best, float(res.fun))
    return best


def metric_pinf_grid_oracle(m, rounds=9, pts=13):
    """min_c max_i sum_j |m_ij - c_j| by a refining dense grid.

    The optimum has each c_j inside the column range; every round zooms
    the box on the best grid point while keeping a two-cell margin.
    """
    m = np.asarray(m, dtype=float)
    cols = m.shape[1]
    lo = m.min(axis=0)
    hi = m.max(axis=0)
    center = (lo + hi) / 2.0
    width = np.maximum(hi - lo, 1e-9)
    best_val = np.inf
    for _ in range(rounds):
        axes = [np.linspace(center[j] - width[j] / 2.0,
                            center[j] + width[j] / 2.0, pts)
                for j in range(cols)]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, cols)
        vals = np.abs(m[None, :, :] - grid[:, None, :]).sum(axis=2).max(axis=1)
        k = int(np.argmin(vals))
        best_val = min(best_val, float(vals[k]))
        center = grid[k]
        width = width * (4.0 / (pts - 1))
    return best_val


def tau_oracle(m):
    """Coefficient of ergodicity by explicit double loop."""
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    best = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            best = max(best, float(np.abs(m[i] - m[j]).sum()))
    return 0.5 * best


def scrambling_oracle(s):
    """Every row pair shares a column of positive support."""
    s = np.asarray(s, dtype=float)
    n = s.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            if not ((s[i] > 0) & (s[j] > 0)).any():
                return False
    return True
