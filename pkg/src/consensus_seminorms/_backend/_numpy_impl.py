"""NumPy implementations of the hot kernels.

This is the fallback backend used when the compiled extension is not
available (or is disabled via ``CONSEM_BACKEND=numpy``).  Semantics must
match ``_speedups`` bit-for-bit where the algorithms are deterministic
scans; the test suite exercises both backends.
"""

import numpy as np


def pairwise_rowdiff_max(m):
    """Max over row pairs (i<j) of sum_k |m[i,k]-m[j,k]|.

    Returns (value, i, j) for the first maximizing pair in lexicographic
    order.  A single-row matrix gives (0.0, 0, 0).
    """
    n = m.shape[0]
    if n < 2:
        return 0.0, 0, 0
    best = -1.0
    bu = bv = 0
    for i in range(n - 1):
        d = np.abs(m[i + 1:] - m[i]).sum(axis=1)
        j = int(np.argmax(d))
        if d[j] > best:
            best = float(d[j])
            bu, bv = i, i + 1 + j
    return best, bu, bv


def col_split_value(m):
    """Column split value: max over columns of (sum of q largest
    entries - sum of q smallest entries), q = rows // 2.

    Returns (value, argmax column index, first on ties).
    """
    n, cols = m.shape
    q = n // 2
    if q == 0:
        return 0.0, 0
    srt = np.sort(m, axis=0)
    vals = srt[n - q:].sum(axis=0) - srt[:q].sum(axis=0)
    j = int(np.argmax(vals))
    return float(vals[j]), j


def scrambling_pair(s):
    """First pair of rows with no shared positive column, or (-1, -1)."""
    g = (s > 0.0).astype(np.int64)
    c = g @ g.T
    n = s.shape[0]
    for i in range(n - 1):
        z = np.nonzero(c[i, i + 1:] == 0)[0]
        if z.size:
            return i, i + 1 + int(z[0])
    return -1, -1


def sym_eig_max(a, rel_tol=1e-10, rot_cap=100_000):
    """Largest eigenvalue of a symmetric matrix.

    Returns (value, rotations, converged).  This backend delegates to
    LAPACK; the compiled backend runs cyclic Jacobi sweeps under a
    rotation cap, hence the shared (value, rotations, converged) shape.
    """
    try:
        w = np.linalg.eigvalsh(a)
    except np.linalg.LinAlgError:
        return float("nan"), 0, False
    return float(w[-1]), 0, True


def simplex_loop(t, basis, cap, tol):
    """Run Bland-rule simplex pivots on a dense tableau, in place.

    ``t`` has shape (rows+1, cols+1): constraint rows with rhs in the
    last column, reduced costs in the last row, -objective in t[-1,-1].
    ``basis`` maps each constraint row to its basic column.

    Returns (status, iterations) with status 0 = optimal, 1 = unbounded,
    2 = iteration cap hit.
    """
    m = t.shape[0] - 1
    nc = t.shape[1] - 1
    for it in range(cap):
        neg = np.nonzero(t[m, :nc] < -tol)[0]
        if neg.size == 0:
            return 0, it
        enter = int(neg[0])
        col = t[:m, enter]
        pos = col > tol
        if not pos.any():
            return 1, it
        ratios = np.full(m, np.inf)
        ratios[pos] = t[:m, nc][pos] / col[pos]
        best = ratios.min()
        cand = np.nonzero(ratios == best)[0]
        if cand.size > 1:
            leave = int(cand[np.argmin(basis[cand])])
        else:
            leave = int(cand[0])
        piv = t[leave, enter]
        t[leave] /= piv
        f = t[:, enter].copy()
        f[leave] = 0.0
        t -= np.outer(f, t[leave])
        t[:, enter] = 0.0
        t[leave, enter] = 1.0
        basis[leave] = enter
    return 2, cap
