# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the per-call hot paths: pairwise row scans,
column splits, the Jacobi eigensolver and the simplex pivot loop.

Each function mirrors a NumPy twin in ``_numpy_impl``; keep the scan
orders and tie-breaking identical when editing either side.
"""

from libc.math cimport fabs, sqrt
from libc.stdlib cimport free, malloc, qsort


cpdef tuple pairwise_rowdiff_max(const double[:, ::1] m):
    """Max over row pairs (i<j) of sum_k |m[i,k]-m[j,k]|, with arg pair."""
    cdef Py_ssize_t n = m.shape[0]
    cdef Py_ssize_t cols = m.shape[1]
    cdef Py_ssize_t i, j, k, bu = 0, bv = 0
    cdef double best = -1.0, s
    if n < 2:
        return (0.0, 0, 0)
    for i in range(n - 1):
        for j in range(i + 1, n):
            s = 0.0
            for k in range(cols):
                s += fabs(m[i, k] - m[j, k])
            if s > best:
                best = s
                bu = i
                bv = j
    return (best, bu, bv)


cdef int _cmp_double(const void* pa, const void* pb) noexcept nogil:
    cdef double a = (<const double*> pa)[0]
    cdef double b = (<const double*> pb)[0]
    if a < b:
        return -1
    elif a > b:
        return 1
    return 0


cpdef tuple col_split_value(const double[:, ::1] m):
    """Max over columns of (sum of q largest - sum of q smallest), q = n//2."""
    cdef Py_ssize_t n = m.shape[0]
    cdef Py_ssize_t cols = m.shape[1]
    cdef Py_ssize_t q = n // 2
    cdef Py_ssize_t i, j, bj = 0
    cdef double best = -1.0, s
    cdef double* buf
    if q == 0:
        return (0.0, 0)
    buf = <double*> malloc(n * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    try:
        for j in range(cols):
            for i in range(n):
                buf[i] = m[i, j]
            qsort(buf, n, sizeof(double), _cmp_double)
            s = 0.0
            for i in range(n - q, n):
                s += buf[i]
            for i in range(q):
                s -= buf[i]
            if s > best:
                best = s
                bj = j
    finally:
        free(buf)
    return (best, bj)


cpdef tuple scrambling_pair(const double[:, ::1] s):
    """First pair of rows with no shared positive column, or (-1, -1)."""
    cdef Py_ssize_t n = s.shape[0]
    cdef Py_ssize_t cols = s.shape[1]
    cdef Py_ssize_t i, j, k
    cdef bint share
    for i in range(n - 1):
        for j in range(i + 1, n):
            share = False
            for k in range(cols):
                if s[i, k] > 0.0 and s[j, k] > 0.0:
                    share = True
                    break
            if not share:
                return (i, j)
    return (-1, -1)


cpdef tuple sym_eig_max(double[:, ::1] a, double rel_tol=1e-10, long rot_cap=100000):
    """Largest eigenvalue of a symmetric matrix by cyclic Jacobi sweeps.

    Mutates ``a`` (pass a copy).  Returns (value, rotations, converged);
    converged is False when the rotation cap was hit before the
    off-diagonal mass fell below rel_tol * ||A||_F.
    """
    cdef Py_ssize_t k = a.shape[0]
    cdef Py_ssize_t p, q, r
    cdef long rot = 0
    cdef double norm_f = 0.0, off, thresh
    cdef double app, aqq, apq, theta, t, c, s, tau, arp, arq, lam
    if k == 1:
        return (a[0, 0], 0, True)
    for p in range(k):
        for q in range(k):
            norm_f += a[p, q] * a[p, q]
    norm_f = sqrt(norm_f)
    thresh = rel_tol * norm_f
    while True:
        off = 0.0
        for p in range(k - 1):
            for q in range(p + 1, k):
                off += 2.0 * a[p, q] * a[p, q]
        off = sqrt(off)
        if off <= thresh:
            break
        if rot >= rot_cap:
            return (0.0, rot, False)
        for p in range(k - 1):
            for q in range(p + 1, k):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + sqrt(theta * theta + 1.0))
                else:
                    t = 1.0 / (theta - sqrt(theta * theta + 1.0))
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for r in range(k):
                    if r == p or r == q:
                        continue
                    arp = a[r, p]
                    arq = a[r, q]
                    a[r, p] = arp - s * (arq + tau * arp)
                    a[p, r] = a[r, p]
                    a[r, q] = arq + s * (arp - tau * arq)
                    a[q, r] = a[r, q]
                rot += 1
                if rot >= rot_cap:
                    break
            if rot >= rot_cap:
                break
    lam = a[0, 0]
    for p in range(1, k):
        if a[p, p] > lam:
            lam = a[p, p]
    return (lam, rot, True)


cpdef tuple simplex_loop(double[:, ::1] t, long[::1] basis, long cap, double tol):
    """Bland-rule simplex pivots on a dense tableau, in place.

    Layout matches the NumPy twin: constraint rows with rhs in the last
    column, reduced costs in the last row.  Returns (status, iterations)
    with 0 = optimal, 1 = unbounded, 2 = cap hit.
    """
    cdef Py_ssize_t m = t.shape[0] - 1
    cdef Py_ssize_t nc = t.shape[1] - 1
    cdef Py_ssize_t i, j, k, enter, leave
    cdef long it
    cdef double piv, ratio, best_ratio, factor
    for it in range(cap):
        enter = -1
        for j in range(nc):
            if t[m, j] < -tol:
                enter = j
                break
        if enter == -1:
            return (0, it)
        leave = -1
        best_ratio = 0.0
        for i in range(m):
            piv = t[i, enter]
            if piv > tol:
                ratio = t[i, nc] / piv
                if leave == -1 or ratio < best_ratio or (
                    ratio == best_ratio and basis[i] < basis[leave]
                ):
                    leave = i
                    best_ratio = ratio
        if leave == -1:
            return (1, it)
        piv = t[leave, enter]
        for k in range(nc + 1):
            t[leave, k] /= piv
        for i in range(m + 1):
            if i == leave:
                continue
            factor = t[i, enter]
            if factor != 0.0:
                for k in range(nc + 1):
                    t[i, k] -= factor * t[leave, k]
                t[i, enter] = 0.0
        t[leave, enter] = 1.0
        basis[leave] = enter
    return (2, cap)
