"""Dense two-phase simplex with Bland's rule, plus certificate extraction.

Provides the strict-feasibility test used for metric-infinity contraction
certificates and the Chebyshev-fit LP behind the metric infinity
seminorm.  Problem sizes are desk scale; the tableau is dense and there
is no presolve.
"""

from dataclasses import dataclass

import numpy as np

from . import _backend

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-8
COMP_SLACK_TOL = 1e-6
STRICT_FEAS_THRESHOLD = 1e-9
WITNESS_CLEAN_TOL = 1e-10
FARKAS_CHECK_TOL = 1e-8
DEFAULT_PIVOT_CAP = 100_000

LE, EQ, GE = "<=", "=", ">="


class SimplexError(RuntimeError):
    """Solver failure (iteration cap, singular basis, failed checks)."""

    def __init__(self, message, basis=None):
        super().__init__(message)
        self.basis = None if basis is None else [int(b) for b in basis]


class CertificateError(RuntimeError):
    """A returned certificate failed its arithmetic re-verification."""


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """min objective' x  subject to  a x {<=,=,>=} rhs,  lower <= x <= upper."""

    objective: np.ndarray
    a: np.ndarray
    rhs: np.ndarray
    senses: tuple
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=np.float64)
        a = np.asarray(self.a, dtype=np.float64)
        b = np.asarray(self.rhs, dtype=np.float64)
        lo = np.asarray(self.lower, dtype=np.float64)
        hi = np.asarray(self.upper, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] < 1:
            raise ValueError("constraint matrix must be 2-D with >= 1 row")
        m, n = a.shape
        if c.shape != (n,) or b.shape != (m,) or lo.shape != (n,) or hi.shape != (n,):
            raise ValueError("conformability: objective/rhs/bounds shapes do not match a")
        senses = tuple(self.senses)
        if len(senses) != m or any(s not in (LE, EQ, GE) for s in senses):
            raise ValueError("senses must be one of <=, =, >= per row")
        if not (np.isfinite(c).all() and np.isfinite(a).all() and np.isfinite(b).all()):
            raise ValueError("objective, matrix and rhs must be finite")
        if np.isnan(lo).any() or np.isnan(hi).any() or (lo > hi).any():
            raise ValueError("bounds must satisfy lower <= upper")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "rhs", b)
        object.__setattr__(self, "senses", senses)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def build(cls, objective, a, rhs, senses, lower=None, upper=None):
        a = np.atleast_2d(np.asarray(a, dtype=np.float64))
        n = a.shape[1]
        if lower is None:
            lower = np.zeros(n)
        if upper is None:
            upper = np.full(n, np.inf)
        return cls(objective=objective, a=a, rhs=rhs, senses=tuple(senses),
                   lower=lower, upper=upper)


@dataclass(frozen=True, eq=False)
class LpOutcome:
    """Solve result.

    ``duals`` holds one multiplier per original constraint row.  At an
    optimum they are shadow prices (d objective / d rhs); for an
    infeasible program they are the phase-1 Farkas row multipliers,
    checkable with ``verify_farkas``.
    """

    status: str  # optimal | infeasible | unbounded
    x: np.ndarray | None
    duals: np.ndarray | None
    objective: float | None
    iterations: int


def _zrow(t, basis, cvec):
    """Install reduced costs for cost vector cvec given the current basis."""
    nc = t.shape[1] - 1
    t[-1, :nc] = cvec
    t[-1, nc] = 0.0
    for i, bcol in enumerate(basis):
        cb = cvec[bcol]
        if cb != 0.0:
            t[-1, :] -= cb * t[i, :]


def _pivot(t, basis, r, c):
    t[r] /= t[r, c]
    f = t[:, c].copy()
    f[r] = 0.0
    t -= np.outer(f, t[r])
    t[:, c] = 0.0
    t[r, c] = 1.0
    basis[r] = c


def solve(lp, pivot_cap=DEFAULT_PIVOT_CAP):
    """Two-phase dense simplex with Bland's anti-cycling rule.

    Returns an LpOutcome; raises SimplexError when the pivot cap is hit
    (the message reports the basis) or an optimality check fails.
    """
    a = lp.a
    b = lp.rhs
    m0, nvar = a.shape

    # --- variable transforms to z >= 0 -------------------------------------
    cols = []          # standardized columns over the original rows
    c_std = []
    recover = []       # per original variable
    cap_rows = []      # (std column, upper cap) rows appended below
    rhs_eff = b.astype(np.float64).copy()
    for j in range(nvar):
        lo, hi = lp.lower[j], lp.upper[j]
        if lo == -np.inf and hi == np.inf:
            cols.append(a[:, j].copy())
            c_std.append(lp.objective[j])
            cols.append(-a[:, j])
            c_std.append(-lp.objective[j])
            recover.append(("split", len(cols) - 2, len(cols) - 1))
        elif lo > -np.inf:
            if lo != 0.0:
                rhs_eff -= a[:, j] * lo
            cols.append(a[:, j].copy())
            c_std.append(lp.objective[j])
            recover.append(("shift", len(cols) - 1, lo))
            if hi < np.inf:
                cap_rows.append((len(cols) - 1, hi - lo))
        else:  # lo = -inf, hi finite: mirror x = hi - z
            rhs_eff -= a[:, j] * hi
            cols.append(-a[:, j])
            c_std.append(-lp.objective[j])
            recover.append(("mirror", len(cols) - 1, hi))

    n_struct = len(cols)
    a_std = np.column_stack(cols) if cols else np.zeros((m0, 0))
    if cap_rows:
        extra = np.zeros((len(cap_rows), n_struct))
        for i, (col, _) in enumerate(cap_rows):
            extra[i, col] = 1.0
        a_std = np.vstack([a_std, extra])
        rhs_eff = np.concatenate([rhs_eff, [cap for _, cap in cap_rows]])
    senses = list(lp.senses) + [LE] * len(cap_rows)
    m = a_std.shape[0]
    row_sign = np.ones(m)

    # senses to <= / =, then slacks, then rhs >= 0
    for i in range(m):
        if senses[i] == GE:
            a_std[i] = -a_std[i]
            rhs_eff[i] = -rhs_eff[i]
            row_sign[i] = -row_sign[i]
            senses[i] = LE
    slack_of_row = [-1] * m
    slack_cols = []
    for i in range(m):
        if senses[i] == LE:
            e = np.zeros(m)
            e[i] = 1.0
            slack_of_row[i] = n_struct + len(slack_cols)
            slack_cols.append(e)
    if slack_cols:
        a_std = np.hstack([a_std, np.column_stack(slack_cols)])
    c_std = np.concatenate([c_std, np.zeros(len(slack_cols))])
    for i in range(m):
        if rhs_eff[i] < 0:
            a_std[i] = -a_std[i]
            rhs_eff[i] = -rhs_eff[i]
            row_sign[i] = -row_sign[i]

    # basis: slack where usable, otherwise artificial
    n_cols = a_std.shape[1]
    basis = np.empty(m, dtype=np.int64)
    art_cols = []
    for i in range(m):
        s = slack_of_row[i]
        if s >= 0 and a_std[i, s] > 0.5:
            basis[i] = s
        else:
            e = np.zeros(m)
            e[i] = 1.0
            art_cols.append(e)
            basis[i] = n_cols + len(art_cols) - 1
    if art_cols:
        a_std = np.hstack([a_std, np.column_stack(art_cols)])
    n_total = a_std.shape[1]
    art_start = n_cols

    t = np.empty((m + 1, n_total + 1))
    t[:m, :n_total] = a_std
    t[:m, n_total] = rhs_eff
    a_pristine = a_std.copy()
    iters = 0
    m_std0 = m
    row_ids = np.arange(m)

    if art_cols:
        c1 = np.zeros(n_total)
        c1[art_start:] = 1.0
        _zrow(t, basis, c1)
        status, it = _backend.simplex_loop(t, basis, pivot_cap, PIVOT_TOL)
        iters += it
        if status == 2:
            raise SimplexError(
                f"phase-1 iteration cap {pivot_cap} exceeded", basis=basis)
        if status == 1:
            raise SimplexError("phase 1 reported unbounded; malformed tableau")
        phase1_obj = -t[-1, -1]
        if phase1_obj > FEAS_TOL:
            bmat = a_pristine[:, basis]
            try:
                y = np.linalg.solve(bmat.T, c1[basis])
            except np.linalg.LinAlgError as exc:
                raise SimplexError("singular basis in dual extraction") from exc
            duals = np.zeros(m0)
            duals[:] = (row_sign * y)[:m0]
            return LpOutcome(status="infeasible", x=None, duals=duals,
                             objective=None, iterations=iters)
        # drive artificials out of the basis; drop rows that are redundant
        drop = []
        for r in range(m):
            if basis[r] >= art_start:
                piv_col = -1
                for j in range(n_cols):
                    if abs(t[r, j]) > 1e-9:
                        piv_col = j
                        break
                if piv_col >= 0:
                    _pivot(t, basis, r, piv_col)
                else:
                    drop.append(r)
        if drop:
            keep = np.setdiff1d(np.arange(m), drop)
            t = np.delete(t, drop, axis=0)
            basis = basis[keep]
            a_pristine = a_pristine[keep]
            row_sign = row_sign[keep]
            row_ids = row_ids[keep]
            m = len(keep)
        t = np.delete(t, np.s_[art_start:n_total], axis=1)
        a_pristine = a_pristine[:, :art_start]
        n_total = art_start
        t = np.ascontiguousarray(t)

    _zrow(t, basis, c_std)
    status, it = _backend.simplex_loop(t, basis, pivot_cap, PIVOT_TOL)
    iters += it
    if status == 2:
        raise SimplexError(f"phase-2 iteration cap {pivot_cap} exceeded", basis=basis)
    if status == 1:
        return LpOutcome(status="unbounded", x=None, duals=None,
                         objective=None, iterations=iters)

    # recover primal
    z = np.zeros(n_total)
    z[basis] = t[:m, n_total]
    x = np.zeros(nvar)
    for j, rec in enumerate(recover):
        if rec[0] == "shift":
            x[j] = rec[2] + z[rec[1]]
        elif rec[0] == "mirror":
            x[j] = rec[2] - z[rec[1]]
        else:
            x[j] = z[rec[1]] - z[rec[2]]
    objective = float(lp.objective @ x)

    # duals (shadow prices) for the original rows
    bmat = a_pristine[:, basis]
    try:
        y = np.linalg.solve(bmat.T, c_std[basis])
    except np.linalg.LinAlgError as exc:
        raise SimplexError("singular basis in dual extraction") from exc
    duals_all = np.zeros(m_std0)
    duals_all[row_ids] = row_sign * y
    duals = duals_all[:m0]

    _check_optimal(lp, x, duals)
    return LpOutcome(status="optimal", x=x, duals=duals,
                     objective=objective, iterations=iters)


def _check_optimal(lp, x, duals):
    """Primal feasibility within 1e-8 and complementary slackness within 1e-6."""
    res = lp.a @ x - lp.rhs
    scale = 1.0 + np.abs(lp.rhs)
    for i, s in enumerate(lp.senses):
        if s == LE and res[i] > FEAS_TOL * scale[i]:
            raise SimplexError(f"row {i}: <= violated by {res[i]:.3e}")
        if s == GE and res[i] < -FEAS_TOL * scale[i]:
            raise SimplexError(f"row {i}: >= violated by {-res[i]:.3e}")
        if s == EQ and abs(res[i]) > FEAS_TOL * scale[i]:
            raise SimplexError(f"row {i}: = violated by {abs(res[i]):.3e}")
        if s != EQ and abs(duals[i] * res[i]) > COMP_SLACK_TOL * scale[i]:
            raise SimplexError(
                f"row {i}: complementary slackness violated "
                f"({duals[i]:.3e} * {res[i]:.3e})")
    if (x < lp.lower - FEAS_TOL).any() or (x > lp.upper + FEAS_TOL).any():
        raise SimplexError("bounds violated at reported optimum")


def verify_farkas(lp, duals, tol=FARKAS_CHECK_TOL):
    """Check that row multipliers certify infeasibility of ``lp``.

    With u_i <= 0 on <= rows and u_i >= 0 on >= rows, every feasible x
    satisfies sum_i u_i a_i' x >= u' rhs; the certificate is valid when
    even the box maximum of the left side falls short.
    """
    u = np.asarray(duals, dtype=np.float64)
    for i, s in enumerate(lp.senses):
        if s == LE and u[i] > tol:
            return False
        if s == GE and u[i] < -tol:
            return False
    q = lp.a.T @ u
    need = float(u @ lp.rhs)
    box_max = 0.0
    for j in range(len(q)):
        if abs(q[j]) <= 1e-12:
            continue
        edge = lp.upper[j] if q[j] > 0 else lp.lower[j]
        if not np.isfinite(edge):
            return False
        box_max += q[j] * edge
    return box_max < need - 1e-9 * (1.0 + abs(need))


@dataclass(frozen=True, eq=False)
class StrictFeasibilityResult:
    """Outcome of the strict-feasibility test for A y < 0, y >= 0.

    Feasible: ``witness_y`` satisfies A y <= -margin * 1 with margin > 0.
    Infeasible: ``farkas_x`` is nonnegative, nonzero (unit max entry) and
    satisfies x' A >= -1e-8 entrywise.  Both facts are re-verified here,
    at construction.
    """

    a: np.ndarray
    feasible: bool
    margin: float
    witness_y: np.ndarray | None = None
    farkas_x: np.ndarray | None = None

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.float64)
        object.__setattr__(self, "a", a)
        if self.feasible:
            y = self.witness_y
            if y is None or (y < -1e-12).any():
                raise CertificateError("feasible result requires nonnegative y")
            if not self.margin > 0:
                raise CertificateError("feasible result requires positive margin")
            if (a @ y).max() > -self.margin + 1e-12:
                raise CertificateError("witness does not achieve the claimed margin")
        else:
            x = self.farkas_x
            if x is None or (x < 0).any() or x.max() <= 0:
                raise CertificateError("Farkas vector must be nonnegative and nonzero")
            if (x @ a).min() < -FARKAS_CHECK_TOL:
                raise CertificateError(
                    f"Farkas check failed: min entry of x'A is {(x @ a).min():.3e}")


def strict_feasibility(a, pivot_cap=DEFAULT_PIVOT_CAP):
    """Decide whether A y < 0 has a nonnegative solution, with certificate.

    Solves max s subject to A y <= -s 1, 0 <= y <= 1, 0 <= s <= 1; the
    homogeneity of the system makes the box normalization lossless.
    Feasible iff the optimal s exceeds 1e-9; otherwise the optimal dual
    vector of the A-rows is the Farkas witness.
    """
    a = np.asarray(a, dtype=np.float64)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("strict_feasibility expects a square matrix")
    lp = LinearProgram.build(
        objective=np.concatenate([np.zeros(n), [-1.0]]),
        a=np.hstack([a, np.ones((n, 1))]),
        rhs=np.zeros(n),
        senses=[LE] * n,
        lower=np.zeros(n + 1),
        upper=np.ones(n + 1),
    )
    out = solve(lp, pivot_cap=pivot_cap)
    if out.status != "optimal":
        raise SimplexError(f"strict feasibility LP ended with status {out.status}")
    s_star = -out.objective
    if s_star > STRICT_FEAS_THRESHOLD:
        y = np.maximum(out.x[:n], 0.0)
        margin = float(-(a @ y).max())
        return StrictFeasibilityResult(
            a=a, feasible=True, margin=margin, witness_y=y)
    x = -out.duals
    if x.min() < -FARKAS_CHECK_TOL:
        raise SimplexError("dual vector has the wrong sign for a Farkas witness")
    x = np.maximum(x, 0.0)
    if x.max() <= 0:
        raise SimplexError("degenerate zero dual vector at s* = 0")
    x = x / x.max()
    x[x < WITNESS_CLEAN_TOL] = 0.0
    return StrictFeasibilityResult(
        a=a, feasible=False, margin=max(float(s_star), 0.0), farkas_x=x)


def chebyshev_center_lp(m):
    """LP computing min_c ||M - 1c||_inf (max-row-sum of absolute values).

    Variables are c (free), d_ij >= |m_ij - c_j| and the bound t; rows
    enforce the absolute values and sum_j d_ij <= t per row i.
    """
    m = np.asarray(m, dtype=np.float64)
    n, mm = m.shape
    nv = mm + n * mm + 1

    def d_col(i, j):
        return mm + i * mm + j

    n_rows = 2 * n * mm + n
    a = np.zeros((n_rows, nv))
    rhs = np.zeros(n_rows)
    r = 0
    for i in range(n):
        for j in range(mm):
            a[r, d_col(i, j)] = -1.0
            a[r, j] = -1.0
            rhs[r] = -m[i, j]
            r += 1
            a[r, d_col(i, j)] = -1.0
            a[r, j] = 1.0
            rhs[r] = m[i, j]
            r += 1
    for i in range(n):
        a[r, mm + i * mm: mm + (i + 1) * mm] = 1.0
        a[r, nv - 1] = -1.0
        r += 1
    objective = np.zeros(nv)
    objective[-1] = 1.0
    lower = np.concatenate([np.full(mm, -np.inf), np.zeros(n * mm + 1)])
    upper = np.full(nv, np.inf)
    return LinearProgram.build(objective=objective, a=a, rhs=rhs,
                               senses=[LE] * n_rows, lower=lower, upper=upper)
