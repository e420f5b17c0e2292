"""Vector and matrix consensus seminorms.

Covers the explicit formulas for the metric seminorms at p = 1, 2, the
Chebyshev LP at p = infinity, the coefficient of ergodicity, the induced
seminorms at p = 2 and infinity, and a Monte-Carlo lower bound for the
defining maximum of the induced family.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _backend, lp
from .matcore import as_equal_row_sum, as_matrix

EXPLICIT_TOL = 1e-9
LP_TOL = 1e-9
EIG_REL_TOL = 1e-10
EIG_ROT_CAP = 100_000

KINDS = ("metric", "induced", "ergodicity", "vector")
METHODS = ("explicit_formula", "lp", "eigensolve", "sampling_lower_bound")

P_INF = math.inf


class EigenSolveError(RuntimeError):
    """Symmetric eigensolver did not converge within its rotation cap."""


def parse_p(p):
    """Normalize a p designator (1, 2, inf in several spellings)."""
    if isinstance(p, str):
        tok = p.strip().lower()
        if tok in ("inf", "infinity", "oo"):
            return P_INF
        p = float(tok)
    p = float(p)
    if p not in (1.0, 2.0, P_INF):
        raise ValueError(f"p must be 1, 2 or inf, got {p!r}")
    return p


def p_label(p):
    return "inf" if p == P_INF else str(int(p))


@dataclass(frozen=True)
class SeminormValue:
    """A computed seminorm with its evaluation method and tolerance.

    With method='sampling_lower_bound' the value is a certified lower
    bound for the seminorm, not an exact evaluation; trials/seed record
    the provenance of the estimate.
    """

    value: float
    kind: str
    p: float
    method: str
    tolerance: float
    trials: int | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        object.__setattr__(self, "p", parse_p(self.p))
        v = float(self.value)
        if v < 0:
            if v < -EXPLICIT_TOL:
                raise ValueError(f"seminorm value must be nonnegative, got {v!r}")
            v = 0.0
        object.__setattr__(self, "value", v)

    def to_dict(self):
        out = {
            "value": self.value,
            "kind": self.kind,
            "p": p_label(self.p),
            "method": self.method,
            "tolerance": self.tolerance,
        }
        if self.method == "sampling_lower_bound":
            out["trials"] = self.trials
            out["seed"] = self.seed
        return out


@dataclass(frozen=True)
class ColumnSplit:
    """Top-q / bottom-q row index sets of one column, q = rows // 2."""

    column: int
    top_indices: tuple
    bottom_indices: tuple
    q: int

    def __post_init__(self):
        top, bot = set(self.top_indices), set(self.bottom_indices)
        if len(top) != self.q or len(bot) != self.q or (top & bot):
            raise ValueError("top/bottom index sets must be disjoint, each of size q")


def _vector_seminorm_value(x, p):
    if p == P_INF:
        return 0.5 * (float(x.max()) - float(x.min()))
    if p == 1.0:
        return float(np.abs(x - np.median(x)).sum())
    return float(np.linalg.norm(x - x.mean()))


def vector_seminorm(x, p):
    """Distance of a vector to the consensus line: min_c ||x - c 1||_p.

    Closed forms: half the spread for p = inf, absolute deviations from
    the median for p = 1, the centered Euclidean norm for p = 2.
    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.size == 0:
        raise ValueError("vector must be nonempty")
    if not np.isfinite(x).all():
        raise ValueError("vector entries must be finite")
    p = parse_p(p)
    return SeminormValue(value=_vector_seminorm_value(x, p), kind="vector", p=p,
                         method="explicit_formula", tolerance=EXPLICIT_TOL)


def batch_vector_seminorm(xs, p):
    """Vector seminorm of each row of a 2-D array (vectorized)."""
    xs = np.asarray(xs, dtype=np.float64)
    p = parse_p(p)
    if p == P_INF:
        return 0.5 * (xs.max(axis=1) - xs.min(axis=1))
    if p == 1.0:
        med = np.median(xs, axis=1, keepdims=True)
        return np.abs(xs - med).sum(axis=1)
    return np.linalg.norm(xs - xs.mean(axis=1, keepdims=True), axis=1)


def metric_p1(m):
    """Metric consensus seminorm at p = 1 via the column-split formula.

    Per column, sum of the q largest entries minus sum of the q smallest
    (q = rows // 2), maximized over columns; equals the max-column-sum
    distance min_c ||M - 1c||_1.
    """
    m = as_matrix(m)
    value, _ = _backend.col_split_value(m.data)
    return SeminormValue(value=max(value, 0.0), kind="metric", p=1,
                         method="explicit_formula", tolerance=EXPLICIT_TOL)


def metric_p1_split(m):
    """ColumnSplit witness for the metric p=1 maximizing column.

    Ties inside the column are broken toward the lowest row index for
    each set, keeping the two sets disjoint.
    """
    m = as_matrix(m)
    _, j = _backend.col_split_value(m.data)
    col = m.data[:, j]
    n = col.shape[0]
    q = n // 2
    asc = np.argsort(col, kind="stable")
    bottom = [int(i) for i in asc[:q]]
    desc = np.argsort(-col, kind="stable")
    top = []
    taken = set(bottom)
    for i in desc:
        if int(i) not in taken:
            top.append(int(i))
            if len(top) == q:
                break
    return ColumnSplit(column=int(j), top_indices=tuple(top),
                       bottom_indices=tuple(bottom), q=q)


def _eig_max(g):
    lam, rotations, ok = _backend.sym_eig_max(g, EIG_REL_TOL, EIG_ROT_CAP)
    if not ok:
        raise EigenSolveError(
            f"eigensolver did not converge within {EIG_ROT_CAP} rotations")
    return lam


def metric_p2(m):
    """Metric consensus seminorm at p = 2: spectral norm of P M.

    P M subtracts the column means, so the value is
    sqrt(lambda_max(M' P M)), computed with the symmetric eigensolver.
    """
    m = as_matrix(m)
    b = m.data - m.data.mean(axis=0)
    lam = _eig_max(b.T @ b)
    return SeminormValue(value=math.sqrt(max(lam, 0.0)), kind="metric", p=2,
                         method="eigensolve", tolerance=EXPLICIT_TOL)


def metric_pinf(m, pivot_cap=lp.DEFAULT_PIVOT_CAP):
    """Metric consensus seminorm at p = infinity by linear programming.

    Solves min t with d_ij >= |m_ij - c_j| and sum_j d_ij <= t per row.
    Simplex failures propagate with their diagnostics.
    """
    m = as_matrix(m)
    program = lp.chebyshev_center_lp(m.data)
    out = lp.solve(program, pivot_cap=pivot_cap)
    if out.status != "optimal":
        raise lp.SimplexError(f"Chebyshev LP ended with status {out.status}")
    return SeminormValue(value=max(out.objective, 0.0), kind="metric", p=P_INF,
                         method="lp", tolerance=LP_TOL)


def ergodicity_coefficient(m):
    """Coefficient of ergodicity: half the max pairwise row l1 distance."""
    m = as_matrix(m)
    raw, _, _ = _backend.pairwise_rowdiff_max(m.data)
    return SeminormValue(value=0.5 * max(raw, 0.0), kind="ergodicity", p=P_INF,
                         method="explicit_formula", tolerance=EXPLICIT_TOL)


def induced_pinf(m, tol=None):
    """Induced consensus seminorm at p = infinity (equal row sums only).

    Identical in value to the coefficient of ergodicity; rejects
    matrices whose row sums are not all equal.
    """
    kwargs = {} if tol is None else {"tol": tol}
    ers = as_equal_row_sum(m, **kwargs)
    raw, _, _ = _backend.pairwise_rowdiff_max(ers.data)
    return SeminormValue(value=0.5 * max(raw, 0.0), kind="induced", p=P_INF,
                         method="explicit_formula", tolerance=EXPLICIT_TOL)


def induced_pinf_witness(m, tol=None):
    """Maximizing row pair (u, v) and sign vector z with |Mz|_inf = value."""
    kwargs = {} if tol is None else {"tol": tol}
    ers = as_equal_row_sum(m, **kwargs)
    _, u, v = _backend.pairwise_rowdiff_max(ers.data)
    z = np.sign(ers.data[u] - ers.data[v])
    return int(u), int(v), z


def induced_p2(m, tol=None):
    """Induced consensus seminorm at p = 2: spectral norm of P M P.

    Valid because M 1 = sigma 1 is annihilated by the centering map;
    on equal-row-sum matrices P M P = P M, so the value coincides with
    the metric p = 2 seminorm.
    """
    kwargs = {} if tol is None else {"tol": tol}
    ers = as_equal_row_sum(m, **kwargs)
    b = ers.data - ers.data.mean(axis=0)
    b = b - b.mean(axis=1, keepdims=True)
    lam = _eig_max(b.T @ b)
    return SeminormValue(value=math.sqrt(max(lam, 0.0)), kind="induced", p=2,
                         method="eigensolve", tolerance=EXPLICIT_TOL)


def induced_sampling_lower_bound(m, p, trials, seed=0, tol=None):
    """Monte-Carlo lower bound for max over |x|_p = 1 of |Mx|_p.

    Draws standard-normal vectors, normalizes each to unit vector
    seminorm (draws on the consensus line are skipped) and returns the
    best |Mx|_p seen.  For fixed seed the estimate is monotone
    nondecreasing in the number of trials.  For n <= 12 the sign vectors
    of all row-pair differences are added to the sample set, which makes
    the bound exact at p = infinity.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    kwargs = {} if tol is None else {"tol": tol}
    ers = as_equal_row_sum(m, **kwargs)
    p = parse_p(p)
    data = ers.data
    rng = np.random.default_rng(seed)
    xs = rng.standard_normal((trials, ers.cols))
    norms = batch_vector_seminorm(xs, p)
    keep = norms > 1e-12
    samples = [xs[keep] / norms[keep, None]]
    if ers.rows <= 12:
        extra = []
        for u in range(ers.rows - 1):
            diff = data[u + 1:] - data[u]
            signs = np.sign(diff)
            extra.append(signs)
            extra.append(-signs)
        if extra:
            zs = np.vstack(extra)
            znorm = batch_vector_seminorm(zs, p)
            ok = znorm > 1e-12
            samples.append(zs[ok] / znorm[ok, None])
    xs = np.vstack(samples)
    best = 0.0
    if xs.shape[0]:
        images = xs @ data.T
        best = float(batch_vector_seminorm(images, p).max())
    return SeminormValue(value=best, kind="induced", p=p,
                         method="sampling_lower_bound", tolerance=EXPLICIT_TOL,
                         trials=int(trials), seed=int(seed))


def matrix_seminorm(m, kind, p, trials=None, seed=0, tol=None):
    """Dispatch a matrix seminorm evaluation by (kind, p).

    kind 'metric' accepts p in {1, 2, inf}; 'induced' has closed forms
    for p in {2, inf} and falls back to the sampling lower bound when
    trials is given; 'ergodicity' (alias 'coe') ignores p.
    """
    p = parse_p(p) if p is not None else P_INF
    if kind in ("ergodicity", "coe"):
        return ergodicity_coefficient(m)
    if kind == "metric":
        if p == 1.0:
            return metric_p1(m)
        if p == 2.0:
            return metric_p2(m)
        return metric_pinf(m)
    if kind == "induced":
        if trials is not None:
            return induced_sampling_lower_bound(m, p, trials, seed=seed, tol=tol)
        if p == 2.0:
            return induced_p2(m, tol=tol)
        if p == P_INF:
            return induced_pinf(m, tol=tol)
        raise ValueError(
            "induced seminorm at p=1 has no closed form; pass trials= for a "
            "sampling lower bound")
    raise ValueError(f"unknown seminorm kind {kind!r}")


def parse_seminorm_token(token):
    """Parse 'metric-inf', 'induced-2', 'coe', ... into (kind, p)."""
    tok = token.strip().lower()
    if tok in ("coe", "ergodicity", "tau"):
        return "ergodicity", P_INF
    if "-" not in tok:
        raise ValueError(f"expected KIND-P like 'metric-inf', got {token!r}")
    kind, _, ptok = tok.partition("-")
    if kind not in ("metric", "induced"):
        raise ValueError(f"unknown seminorm kind {kind!r}")
    return kind, parse_p(ptok)
