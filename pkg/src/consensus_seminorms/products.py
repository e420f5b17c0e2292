"""Infinite-product simulation and convergence-rate certification.

Simulates products M_i ... M_1 drawn from a finite ensemble, records
per-step traces (state, minimizing shift, residual, running-product
seminorms), checks the lambda^i envelope implied by per-step contraction,
and estimates seminorm-equivalence constants by sampling.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import seminorms
from .matcore import (
    EqualRowSumMatrix,
    Matrix,
    StochasticMatrix,
    as_equal_row_sum,
    validate_stochastic,
)

STEP_CAP = 10_000
PRODUCT_TOL = 1e-12
NEAR_CONSENSUS_TOL = 1e-8
ENSEMBLE_ROW_SUM_TOL = 1e-9
TRACE_MATCH_TOL = 1e-9
OVERFLOW_GUARD = 1e100
RATE_RTOL = 1e-9


class ProductLimitError(RuntimeError):
    """Step cap reached before the requested tolerance."""

    def __init__(self, message, achieved):
        super().__init__(message)
        self.achieved = achieved


def _as_sigma_one(m):
    """Accept stochastic or equal-row-sum matrices with sigma = 1."""
    if isinstance(m, StochasticMatrix):
        return m.base
    ers = as_equal_row_sum(m, tol=ENSEMBLE_ROW_SUM_TOL)
    if abs(ers.row_sum - 1.0) > ENSEMBLE_ROW_SUM_TOL:
        raise ValueError(
            f"ensemble members must have row sums equal to one, got "
            f"{ers.row_sum!r}; rate certification is not defined otherwise")
    return ers


@dataclass(frozen=True, eq=False)
class MatrixEnsemble:
    """Finite set of same-size sigma = 1 matrices with its seminorm data.

    lam is the maximum of the chosen seminorm over the members; rate
    certification needs lam < 1, which is checked there rather than at
    construction so non-contractive ensembles can still be simulated.
    """

    members: tuple
    kind: str
    p: float
    lam: float
    member_values: tuple

    @classmethod
    def build(cls, matrices, kind="induced", p=seminorms.P_INF, trials=None, seed=0):
        if not matrices:
            raise ValueError("ensemble must be nonempty")
        members = tuple(_as_sigma_one(m) for m in matrices)
        shape = members[0].data.shape
        if shape[0] != shape[1]:
            raise ValueError("ensemble members must be square")
        if any(m.data.shape != shape for m in members):
            raise ValueError("ensemble members must share one dimension")
        p = seminorms.parse_p(p)
        values = tuple(
            seminorms.matrix_seminorm(m, kind, p, trials=trials, seed=seed).value
            for m in members
        )
        return cls(members=members, kind=kind, p=p, lam=max(values),
                   member_values=values)

    @property
    def n(self):
        return self.members[0].rows

    def __len__(self):
        return len(self.members)


def _minimizing_shift(x, p):
    """Closed-form argmin_r ||x - r 1||_p per p; lower median at p = 1."""
    if p == seminorms.P_INF:
        return 0.5 * (float(x.max()) + float(x.min()))
    if p == 1.0:
        return float(np.sort(x)[(len(x) - 1) // 2])
    return float(x.mean())


def _residual_norm(e, p):
    if p == seminorms.P_INF:
        return float(np.abs(e).max())
    if p == 1.0:
        return float(np.abs(e).sum())
    return float(np.linalg.norm(e))


@dataclass(frozen=True, eq=False)
class SimulationTrace:
    """Per-step records of one matrix-product run.

    The invariant ||e_i||_p = |x_i|_p (residual of the minimizing shift
    equals the vector seminorm of the state) is checked at construction
    for every step.
    """

    kind: str
    p: float
    lam: float
    d: np.ndarray
    indices: tuple
    states: np.ndarray
    shifts: np.ndarray
    residuals: np.ndarray
    state_seminorms: np.ndarray
    product_seminorms: np.ndarray | None
    rank_one_distances: np.ndarray | None
    schedule: str

    def __post_init__(self):
        gap = np.abs(self.residuals - self.state_seminorms)
        tol = TRACE_MATCH_TOL * (1.0 + np.abs(self.state_seminorms))
        if (gap > tol).any():
            i = int(np.argmax(gap - tol))
            raise AssertionError(
                f"trace identity ||e_i|| = |x_i| broken at step {i + 1}: "
                f"{self.residuals[i]!r} vs {self.state_seminorms[i]!r}")

    @property
    def steps(self):
        return len(self.shifts)

    def to_csv(self, path):
        """Columns: step, product_seminorm, residual, r_i, lambda_pow_i."""
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "product_seminorm", "residual", "r_i",
                             "lambda_pow_i"])
            for i in range(self.steps):
                ps = "" if self.product_seminorms is None else \
                    format(self.product_seminorms[i], ".17g")
                writer.writerow([
                    i + 1,
                    ps,
                    format(self.residuals[i], ".17g"),
                    format(self.shifts[i], ".17g"),
                    format(self.lam ** (i + 1), ".17g"),
                ])


def _schedule_indices(schedule, k, steps, seed, indices):
    if indices is not None:
        idx = [int(i) for i in indices]
        if len(idx) != steps or any(i < 0 or i >= k for i in idx):
            raise ValueError("explicit schedule must list a valid index per step")
        return idx, "explicit"
    if schedule == "cyclic":
        return [i % k for i in range(steps)], "cyclic"
    if schedule == "random":
        rng = np.random.default_rng(seed)
        return [int(i) for i in rng.integers(0, k, size=steps)], f"random(seed={seed})"
    raise ValueError(f"unknown schedule {schedule!r}")


def run_product(ensemble, schedule="cyclic", steps=50, d=None, seed=0,
                indices=None, record_matrix_seminorms=True):
    """Iterate x_i = M_i x_{i-1} and record the convergence trace.

    d defaults to the first standard basis vector.  Per step the trace
    records the minimizing shift r_i, the residual ||x_i - r_i 1||_p,
    and (unless disabled) the running-product seminorm of the chosen
    kind together with its metric rank-one distance.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    n = ensemble.n
    if d is None:
        d = np.zeros(n)
        d[0] = 1.0
    d = np.asarray(d, dtype=np.float64).reshape(-1)
    if d.shape != (n,):
        raise ValueError(f"initial vector must have length {n}")
    if not d.any():
        raise ValueError("initial vector must be nonzero")
    idx, schedule_desc = _schedule_indices(schedule, len(ensemble), steps, seed,
                                           indices)
    mats = [m.data for m in ensemble.members]
    p = ensemble.p

    x = d.copy()
    running = np.eye(n)
    states = np.empty((steps, n))
    shifts = np.empty(steps)
    residuals = np.empty(steps)
    state_sems = np.empty(steps)
    prod_sems = np.empty(steps) if record_matrix_seminorms else None
    rank_one = np.empty(steps) if record_matrix_seminorms else None
    for i, mi in enumerate(idx):
        x = mats[mi] @ x
        if np.abs(x).max() > OVERFLOW_GUARD:
            raise OverflowError(
                f"state magnitude exceeded {OVERFLOW_GUARD:g} at step {i + 1}; "
                "the ensemble is not contracting")
        r = _minimizing_shift(x, p)
        e = x - r
        states[i] = x
        shifts[i] = r
        residuals[i] = _residual_norm(e, p)
        state_sems[i] = seminorms._vector_seminorm_value(x, p)
        if record_matrix_seminorms:
            running = mats[mi] @ running
            wrapped = EqualRowSumMatrix(matrix=Matrix(running), row_sum=1.0)
            prod_sems[i] = seminorms.matrix_seminorm(wrapped, ensemble.kind, p).value
            if ensemble.kind == "metric":
                rank_one[i] = prod_sems[i]
            else:
                rank_one[i] = seminorms.matrix_seminorm(wrapped, "metric", p).value
    return SimulationTrace(kind=ensemble.kind, p=p, lam=ensemble.lam, d=d.copy(),
                           indices=tuple(idx), states=states, shifts=shifts,
                           residuals=residuals, state_seminorms=state_sems,
                           product_seminorms=prod_sems,
                           rank_one_distances=rank_one, schedule=schedule_desc)


@dataclass(frozen=True)
class RateReport:
    """Check of the lambda^i envelope over a recorded trace."""

    passed: bool
    lam: float
    steps: int
    first_violation: int | None
    envelope_constant: float
    cauchy_constant: float
    shift_limit: float

    def to_dict(self):
        return {
            "passed": self.passed,
            "lam": self.lam,
            "steps": self.steps,
            "first_violation": self.first_violation,
            "envelope_constant": self.envelope_constant,
            "cauchy_constant": self.cauchy_constant,
            "shift_limit": self.shift_limit,
        }


def certify_rate(trace, lam=None, rtol=RATE_RTOL):
    """Assert |x_i|_p <= lam^i |d|_p per step and fit envelope constants.

    Also fits the smallest C with |r_{i+j} - r_i| <= C lam^i over the
    recorded horizon (the Cauchy envelope of the shifts).  Requires
    lam < 1; raises ValueError otherwise.
    """
    lam = trace.lam if lam is None else float(lam)
    if not lam < 1.0:
        raise ValueError(f"rate certification requires lambda < 1, got {lam!r}")
    d0 = seminorms._vector_seminorm_value(trace.d, trace.p)
    steps = trace.steps
    first = None
    env = 0.0
    for i in range(steps):
        bound = (lam ** (i + 1)) * d0
        if trace.state_seminorms[i] > bound * (1.0 + rtol) + 1e-15:
            first = i + 1
            break
        if bound > 0:
            env = max(env, trace.state_seminorms[i] / bound)
    cauchy = 0.0
    r = trace.shifts
    for i in range(steps):
        tail = np.abs(r[i + 1:] - r[i]).max() if i + 1 < steps else 0.0
        cauchy = max(cauchy, tail / lam ** (i + 1))
    return RateReport(passed=first is None, lam=lam, steps=steps,
                      first_violation=first, envelope_constant=env,
                      cauchy_constant=float(cauchy),
                      shift_limit=float(r[-1]) if steps else 0.0)


def product_limit(ensemble, schedule="cyclic", tol=PRODUCT_TOL, seed=0,
                  step_cap=STEP_CAP, indices=None):
    """Multiply until the metric seminorm of the product drops below tol.

    Returns (limit Matrix, consensus row c, steps taken).  The rows of
    the limit agree within a small multiple of tol and c sums to the
    sigma-product (= 1 for these ensembles).
    """
    n = ensemble.n
    running = np.eye(n)
    k = len(ensemble)
    mats = [m.data for m in ensemble.members]
    if indices is not None:
        order = list(indices)
    rng = np.random.default_rng(seed)
    achieved = math.inf
    for i in range(step_cap):
        if indices is not None:
            if i >= len(order):
                break
            mi = order[i]
        elif schedule == "cyclic":
            mi = i % k
        elif schedule == "random":
            mi = int(rng.integers(0, k))
        else:
            raise ValueError(f"unknown schedule {schedule!r}")
        running = mats[mi] @ running
        wrapped = EqualRowSumMatrix(matrix=Matrix(running), row_sum=1.0)
        achieved = seminorms.matrix_seminorm(wrapped, "metric", ensemble.p).value
        if achieved < tol:
            c = running[0].copy()
            spread = np.abs(running - c).max()
            if spread > 4.0 * tol + 1e-15:
                raise ProductLimitError(
                    f"rows of the limit disagree by {spread:.3e}", achieved)
            return Matrix(running), c, i + 1
    raise ProductLimitError(
        f"step cap {step_cap} reached; achieved seminorm {achieved:.3e} "
        f"(target {tol:g})", achieved)


# ---------------------------------------------------------------------------
# random matrix generation used by the estimators and the test suites


def random_stochastic(rng, n, m=None, density=1.0, dist="uniform"):
    """Random stochastic matrix: nonnegative rows normalized to sum 1.

    density < 1 zeroes entries at random while keeping at least one
    positive entry per row.
    """
    m = n if m is None else m
    if dist == "uniform":
        a = rng.uniform(0.0, 1.0, size=(n, m))
    elif dist == "exponential":
        a = rng.exponential(1.0, size=(n, m))
    else:
        raise ValueError(f"unknown dist {dist!r}")
    if density < 1.0:
        mask = rng.uniform(size=(n, m)) < density
        for i in range(n):
            if not mask[i].any():
                mask[i, rng.integers(0, m)] = True
        a = a * mask
        a[a.sum(axis=1) == 0, 0] = 1.0
    a = a / a.sum(axis=1, keepdims=True)
    return validate_stochastic(Matrix(a))


def random_equal_row_sum(rng, n, m=None, sigma=1.0):
    """Gaussian matrix plus a rank-one correction fixing all row sums."""
    m = n if m is None else m
    g = rng.standard_normal((n, m))
    g = g - np.outer((g.sum(axis=1) - sigma) / m, np.ones(m))
    return EqualRowSumMatrix.from_matrix(Matrix(g), tol=1e-9)


def random_doubly_stochastic(rng, n, contributions=4, factors=2):
    """Product of random convex combinations of permutation matrices."""
    out = np.eye(n)
    for _ in range(factors):
        weights = rng.dirichlet(np.ones(contributions))
        combo = np.zeros((n, n))
        for w in weights:
            perm = rng.permutation(n)
            combo[np.arange(n), perm] += w
        out = out @ combo
    return validate_stochastic(Matrix(out), tol=1e-9)


def random_scrambling(rng, n, density=0.5, floor=0.05):
    """Random scrambling matrix: sparse rows sharing one positive column."""
    s = random_stochastic(rng, n, density=density)
    a = s.data.copy()
    j = int(rng.integers(0, n))
    a[:, j] = np.maximum(a[:, j], floor)
    a = a / a.sum(axis=1, keepdims=True)
    return validate_stochastic(Matrix(a), tol=1e-9)


@dataclass(frozen=True)
class EquivalenceEstimate:
    """Sampled extremes of value_b / value_a over random sigma=1 matrices."""

    c_m_hat: float
    c_M_hat: float
    n: int
    samples: int
    seed: int
    kind_a: str
    p_a: float
    kind_b: str
    p_b: float

    def to_dict(self):
        return {
            "c_m_hat": self.c_m_hat,
            "c_M_hat": self.c_M_hat,
            "n": self.n,
            "samples": self.samples,
            "seed": self.seed,
            "a": {"kind": self.kind_a, "p": seminorms.p_label(self.p_a)},
            "b": {"kind": self.kind_b, "p": seminorms.p_label(self.p_b)},
        }


def ratio_extremes(matrices, kind_a, p_a, kind_b, p_b):
    """(min, max) of value_b / value_a over the given matrices."""
    ratios = []
    for m in matrices:
        va = seminorms.matrix_seminorm(m, kind_a, p_a).value
        if va <= NEAR_CONSENSUS_TOL:
            continue
        vb = seminorms.matrix_seminorm(m, kind_b, p_b).value
        ratios.append(vb / va)
    if not ratios:
        raise ValueError("all matrices were near consensus; nothing to compare")
    return min(ratios), max(ratios)


def estimate_equivalence(kind_a, p_a, kind_b, p_b, n=5, samples=1000, seed=0):
    """Inner estimates of the equivalence constants between two seminorms.

    Draws random equal-row-sum matrices (near-consensus draws with
    value_a <= 1e-8 are rejected) and returns the observed extremes of
    value_b / value_a; these bracket inward the true constants.
    """
    if samples < 2:
        raise ValueError("samples must be >= 2")
    p_a = seminorms.parse_p(p_a)
    p_b = seminorms.parse_p(p_b)
    rng = np.random.default_rng(seed)
    lo, hi = math.inf, -math.inf
    accepted = 0
    while accepted < samples:
        m = random_equal_row_sum(rng, n)
        va = seminorms.matrix_seminorm(m, kind_a, p_a).value
        if va <= NEAR_CONSENSUS_TOL:
            continue
        vb = seminorms.matrix_seminorm(m, kind_b, p_b).value
        ratio = vb / va
        lo = min(lo, ratio)
        hi = max(hi, ratio)
        accepted += 1
    return EquivalenceEstimate(c_m_hat=lo, c_M_hat=hi, n=n, samples=samples,
                               seed=seed, kind_a=kind_a, p_a=p_a, kind_b=kind_b,
                               p_b=p_b)
