"""Matrix classification and contraction certification.

Classifies stochastic matrices (scrambling, positive column, rooted
graph), certifies contraction in the metric and induced infinity
seminorms with checkable witnesses, and packages the built-in 6x6
counterexample verification.
"""

from dataclasses import dataclass

import numpy as np

from . import _backend, lp, seminorms
from .matcore import (
    Matrix,
    StochasticMatrix,
    as_equal_row_sum,
    pattern,
    validate_stochastic,
)

CONTRACTIVITY_TOL = 1e-7


class CertificationError(RuntimeError):
    """Internal inconsistency between a certificate and its cross-check."""


@dataclass(frozen=True)
class MatrixClassReport:
    stochastic: bool
    doubly_stochastic: bool
    scrambling: bool
    positive_column: bool
    positive_diagonal: bool
    rooted: bool

    def __post_init__(self):
        if self.positive_column and not self.scrambling:
            raise CertificationError(
                "a shared positive column implies a scrambling matrix")

    def to_dict(self):
        return {
            "stochastic": self.stochastic,
            "doubly_stochastic": self.doubly_stochastic,
            "scrambling": self.scrambling,
            "positive_column": self.positive_column,
            "positive_diagonal": self.positive_diagonal,
            "rooted": self.rooted,
        }


def _rooted(pos):
    """Some vertex reaches all others in the digraph with arc i->j iff s_ij > 0."""
    n = pos.shape[0]
    adj = [np.nonzero(pos[i])[0] for i in range(n)]
    for root in range(n):
        seen = np.zeros(n, dtype=bool)
        stack = [root]
        seen[root] = True
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(int(w))
        if seen.all():
            return True
    return False


def classify(s):
    """Classification report for a validated square stochastic matrix."""
    if not isinstance(s, StochasticMatrix):
        s = validate_stochastic(s)
    if s.rows != s.cols:
        raise ValueError("classification is defined for square matrices")
    data = s.data
    i, _ = _backend.scrambling_pair(data)
    scrambling = i < 0
    pos = data > 0
    positive_column = bool(pos.all(axis=0).any())
    positive_diagonal = bool(np.diag(data).min() > 0)
    return MatrixClassReport(
        stochastic=True,
        doubly_stochastic=s.doubly_stochastic,
        scrambling=scrambling,
        positive_column=positive_column,
        positive_diagonal=positive_diagonal,
        rooted=_rooted(pos),
    )


@dataclass(frozen=True, eq=False)
class ContractionCertificate:
    """Contraction verdict for one seminorm, with a checkable witness.

    witness is one of a feasible-y dict, a Farkas-x dict, or a sign
    vector dict with the maximizing row pair, depending on the route.
    """

    kind: str
    p: float
    value: float
    contractive: bool
    tolerance: float
    witness: dict | None

    def to_dict(self):
        w = None
        if self.witness is not None:
            w = {k: (v.tolist() if isinstance(v, np.ndarray) else v)
                 for k, v in self.witness.items()}
        return {
            "seminorm": {"kind": self.kind, "p": seminorms.p_label(self.p)},
            "value": self.value,
            "contractive": self.contractive,
            "tolerance": self.tolerance,
            "witness": w,
        }


def feasibility_matrix(s):
    """The strict-feasibility test matrix 11' - 2[[S]] from the support."""
    if not isinstance(s, StochasticMatrix):
        s = validate_stochastic(s)
    g = pattern(s).as_float()
    n = s.rows
    return np.ones((n, n)) - 2.0 * g


def certify_metric_inf(s, pivot_cap=lp.DEFAULT_PIVOT_CAP):
    """Certify |S|_inf < 1 by strict feasibility of (11' - 2[[S]]) y < 0.

    Returns the LP-computed seminorm value with either the feasible-y
    witness or the Farkas-x witness, cross-checked against the value.
    """
    if not isinstance(s, StochasticMatrix):
        s = validate_stochastic(s)
    if s.rows != s.cols:
        raise ValueError("metric-infinity certification needs a square matrix")
    a = feasibility_matrix(s)
    res = lp.strict_feasibility(a, pivot_cap=pivot_cap)
    value = seminorms.metric_pinf(s, pivot_cap=pivot_cap).value
    if res.feasible != (value < 1.0 - CONTRACTIVITY_TOL):
        raise CertificationError(
            f"strict feasibility ({res.feasible}) disagrees with the LP value "
            f"{value!r}")
    if res.feasible:
        witness = {"type": "feasible_y", "y": res.witness_y, "margin": res.margin}
    else:
        witness = {"type": "farkas_x", "x": res.farkas_x}
    return ContractionCertificate(kind="metric", p=seminorms.P_INF, value=value,
                                  contractive=res.feasible,
                                  tolerance=CONTRACTIVITY_TOL, witness=witness)


def certify_induced_inf(m, tol=None):
    """Certify the induced infinity seminorm (= coefficient of ergodicity).

    Contractive iff the value is below 1 - 1e-7; the witness is the
    maximizing row pair with its sign vector, re-verified by evaluating
    |Mz|_inf before the certificate is returned.
    """
    ers = as_equal_row_sum(m) if tol is None else as_equal_row_sum(m, tol)
    value = seminorms.induced_pinf(ers).value
    u, v, z = seminorms.induced_pinf_witness(ers)
    achieved = seminorms.vector_seminorm(ers.data @ z, seminorms.P_INF).value
    if abs(achieved - value) > 1e-9 * (1.0 + value):
        raise CertificationError(
            f"sign-vector witness achieves {achieved!r}, expected {value!r}")
    witness = {"type": "sign_vector", "row_pair": [u, v], "z": z}
    return ContractionCertificate(kind="induced", p=seminorms.P_INF, value=value,
                                  contractive=value < 1.0 - CONTRACTIVITY_TOL,
                                  tolerance=CONTRACTIVITY_TOL, witness=witness)


def certification_report(s, pivot_cap=lp.DEFAULT_PIVOT_CAP):
    """Combined JSON-ready report: classes plus both infinity certificates.

    Shape: {"class": {...}, "certificates": [...], "witnesses": [...]};
    the witnesses list repeats each certificate's witness with the
    seminorm it belongs to, for standalone re-verification.
    """
    if not isinstance(s, StochasticMatrix):
        s = validate_stochastic(s)
    certificates = [certify_metric_inf(s, pivot_cap=pivot_cap),
                    certify_induced_inf(s)]
    docs = [c.to_dict() for c in certificates]
    witnesses = [
        {"seminorm": doc["seminorm"], **doc["witness"]}
        for doc in docs if doc["witness"] is not None
    ]
    return {
        "class": classify(s).to_dict(),
        "certificates": docs,
        "witnesses": witnesses,
    }


# ---------------------------------------------------------------------------
# built-in 6x6 counterexample: a scrambling matrix whose coefficient of
# ergodicity is 2/3 while the metric infinity seminorm is exactly 1.

COUNTEREXAMPLE_PATTERN = (
    (1, 0, 0, 1, 0, 1),
    (1, 1, 1, 0, 0, 0),
    (0, 0, 1, 0, 1, 1),
    (0, 1, 0, 1, 0, 1),
    (1, 0, 0, 1, 1, 0),
    (0, 1, 0, 0, 1, 1),
)

COUNTEREXAMPLE_FARKAS = (0.0, 1.0, 1.0, 1.0, 1.0, 0.0)


def counterexample_matrix(perturb=0.0):
    """The built-in 6x6 matrix, rows uniform over a 3-support pattern.

    With perturb = eps > 0, eps is added to the zero entries and rows
    are renormalized, which makes the matrix strictly positive.
    """
    base = np.asarray(COUNTEREXAMPLE_PATTERN, dtype=np.float64) / 3.0
    if perturb:
        if perturb < 0:
            raise ValueError("perturbation must be nonnegative")
        base = base + perturb * (np.asarray(COUNTEREXAMPLE_PATTERN) == 0)
        base = base / base.sum(axis=1, keepdims=True)
    return validate_stochastic(Matrix(base))


@dataclass(frozen=True)
class CounterexampleStep:
    index: int
    name: str
    passed: bool
    detail: dict

    def to_dict(self):
        return {"index": self.index, "name": self.name, "passed": self.passed,
                "detail": self.detail}


@dataclass(frozen=True)
class CounterexampleReport:
    steps: tuple
    all_passed: bool
    failed_step: int | None

    def to_dict(self):
        return {
            "steps": [s.to_dict() for s in self.steps],
            "all_passed": self.all_passed,
            "failed_step": self.failed_step,
        }


def verify_counterexample(perturb=0.0, tau_threshold=1.0):
    """Run the five counterexample checks in order, stopping at a failure.

    1. the built-in matrix validates as stochastic;
    2. it is scrambling;
    3. its coefficient of ergodicity is below tau_threshold;
    4. the strict-feasibility system is infeasible and the canonical
       vector [0,1,1,1,1,0] verifies as a Farkas witness;
    5. the metric infinity seminorm equals 1 within 1e-7.

    Perturbing the zeros makes step 4 flip to feasible; lowering
    tau_threshold below 2/3 makes step 3 fail.
    """
    steps = []

    def record(name, passed, **detail):
        steps.append(CounterexampleStep(index=len(steps) + 1, name=name,
                                        passed=bool(passed), detail=detail))
        return bool(passed)

    sm = None
    try:
        sm = counterexample_matrix(perturb=perturb)
        ok = record("stochastic", True, perturb=perturb)
    except Exception as exc:  # validation failure is the checked outcome
        ok = record("stochastic", False, error=str(exc))
    if ok:
        report = classify(sm)
        ok = record("scrambling", report.scrambling,
                    positive_column=report.positive_column)
    if ok:
        tau = seminorms.ergodicity_coefficient(sm).value
        ok = record("ergodicity_below_threshold", tau < tau_threshold,
                    value=tau, threshold=tau_threshold)
    if ok:
        a = feasibility_matrix(sm)
        res = lp.strict_feasibility(a)
        detail = {"feasible": res.feasible}
        if res.feasible:
            detail["witness_y"] = res.witness_y.tolist()
            ok = record("strict_feasibility_infeasible", False, **detail)
        else:
            x = np.asarray(COUNTEREXAMPLE_FARKAS)
            canon = float((x @ a).min())
            detail["solver_farkas"] = res.farkas_x.tolist()
            detail["canonical_min_entry"] = canon
            ok = record("strict_feasibility_infeasible",
                        canon >= -lp.FARKAS_CHECK_TOL, **detail)
    if ok:
        value = seminorms.metric_pinf(sm).value
        ok = record("metric_inf_equals_one", abs(value - 1.0) <= 1e-7, value=value)

    failed = None
    for s in steps:
        if not s.passed:
            failed = s.index
            break
    return CounterexampleReport(steps=tuple(steps), all_passed=failed is None,
                                failed_step=failed)
