"""Dense matrix carriers, validated matrix classes and centering projections.

Everything is immutable after construction: the wrapped ndarrays are
marked read-only, so instances are safe to share across threads.
"""

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

VALIDATION_TOL = 1e-12


class MatrixValidationError(ValueError):
    """A matrix failed a class validation (nonnegativity, row sums, ...)."""


class MatrixParseError(ValueError):
    """A matrix file or literal could not be parsed."""


def _freeze(a):
    a = np.array(a, dtype=np.float64, order="C", copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Matrix:
    """Dense real matrix, row-major, finite entries."""

    data: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.data, dtype=np.float64)
        if a.ndim != 2:
            raise MatrixValidationError(f"expected a 2-D array, got ndim={a.ndim}")
        if a.shape[0] < 1 or a.shape[1] < 1:
            raise MatrixValidationError(f"empty matrix shape {a.shape}")
        if not np.isfinite(a).all():
            bad = np.argwhere(~np.isfinite(a))[0]
            raise MatrixValidationError(
                f"non-finite entry at row {bad[0]}, column {bad[1]}"
            )
        object.__setattr__(self, "data", _freeze(a))

    @classmethod
    def from_rows(cls, rows):
        return cls(np.asarray(rows, dtype=np.float64))

    @property
    def rows(self):
        return self.data.shape[0]

    @property
    def cols(self):
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols})"


def as_matrix(m):
    """Coerce a Matrix, validated wrapper, or array-like to Matrix."""
    if isinstance(m, Matrix):
        return m
    if isinstance(m, (EqualRowSumMatrix, StochasticMatrix)):
        return m.matrix
    return Matrix(np.asarray(m, dtype=np.float64))


@dataclass(frozen=True, eq=False)
class EqualRowSumMatrix:
    """Matrix whose rows all sum to the same value sigma."""

    matrix: Matrix
    row_sum: float

    def __post_init__(self):
        sums = self.matrix.data.sum(axis=1)
        dev = np.abs(sums - self.row_sum).max()
        if not dev <= 1e-6:
            raise MatrixValidationError(
                f"row sums deviate from sigma={self.row_sum} by {dev:.3e}"
            )

    @classmethod
    def from_matrix(cls, m, tol=VALIDATION_TOL):
        m = as_matrix(m)
        sigma = equal_row_sum(m, tol)
        if sigma is None:
            sums = m.data.sum(axis=1)
            i = int(np.argmax(np.abs(sums - np.mean(sums))))
            raise MatrixValidationError(
                f"row sums are not all equal within tol={tol:g}: "
                f"row {i} sums to {sums[i]!r}, mean is {np.mean(sums)!r}"
            )
        return cls(matrix=m, row_sum=sigma)

    @property
    def data(self):
        return self.matrix.data

    @property
    def rows(self):
        return self.matrix.rows

    @property
    def cols(self):
        return self.matrix.cols


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """Nonnegative matrix with unit row sums."""

    base: EqualRowSumMatrix
    doubly_stochastic: bool = False

    @property
    def matrix(self):
        return self.base.matrix

    @property
    def data(self):
        return self.base.data

    @property
    def rows(self):
        return self.base.rows

    @property
    def cols(self):
        return self.base.cols


def validate_stochastic(m, tol=VALIDATION_TOL):
    """Validate nonnegativity and unit row sums; wrap as StochasticMatrix.

    Entries in [-tol, 0) are clamped to 0 so that text round-trips of
    values like 1/3 survive validation and pattern extraction.  The
    first violating row/entry is reported with its deviation.
    """
    m = as_matrix(m)
    a = m.data
    for i in range(m.rows):
        j = int(np.argmin(a[i]))
        if a[i, j] < -tol:
            raise MatrixValidationError(
                f"negative entry at row {i}, column {j}: "
                f"{a[i, j]!r} (deviation {-a[i, j]:.3e} > tol {tol:g})"
            )
    clamped = np.where((a < 0) & (a >= -tol), 0.0, a)
    sums = clamped.sum(axis=1)
    for i in range(m.rows):
        if abs(sums[i] - 1.0) > tol:
            raise MatrixValidationError(
                f"row {i} sums to {sums[i]!r} "
                f"(deviation {abs(sums[i] - 1.0):.3e} > tol {tol:g})"
            )
    col_ok = bool(np.abs(clamped.sum(axis=0) - 1.0).max() <= tol) if m.rows == m.cols else False
    base = EqualRowSumMatrix(matrix=Matrix(clamped), row_sum=1.0)
    return StochasticMatrix(base=base, doubly_stochastic=col_ok)


def as_equal_row_sum(m, tol=VALIDATION_TOL):
    """Coerce to EqualRowSumMatrix; rejects unequal row sums."""
    if isinstance(m, EqualRowSumMatrix):
        return m
    if isinstance(m, StochasticMatrix):
        return m.base
    return EqualRowSumMatrix.from_matrix(m, tol)


@dataclass(frozen=True, eq=False)
class PatternMatrix:
    """Boolean support pattern of a matrix."""

    bits: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bits, dtype=bool)
        if b.ndim != 2:
            raise MatrixValidationError("pattern must be 2-D")
        b = b.copy()
        b.setflags(write=False)
        object.__setattr__(self, "bits", b)

    @property
    def rows(self):
        return self.bits.shape[0]

    @property
    def cols(self):
        return self.bits.shape[1]

    def as_float(self):
        return self.bits.astype(np.float64)


def pattern(m, zero_tol=0.0):
    """Support pattern: bits[i][j] iff |m_ij| > zero_tol (default exact 0)."""
    m = as_matrix(m)
    return PatternMatrix(bits=np.abs(m.data) > zero_tol)


def row_sums(m):
    """Per-row sums as a 1-D array."""
    return as_matrix(m).data.sum(axis=1)


def equal_row_sum(m, tol=VALIDATION_TOL):
    """Common row sum sigma if all rows agree within tol, else None."""
    sums = row_sums(m)
    sigma = float(np.mean(sums))
    if np.abs(sums - sigma).max() <= tol:
        return sigma
    return None


@dataclass(frozen=True, eq=False)
class CenteringProjection:
    """Idempotent centering map used by the p=2 formulas.

    form='orthogonal' stores P = I - (1/n) 11' (projection onto the
    complement of span 1, so P @ ones = 0).  form='onto_consensus'
    stores an idempotent with image span 1 (P @ ones = ones); the
    orthogonal form's complement I - P is one such projection.
    """

    n: int
    form: str
    matrix: Matrix

    def __post_init__(self):
        if self.form not in ("orthogonal", "onto_consensus"):
            raise MatrixValidationError(f"unknown projection form {self.form!r}")
        p = self.matrix.data
        if p.shape != (self.n, self.n):
            raise MatrixValidationError("projection shape mismatch")
        if np.abs(p @ p - p).max() > 1e-12:
            raise MatrixValidationError("projection is not idempotent within 1e-12")
        ones = np.ones(self.n)
        image = p @ ones
        if self.form == "orthogonal":
            if np.abs(image).max() > 1e-12:
                raise MatrixValidationError("orthogonal form must annihilate ones")
        else:
            if np.abs(image - ones).max() > 1e-12:
                raise MatrixValidationError("onto form must fix ones")

    @property
    def data(self):
        return self.matrix.data

    def complement(self):
        """I - P, the projection with the opposite orientation."""
        comp = np.eye(self.n) - self.data
        form = "onto_consensus" if self.form == "orthogonal" else "orthogonal"
        return CenteringProjection(n=self.n, form=form, matrix=Matrix(comp))


def centering(n):
    """Orthogonal centering projection P = I - (1/n) 11'."""
    if n < 1:
        raise MatrixValidationError("dimension must be >= 1")
    p = np.eye(n) - np.full((n, n), 1.0 / n)
    return CenteringProjection(n=n, form="orthogonal", matrix=Matrix(p))


def consensus_projector(n, weights=None):
    """Idempotent projection onto span 1: P = 1 w' with w summing to 1."""
    if weights is None:
        weights = np.full(n, 1.0 / n)
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (n,) or abs(w.sum() - 1.0) > 1e-12:
        raise MatrixValidationError("weights must be length n and sum to 1")
    p = np.outer(np.ones(n), w)
    return CenteringProjection(n=n, form="onto_consensus", matrix=Matrix(p))


# ---------------------------------------------------------------------------
# file formats: CSV (one row per line) and JSON {"rows": [[...], ...]}.
# Rational shorthand like "1/3" is accepted in both and parsed to the
# nearest double.


def _parse_entry(tok, row, col):
    tok = str(tok).strip()
    try:
        if "/" in tok:
            return float(Fraction(tok))
        return float(tok)
    except (ValueError, ZeroDivisionError) as exc:
        raise MatrixParseError(
            f"row {row}, column {col}: cannot parse entry {tok!r}"
        ) from exc


def loads_csv(text):
    rows = []
    for lineno, line in enumerate(text.splitlines()):
        if not line.strip():
            continue
        rows.append(
            [_parse_entry(tok, len(rows), j) for j, tok in enumerate(line.split(","))]
        )
    if not rows:
        raise MatrixParseError("no rows found")
    width = len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            raise MatrixParseError(f"row {i} has {len(r)} entries, expected {width}")
    return Matrix.from_rows(rows)


def loads_json(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "rows" not in doc:
        raise MatrixParseError('JSON matrix must be an object with a "rows" key')
    rows = doc["rows"]
    if not isinstance(rows, list) or not rows:
        raise MatrixParseError('"rows" must be a nonempty list of lists')
    parsed = []
    for i, r in enumerate(rows):
        if not isinstance(r, list):
            raise MatrixParseError(f"row {i} is not a list")
        parsed.append([_parse_entry(tok, i, j) for j, tok in enumerate(r)])
    width = len(parsed[0])
    for i, r in enumerate(parsed):
        if len(r) != width:
            raise MatrixParseError(f"row {i} has {len(r)} entries, expected {width}")
    return Matrix.from_rows(parsed)


def load_matrix(path):
    """Read a matrix from a CSV or JSON file (sniffed by content)."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return loads_json(text)
    return loads_csv(text)


def save_matrix_csv(m, path):
    """Write CSV with 17 significant digits so re-reading is exact."""
    m = as_matrix(m)
    with open(path, "w", encoding="utf-8") as fh:
        for row in m.data:
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")


def save_matrix_json(m, path):
    m = as_matrix(m)
    doc = {"rows": [[float(v) for v in row] for row in m.data]}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")
