"""Exact linear algebra over the rationals.

Everything is built on :class:`fractions.Fraction`.  Heavy echelon reductions are
delegated to FLINT (fraction-free integer elimination) when python-flint is
importable; :func:`rref_reference` is a plain Gauss-Jordan implementation that
serves as fallback and as an independent oracle in the tests.
"""
from __future__ import annotations

from dataclasses import dataclass
import os
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

try:
    import flint
except ImportError:  # pragma: no cover - exercised only without python-flint
    flint = None

ZERO = Fraction(0)
ONE = Fraction(1)


def env_cap(name: str, default: int) -> int:
    """Positive integer from the environment; unset or malformed values fall back to the default."""
    try:
        value = int(os.environ.get(name, default))
    except ValueError:
        return default
    return value if value > 0 else default


class AmbientMismatch(ValueError):
    """Two subspaces (or a vector and a subspace) live in different ambient spaces."""


def q(value) -> Fraction:
    """Coerce an int, Fraction or "p/q" string into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty rational")
        return Fraction(text)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def q_str(value: Fraction) -> str:
    value = q(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def vec(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(q(v) for v in values)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v) if a and b), ZERO)


def is_zero_vector(v: Sequence[Fraction]) -> bool:
    return not any(v)


def line_representative(v: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Scale v so that its first nonzero coordinate is 1."""
    for a in v:
        if a:
            return tuple(b / a for b in v)
    raise ValueError("zero vector has no line representative")


# ---------------------------------------------------------------------------
# echelon back ends


def rref_reference(rows: Sequence[Sequence], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form by textbook Gauss-Jordan elimination.

    Returns the nonzero rows and their pivot columns.
    """
    m = [[q(a) for a in row] for row in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = 1 / m[r][c]
        m[r] = [a * inv for a in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def integer_rows(rows: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    """Scale each row by the lcm of its denominators (row space is unchanged)."""
    out = []
    for row in rows:
        den = 1
        for a in row:
            if isinstance(a, Fraction) and a.denominator != 1:
                den = lcm(den, a.denominator)
        out.append([int(a * den) for a in row])
    return out


def _rref_flint(rows, ncols):
    irows = integer_rows(rows)
    mat = flint.fmpz_mat(irows)
    red, den, rank = mat.rref()
    den = int(den)
    entries = [int(a) for a in red.entries()]
    out, pivots = [], []
    for i in range(rank):
        row = entries[i * ncols:(i + 1) * ncols]
        out.append([Fraction(a, den) for a in row])
        pivots.append(next(j for j, a in enumerate(row) if a))
    return out, pivots


def rref(rows: Sequence[Sequence], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Canonical reduced row echelon form of the row space spanned by ``rows``."""
    rows = [[q(a) for a in row] for row in rows]
    rows = [row for row in rows if any(row)]
    if not rows or ncols == 0:
        return [], []
    if flint is None or len(rows) * ncols < 64:
        return rref_reference(rows, ncols)
    return _rref_flint(rows, ncols)


def int_rank(rows: Sequence[Sequence[int]], ncols: int) -> int:
    if not rows or ncols == 0:
        return 0
    if flint is None:
        return len(rref_reference(rows, ncols)[0])
    return flint.fmpz_mat([list(r) for r in rows]).rank()


def rank_of_rows(rows: Sequence[Sequence], ncols: int) -> int:
    rows = [r for r in rows if any(r)]
    if not rows or ncols == 0:
        return 0
    return int_rank(integer_rows([[q(a) for a in r] for r in rows]), ncols)


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class QMatrix:
    rows: int
    cols: int
    data: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if len(self.data) != self.rows or any(len(r) != self.cols for r in self.data):
            raise ValueError("entries length must equal rows x cols")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "QMatrix":
        data = tuple(tuple(q(a) for a in row) for row in rows)
        if cols is None:
            if not data:
                raise ValueError("column count needed for an empty matrix")
            cols = len(data[0])
        return cls(len(data), cols, data)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> "QMatrix":
        return cls.from_rows([[c[i] for c in columns] for i in range(rows)], len(columns))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "QMatrix":
        return cls(rows, cols, tuple((ZERO,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int, scale=1) -> "QMatrix":
        s = q(scale)
        return cls(n, n, tuple(tuple(s if i == j else ZERO for j in range(n)) for i in range(n)))

    @property
    def entries(self) -> tuple[Fraction, ...]:
        return tuple(a for row in self.data for a in row)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(row[j] for row in self.data)

    def columns(self) -> list[tuple[Fraction, ...]]:
        return [self.column(j) for j in range(self.cols)]

    @property
    def T(self) -> "QMatrix":
        return QMatrix(self.cols, self.rows, tuple(zip(*self.data)) if self.rows else tuple(() for _ in range(self.cols)))

    def is_zero(self) -> bool:
        return not any(any(row) for row in self.data)

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        ocols = other.columns()
        data = []
        for row in self.data:
            nz = [(k, a) for k, a in enumerate(row) if a]
            data.append(tuple(sum((a * col[k] for k, a in nz), ZERO) for col in ocols))
        return QMatrix(self.rows, other.cols, tuple(data))

    def apply(self, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        nz = [(k, a) for k, a in enumerate(v) if a]
        return tuple(sum((row[k] * a for k, a in nz), ZERO) for row in self.data)

    def _check_same(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "QMatrix") -> "QMatrix":
        self._check_same(other)
        return QMatrix(self.rows, self.cols, tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.data, other.data)))

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        self._check_same(other)
        return QMatrix(self.rows, self.cols, tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.data, other.data)))

    def __neg__(self) -> "QMatrix":
        return self.scale(-1)

    def scale(self, c) -> "QMatrix":
        c = q(c)
        return QMatrix(self.rows, self.cols, tuple(tuple(c * a for a in r) for r in self.data))

    def hstack(self, other: "QMatrix") -> "QMatrix":
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        return QMatrix(self.rows, self.cols + other.cols, tuple(r + s for r, s in zip(self.data, other.data)))

    def vstack(self, other: "QMatrix") -> "QMatrix":
        if self.cols != other.cols:
            raise ValueError("column count mismatch")
        return QMatrix(self.rows + other.rows, self.cols, self.data + other.data)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "QMatrix":
        return QMatrix(len(rows), len(cols), tuple(tuple(self.data[i][j] for j in cols) for i in rows))

    def rank(self) -> int:
        return rank_of_rows(self.data, self.cols)

    def to_json(self) -> list[list[str]]:
        return [[q_str(a) for a in row] for row in self.data]


def block_matrix(blocks: Sequence[Sequence[QMatrix]]) -> QMatrix:
    """Assemble a block matrix; every block row must have consistent heights."""
    rows = []
    for brow in blocks:
        height = brow[0].rows
        for i in range(height):
            rows.append(tuple(a for b in brow for a in b.data[i]))
    cols = sum(b.cols for b in blocks[0]) if blocks else 0
    return QMatrix(len(rows), cols, tuple(rows))


# ---------------------------------------------------------------------------
# subspaces


@dataclass(frozen=True)
class Subspace:
    """A subspace of Q^ambient_dim stored by its reduced row echelon basis."""

    ambient_dim: int
    basis: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def span(cls, vectors: Iterable[Sequence], ambient_dim: int) -> "Subspace":
        vectors = [vec(v) for v in vectors]
        for v in vectors:
            if len(v) != ambient_dim:
                raise AmbientMismatch(f"vector of length {len(v)} in ambient dimension {ambient_dim}")
        red, _ = rref(vectors, ambient_dim)
        return cls(ambient_dim, tuple(tuple(r) for r in red))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, ())

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(j for j, a in enumerate(r) if a) for r in self.basis)

    def matrix(self) -> QMatrix:
        return QMatrix(self.dim, self.ambient_dim, self.basis)

    def coordinates(self, v: Sequence) -> tuple[Fraction, ...] | None:
        """Coefficients of v in the echelon basis, or None if v is not in the span."""
        v = vec(v)
        if len(v) != self.ambient_dim:
            raise AmbientMismatch("vector length differs from ambient dimension")
        coeffs = tuple(v[p] for p in self.pivots)
        rebuilt = [ZERO] * self.ambient_dim
        for c, row in zip(coeffs, self.basis):
            if c:
                for j, a in enumerate(row):
                    if a:
                        rebuilt[j] += c * a
        return coeffs if tuple(rebuilt) == v else None

    def contains_vector(self, v: Sequence) -> bool:
        return self.coordinates(v) is not None

    def __contains__(self, v) -> bool:
        return self.contains_vector(v)

    def _check(self, other: "Subspace"):
        if self.ambient_dim != other.ambient_dim:
            raise AmbientMismatch(f"ambient dimensions {self.ambient_dim} and {other.ambient_dim} differ")

    def sum(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return Subspace.span(self.basis + other.basis, self.ambient_dim)

    def annihilator(self) -> "Subspace":
        """Orthogonal complement for the standard bilinear form."""
        return kernel(self.matrix())

    def intersect(self, other: "Subspace") -> "Subspace":
        self._check(other)
        constraints = self.annihilator().basis + other.annihilator().basis
        return kernel(QMatrix(len(constraints), self.ambient_dim, constraints))

    def contains(self, other: "Subspace") -> bool:
        self._check(other)
        return all(self.contains_vector(v) for v in other.basis)

    def to_json(self) -> dict:
        return {"ambient_dim": self.ambient_dim, "basis": [[q_str(a) for a in r] for r in self.basis]}


def span(vectors: Iterable[Sequence], ambient_dim: int) -> Subspace:
    return Subspace.span(vectors, ambient_dim)


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    return a.sum(b)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    return a.intersect(b)


def contains(a: Subspace, b: Subspace) -> bool:
    """True iff b is a subspace of a."""
    return a.contains(b)


def kernel(m: QMatrix) -> Subspace:
    """Right null space {x : m x = 0} as a canonical subspace."""
    red, pivots = rref(m.data, m.cols)
    pivot_set = set(pivots)
    free = [j for j in range(m.cols) if j not in pivot_set]
    vectors = []
    for f in free:
        v = [ZERO] * m.cols
        v[f] = ONE
        for row, p in zip(red, pivots):
            if row[f]:
                v[p] = -row[f]
        vectors.append(v)
    return Subspace.span(vectors, m.cols)


def rank(m: QMatrix) -> int:
    return m.rank()


def solve(m: QMatrix, rhs: QMatrix) -> QMatrix | None:
    """Some X with m X = rhs, free variables set to zero; None if inconsistent."""
    if rhs.rows != m.rows:
        raise ValueError("rhs must have as many rows as m")
    if m.rows == 0:
        return QMatrix.zeros(m.cols, rhs.cols)
    aug = [r + s for r, s in zip(m.data, rhs.data)]
    red, pivots = rref(aug, m.cols + rhs.cols)
    if any(p >= m.cols for p in pivots):
        return None
    out = [[ZERO] * rhs.cols for _ in range(m.cols)]
    for row, p in zip(red, pivots):
        out[p] = list(row[m.cols:])
    return QMatrix.from_rows(out, rhs.cols)
