"""Exact linear algebra over the rationals.

Symmetric matrices with upper-triangular storage, matrix rank, and canonical
subspaces (image, kernel, orthogonal complement, sums and intersections).
All arithmetic uses ``fractions.Fraction``; no floating point appears
anywhere in this module.  Subspace bases are kept in reduced row echelon
form, so two equal subspaces have identical representations and compare
equal with ``==``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import FormatError, PreconditionError

__all__ = [
    "SymMat",
    "Subspace",
    "rank",
    "image",
    "kernel",
    "perp",
    "subspace_sum",
    "subspace_intersection_dim",
    "line_contained",
    "scalar_from_literal",
    "scalar_to_literal",
    "matrix_from_literal",
    "matrix_to_literal",
]

Vector = tuple[Fraction, ...]

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _as_fraction(value: int | Fraction) -> Fraction:
    # floats are rejected on purpose; exactness is not negotiable here
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    raise TypeError(f"expected int or Fraction, got {type(value).__name__}")


@dataclass(frozen=True)
class SymMat:
    """Immutable symmetric n-by-n matrix over the rationals.

    Only the upper triangle is stored (row-major), so symmetry holds by
    construction and cannot be violated by any operation.
    """

    n: int
    upper: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("matrix dimension must be positive")
        expected = self.n * (self.n + 1) // 2
        if len(self.upper) != expected:
            raise ValueError(
                f"upper triangle of a {self.n}x{self.n} matrix needs "
                f"{expected} entries, got {len(self.upper)}"
            )

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "SymMat":
        return cls(n, (_ZERO,) * (n * (n + 1) // 2))

    @classmethod
    def from_upper(cls, n: int, entries: Iterable[int | Fraction]) -> "SymMat":
        return cls(n, tuple(_as_fraction(e) for e in entries))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int | Fraction]]) -> "SymMat":
        n = len(rows)
        if n == 0 or any(len(row) != n for row in rows):
            raise ValueError("expected a non-empty square array of rows")
        mat = [[_as_fraction(x) for x in row] for row in rows]
        for i in range(n):
            for j in range(i + 1, n):
                if mat[i][j] != mat[j][i]:
                    raise ValueError(
                        f"not symmetric: entry ({i},{j}) = {mat[i][j]} but "
                        f"({j},{i}) = {mat[j][i]}"
                    )
        upper = tuple(mat[i][j] for i in range(n) for j in range(i, n))
        return cls(n, upper)

    @classmethod
    def diag(cls, values: Sequence[int | Fraction]) -> "SymMat":
        n = len(values)
        vals = [_as_fraction(v) for v in values]
        upper = tuple(
            vals[i] if i == j else _ZERO for i in range(n) for j in range(i, n)
        )
        return cls(n, upper)

    @classmethod
    def outer(cls, v: Sequence[int | Fraction], coeff: int | Fraction = 1) -> "SymMat":
        """c * v v^T: the generic symmetric matrix of rank at most one."""
        n = len(v)
        vec = [_as_fraction(x) for x in v]
        c = _as_fraction(coeff)
        upper = tuple(c * vec[i] * vec[j] for i in range(n) for j in range(i, n))
        return cls(n, upper)

    # -- access ------------------------------------------------------------

    def _offset(self, i: int, j: int) -> int:
        # caller guarantees i <= j
        return i * self.n - (i * (i - 1)) // 2 + (j - i)

    def entry(self, i: int, j: int) -> Fraction:
        if i > j:
            i, j = j, i
        return self.upper[self._offset(i, j)]

    def row(self, i: int) -> Vector:
        return tuple(self.entry(i, j) for j in range(self.n))

    def rows(self) -> list[Vector]:
        return [self.row(i) for i in range(self.n)]

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.upper)

    # -- arithmetic (closed and exact) --------------------------------------

    def _check_dim(self, other: "SymMat") -> None:
        if self.n != other.n:
            raise PreconditionError(
                f"dimension mismatch: {self.n} vs {other.n}"
            )

    def __add__(self, other: "SymMat") -> "SymMat":
        self._check_dim(other)
        return SymMat(self.n, tuple(a + b for a, b in zip(self.upper, other.upper)))

    def __sub__(self, other: "SymMat") -> "SymMat":
        self._check_dim(other)
        return SymMat(self.n, tuple(a - b for a, b in zip(self.upper, other.upper)))

    def __neg__(self) -> "SymMat":
        return SymMat(self.n, tuple(-a for a in self.upper))

    def scale(self, c: int | Fraction) -> "SymMat":
        cf = _as_fraction(c)
        if cf == 0:
            return SymMat.zero(self.n)
        return SymMat(self.n, tuple(cf * a for a in self.upper))

    def __repr__(self) -> str:  # compact, useful in test failures
        body = "; ".join(
            " ".join(str(self.entry(i, j)) for j in range(self.n))
            for i in range(self.n)
        )
        return f"SymMat[{body}]"


# -- row reduction ----------------------------------------------------------


def _rref(
    rows: Iterable[Sequence[Fraction]], width: int
) -> tuple[list[Vector], tuple[int, ...]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    mat = [list(row) for row in rows]
    pivots: list[int] = []
    r = 0
    for c in range(width):
        pivot_row = None
        for i in range(r, len(mat)):
            if mat[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        mat[r], mat[pivot_row] = mat[pivot_row], mat[r]
        lead = mat[r][c]
        if lead != 1:
            mat[r] = [x / lead for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                row_r = mat[r]
                mat[i] = [a - f * b for a, b in zip(mat[i], row_r)]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return [tuple(row) for row in mat[:r]], tuple(pivots)


def _nullspace_basis(width: int, rows: Iterable[Sequence[Fraction]]) -> list[Vector]:
    """Basis of {v : R v = 0} for the stacked constraint rows."""
    reduced, pivots = _rref(rows, width)
    pivot_set = set(pivots)
    basis: list[Vector] = []
    for free in range(width):
        if free in pivot_set:
            continue
        v = [_ZERO] * width
        v[free] = _ONE
        for r_idx, p_col in enumerate(pivots):
            v[p_col] = -reduced[r_idx][free]
        basis.append(tuple(v))
    return basis


@dataclass(frozen=True)
class Subspace:
    """Subspace of Q^n held as a canonical reduced-row-echelon basis.

    Canonicality makes equality structural: two Subspace values are equal
    exactly when they describe the same subspace.
    """

    ambient_dim: int
    basis: tuple[Vector, ...]

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, ())

    @classmethod
    def full(cls, n: int) -> "Subspace":
        rows = tuple(
            tuple(_ONE if i == j else _ZERO for j in range(n)) for i in range(n)
        )
        return cls(n, rows)

    @classmethod
    def from_vectors(
        cls, n: int, vectors: Iterable[Sequence[int | Fraction]]
    ) -> "Subspace":
        rows = []
        for v in vectors:
            if len(v) != n:
                raise ValueError(f"vector length {len(v)} != ambient dim {n}")
            rows.append([_as_fraction(x) for x in v])
        reduced, _ = _rref(rows, n)
        return cls(n, tuple(reduced))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def is_zero(self) -> bool:
        return not self.basis

    def contains(self, vector: Sequence[int | Fraction]) -> bool:
        if len(vector) != self.ambient_dim:
            raise PreconditionError(
                f"vector length {len(vector)} != ambient dim {self.ambient_dim}"
            )
        v = [_as_fraction(x) for x in vector]
        for row in self.basis:
            # each basis row has a leading 1 in its pivot column
            pivot = next(c for c in range(self.ambient_dim) if row[c] != 0)
            f = v[pivot]
            if f != 0:
                v = [a - f * b for a, b in zip(v, row)]
        return all(x == 0 for x in v)


def _check_same_ambient(s: Subspace, t: Subspace) -> None:
    if s.ambient_dim != t.ambient_dim:
        raise PreconditionError(
            f"ambient dimension mismatch: {s.ambient_dim} vs {t.ambient_dim}"
        )


# -- operations -------------------------------------------------------------


def _full_int_rows(m: SymMat) -> list[list[int]]:
    """Expand to a full integer matrix: scaling by the positive lcm of the
    entry denominators does not change the rank."""
    lcm = 1
    for e in m.upper:
        d = e.denominator
        if d > 1:
            lcm = lcm * d // math.gcd(lcm, d)
    n = m.n
    rows = [[0] * n for _ in range(n)]
    idx = 0
    for i in range(n):
        for j in range(i, n):
            e = m.upper[idx]
            idx += 1
            v = e.numerator * (lcm // e.denominator)
            rows[i][j] = v
            rows[j][i] = v
    return rows


def _int_rank(mat: list[list[int]]) -> int:
    """Fraction-free (Bareiss) elimination on an integer matrix, in place."""
    n_rows = len(mat)
    if n_rows == 0:
        return 0
    n_cols = len(mat[0])
    prev = 1
    r = 0
    for c in range(n_cols):
        piv = None
        for i in range(r, n_rows):
            if mat[i][c]:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            mat[r], mat[piv] = mat[piv], mat[r]
        row_r = mat[r]
        pv = row_r[c]
        for i in range(r + 1, n_rows):
            row_i = mat[i]
            f = row_i[c]
            if f:
                for j in range(c + 1, n_cols):
                    row_i[j] = (pv * row_i[j] - f * row_r[j]) // prev
                row_i[c] = 0
            elif prev != pv:
                for j in range(c + 1, n_cols):
                    row_i[j] = (pv * row_i[j]) // prev
        prev = pv
        r += 1
        if r == n_rows:
            break
    return r


def rank(m: SymMat) -> int:
    """Exact rank of ``m`` over the rationals."""
    return _int_rank(_full_int_rows(m))


def image(m: SymMat) -> Subspace:
    """Column span of ``m`` (equal to the row span, since ``m`` is symmetric)."""
    return Subspace.from_vectors(m.n, m.rows())


def kernel(m: SymMat) -> Subspace:
    """All v with m v = 0, canonical; dim = n - rank(m)."""
    return Subspace.from_vectors(m.n, _nullspace_basis(m.n, m.rows()))


def perp(s: Subspace) -> Subspace:
    """Orthogonal complement for the standard bilinear form sum(x_i * y_i)."""
    return Subspace.from_vectors(
        s.ambient_dim, _nullspace_basis(s.ambient_dim, s.basis)
    )


def subspace_sum(s: Subspace, t: Subspace) -> Subspace:
    """Canonical subspace spanned by the union of the two bases."""
    _check_same_ambient(s, t)
    return Subspace.from_vectors(s.ambient_dim, list(s.basis) + list(t.basis))


def subspace_intersection_dim(s: Subspace, t: Subspace) -> int:
    """dim(s intersect t), via dim s + dim t - dim(s + t)."""
    _check_same_ambient(s, t)
    return s.dim + t.dim - subspace_sum(s, t).dim


def line_contained(b: SymMat, s: Subspace) -> bool:
    """For rank(b) <= 1: is image(b) contained in ``s``?"""
    if b.n != s.ambient_dim:
        raise PreconditionError(
            f"ambient dimension mismatch: {b.n} vs {s.ambient_dim}"
        )
    if rank(b) >= 2:
        raise PreconditionError("line_contained expects a matrix of rank <= 1")
    for i in range(b.n):
        row = b.row(i)
        if any(x != 0 for x in row):
            return s.contains(row)
    return True  # zero matrix: zero image is contained in everything


# -- JSON matrix literals ----------------------------------------------------

_FRACTION_RE = re.compile(r"(-?\d+)/(\d+)")


def scalar_from_literal(value: object) -> Fraction:
    """Parse an entry literal: a JSON integer, or a string "p/q" in lowest
    terms with positive q."""
    if isinstance(value, bool):
        raise FormatError(f"matrix entry must be an integer or 'p/q', got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        m = _FRACTION_RE.fullmatch(value)
        if not m:
            raise FormatError(f"bad rational literal {value!r}: expected 'p/q'")
        num, den = int(m.group(1)), int(m.group(2))
        if den == 0:
            raise FormatError(f"bad rational literal {value!r}: zero denominator")
        if math.gcd(num, den) != 1:
            raise FormatError(f"bad rational literal {value!r}: not in lowest terms")
        return Fraction(num, den)
    raise FormatError(
        f"matrix entry must be an integer or 'p/q' string, got {type(value).__name__}"
    )


def scalar_to_literal(q: Fraction) -> int | str:
    if q.denominator == 1:
        return int(q)
    return f"{q.numerator}/{q.denominator}"


def matrix_from_literal(data: object) -> SymMat:
    """Parse a JSON array-of-arrays literal; symmetry mismatch is a hard error."""
    if not isinstance(data, list) or not data:
        raise FormatError("matrix literal must be a non-empty array of rows")
    n = len(data)
    rows: list[list[Fraction]] = []
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != n:
            raise FormatError(f"matrix row {i} must be an array of {n} entries")
        rows.append([scalar_from_literal(x) for x in row])
    for i in range(n):
        for j in range(i + 1, n):
            if rows[i][j] != rows[j][i]:
                raise FormatError(
                    f"matrix not symmetric: entry ({i},{j}) != ({j},{i})"
                )
    return SymMat.from_rows(rows)


def matrix_to_literal(m: SymMat) -> list[list[int | str]]:
    return [[scalar_to_literal(m.entry(i, j)) for j in range(m.n)] for i in range(m.n)]
