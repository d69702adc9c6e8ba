"""Exact integer and rational linear algebra for lattice computations.

Everything here is computed over ``int`` and ``fractions.Fraction``.
Lattice membership, lattice equality and quotient structure are discrete
yes/no questions, so floating point never enters this module.

Text format (shared with the CLI): rows separated by ``;``, entries by
``,``, rationals written ``a/b``.  Example: ``1,1;1,-1``.  Round trips
are bit-exact.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .errors import SingularMatrix

# SNF and quotient enumeration cost grows quickly with dimension, and the
# exact function model tops out at d = 2; raise this deliberately if needed.
MAX_DIM = 4

IntVec = tuple[int, ...]
RatVec = tuple[Fraction, ...]


def _check_dim(d: int) -> None:
    if d < 1:
        raise ValueError("matrix dimension must be >= 1")
    if d > MAX_DIM:
        raise ValueError(f"dimension {d} exceeds MAX_DIM = {MAX_DIM}")


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Extended gcd: returns (g, x, y) with g = a*x + b*y and g >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions and 'a/b' strings to Fraction (exact only)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"not an exact rational: {x!r}")


def as_ratvec(v, dim: int) -> RatVec:
    """Coerce a scalar (d=1) or sequence to a RatVec of the given dimension."""
    if isinstance(v, (int, Fraction, str)):
        v = (v,)
    vec = tuple(as_fraction(c) for c in v)
    if len(vec) != dim:
        raise ValueError(f"expected vector of length {dim}, got {len(vec)}")
    return vec


def as_intvec(v, dim: int) -> IntVec:
    if isinstance(v, int):
        v = (v,)
    vec = tuple(v)
    if len(vec) != dim or not all(isinstance(c, int) for c in vec):
        raise ValueError(f"expected integer vector of length {dim}, got {v!r}")
    return vec


def dot(u: Sequence, v: Sequence) -> Fraction:
    return sum((Fraction(a) * Fraction(b) for a, b in zip(u, v)), Fraction(0))


def _det_cofactor(rows) -> object:
    """Exact determinant by cofactor expansion; entries int or Fraction."""
    d = len(rows)
    if d == 1:
        return rows[0][0]
    if d == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = rows[0][0] - rows[0][0]  # zero of the right type
    for j in range(d):
        if rows[0][j] == 0:
            continue
        minor = [
            [rows[i][c] for c in range(d) if c != j]
            for i in range(1, d)
        ]
        term = rows[0][j] * _det_cofactor(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def _parse_rows(text: str, coerce):
    rows = []
    for row_text in text.strip().split(";"):
        rows.append(tuple(coerce(tok.strip()) for tok in row_text.split(",")))
    return tuple(rows)


def _format_rows(rows) -> str:
    return ";".join(",".join(str(e) for e in row) for row in rows)


class IntMatrix:
    """Immutable square integer matrix (row-major)."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable[int]]):
        rows = tuple(tuple(r) for r in rows)
        d = len(rows)
        _check_dim(d)
        for r in rows:
            if len(r) != d:
                raise ValueError("matrix must be square")
            for e in r:
                if not isinstance(e, int):
                    raise TypeError(f"integer entry expected, got {e!r}")
        self.rows = rows

    @classmethod
    def identity(cls, d: int) -> "IntMatrix":
        return cls(tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d)))

    @classmethod
    def scalar(cls, d: int, c: int) -> "IntMatrix":
        return cls(tuple(tuple(c if i == j else 0 for j in range(d)) for i in range(d)))

    @classmethod
    def parse(cls, text: str) -> "IntMatrix":
        return cls(_parse_rows(text, int))

    @property
    def dim(self) -> int:
        return len(self.rows)

    def text(self) -> str:
        return _format_rows(self.rows)

    def __eq__(self, other) -> bool:
        return isinstance(other, IntMatrix) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"IntMatrix({self.text()!r})"

    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.rows)))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        d = self.dim
        if other.dim != d:
            raise ValueError("dimension mismatch")
        bt = tuple(zip(*other.rows))
        return IntMatrix(
            tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in bt) for row in self.rows)
        )

    def apply(self, v: Sequence):
        """Matrix-vector product; preserves int/Fraction entry types."""
        if len(v) != self.dim:
            raise ValueError("dimension mismatch")
        return tuple(sum(a * b for a, b in zip(row, v)) for row in self.rows)

    def det(self) -> int:
        return _det_cofactor(self.rows)

    def to_rational(self) -> "RatMatrix":
        return RatMatrix(tuple(tuple(Fraction(e) for e in row) for row in self.rows))

    def inverse(self) -> "RatMatrix":
        return self.to_rational().inverse()

    def power_rational(self, j: int) -> "RatMatrix":
        """Exact rational matrix M**j for any integer j (negative allowed)."""
        d = self.dim
        if j == 0:
            return RatMatrix.identity(d)
        base = self if j > 0 else None
        if j < 0:
            acc = self.inverse()
            result = RatMatrix.identity(d)
            for _ in range(-j):
                result = result @ acc
            return result
        result = IntMatrix.identity(d)
        for _ in range(j):
            result = result @ base
        return result.to_rational()


class RatMatrix:
    """Immutable square matrix with exact Fraction entries."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable]):
        rows = tuple(tuple(as_fraction(e) for e in r) for r in rows)
        d = len(rows)
        _check_dim(d)
        for r in rows:
            if len(r) != d:
                raise ValueError("matrix must be square")
        self.rows = rows

    @classmethod
    def identity(cls, d: int) -> "RatMatrix":
        return cls(tuple(tuple(Fraction(1 if i == j else 0) for j in range(d)) for i in range(d)))

    @classmethod
    def parse(cls, text: str) -> "RatMatrix":
        return cls(_parse_rows(text, Fraction))

    @property
    def dim(self) -> int:
        return len(self.rows)

    def text(self) -> str:
        return _format_rows(self.rows)

    def __eq__(self, other) -> bool:
        return isinstance(other, RatMatrix) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"RatMatrix({self.text()!r})"

    def transpose(self) -> "RatMatrix":
        return RatMatrix(tuple(zip(*self.rows)))

    def column(self, j: int) -> RatVec:
        return tuple(row[j] for row in self.rows)

    def columns(self) -> list[RatVec]:
        return [self.column(j) for j in range(self.dim)]

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if isinstance(other, IntMatrix):
            other = other.to_rational()
        d = self.dim
        if other.dim != d:
            raise ValueError("dimension mismatch")
        bt = tuple(zip(*other.rows))
        return RatMatrix(
            tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in bt) for row in self.rows)
        )

    def apply(self, v: Sequence) -> RatVec:
        if len(v) != self.dim:
            raise ValueError("dimension mismatch")
        return tuple(sum(Fraction(a) * Fraction(b) for a, b in zip(row, v)) for row in self.rows)

    def det(self) -> Fraction:
        return _det_cofactor(self.rows)

    def is_integral(self) -> bool:
        return all(e.denominator == 1 for row in self.rows for e in row)

    def to_int_matrix(self) -> IntMatrix:
        if not self.is_integral():
            raise ValueError("matrix has non-integer entries")
        return IntMatrix(tuple(tuple(int(e) for e in row) for row in self.rows))

    def inverse(self) -> "RatMatrix":
        """Exact inverse by Gauss-Jordan elimination."""
        d = self.dim
        aug = [list(row) + [Fraction(1 if i == j else 0) for j in range(d)]
               for i, row in enumerate(self.rows)]
        for col in range(d):
            pivot = next((r for r in range(col, d) if aug[r][col] != 0), None)
            if pivot is None:
                raise SingularMatrix("matrix is singular")
            aug[col], aug[pivot] = aug[pivot], aug[col]
            pv = aug[col][col]
            aug[col] = [e / pv for e in aug[col]]
            for r in range(d):
                if r != col and aug[r][col] != 0:
                    factor = aug[r][col]
                    aug[r] = [e - factor * p for e, p in zip(aug[r], aug[col])]
        return RatMatrix(tuple(tuple(row[d:]) for row in aug))


def determinant(a: IntMatrix) -> int:
    """Exact integer determinant."""
    return a.det()


def inverse_rational(a: IntMatrix) -> RatMatrix:
    """Exact rational inverse; raises SingularMatrix when det = 0."""
    if a.det() == 0:
        raise SingularMatrix("matrix is singular")
    return a.inverse()


def smith_normal_form(a: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Diagonalize over the integers: U @ a @ V = S.

    U, V are unimodular (|det| = 1), S is diagonal with nonnegative entries
    satisfying the divisibility chain s1 | s2 | ... | sd.
    """
    if a.det() == 0:
        raise SingularMatrix("Smith form requires a nonsingular matrix")
    d = a.dim
    s = [list(row) for row in a.rows]
    u = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    v = [[1 if i == j else 0 for j in range(d)] for i in range(d)]

    def swap_rows(i, j):
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in s:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def row_combine(t, i):
        # Zero s[i][t].  When the pivot divides it, a plain subtraction keeps
        # the pivot fixed; otherwise the unimodular gcd transform strictly
        # shrinks |pivot|, which is what guarantees termination.
        a, b = s[t][t], s[i][t]
        if a != 0 and b % a == 0:
            q = b // a
            s[i] = [p - q * r for p, r in zip(s[i], s[t])]
            u[i] = [p - q * r for p, r in zip(u[i], u[t])]
            return
        g, x, y = xgcd(a, b)
        at, bt = a // g, b // g
        s[t], s[i] = (
            [x * p + y * q for p, q in zip(s[t], s[i])],
            [-bt * p + at * q for p, q in zip(s[t], s[i])],
        )
        u[t], u[i] = (
            [x * p + y * q for p, q in zip(u[t], u[i])],
            [-bt * p + at * q for p, q in zip(u[t], u[i])],
        )

    def col_combine(t, j):
        a, b = s[t][t], s[t][j]
        if a != 0 and b % a == 0:
            q = b // a
            for row in s:
                row[j] -= q * row[t]
            for row in v:
                row[j] -= q * row[t]
            return
        g, x, y = xgcd(a, b)
        at, bt = a // g, b // g
        for row in s:
            row[t], row[j] = x * row[t] + y * row[j], -bt * row[t] + at * row[j]
        for row in v:
            row[t], row[j] = x * row[t] + y * row[j], -bt * row[t] + at * row[j]

    for t in range(d):
        # Move the absolutely smallest nonzero entry of the trailing block to (t, t).
        pivot = min(
            ((i, j) for i in range(t, d) for j in range(t, d) if s[i][j] != 0),
            key=lambda ij: abs(s[ij[0]][ij[1]]),
        )
        if pivot[0] != t:
            swap_rows(t, pivot[0])
        if pivot[1] != t:
            swap_cols(t, pivot[1])
        while True:
            for i in range(t + 1, d):
                if s[i][t] != 0:
                    row_combine(t, i)
            for j in range(t + 1, d):
                if s[t][j] != 0:
                    col_combine(t, j)
            if any(s[i][t] != 0 for i in range(t + 1, d)):
                continue
            # Pivot must divide the whole trailing block for the chain to hold.
            offender = next(
                ((i, j) for i in range(t + 1, d) for j in range(t + 1, d)
                 if s[i][j] % s[t][t] != 0),
                None,
            )
            if offender is None:
                break
            i = offender[0]
            s[t] = [p + q for p, q in zip(s[t], s[i])]
            u[t] = [p + q for p, q in zip(u[t], u[i])]

    for t in range(d):
        if s[t][t] < 0:
            s[t] = [-e for e in s[t]]
            u[t] = [-e for e in u[t]]

    return IntMatrix(u), IntMatrix(s), IntMatrix(v)


def _column_hermite(cols: list[list[int]], dim: int) -> list[list[int]]:
    """Canonical column Hermite form of a full-row-rank integer column set.

    Returns dim columns forming a lower-triangular matrix with positive
    diagonal and off-diagonal entries reduced modulo the diagonal
    (0 <= H[i][j] < H[i][i] for j < i).  Unique per lattice, so usable as
    a canonical form.
    """
    cols = [list(c) for c in cols]
    n = len(cols)
    pivot = 0
    for row in range(dim):
        j = next((c for c in range(pivot, n) if cols[c][row] != 0), None)
        if j is None:
            raise SingularMatrix("generators do not span a full-rank lattice")
        cols[pivot], cols[j] = cols[j], cols[pivot]
        for c in range(pivot + 1, n):
            if cols[c][row] == 0:
                continue
            g, x, y = xgcd(cols[pivot][row], cols[c][row])
            ap, bp = cols[pivot][row] // g, cols[c][row] // g
            cols[pivot], cols[c] = (
                [x * p + y * q for p, q in zip(cols[pivot], cols[c])],
                [-bp * p + ap * q for p, q in zip(cols[pivot], cols[c])],
            )
        if cols[pivot][row] < 0:
            cols[pivot] = [-e for e in cols[pivot]]
        for c in range(pivot):
            q = cols[c][row] // cols[pivot][row]
            if q:
                cols[c] = [p - q * s for p, s in zip(cols[c], cols[pivot])]
        pivot += 1
    return cols[:dim]


class LatticeBasis:
    """Full-rank lattice in R^d, stored as a canonical rational basis.

    The canonical form is the column Hermite form of the integer matrix
    obtained by clearing denominators, divided back by the common
    denominator.  Two LatticeBasis values compare equal iff they generate
    the same lattice.
    """

    __slots__ = ("basis",)

    def __init__(self, matrix: RatMatrix):
        if matrix.det() == 0:
            raise SingularMatrix("lattice basis must be full rank")
        self.basis = self._canonical(matrix.columns(), matrix.dim)

    @staticmethod
    def _canonical(generators: list[RatVec], dim: int) -> RatMatrix:
        denom = 1
        for vec in generators:
            for c in vec:
                denom = denom * c.denominator // gcd(denom, c.denominator)
        cols = [[int(c * denom) for c in vec] for vec in generators]
        hermite = _column_hermite(cols, dim)
        rows = tuple(
            tuple(Fraction(hermite[j][i], denom) for j in range(dim))
            for i in range(dim)
        )
        return RatMatrix(rows)

    @classmethod
    def from_generators(cls, generators: Iterable[Sequence], dim: int) -> "LatticeBasis":
        gens = [as_ratvec(g, dim) for g in generators]
        if len(gens) < dim:
            raise SingularMatrix("need at least d generators for a rank-d lattice")
        obj = object.__new__(cls)
        obj.basis = cls._canonical(gens, dim)
        return obj

    @classmethod
    def standard(cls, dim: int) -> "LatticeBasis":
        return cls(RatMatrix.identity(dim))

    @property
    def dim(self) -> int:
        return self.basis.dim

    def __eq__(self, other) -> bool:
        return isinstance(other, LatticeBasis) and self.basis == other.basis

    def __hash__(self) -> int:
        return hash(self.basis)

    def __repr__(self) -> str:
        return f"LatticeBasis({self.basis.text()!r})"

    def contains(self, vec: Sequence) -> bool:
        """Exact membership: vec is an integer combination of the basis."""
        coeffs = self.basis.inverse().apply(as_ratvec(vec, self.dim))
        return all(c.denominator == 1 for c in coeffs)

    def is_sublattice_of(self, other: "LatticeBasis") -> bool:
        change = other.basis.inverse() @ self.basis
        return change.is_integral()

    def dual(self) -> "LatticeBasis":
        """Lattice of vectors pairing integrally with every lattice point."""
        return LatticeBasis(self.basis.transpose().inverse())

    def sum(self, other: "LatticeBasis") -> "LatticeBasis":
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        return LatticeBasis.from_generators(
            self.basis.columns() + other.basis.columns(), self.dim
        )

    def covolume(self) -> Fraction:
        return abs(self.basis.det())


def lattice_intersection(l1: LatticeBasis, l2: LatticeBasis) -> LatticeBasis:
    """Exact intersection via duality: (L1 ^ L2)* = L1* + L2*."""
    return l1.dual().sum(l2.dual()).dual()


def lattice_equal(l1: LatticeBasis, l2: LatticeBasis) -> bool:
    return l1 == l2


def inverse_lattice(a: IntMatrix) -> LatticeBasis:
    """The lattice A^{-1} Z^d (columns of the exact inverse generate it)."""
    return LatticeBasis(inverse_rational(a))


def parse_rat_vector(text: str, dim: int | None = None) -> RatVec:
    vec = tuple(Fraction(tok.strip()) for tok in text.strip().split(","))
    if dim is not None and len(vec) != dim:
        raise ValueError(f"expected {dim} components, got {len(vec)}")
    return vec


def format_rat_vector(vec: Sequence) -> str:
    return ",".join(str(as_fraction(c)) for c in vec)


def reduce_mod1(vec: Sequence) -> RatVec:
    """Coordinatewise representative in [0, 1)."""
    return tuple(as_fraction(c) % 1 for c in vec)


def integer_box(bound: int, dim: int) -> Iterable[IntVec]:
    """All integer vectors with sup-norm <= bound, lexicographic order."""
    rng = range(-bound, bound + 1)
    return itertools.product(rng, repeat=dim)
