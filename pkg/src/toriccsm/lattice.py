"""Exact integer linear algebra over lattices.

Everything in this module works with arbitrary-precision Python integers;
the rest of the package inherits its exactness from here.  The workhorse is
the Smith normal form, computed by elementary row/column operations while
tracking the unimodular transforms and their inverses.  On top of it sit
integer system solving, kernels, saturations, cokernel indices and the
quotient projections used for orbit lattices.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence

from .errors import ValidationError


@dataclass(frozen=True)
class LatticeVector:
    """An element of Z^n, stored as a tuple of Python integers."""

    entries: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def is_zero(self) -> bool:
        return all(e == 0 for e in self.entries)

    @property
    def is_primitive(self) -> bool:
        """True when the gcd of the entries is 1 (so the vector generates
        its ray's intersection with the lattice)."""
        return gcd(*self.entries) == 1 if self.entries else False

    def primitive(self) -> "LatticeVector":
        """The primitive generator of the ray through this vector."""
        if self.is_zero:
            raise ValidationError("zero vector spans no ray")
        g = gcd(*self.entries)
        return LatticeVector(tuple(e // g for e in self.entries))

    def dot(self, other: "LatticeVector") -> int:
        if self.dim != other.dim:
            raise ValidationError("dot product of vectors of different dimension")
        return sum(a * b for a, b in zip(self.entries, other.entries))

    def __add__(self, other: "LatticeVector") -> "LatticeVector":
        if self.dim != other.dim:
            raise ValidationError("sum of vectors of different dimension")
        return LatticeVector(tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "LatticeVector") -> "LatticeVector":
        return self + (-other)

    def __neg__(self) -> "LatticeVector":
        return LatticeVector(tuple(-a for a in self.entries))

    def __rmul__(self, c: int) -> "LatticeVector":
        return LatticeVector(tuple(c * a for a in self.entries))

    def __iter__(self):
        return iter(self.entries)

    def __repr__(self) -> str:
        return f"LatticeVector({self.entries!r})"


def zero_vector(dim: int) -> LatticeVector:
    return LatticeVector((0,) * dim)


def unit_vector(dim: int, i: int) -> LatticeVector:
    return LatticeVector(tuple(1 if j == i else 0 for j in range(dim)))


@dataclass(frozen=True)
class LatticeMatrix:
    """An integer matrix, stored row-major.

    Zero-by-anything shapes are legal and show up naturally (quotients by a
    full-dimensional cone, maps to a point).
    """

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))
        if len(self.entries) != self.rows * self.cols:
            raise ValidationError(
                f"matrix entries have length {len(self.entries)}, "
                f"expected {self.rows}x{self.cols}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], *, cols: int | None = None) -> "LatticeMatrix":
        nr = len(rows)
        if nr == 0:
            if cols is None:
                raise ValidationError("empty row list needs an explicit column count")
            return cls(0, cols, ())
        nc = len(rows[0])
        if cols is not None and cols != nc:
            raise ValidationError("explicit column count disagrees with rows")
        flat = []
        for r in rows:
            if len(r) != nc:
                raise ValidationError("ragged rows")
            flat.extend(int(e) for e in r)
        return cls(nr, nc, tuple(flat))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], *, rows: int | None = None) -> "LatticeMatrix":
        if len(columns) == 0:
            if rows is None:
                raise ValidationError("empty column list needs an explicit row count")
            return cls(rows, 0, ())
        nr = len(columns[0])
        return cls.from_rows([[int(c[i]) for c in columns] for i in range(nr)], cols=len(columns))

    @classmethod
    def identity(cls, n: int) -> "LatticeMatrix":
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    def entry(self, i: int, j: int) -> int:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_lists(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "LatticeMatrix":
        return LatticeMatrix(
            self.cols, self.rows,
            tuple(self.entry(i, j) for j in range(self.cols) for i in range(self.rows)),
        )

    def __matmul__(self, other: "LatticeMatrix") -> "LatticeMatrix":
        if self.cols != other.rows:
            raise ValidationError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        flat = []
        for i in range(self.rows):
            ri = self.row(i)
            for j in range(other.cols):
                flat.append(sum(ri[k] * other.entry(k, j) for k in range(self.cols)))
        return LatticeMatrix(self.rows, other.cols, tuple(flat))

    def apply(self, v: LatticeVector) -> LatticeVector:
        if v.dim != self.cols:
            raise ValidationError(f"matrix has {self.cols} columns, vector has dim {v.dim}")
        return LatticeVector(
            tuple(sum(self.row(i)[k] * v.entries[k] for k in range(self.cols))
                  for i in range(self.rows))
        )

    def __repr__(self) -> str:
        return f"LatticeMatrix({self.to_lists()!r})"


@dataclass(frozen=True)
class SmithDecomposition:
    """A triple left * M * right = diag with unimodular left/right factors.

    The diagonal is nonnegative and each entry divides the next; zeros, if
    any, come last.
    """

    left: LatticeMatrix
    diag: tuple[int, ...]
    right: LatticeMatrix

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diag if d != 0)


def _eye(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _snf_full(m: LatticeMatrix):
    """Elementary-operation Smith reduction, tracking inverses.

    Returns (L, diag, R, Linv, Rinv) as lists-of-lists with
    L * m * R = diag(diag), L * Linv = I, R * Rinv = I.
    Pivots are chosen with minimal magnitude, which keeps intermediate
    entries small at desk scale.
    """
    nr, nc = m.rows, m.cols
    D = m.to_lists()
    L, Li = _eye(nr), _eye(nr)
    R, Ri = _eye(nc), _eye(nc)

    def row_sub(i, t, q):
        # row i -= q * row t; Linv gets the inverse column operation
        Dt, Dirow = D[t], D[i]
        for j in range(nc):
            Dirow[j] -= q * Dt[j]
        Lt, Lirow = L[t], L[i]
        for j in range(nr):
            Lirow[j] -= q * Lt[j]
        for r in range(nr):
            Li[r][t] += q * Li[r][i]

    def col_sub(j, t, q):
        # col j -= q * col t
        for i in range(nr):
            D[i][j] -= q * D[i][t]
        for i in range(nc):
            R[i][j] -= q * R[i][t]
        Rt = Ri[t]
        Rj = Ri[j]
        for c in range(nc):
            Rt[c] += q * Rj[c]

    def row_swap(i, t):
        D[i], D[t] = D[t], D[i]
        L[i], L[t] = L[t], L[i]
        for r in range(nr):
            Li[r][i], Li[r][t] = Li[r][t], Li[r][i]

    def col_swap(j, t):
        for i in range(nr):
            D[i][j], D[i][t] = D[i][t], D[i][j]
        for i in range(nc):
            R[i][j], R[i][t] = R[i][t], R[i][j]
        Ri[j], Ri[t] = Ri[t], Ri[j]

    def row_neg(i):
        for j in range(nc):
            D[i][j] = -D[i][j]
        for j in range(nr):
            L[i][j] = -L[i][j]
        for r in range(nr):
            Li[r][i] = -Li[r][i]

    def min_pivot(k):
        best = None
        for i in range(k, nr):
            for j in range(k, nc):
                e = D[i][j]
                if e and (best is None or abs(e) < abs(D[best[0]][best[1]])):
                    best = (i, j)
        return best

    limit = min(nr, nc)
    for k in range(limit):
        while True:
            piv = min_pivot(k)
            if piv is None:
                break
            i0, j0 = piv
            if i0 != k:
                row_swap(i0, k)
            if j0 != k:
                col_swap(j0, k)
            if D[k][k] < 0:
                row_neg(k)
            p = D[k][k]
            dirty = False
            for i in range(k + 1, nr):
                q = D[i][k] // p
                if q:
                    row_sub(i, k, q)
                if D[i][k]:
                    dirty = True
            for j in range(k + 1, nc):
                q = D[k][j] // p
                if q:
                    col_sub(j, k, q)
                if D[k][j]:
                    dirty = True
            if dirty:
                continue
            # Enforce the divisibility chain: drag a non-divisible entry
            # into row k and reduce again.
            p = D[k][k]
            culprit = None
            for i in range(k + 1, nr):
                for j in range(k + 1, nc):
                    if D[i][j] % p:
                        culprit = i
                        break
                if culprit is not None:
                    break
            if culprit is None:
                break
            row_sub(k, culprit, -1)
        if min_pivot(k) is None:
            break

    diag = tuple(D[i][i] for i in range(limit))
    return L, diag, R, Li, Ri


def smith_normal_form(m: LatticeMatrix) -> SmithDecomposition:
    """Smith normal form: unimodular left/right with left*m*right diagonal,
    diagonal nonnegative and sorted by divisibility."""
    L, diag, R, _, _ = _snf_full(m)
    return SmithDecomposition(
        LatticeMatrix.from_rows(L, cols=m.rows),
        diag,
        LatticeMatrix.from_rows(R, cols=m.cols),
    )


def rank(m: LatticeMatrix) -> int:
    return smith_normal_form(m).rank


def solve_integer(m: LatticeMatrix, b: LatticeVector) -> LatticeVector | None:
    """Some integer solution x of m*x = b, or None if there is none.

    When the solution is not unique an arbitrary representative is returned;
    callers are expected to be insensitive to the choice.
    """
    if b.dim != m.rows:
        raise ValidationError(f"matrix has {m.rows} rows, vector has dim {b.dim}")
    snf = smith_normal_form(m)
    c = snf.left.apply(b)
    y = [0] * m.cols
    for i in range(m.rows):
        d = snf.diag[i] if i < len(snf.diag) else 0
        if d:
            if c.entries[i] % d:
                return None
            y[i] = c.entries[i] // d
        elif c.entries[i]:
            return None
    return snf.right.apply(LatticeVector(tuple(y)))


def kernel_basis(m: LatticeMatrix) -> LatticeMatrix:
    """A matrix whose columns form a basis of the integer kernel of m."""
    snf = smith_normal_form(m)
    r = snf.rank
    cols = [snf.right.column(j) for j in range(r, m.cols)]
    return LatticeMatrix.from_columns(cols, rows=m.cols)


def saturation(m: LatticeMatrix) -> LatticeMatrix:
    """A basis of the saturation of the column span of m.

    The saturation is the smallest sublattice containing the column span
    that is a direct summand of the ambient lattice.
    """
    _, diag, _, Li, _ = _snf_full(m)
    r = sum(1 for d in diag if d != 0)
    cols = [tuple(Li[i][j] for i in range(m.rows)) for j in range(r)]
    return LatticeMatrix.from_columns(cols, rows=m.rows)


def cokernel_index(m: LatticeMatrix) -> int | None:
    """The order of coker(m) = Z^rows / colspan(m) when finite, else None.

    The cokernel is finite exactly when the rank of m equals the number of
    rows; its order is then the product of the nonzero Smith diagonal
    entries.
    """
    snf = smith_normal_form(m)
    if snf.rank < m.rows:
        return None
    out = 1
    for d in snf.diag:
        if d:
            out *= d
    return out


def quotient_projection(m: LatticeMatrix) -> tuple[LatticeMatrix, LatticeMatrix]:
    """Projection and section for the quotient of Z^rows by the column span.

    Requires the columns of m to form part of a lattice basis (independent
    and saturated, as the generators of a smooth cone do).  Returns (Q, S)
    with Q of shape (rows - cols) x rows, kernel exactly the column span,
    and Q * S the identity.
    """
    L, diag, _, Li, _ = _snf_full(m)
    if len(diag) != m.cols or any(d != 1 for d in diag):
        raise ValidationError("columns do not form part of a lattice basis")
    k = m.cols
    proj = LatticeMatrix.from_rows([list(L[i]) for i in range(k, m.rows)], cols=m.rows)
    section = LatticeMatrix.from_columns(
        [tuple(Li[i][j] for i in range(m.rows)) for j in range(k, m.rows)], rows=m.rows
    )
    return proj, section


def matrix_of_rays(rays: Iterable[LatticeVector], *, dim: int) -> LatticeMatrix:
    """The matrix whose columns are the given vectors (in Z^dim)."""
    return LatticeMatrix.from_columns([v.entries for v in rays], rows=dim)
