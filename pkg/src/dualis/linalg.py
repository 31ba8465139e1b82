"""Exact linear algebra over the rationals.

Every entry is a :class:`fractions.Fraction`; nothing here rounds.  Row
reduction is delegated to the integer Gauss-Jordan kernel selected in
:mod:`dualis._backend` after clearing denominators row by row.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from . import _backend


class LinAlgError(ValueError):
    pass


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def format_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


_ZERO = Fraction(0)
_ONE = Fraction(1)


class Matrix:
    """Immutable dense matrix of rationals."""

    __slots__ = ("rows", "nrows", "ncols", "_hash", "_sparse")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        data = tuple(tuple(to_fraction(x) for x in r) for r in rows)
        if ncols is None:
            if not data:
                raise LinAlgError("column count required for a matrix with no rows")
            ncols = len(data[0])
        for r in data:
            if len(r) != ncols:
                raise LinAlgError("ragged rows")
        self.rows = data
        self.nrows = len(data)
        self.ncols = ncols
        self._hash = None
        self._sparse = None

    @classmethod
    def _raw(cls, rows: tuple, ncols: int) -> "Matrix":
        m = object.__new__(cls)
        m.rows = rows
        m.nrows = len(rows)
        m.ncols = ncols
        m._hash = None
        m._sparse = None
        return m

    def sparse_rows(self) -> list:
        """Per row, the (column, value) pairs of nonzero entries (cached)."""
        if self._sparse is None:
            self._sparse = [[(k, a) for k, a in enumerate(r) if a] for r in self.rows]
        return self._sparse

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Matrix":
        return cls._raw(tuple((_ZERO,) * ncols for _ in range(nrows)), ncols)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls._raw(
            tuple(tuple(_ONE if i == j else _ZERO for j in range(n)) for i in range(n)), n
        )

    @classmethod
    def diag(cls, entries: Sequence) -> "Matrix":
        n = len(entries)
        vals = [to_fraction(e) for e in entries]
        return cls._raw(
            tuple(tuple(vals[i] if i == j else _ZERO for j in range(n)) for i in range(n)), n
        )

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int) -> "Matrix":
        if not cols:
            return cls.zeros(nrows, 0)
        return cls(zip(*cols), len(cols))

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, idx):
        i, j = idx
        return self.rows[i][j]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    @property
    def T(self) -> "Matrix":
        if self.nrows == 0:
            return Matrix.zeros(self.ncols, 0)
        return Matrix._raw(tuple(zip(*self.rows)), self.nrows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ncols, self.rows))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.rows)
        return f"Matrix([{body}])"

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise LinAlgError(f"shape mismatch {self.shape} + {other.shape}")
        return Matrix._raw(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)),
            self.ncols,
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise LinAlgError(f"shape mismatch {self.shape} - {other.shape}")
        return Matrix._raw(
            tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)),
            self.ncols,
        )

    def __neg__(self) -> "Matrix":
        return Matrix._raw(tuple(tuple(-a for a in r) for r in self.rows), self.ncols)

    def scale(self, c) -> "Matrix":
        c = to_fraction(c)
        return Matrix._raw(tuple(tuple(c * a for a in r) for r in self.rows), self.ncols)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise LinAlgError(f"shape mismatch {self.shape} @ {other.shape}")
            n = other.ncols
            orows = other.rows
            osp = other.sparse_rows()
            out = []
            for r in self.sparse_rows():
                acc = [_ZERO] * n
                for k, a in r:
                    for j, b in osp[k]:
                        acc[j] += a * b
                out.append(tuple(acc))
            return Matrix._raw(tuple(out), n)
        return self.apply(other)

    def apply(self, v: Sequence) -> tuple:
        """Matrix-vector product."""
        if len(v) != self.ncols:
            raise LinAlgError(f"vector of length {len(v)} for matrix {self.shape}")
        out = []
        for r in self.sparse_rows():
            acc = _ZERO
            for k, a in r:
                x = v[k]
                if x:
                    acc += a * x
            out.append(acc)
        return tuple(out)

    def is_zero(self) -> bool:
        return all(not x for r in self.rows for x in r)

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.nrows != other.nrows:
            raise LinAlgError("row count mismatch in hstack")
        return Matrix._raw(
            tuple(r + s for r, s in zip(self.rows, other.rows)), self.ncols + other.ncols
        )

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.ncols:
            raise LinAlgError("column count mismatch in vstack")
        return Matrix._raw(self.rows + other.rows, self.ncols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix._raw(tuple(tuple(self.rows[i][j] for j in cols) for i in rows), len(cols))

    def trace(self) -> Fraction:
        if self.nrows != self.ncols:
            raise LinAlgError("trace of a non-square matrix")
        return sum((self.rows[i][i] for i in range(self.nrows)), _ZERO)

    def inverse(self) -> "Matrix":
        n = self.nrows
        if n != self.ncols:
            raise LinAlgError("inverse of a non-square matrix")
        R, piv, T = rref(self)
        if len(piv) != n:
            raise LinAlgError("matrix is singular")
        return T

    def det(self) -> Fraction:
        n = self.nrows
        if n != self.ncols:
            raise LinAlgError("determinant of a non-square matrix")
        a = [list(r) for r in self.rows]
        d = _ONE
        for c in range(n):
            p = next((i for i in range(c, n) if a[i][c]), None)
            if p is None:
                return _ZERO
            if p != c:
                a[c], a[p] = a[p], a[c]
                d = -d
            pv = a[c][c]
            d *= pv
            for i in range(c + 1, n):
                f = a[i][c]
                if f:
                    f = f / pv
                    ai, ac = a[i], a[c]
                    for j in range(c, n):
                        if ac[j]:
                            ai[j] -= f * ac[j]
        return d

    def __pow__(self, k: int) -> "Matrix":
        if k < 0:
            return self.inverse() ** (-k)
        out = Matrix.identity(self.nrows)
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def to_strings(self) -> list:
        return [[format_fraction(x) for x in r] for r in self.rows]

    @classmethod
    def from_strings(cls, rows: Sequence[Sequence[str]], ncols: int | None = None) -> "Matrix":
        return cls(([Fraction(x) for x in r] for r in rows), ncols if ncols is not None else (len(rows[0]) if rows else 0))


def _integer_rows(M: Matrix):
    """Scale each row by the lcm of its denominators."""
    out, scales = [], []
    for r in M.rows:
        d = 1
        for x in r:
            if x.denominator != 1:
                d = lcm(d, x.denominator)
        out.append([x.numerator * (d // x.denominator) if x else 0 for x in r])
        scales.append(d)
    return out, scales


def _reduced_to_fractions(reduced, pivots, ncols):
    rows = []
    for row, p in zip(reduced, pivots):
        a = row[p]
        rows.append(tuple(Fraction(v, a) if v else _ZERO for v in row[:ncols]))
    return rows


def rref(M: Matrix, transform: bool = True):
    """Reduced row-echelon form.

    Returns ``(R, pivots, T)`` with ``T @ M == R`` and ``T`` invertible.  With
    ``transform=False`` the third entry is ``None`` and the (cheaper) plain
    elimination is run.
    """
    m, n = M.shape
    ints, scales = _integer_rows(M)
    if not transform:
        reduced, piv = _backend.echelon(ints, n)
        rows = _reduced_to_fractions(reduced, piv, n)
        rows += [(_ZERO,) * n] * (m - len(rows))
        return Matrix._raw(tuple(rows), n), piv, None

    aug = [r + [1 if i == k else 0 for k in range(m)] for i, r in enumerate(ints)]
    reduced, piv_all = _backend.echelon(aug, n + m)
    rows_R, rows_T = [], []
    piv = [p for p in piv_all if p < n]
    for row, p in zip(reduced, piv_all):
        a = row[p]
        if p < n:
            rows_R.append(tuple(Fraction(v, a) if v else _ZERO for v in row[:n]))
        rows_T.append(
            tuple(Fraction(row[n + k] * scales[k], a) if row[n + k] else _ZERO for k in range(m))
        )
    rows_R += [(_ZERO,) * n] * (m - len(rows_R))
    return Matrix._raw(tuple(rows_R), n), piv, Matrix._raw(tuple(rows_T), m)


def row_basis(M: Matrix):
    """Nonzero rows of the RREF of ``M`` and their pivot columns."""
    R, piv, _ = rref(M, transform=False)
    return Matrix._raw(R.rows[: len(piv)], M.ncols), piv


def rank(M: Matrix) -> int:
    if M.nrows == 0 or M.ncols == 0:
        return 0
    return len(rref(M, transform=False)[1])


@dataclass(frozen=True)
class Subspace:
    """A subspace of Q^ambient_dim; ``basis`` rows are in RREF."""

    ambient_dim: int
    basis: Matrix
    pivots: tuple

    @classmethod
    def span(cls, vectors: Sequence[Sequence], ambient_dim: int) -> "Subspace":
        if not vectors:
            return cls(ambient_dim, Matrix.zeros(0, ambient_dim), ())
        B, piv = row_basis(Matrix(vectors, ambient_dim))
        return cls(ambient_dim, B, tuple(piv))

    @classmethod
    def whole(cls, n: int) -> "Subspace":
        return cls(n, Matrix.identity(n), tuple(range(n)))

    @property
    def dim(self) -> int:
        return self.basis.nrows

    def reduce(self, v: Sequence) -> list:
        """Residual of ``v`` after clearing the pivot columns with the basis."""
        v = [to_fraction(x) for x in v]
        for row, p in zip(self.basis.rows, self.pivots):
            c = v[p]
            if c:
                for j, b in enumerate(row):
                    if b:
                        v[j] -= c * b
        return v

    def contains(self, v: Sequence) -> bool:
        return not any(self.reduce(v))

    def coordinates(self, v: Sequence) -> tuple:
        """Coefficients of ``v`` in the basis rows; raises if ``v`` is outside."""
        if any(self.reduce(v)):
            raise LinAlgError("vector not in subspace")
        return tuple(to_fraction(v[p]) for p in self.pivots)

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(r) for r in other.basis.rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self.basis))


def kernel_basis(M: Matrix) -> Subspace:
    """Right kernel {v : M v = 0} as a subspace of Q^cols."""
    n = M.ncols
    if M.nrows == 0:
        return Subspace.whole(n)
    R, piv, _ = rref(M, transform=False)
    pivset = set(piv)
    vecs = []
    for f in range(n):
        if f in pivset:
            continue
        v = [_ZERO] * n
        v[f] = _ONE
        for i, p in enumerate(piv):
            v[p] = -R.rows[i][f]
        vecs.append(v)
    return Subspace.span(vecs, n)


def image_basis(M: Matrix) -> Subspace:
    """Column space of ``M`` as a subspace of Q^rows."""
    if M.ncols == 0:
        return Subspace(M.nrows, Matrix.zeros(0, M.nrows), ())
    B, piv = row_basis(M.T)
    return Subspace(M.nrows, B, tuple(piv))


def quotient_space(W: Subspace, V: Subspace):
    """Basis of W/V and the projection onto its coordinates.

    Returns ``(reps, P)``: ``reps`` rows lie in W and map to the standard basis
    of W/V; ``P`` is a (dim W/V) x ambient matrix with ``P v = 0`` for v in V
    and ``P reps[i] = e_i``.
    """
    if W.ambient_dim != V.ambient_dim:
        raise LinAlgError("ambient dimensions differ")
    n = W.ambient_dim
    if V.dim:
        if rank(W.basis.vstack(V.basis)) != W.dim:
            raise LinAlgError("V is not contained in W")
        # W n {x : x[pivots of V] = 0} is a complement of V inside W
        M = W.basis.submatrix(range(W.dim), V.pivots).T
        coeffs = kernel_basis(M).basis.rows
        vecs = []
        for c in coeffs:
            v = [_ZERO] * n
            for a, wr in zip(c, W.basis.rows):
                if a:
                    for j, b in enumerate(wr):
                        if b:
                            v[j] += a * b
            vecs.append(v)
        H = Subspace.span(vecs, n)
    else:
        H = W
    vpiv = V.pivots
    rows = []
    for hp in H.pivots:
        row = [_ZERO] * n
        row[hp] = _ONE
        for vr, vp in zip(V.basis.rows, vpiv):
            c = vr[hp]
            if c:
                row[vp] -= c
        rows.append(tuple(row))
    return H.basis, Matrix._raw(tuple(rows), n)


def solve(A: Matrix, b: Sequence):
    """One solution x of A x = b, or ``None`` when inconsistent."""
    m, n = A.shape
    aug = A.hstack(Matrix([[x] for x in b], 1)) if m else Matrix.zeros(0, n + 1)
    R, piv, _ = rref(aug, transform=False)
    if n in piv:
        return None
    x = [_ZERO] * n
    for i, p in enumerate(piv):
        x[p] = R.rows[i][n]
    return tuple(x)


def charpoly(M: Matrix) -> list:
    """Characteristic polynomial det(xI - M), coefficients from x^n down to x^0.

    Faddeev-LeVerrier recursion; exact because every division is by an integer.
    """
    n = M.nrows
    if n != M.ncols:
        raise LinAlgError("charpoly of a non-square matrix")
    coeffs = [_ONE]
    N = Matrix.zeros(n, n)
    I = Matrix.identity(n)
    c = _ONE
    for k in range(1, n + 1):
        N = M @ N + I.scale(c)
        c = -(M @ N).trace() / k
        coeffs.append(c)
    return coeffs


def poly_eval_matrix(coeffs: Sequence, M: Matrix) -> Matrix:
    """Horner evaluation of a polynomial (highest degree first) at ``M``."""
    n = M.nrows
    out = Matrix.zeros(n, n)
    I = Matrix.identity(n)
    for c in coeffs:
        out = out @ M + I.scale(c)
    return out


def format_poly(coeffs: Sequence, var: str = "x") -> str:
    deg = len(coeffs) - 1
    terms = []
    for i, c in enumerate(coeffs):
        c = to_fraction(c)
        if not c:
            continue
        e = deg - i
        mag = abs(c)
        mono = "" if e == 0 else (var if e == 1 else f"{var}^{e}")
        coef = str(mag) if (mag != 1 or e == 0) else ""
        body = coef + ("*" if coef and mono else "") + mono
        terms.append(("-" if c < 0 else "+", body))
    if not terms:
        return "0"
    s = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        s += f" {sign} {body}"
    return s
