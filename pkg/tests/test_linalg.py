import itertools
from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from dualis import _backend, _kernels_py
from dualis.linalg import (
    LinAlgError,
    Matrix,
    Subspace,
    charpoly,
    format_poly,
    image_basis,
    kernel_basis,
    poly_eval_matrix,
    quotient_space,
    rank,
    rref,
    solve,
)

small = st.integers(min_value=-6, max_value=6)


def matrices(max_rows=5, max_cols=6, entries=small):
    return st.integers(1, max_rows).flatmap(
        lambda m: st.integers(1, max_cols).flatmap(
            lambda n: st.lists(st.lists(entries, min_size=n, max_size=n), min_size=m, max_size=m)
        )
    )


def square(max_n=4, entries=small):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.lists(entries, min_size=n, max_size=n), min_size=n, max_size=n)
    )


def minor_rank(rows):
    """Largest k with a nonzero k x k minor, by exhaustive expansion."""
    m, n = len(rows), len(rows[0])
    for k in range(min(m, n), 0, -1):
        for rs in itertools.combinations(range(m), k):
            for cs in itertools.combinations(range(n), k):
                if sympy.Matrix([[rows[i][j] for j in cs] for i in rs]).det() != 0:
                    return k
    return 0


def test_rref_identity():
    R, piv, T = rref(Matrix.identity(3))
    assert R == Matrix.identity(3) and piv == [0, 1, 2] and T == Matrix.identity(3)


def test_rref_rank_one():
    R, piv, _ = rref(Matrix([[2, 4], [1, 2]]))
    assert R == Matrix([[1, 2], [0, 0]])
    assert piv == [0]


@given(matrices())
def test_rref_matches_sympy(rows):
    M = Matrix(rows)
    R, piv, T = rref(M)
    Rs, piv_s = sympy.Matrix(rows).rref()
    assert list(piv) == list(piv_s)
    assert R.to_strings() == [[f"{Fraction(str(x)).numerator}/{Fraction(str(x)).denominator}" for x in r] for r in Rs.tolist()]
    assert T @ M == R
    assert T.det() != 0


def test_rank_against_minor_expansion():
    import random

    rng = random.Random(7)
    for _ in range(5):
        rows = [[rng.randint(-3, 3) for _ in range(7)] for _ in range(5)]
        rows[4] = [a + b for a, b in zip(rows[0], rows[1])]
        assert rank(Matrix(rows)) == minor_rank(rows)


def test_kernel_image_small_cases():
    Z = Matrix.zeros(2, 3)
    assert kernel_basis(Z).dim == 3 and image_basis(Z).dim == 0
    M = Matrix([[1, 0], [0, 0]])
    assert kernel_basis(M) == Subspace.span([[0, 1]], 2)
    assert image_basis(M) == Subspace.span([[1, 0]], 2)


@given(matrices())
def test_rank_nullity(rows):
    M = Matrix(rows)
    K = kernel_basis(M)
    assert K.dim + rank(M) == M.ncols
    assert image_basis(M).dim == rank(M)
    for v in K.basis.rows:
        assert not any(M.apply(v))


def test_quotient_examples():
    W = Subspace.whole(3)
    reps, P = quotient_space(W, W)
    assert reps.nrows == 0 and P.nrows == 0
    reps, P = quotient_space(W, Subspace.span([], 3))
    assert P == Matrix.identity(3)
    V = Subspace.span([[1, 1, 1]], 3)
    reps, P = quotient_space(W, V)
    assert reps.nrows == 2
    assert not any(P.apply([1, 1, 1]))
    assert P @ reps.T == Matrix.identity(2)


@given(matrices(max_rows=4, max_cols=5), st.data())
def test_quotient_properties(rows, data):
    W = Subspace.span(rows, len(rows[0]))
    if W.dim == 0:
        return
    k = data.draw(st.integers(0, W.dim))
    coeffs = data.draw(st.lists(st.lists(small, min_size=W.dim, max_size=W.dim), min_size=k, max_size=k))
    V = Subspace.span([W.basis.T.apply(c) for c in coeffs], W.ambient_dim)
    reps, P = quotient_space(W, V)
    assert reps.nrows == W.dim - V.dim
    assert all(W.contains(r) for r in reps.rows)
    assert P @ reps.T == Matrix.identity(reps.nrows)
    for v in V.basis.rows:
        assert not any(P.apply(v))


def test_quotient_requires_containment():
    with pytest.raises(LinAlgError):
        quotient_space(Subspace.span([[1, 0]], 2), Subspace.span([[0, 1]], 2))


def test_charpoly_examples():
    assert charpoly(Matrix.zeros(2, 2)) == [1, 0, 0]
    assert charpoly(Matrix.diag([2, 3])) == [1, -5, 6]
    # companion matrix of x^3 - x - 1
    C = Matrix([[0, 0, 1], [1, 0, 1], [0, 1, 0]])
    assert charpoly(C) == [1, 0, -1, -1]
    assert format_poly([1, 4, 4]) == "x^2 + 4*x + 4"


@given(square(entries=st.fractions(min_value=-4, max_value=4, max_denominator=5)))
def test_charpoly_matches_sympy_and_cayley_hamilton(rows):
    M = Matrix(rows)
    cp = charpoly(M)
    x = sympy.Symbol("x")
    ref = sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in r] for r in rows]).charpoly(x).all_coeffs()
    assert [Fraction(str(c)) for c in ref] == cp
    assert poly_eval_matrix(cp, M).is_zero()


@given(square())
def test_det_inverse(rows):
    M = Matrix(rows)
    assert M.det() == Fraction(str(sympy.Matrix(rows).det()))
    if M.det():
        assert M @ M.inverse() == Matrix.identity(M.nrows)


@given(matrices(max_rows=4, max_cols=4), st.lists(small, min_size=4, max_size=4))
def test_solve(rows, x):
    A = Matrix(rows)
    b = A.apply(x[: A.ncols])
    sol = solve(A, b)
    assert sol is not None and A.apply(sol) == b
    # a right-hand side off the column space has no solution
    img = image_basis(A)
    if img.dim < A.nrows:
        off = next(e for e in (Matrix.identity(A.nrows).rows) if not img.contains(e))
        assert solve(A, off) is None


@given(matrices())
def test_string_roundtrip(rows):
    M = Matrix(rows).scale(Fraction(1, 3))
    assert Matrix.from_strings(M.to_strings()) == M
    assert all("/" in s for r in M.to_strings() for s in r)


@given(matrices(entries=st.integers(-50, 50)))
def test_kernels_agree(rows):
    n = len(rows[0])
    expected = _kernels_py.echelon([list(r) for r in rows], n)
    assert _backend.echelon([list(r) for r in rows], n) == expected


def test_overflow_falls_back_to_exact_integers():
    big = 2**62
    rows = [[big, big - 1, 3], [big - 5, big + 7, 1], [1, 2, big]]
    reduced, piv = _backend.echelon([list(r) for r in rows], 3)
    assert (reduced, piv) == _kernels_py.echelon([list(r) for r in rows], 3)
    assert rank(Matrix(rows)) == sympy.Matrix(rows).rank()


def test_nonsquare_charpoly_rejected():
    with pytest.raises(LinAlgError):
        charpoly(Matrix.zeros(2, 3))
