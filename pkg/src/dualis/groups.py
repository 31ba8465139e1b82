"""Group elements as exact matrices, representations, and subgroup/coset data."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Optional, Sequence

from .linalg import LinAlgError, Matrix, Subspace, kernel_basis, image_basis, to_fraction
from .report import CheckReport


class GroupError(ValueError):
    pass


class GroupElement:
    """An invertible rational matrix; with ``projective`` set, g and -g are equal."""

    __slots__ = ("geom", "projective", "label", "_key")

    def __init__(self, geom, projective: bool = False, label: Optional[str] = None):
        if not isinstance(geom, Matrix):
            geom = Matrix(geom)
        if geom.nrows != geom.ncols:
            raise GroupError("group element must be square")
        if projective:
            for x in (x for r in geom.rows for x in r):
                if x:
                    if x < 0:
                        geom = -geom
                    break
        self.geom = geom
        self.projective = projective
        self.label = label
        self._key = None

    @classmethod
    def identity(cls, n: int, projective: bool = False) -> "GroupElement":
        return cls(Matrix.identity(n), projective, "e")

    @property
    def key(self) -> tuple:
        if self._key is None:
            # ints hash far faster than Fractions and compare equal to them
            self._key = tuple(x.numerator if x.denominator == 1 else x for r in self.geom.rows for x in r)
        return self._key

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        A, B = self.geom, other.geom
        if A.nrows == 2 and B.nrows == 2:
            (a, b), (c, d) = A.rows
            (e, f), (g, h) = B.rows
            if a.denominator == b.denominator == c.denominator == d.denominator == 1 and (
                e.denominator == f.denominator == g.denominator == h.denominator == 1
            ):
                # integral 2x2 products dominate path searches; stay in int arithmetic
                a, b, c, d = a.numerator, b.numerator, c.numerator, d.numerator
                e, f, g, h = e.numerator, f.numerator, g.numerator, h.numerator
                rows = (
                    (Fraction(a * e + b * g), Fraction(a * f + b * h)),
                    (Fraction(c * e + d * g), Fraction(c * f + d * h)),
                )
                return GroupElement(Matrix._raw(rows, 2), self.projective)
        return GroupElement(A @ B, self.projective)

    def inverse(self) -> "GroupElement":
        g = self.geom
        if g.nrows == 2:
            a, b = g.rows[0]
            c, d = g.rows[1]
            det = a * d - b * c
            if not det:
                raise GroupError("singular group element")
            inv = Matrix._raw(((d / det, -b / det), (-c / det, a / det)), 2)
        else:
            try:
                inv = g.inverse()
            except LinAlgError as exc:
                raise GroupError("singular group element") from exc
        return GroupElement(inv, self.projective)

    def conjugate(self, h: "GroupElement") -> "GroupElement":
        """h^-1 * self * h."""
        return h.inverse() * self * h

    def is_identity(self) -> bool:
        return self.geom == Matrix.identity(self.geom.nrows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        if self.label:
            return f"GroupElement({self.label})"
        return f"GroupElement({[[str(x) for x in r] for r in self.geom.rows]})"

    def to_json(self) -> list:
        return self.geom.to_strings()

    @classmethod
    def from_json(cls, data, projective: bool = False) -> "GroupElement":
        return cls(Matrix([[Fraction(x) for x in r] for r in data]), projective)


def word_product(elements: Sequence[GroupElement], identity: GroupElement) -> GroupElement:
    out = identity
    for e in elements:
        out = out * e
    return out


class Representation:
    """A finite-dimensional rational representation, evaluated on demand."""

    def __init__(self, dim: int, func: Callable[[GroupElement], Matrix], name: str = "rep"):
        self.dim = dim
        self._func = func
        self.name = name
        self._cache: dict = {}
        self._dual: Optional["Representation"] = None

    def __call__(self, g: GroupElement) -> Matrix:
        m = self._cache.get(g)
        if m is None:
            m = self._func(g)
            if m.shape != (self.dim, self.dim):
                raise GroupError(f"{self.name} returned a {m.shape} matrix, expected dim {self.dim}")
            self._cache[g] = m
        return m

    def dual(self) -> "Representation":
        """The contragredient, memoised so that dual().dual() is self."""
        if self._dual is None:
            d = dual_rep(self)
            d._dual = self
            self._dual = d
        return self._dual

    def __repr__(self) -> str:
        return f"Representation({self.name}, dim={self.dim})"


def rep_evaluate(rep: Representation, g: GroupElement) -> Matrix:
    return rep(g)


def dual_rep(rep: Representation) -> Representation:
    """g acts on E* = Hom(E, Q) by the inverse transpose."""
    base = rep

    def func(g):
        return base(g).inverse().T

    name = rep.name[:-1] if rep.name.endswith("*") else rep.name + "*"
    return Representation(rep.dim, func, name)


def trivial_rep(dim: int = 1) -> Representation:
    I = Matrix.identity(dim)
    return Representation(dim, lambda g: I, "trivial" if dim == 1 else f"trivial^{dim}")


def direct_sum(*reps: Representation) -> Representation:
    dims = [r.dim for r in reps]
    n = sum(dims)

    def func(g):
        rows = []
        off = 0
        for r, d in zip(reps, dims):
            m = r(g)
            for row in m.rows:
                rows.append((0,) * off + row + (0,) * (n - off - d))
            off += d
        return Matrix(rows, n)

    return Representation(n, func, "+".join(r.name for r in reps))


def tensor_matrix(A: Matrix, B: Matrix) -> Matrix:
    """Kronecker product."""
    rows = []
    for ra in A.rows:
        for rb in B.rows:
            rows.append(tuple(a * b for a in ra for b in rb))
    return Matrix(rows, A.ncols * B.ncols)


def sym_power_matrix(g: Matrix, k: int) -> Matrix:
    """Matrix of P(X, Y) -> P((X, Y) g) on the basis X^(k-i) Y^i."""
    if g.shape != (2, 2):
        raise GroupError("Sym^k needs 2x2 matrices")
    (a, b), (c, d) = g.rows
    # (aX + cY)^(k-i) (bX + dY)^i
    cols = []
    for i in range(k + 1):
        p = [Fraction(0)] * (k + 1)
        s, t = k - i, i
        for u in range(s + 1):
            cu = comb(s, u) * a ** (s - u) * c ** u
            if not cu:
                continue
            for v in range(t + 1):
                cv = comb(t, v) * b ** (t - v) * d ** v
                if cv:
                    p[u + v] += cu * cv
        cols.append(p)
    return Matrix.from_columns(cols, k + 1)


def symmetric_power_rep(k: int) -> Representation:
    return Representation(k + 1, lambda g: sym_power_matrix(g.geom, k), f"Sym{k}")


def affine_parts(geom: Matrix):
    n = geom.nrows - 1
    L = geom.submatrix(range(n), range(n))
    v = tuple(geom.rows[i][n] for i in range(n))
    return L, v


def lattice_rep(
    translations: Sequence[Matrix],
    linear_part: Optional[Callable[[Matrix], Matrix]] = None,
    name: str = "lattice",
) -> Representation:
    """Representation of Z^n (optionally extended by linear maps) on affine matrices.

    ``translations[j]`` is the image of the j-th unit translation; these must
    commute.  ``linear_part`` gives the action of the linear part of an affine
    element and defaults to the identity.
    """
    gens = [to_matrix(t) for t in translations]
    if not gens:
        raise GroupError("need at least one translation generator")
    d = gens[0].nrows
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            if gens[i] @ gens[j] != gens[j] @ gens[i]:
                raise GroupError(f"translation images {i} and {j} do not commute")
    invs = [m.inverse() for m in gens]
    I = Matrix.identity(d)
    inert = [m == I for m in gens]

    def func(g):
        L, v = affine_parts(g.geom)
        out = I
        for j, x in enumerate(v):
            if inert[j]:
                continue
            if x.denominator != 1:
                raise GroupError(f"translation part {v} is not integral")
            x = int(x)
            out = out @ (gens[j] ** x if x >= 0 else invs[j] ** (-x))
        if L != Matrix.identity(L.nrows):
            if linear_part is None:
                raise GroupError("representation has no linear part")
            out = out @ linear_part(L)
        return out

    return Representation(d, func, name)


def power_character(A, value, dim: int = 1, max_power: int = 12) -> Callable[[Matrix], Matrix]:
    """Linear part acting by value**k on A**k (k found by search); other linear parts are rejected."""
    A = to_matrix(A)
    value = to_fraction(value)
    n = A.nrows
    table = {}
    P, Q = Matrix.identity(n), Matrix.identity(n)
    Ainv = A.inverse()
    for k in range(max_power + 1):
        table.setdefault(P, k)
        table.setdefault(Q, -k)
        P, Q = P @ A, Q @ Ainv

    def func(L):
        k = table.get(L)
        if k is None:
            raise GroupError("linear part is not a power of the Hecke matrix")
        return Matrix.identity(dim).scale(value**k)

    return func


def det_power(s: int, dim: int = 1) -> Callable[[Matrix], Matrix]:
    """Linear part acting by the scalar det(L)^s."""

    def func(L):
        return Matrix.identity(dim).scale(L.det() ** s)

    return func


def cyclic_generator(r: int) -> GroupElement:
    """Cyclic shift of order r, the matrix realisation of the rotation generator."""
    rows = [[1 if i == (j + 1) % r else 0 for j in range(r)] for i in range(r)]
    return GroupElement(Matrix(rows), label="rot")


def cyclic_group(r: int) -> list:
    g = cyclic_generator(r)
    out = [GroupElement.identity(r)]
    for _ in range(r - 1):
        out.append(out[-1] * g)
    return out


def cyclic_exponent(g: GroupElement, r: int) -> int:
    col = g.geom.column(0)
    j = next((i for i, x in enumerate(col) if x), None)
    if j is None or g != cyclic_group(r)[j]:
        raise GroupError(f"{g!r} is not a power of the order-{r} rotation")
    return j


def cyclic_rep(image: Matrix, r: int, name: str = "cyclic") -> Representation:
    """Representation of C_r determined by the image of the generator."""
    image = to_matrix(image)
    if image ** r != Matrix.identity(image.nrows):
        raise GroupError(f"generator image does not have order dividing {r}")
    powers = [Matrix.identity(image.nrows)]
    for _ in range(r - 1):
        powers.append(powers[-1] @ image)
    return Representation(image.nrows, lambda g: powers[cyclic_exponent(g, r)], name)


def to_matrix(x) -> Matrix:
    return x if isinstance(x, Matrix) else Matrix(x)


def check_homomorphism(rep: Representation, elements: Sequence[GroupElement]) -> CheckReport:
    rpt = CheckReport(f"homomorphism:{rep.name}")
    for g in elements:
        for h in elements:
            if rep(g * h) != rep(g) @ rep(h):
                rpt.fail(g=g.to_json(), h=h.to_json())
                return rpt
    if elements:
        e = GroupElement.identity(elements[0].geom.nrows, elements[0].projective)
        if rep(e) != Matrix.identity(rep.dim):
            rpt.fail(reason="identity not sent to identity")
    return rpt


def _check_finite_subgroup(H: Sequence[GroupElement]) -> None:
    if not H:
        raise GroupError("empty subgroup")
    keys = set(H)
    if not any(h.is_identity() for h in H):
        raise GroupError("finite subgroup must contain the identity")
    for a in H:
        for b in H:
            if a * b not in keys:
                raise GroupError("finite subgroup not closed under products")


def invariants_subspace(rep: Representation, H: Sequence[GroupElement], check: bool = True) -> Subspace:
    """E^H via the averaging projector, cross-checked against the fixed-point kernel."""
    if check:
        _check_finite_subgroup(H)
    n = rep.dim
    if len(H) == 1:
        return Subspace.whole(n)
    P = Matrix.zeros(n, n)
    for h in H:
        P = P + rep(h)
    P = P.scale(Fraction(1, len(H)))
    via_projector = image_basis(P)
    I = Matrix.identity(n)
    stacked = None
    for h in H:
        block = rep(h) - I
        stacked = block if stacked is None else stacked.vstack(block)
    via_kernel = kernel_basis(stacked)
    if via_projector != via_kernel:
        raise GroupError("projector and fixed-point computations of E^H disagree")
    if check and P @ P != P:
        raise GroupError("averaging operator is not idempotent")
    return via_projector


def hom_rep_matrix(E: Matrix, F: Matrix) -> Matrix:
    """Matrix of f -> F f E^-1 on row-major vec(f)."""
    Einv = E.inverse()
    # vec_r(F X B) = (F kron B^T) vec_r(X)
    return tensor_matrix(F, Einv.T)


def hom_stalk_check(E: Representation, F: Representation, H: Sequence[GroupElement]):
    """Dimensions of Hom(E, F)^H and of the H-intertwiners, computed independently."""
    _check_finite_subgroup(H)
    hom = Representation(E.dim * F.dim, lambda h: hom_rep_matrix(E(h), F(h)), "Hom")
    dim1 = invariants_subspace(hom, H).dim
    # intertwiner equations F(h) f - f E(h) = 0, unknowns f[i][j] row-major
    m, n = F.dim, E.dim
    eqs = []
    for h in H:
        Fh, Eh = F(h), E(h)
        for i in range(m):
            for j in range(n):
                row = [Fraction(0)] * (m * n)
                for k in range(m):
                    row[k * n + j] += Fh.rows[i][k]
                for k in range(n):
                    row[i * n + k] -= Eh.rows[k][j]
                eqs.append(row)
    dim2 = kernel_basis(Matrix(eqs, m * n)).dim
    return dim1, dim2


@dataclass
class SubgroupDatum:
    """A finite-index subgroup given by membership and left coset representatives.

    ``cosets[i]`` are the gamma_i with G the disjoint union of gamma_i * sub,
    ``cosets[0]`` the identity.  ``locate``, when given, maps x in G to the i
    with x in gamma_i * sub without scanning.
    """

    contains: Callable[[GroupElement], bool]
    cosets: list
    locate: Optional[Callable[[GroupElement], int]] = None
    name: str = "sub"

    @property
    def index(self) -> int:
        return len(self.cosets)

    def coset_index(self, x: GroupElement) -> int:
        if self.locate is not None:
            return self.locate(x)
        for i, gi in enumerate(self.cosets):
            if self.contains(gi.inverse() * x):
                return i
        raise GroupError(f"{x!r} lies in no listed coset")

    def right_coset_index(self, x: GroupElement) -> int:
        """The i with sub * x == sub * gamma_i^-1."""
        return self.coset_index(x.inverse())

    def with_cosets(self, cosets: Sequence[GroupElement]) -> "SubgroupDatum":
        """Same subgroup, other representatives (the fast locator is dropped)."""
        return SubgroupDatum(self.contains, list(cosets), None, self.name)


def enumerate_cosets(
    generators: Sequence[GroupElement],
    contains: Callable[[GroupElement], bool],
    identity: GroupElement,
    limit: int = 10_000,
) -> list:
    """Left cosets x*sub reachable from sub by left multiplication with generators."""
    gens = list(generators) + [g.inverse() for g in generators]
    reps = [identity]
    inv = [identity]
    frontier = [identity]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = s * x
                if any(contains(r_inv * y) for r_inv in inv):
                    continue
                reps.append(y)
                inv.append(y.inverse())
                nxt.append(y)
                if len(reps) > limit:
                    raise GroupError("coset enumeration exceeded the limit")
        frontier = nxt
    return reps


def verify_coset_decomposition(
    sub: SubgroupDatum, samples: Sequence[GroupElement], identity_first: bool = True
) -> CheckReport:
    rpt = CheckReport("coset_decomposition", info={"index": sub.index})
    cos = sub.cosets
    if not cos or (identity_first and not cos[0].is_identity()):
        rpt.fail(reason="first coset representative is not the identity")
    invs = [c.inverse() for c in cos]
    for i in range(len(cos)):
        for j in range(len(cos)):
            if i != j and sub.contains(invs[i] * cos[j]):
                rpt.fail(reason="cosets not disjoint", i=i, j=j)
    for s in samples:
        hits = [i for i, ci in enumerate(invs) if sub.contains(ci * s)]
        if len(hits) != 1:
            rpt.fail(reason="sample not in exactly one coset", element=s.to_json(), hits=hits)
        elif sub.locate is not None and sub.locate(s) != hits[0]:
            rpt.fail(reason="fast locator disagrees with membership scan", element=s.to_json())
    return rpt


@dataclass
class CommensuratorDatum:
    """g with Delta' = gGg^-1 n G (``delta1``) and Delta'' = G n g^-1Gg (``delta2``)."""

    g: GroupElement
    delta1: SubgroupDatum
    delta2: SubgroupDatum

    def check_conjugation(self, samples: Sequence[GroupElement]) -> CheckReport:
        rpt = CheckReport("commensurator_conjugation")
        g, gi = self.g, self.g.inverse()
        for d2 in samples:
            if not self.delta2.contains(d2):
                continue
            if not self.delta1.contains(g * d2 * gi):
                rpt.fail(element=d2.to_json(), reason="g d'' g^-1 not in Delta'")
            d1 = g * d2 * gi
            if not self.delta2.contains(gi * d1 * g):
                rpt.fail(element=d1.to_json(), reason="g^-1 d' g not in Delta''")
        return rpt


def random_word(generators: Sequence[GroupElement], identity: GroupElement, length: int, rng: random.Random) -> GroupElement:
    gens = list(generators) + [g.inverse() for g in generators]
    out = identity
    for _ in range(length):
        out = out * rng.choice(gens)
    return out
