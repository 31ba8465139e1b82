"""Builders for the shipped model families and their independent oracles.

* tori R^n / Z^n, triangulated by the Freudenthal (staircase) subdivision of
  the unit cube, with Hecke data for integer matrices;
* the closed disk with a rotation group C_r fixing the centre;
* the truncated upper half-plane for Gamma_0(N), obtained by restricting a
  PSL_2(Z)-complex with horocycle boundary circles at the cusps.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .complex import (
    EquivariantPairComplex,
    Face,
    GroupContext,
    OrbitCell,
    RestrictedComplex,
    restrict_complex,
)
from .groups import (
    GroupElement,
    GroupError,
    Representation,
    SubgroupDatum,
    cyclic_generator,
    cyclic_group,
    cyclic_rep,
    det_power,
    enumerate_cosets,
    lattice_rep,
    power_character,
    symmetric_power_rep,
    to_matrix,
)
from .linalg import Matrix, rank, to_fraction

MAX_TORUS_DIM = 3
MAX_ROTATION_ORDER = 12
MAX_LEVEL = 30
WEIGHTS = (2, 4, 6)


class SpecError(ValueError):
    """A model specification outside the supported families or ranges."""


# -- tori ------------------------------------------------------------------------


def affine(L: Matrix, v: Sequence) -> GroupElement:
    n = L.nrows
    rows = [list(L.rows[i]) + [to_fraction(v[i])] for i in range(n)]
    rows.append([0] * n + [1])
    return GroupElement(Matrix(rows, n + 1))


def translation(v: Sequence) -> GroupElement:
    return affine(Matrix.identity(len(v)), v)


def _affine_split(x: GroupElement):
    n = x.geom.nrows - 1
    L = x.geom.submatrix(range(n), range(n))
    v = tuple(x.geom.rows[i][n] for i in range(n))
    return L, v


def torus_group(n: int) -> GroupContext:
    I = Matrix.identity(n)

    def contains(x: GroupElement) -> bool:
        L, v = _affine_split(x)
        return L == I and all(t.denominator == 1 for t in v)

    gens = [translation([1 if j == i else 0 for j in range(n)]) for i in range(n)]
    return GroupContext(translation([0] * n), contains, gens, False, f"Z^{n}")


def _mask_str(mask: int, n: int) -> str:
    return "".join("1" if mask >> j & 1 else "0" for j in range(n))


def _chain_id(chain: Sequence[int], n: int) -> str:
    if not chain:
        return "s0"
    return f"s{len(chain)}_" + "-".join(_mask_str(a, n) for a in chain)


def build_torus(n: int) -> EquivariantPairComplex:
    """Freudenthal triangulation of R^n as a free Z^n-complex.

    The orbit representative of a d-simplex is the staircase
    0 < e_{A_1} < ... < e_{A_d} for a strictly increasing chain of nonempty
    coordinate sets A_1 < ... < A_d.
    """
    if not 1 <= n <= MAX_TORUS_DIM:
        raise SpecError(f"torus dimension must lie in 1..{MAX_TORUS_DIM}")
    G = torus_group(n)
    full = (1 << n) - 1
    cells = [OrbitCell("s0", 0, (0,), [G.identity])]
    for d in range(1, n + 1):
        for chain in _chains(full, d):
            faces = []
            for i in range(d + 1):
                if i == 0:
                    a1 = chain[0]
                    rest = tuple(a & ~a1 for a in chain[1:])
                    shift = [1 if a1 >> j & 1 else 0 for j in range(n)]
                    faces.append(Face(translation(shift), _chain_id(rest, n)))
                else:
                    rest = chain[: i - 1] + chain[i:]
                    faces.append(Face(G.identity, _chain_id(rest, n)))
            orient = 0
            if d == n:
                perm = [(b & ~a).bit_length() - 1 for a, b in zip((0,) + chain, chain)]
                orient = _perm_sign(perm)
            cells.append(OrbitCell(_chain_id(chain, n), d, tuple(range(d + 1)), [G.identity], faces, False, orient))
    return EquivariantPairComplex(n, cells, G, f"torus{n}")


def _chains(full: int, d: int):
    """Strictly increasing chains of d nonempty subsets of ``full``."""
    out = []

    def rec(prev, acc):
        if len(acc) == d:
            out.append(tuple(acc))
            return
        for b in range(1, full + 1):
            if b & prev == prev and b != prev and b & ~full == 0:
                rec(b, acc + [b])

    rec(0, [])
    return out


def _perm_sign(p: Sequence[int]) -> int:
    s = 1
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                s = -s
    return s


def torus_vertex_rule(K, g: GroupElement, x: GroupElement, vid: str):
    """Round g^-1 applied to the lattice point x.0 down to a lattice point."""
    L, b = _affine_split(g)
    _, v = _affine_split(x)
    Li = L.inverse()
    p = Li.apply([a - c for a, c in zip(v, b)])
    u = [math.floor(t) for t in p]
    return vid, translation(u)


def koszul_cohomology(translations: Sequence) -> list:
    """dim H^m(Z^n; E) from the Koszul complex of N_j = rho(t_j) - 1."""
    mats = [to_matrix(t) for t in translations]
    n = len(mats)
    e = mats[0].nrows
    I = Matrix.identity(e)
    N = [m - I for m in mats]
    subsets = [[frozenset(c) for c in itertools.combinations(range(n), p)] for p in range(n + 1)]
    ranks = []
    for p in range(n):
        src, tgt = subsets[p], subsets[p + 1]
        tidx = {S: i for i, S in enumerate(tgt)}
        rows = [[Fraction(0)] * (len(src) * e) for _ in range(len(tgt) * e)]
        for si, S in enumerate(src):
            for j in range(n):
                if j in S:
                    continue
                sign = -1 if sum(1 for i in S if i < j) % 2 else 1
                ti = tidx[S | {j}]
                for a in range(e):
                    for b in range(e):
                        v = N[j].rows[a][b]
                        if v:
                            rows[ti * e + a][si * e + b] += sign * v
        ranks.append(rank(Matrix(rows, len(src) * e)) if rows else 0)
    dims = []
    for p in range(n + 1):
        c = len(subsets[p]) * e
        r_out = ranks[p] if p < n else 0
        r_in = ranks[p - 1] if p > 0 else 0
        dims.append(c - r_out - r_in)
    return dims


# -- finite rotations ------------------------------------------------------------------


def rotation_group(r: int) -> GroupContext:
    elems = cyclic_group(r)
    members = set(elems)
    return GroupContext(elems[0], lambda x: x in members, [cyclic_generator(r)], False, f"C{r}")


def build_finite_rotation(r: int) -> EquivariantPairComplex:
    """Closed disk: centre c fixed by C_r, boundary circle at infinity.

    Cells: c, p0, spoke [c,p0], arc [p0, R p0] (at infinity) and the sector
    triangle [c, p0, R p0].
    """
    if not 2 <= r <= MAX_ROTATION_ORDER:
        raise SpecError(f"rotation order must lie in 2..{MAX_ROTATION_ORDER}")
    G = rotation_group(r)
    I = G.identity
    R = cyclic_generator(r)
    cells = [
        OrbitCell("c", 0, (0,), cyclic_group(r)),
        OrbitCell("p", 0, (0,), [I], at_infinity=True),
        OrbitCell("spoke", 1, (0, 1), [I], [Face(I, "p"), Face(I, "c")]),
        OrbitCell("arc", 1, (0, 1), [I], [Face(R, "p"), Face(I, "p")], at_infinity=True),
        OrbitCell("sector", 2, (0, 1, 2), [I], [Face(I, "arc"), Face(R, "spoke"), Face(I, "spoke")], orientation=1),
    ]
    return EquivariantPairComplex(2, cells, G, f"disk{r}")


def cyclotomic_poly(r: int) -> list:
    """Integer coefficients of Phi_r, lowest degree first."""
    num = [-1] + [0] * (r - 1) + [1]
    for d in range(1, r):
        if r % d == 0:
            num = _poly_div(num, cyclotomic_poly(d))
    return num


def _poly_div(a: list, b: list) -> list:
    a = list(a)
    q = [0] * (len(a) - len(b) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = a[i + len(b) - 1] // b[-1]
        q[i] = c
        for j, bj in enumerate(b):
            a[i + j] -= c * bj
    if any(a[: len(b) - 1]):
        raise ArithmeticError("inexact polynomial division")
    return q


def companion(coeffs_low_first: Sequence[int]) -> Matrix:
    d = len(coeffs_low_first) - 1
    rows = [[0] * d for _ in range(d)]
    for i in range(1, d):
        rows[i][i - 1] = 1
    for i in range(d):
        rows[i][d - 1] = -coeffs_low_first[i]
    return Matrix(rows, d)


_ROTATIONS = {
    2: [[-1, 0], [0, -1]],
    3: [[0, -1], [1, -1]],
    4: [[0, -1], [1, 0]],
    6: [[1, -1], [1, 0]],
}


def rotation_rep(r: int, spec: dict) -> Representation:
    kind = spec.get("type", "trivial")
    if kind == "trivial":
        img = Matrix([[1]])
    elif kind == "sign":
        if r % 2:
            raise SpecError("the sign representation needs an even rotation order")
        img = Matrix([[-1]])
    elif kind == "regular":
        img = cyclic_generator(r).geom
    elif kind == "cyclotomic":
        img = companion(cyclotomic_poly(r))
    elif kind == "rotation":
        if r not in _ROTATIONS:
            raise SpecError(f"no rational rotation matrix of order {r}")
        img = Matrix(_ROTATIONS[r])
    elif kind == "matrix":
        img = Matrix(spec["matrix"])
    else:
        raise SpecError(f"unknown rotation representation {kind!r}")
    try:
        return cyclic_rep(img, r, f"C{r}:{kind}")
    except GroupError as exc:
        raise SpecError(str(exc)) from None


def finite_quotient_oracle(r: int, image) -> list:
    """dims of H^m_c(R^2; E)^{C_r}: E in degree 2 only, invariants by the averaging rank."""
    A = to_matrix(image)
    P = Matrix.zeros(A.nrows, A.nrows)
    X = Matrix.identity(A.nrows)
    for _ in range(r):
        P = P + X
        X = X @ A
    return [0, 0, rank(P.scale(Fraction(1, r)))]


# -- modular ----------------------------------------------------------------------------


def sl2(a, b, c, d, label=None) -> GroupElement:
    return GroupElement(Matrix([[a, b], [c, d]]), projective=True, label=label)


S_MAT = sl2(0, -1, 1, 0, "S")
T_MAT = sl2(1, 1, 0, 1, "T")
R_MAT = sl2(0, 1, -1, 1, "R")
ONE = sl2(1, 0, 0, 1)


def _is_integral_unimodular(x: GroupElement) -> bool:
    return all(v.denominator == 1 for row in x.geom.rows for v in row) and x.geom.det() == 1


def psl2z_group() -> GroupContext:
    return GroupContext(ONE, _is_integral_unimodular, [S_MAT, T_MAT], True, "PSL2(Z)")


def build_psl2z_complex() -> EquivariantPairComplex:
    """Truncated barycentric complex of the Farey tessellation for PSL_2(Z).

    Vertices (levels): c = centre of the triangle (0, 1, oo) (0), m = i (1),
    a = horocycle point over c (2), b = horocycle point over i (3).
    """
    G = psl2z_group()
    I = ONE
    R2 = R_MAT * R_MAT
    cells = [
        OrbitCell("v_c", 0, (0,), [I, R_MAT, R2]),
        OrbitCell("v_m", 0, (1,), [I, S_MAT]),
        OrbitCell("v_a", 0, (2,), [I], at_infinity=True),
        OrbitCell("v_b", 0, (3,), [I], at_infinity=True),
        OrbitCell("e_cm", 1, (0, 1), [I], [Face(I, "v_m"), Face(I, "v_c")]),
        OrbitCell("e_ca", 1, (0, 2), [I], [Face(I, "v_a"), Face(I, "v_c")]),
        OrbitCell("e_cb", 1, (0, 3), [I], [Face(I, "v_b"), Face(I, "v_c")]),
        OrbitCell("e_cbT", 1, (0, 3), [I], [Face(T_MAT, "v_b"), Face(I, "v_c")]),
        OrbitCell("e_mb", 1, (1, 3), [I], [Face(I, "v_b"), Face(I, "v_m")]),
        OrbitCell("e_ab", 1, (2, 3), [I], [Face(I, "v_b"), Face(I, "v_a")], at_infinity=True),
        OrbitCell("e_abT", 1, (2, 3), [I], [Face(T_MAT, "v_b"), Face(I, "v_a")], at_infinity=True),
        OrbitCell("f_cmb", 2, (0, 1, 3), [I], [Face(I, "e_mb"), Face(I, "e_cb"), Face(I, "e_cm")], orientation=-1),
        OrbitCell("f_cmbT", 2, (0, 1, 3), [I], [Face(T_MAT, "e_mb"), Face(I, "e_cbT"), Face(R2, "e_cm")], orientation=1),
        OrbitCell("f_cab", 2, (0, 2, 3), [I], [Face(I, "e_ab"), Face(I, "e_cb"), Face(I, "e_ca")], orientation=1),
        OrbitCell("f_cabT", 2, (0, 2, 3), [I], [Face(I, "e_abT"), Face(I, "e_cbT"), Face(I, "e_ca")], orientation=-1),
    ]
    return EquivariantPairComplex(2, cells, G, "PSL2(Z)", absolute_levels=True)


def _units(N: int) -> list:
    return [u for u in range(1, N + 1) if math.gcd(u, N) == 1] if N > 1 else [0]


def p1_key(a: int, c: int, N: int, units: Optional[list] = None) -> tuple:
    """Canonical representative of (a : c) in P^1(Z/N)."""
    if N == 1:
        return (0, 0)
    units = units or _units(N)
    return min(((u * a) % N, (u * c) % N) for u in units)


def gamma0_contains(N: int) -> Callable[[GroupElement], bool]:
    def contains(x: GroupElement) -> bool:
        return _is_integral_unimodular(x) and x.geom.rows[1][0] % N == 0

    return contains


def gamma0_subgroup(N: int) -> SubgroupDatum:
    """Gamma_0(N) inside PSL_2(Z); left cosets x Gamma_0(N) are indexed by (a:c) of x."""
    units = _units(N)
    contains = gamma0_contains(N)

    def key(x: GroupElement) -> tuple:
        r = x.geom.rows
        return p1_key(int(r[0][0]), int(r[1][0]), N, units)

    reps = [ONE]
    index = {key(ONE): 0}
    frontier = [ONE]
    while frontier:
        nxt = []
        for x in frontier:
            for s in (S_MAT, T_MAT, T_MAT.inverse()):
                y = s * x
                k = key(y)
                if k not in index:
                    index[k] = len(reps)
                    reps.append(y)
                    nxt.append(y)
        frontier = nxt

    def locate(x: GroupElement) -> int:
        return index[key(x)]

    return SubgroupDatum(contains, reps, locate, f"Gamma0({N})")


def gamma0_in(K: EquivariantPairComplex, N: int) -> SubgroupDatum:
    """Gamma_0(N) as a subgroup of the group of K (itself some Gamma_0(M), M | N)."""
    contains = gamma0_contains(N)
    cos = enumerate_cosets(K.group.generators, contains, K.group.identity)
    return SubgroupDatum(contains, cos, None, f"Gamma0({N})")


def build_modular_complex(N: int) -> RestrictedComplex:
    if not 1 <= N <= MAX_LEVEL:
        raise SpecError(f"level must lie in 1..{MAX_LEVEL}")
    return restrict_complex(build_psl2z_complex(), gamma0_subgroup(N), f"Gamma0({N})")


def modular_rep(k: int) -> Representation:
    if k % 2 or k < 2:
        raise SpecError("weight must be even and at least 2 (-I has to act trivially)")
    if k not in WEIGHTS:
        raise SpecError(f"weight must be one of {WEIGHTS}")
    return symmetric_power_rep(k - 2)


def hnf_split(Y: Matrix):
    """Y = u M with u in SL_2(Z) and M = [[a, b], [0, d]], a, d > 0, 0 <= b < d."""
    p, q = int(Y.rows[0][0]), int(Y.rows[1][0])
    g, x, y = _xgcd(p, q)
    # u^-1 = [[x, y], [-q/g, p/g]]
    uinv = Matrix([[x, y], [-q // g, p // g]])
    M = uinv @ Y
    if M.rows[1][1] < 0:
        uinv = uinv.scale(-1)
        M = M.scale(-1)
    b, d = M.rows[0][1], M.rows[1][1]
    k = math.floor(b / d)
    shift = Matrix([[1, -k], [0, 1]])
    uinv = shift @ uinv
    M = shift @ M
    return GroupElement(uinv.inverse(), projective=True), M


def _xgcd(a: int, b: int):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a - (a // b) * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _primitive(M: Matrix) -> Matrix:
    den = 1
    for row in M.rows:
        for v in row:
            den = den * v.denominator // math.gcd(den, v.denominator)
    ints = [[int(v * den) for v in row] for row in M.rows]
    g = 0
    for row in ints:
        for v in row:
            g = math.gcd(g, v)
    return Matrix([[v // g for v in row] for row in ints])


def modular_vertex_rule(K: RestrictedComplex, g: GroupElement, x: GroupElement, vid: str):
    """Send x.v (v of type c, m, a or b) to u.v where g^-1 x y = u * (upper triangular)."""
    base_vid, y = K.lift[vid]
    Y = _primitive((g.inverse() * x * y).geom)
    if Y.det() <= 0:
        raise GroupError("commensurator element must have positive determinant")
    u, _ = hnf_split(Y)
    d, kv = K.locate(base_vid, u)
    return kv, d


def hecke_matrix_element(p: int) -> GroupElement:
    return GroupElement(Matrix([[1, 0], [0, p]]), projective=True, label=f"diag(1,{p})")


def genus_oracle(N: int) -> tuple:
    """(index, cusps, genus) of Gamma_0(N) from the classical formulas."""
    primes = [p for p in range(2, N + 1) if N % p == 0 and all(p % q for q in range(2, p))]
    index = N
    for p in primes:
        index = index * (p + 1) // p
    if N % 4 == 0:
        nu2 = 0
    else:
        nu2 = 1
        for p in primes:
            nu2 *= 1 if p == 2 else (2 if p % 4 == 1 else 0)
    if N % 9 == 0:
        nu3 = 0
    else:
        nu3 = 1
        for p in primes:
            nu3 *= 1 if p == 3 else (2 if p % 3 == 1 else 0)
    cusps = sum(_phi(math.gcd(d, N // d)) for d in range(1, N + 1) if N % d == 0)
    genus = Fraction(1) + Fraction(index, 12) - Fraction(nu2, 4) - Fraction(nu3, 3) - Fraction(cusps, 2)
    if genus.denominator != 1:
        raise ArithmeticError("genus formula produced a non-integer")
    return index, cusps, int(genus)


def _phi(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


def count_points(ainv: Sequence[int], p: int) -> int:
    """#E(F_p) for the Weierstrass curve with a-invariants [a1, a2, a3, a4, a6]."""
    a1, a2, a3, a4, a6 = ainv
    n = 1
    for x in range(p):
        for y in range(p):
            if (y * y + a1 * x * y + a3 * y - (x**3 + a2 * x * x + a4 * x + a6)) % p == 0:
                n += 1
    return n


# Optimal curves attached to the weight-2 newforms of the genus-one levels.
ELLIPTIC_CURVES = {
    11: (0, -1, 1, -10, -20),
    14: (1, 0, 1, 4, -6),
    15: (1, 1, 1, -35, -28),
}


def frobenius_trace(N: int, p: int) -> int:
    """a_p = p + 1 - #E(F_p) for the curve of conductor N (p must not divide N)."""
    if N % p == 0:
        raise ValueError("bad reduction")
    return p + 1 - count_points(ELLIPTIC_CURVES[N], p)


def cusp_components(K: EquivariantPairComplex) -> int:
    """Connected components of the at-infinity subcomplex of G\\X."""
    parent = {}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for cid, c in K.cells.items():
        if c.at_infinity and c.dim == 0:
            parent[cid] = cid
    for cid, c in K.cells.items():
        if c.at_infinity and c.dim == 1:
            a = find(c.faces[0].target)
            b = find(c.faces[1].target)
            parent[a] = b
    return len({find(a) for a in parent})


# -- model specifications ---------------------------------------------------------


@dataclass
class HeckeSpec:
    name: str
    g: GroupElement


@dataclass
class Model:
    family: str
    params: dict
    complex: EquivariantPairComplex
    rep: Representation
    vertex_rule: Optional[Callable] = None
    hecke_specs: list = field(default_factory=list)
    transfer_sub: Optional[SubgroupDatum] = None
    chi_degree: Optional[int] = None
    _hecke: dict = field(default_factory=dict, repr=False)

    @property
    def name(self) -> str:
        bits = ",".join(f"{k}={self.params[k]}" for k in sorted(self.params))
        return f"{self.family}({bits})"

    def hecke(self, name: str):
        from .hecke import build_hecke_datum

        hd = self._hecke.get(name)
        if hd is None:
            spec = next(h for h in self.hecke_specs if h.name == name)
            hd = build_hecke_datum(self.complex, spec.g, self.vertex_rule, self.chi_degree)
            self._hecke[name] = hd
        return hd

    def hecke_for(self, g: GroupElement, with_inverse: bool = False):
        from .hecke import build_hecke_datum

        return build_hecke_datum(self.complex, g, self.vertex_rule, self.chi_degree, with_inverse)

    def random_element(self, rng: random.Random, length: int = 6) -> GroupElement:
        return self.complex.group.random_element(rng, length)

    def hecke_degrees(self) -> list:
        top = self.complex.dimension if self.chi_degree is None else self.chi_degree
        return list(range(top + 1))


def _matrix_from(data) -> Matrix:
    try:
        return Matrix(data)
    except Exception as exc:  # noqa: BLE001 - any malformed entry is a spec error
        raise SpecError(f"malformed matrix {data!r}: {exc}") from None


def build_model(spec: dict) -> Model:
    """Validate a model specification and build its complex and coefficient system."""
    if not isinstance(spec, dict):
        raise SpecError("specification must be a JSON object")
    family = spec.get("family")
    params = spec.get("parameters", {})
    if not isinstance(params, dict):
        raise SpecError("parameters must be an object")
    if family == "torus":
        model = _torus_model(params, spec)
    elif family == "finite_rotation":
        model = _rotation_model(params, spec)
    elif family == "modular":
        model = _modular_model(params, spec)
    else:
        raise SpecError(f"unknown family {family!r}")
    if "complex" in spec:
        try:
            model.complex = EquivariantPairComplex.from_json(spec["complex"], model.complex.group)
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecError(f"malformed embedded complex: {exc}") from None
    return model


def _int_param(params: dict, key: str, default=None) -> int:
    v = params.get(key, default)
    if not isinstance(v, int) or isinstance(v, bool):
        raise SpecError(f"parameter {key!r} must be an integer")
    return v


def _torus_model(params: dict, spec: dict) -> Model:
    n = _int_param(params, "n")
    if not 1 <= n <= MAX_TORUS_DIM:
        raise SpecError(f"torus dimension must lie in 1..{MAX_TORUS_DIM}")
    rep_spec = spec.get("rep", {})
    trans = rep_spec.get("translations")
    if trans is None:
        trans = [[[1]] for _ in range(n)]
    if len(trans) != n:
        raise SpecError("need one translation image per lattice generator")
    mats = [_matrix_from(t) for t in trans]
    dim = mats[0].nrows
    if any(m.shape != (dim, dim) for m in mats):
        raise SpecError("translation images must be square of equal size")
    if any(m.det() == 0 for m in mats):
        raise SpecError("translation images must be invertible")
    lin = rep_spec.get("linear")
    hecke_specs = []
    for i, h in enumerate(spec.get("hecke_elements", [])):
        A = _matrix_from(h["matrix"])
        if A.shape != (n, n) or any(v.denominator != 1 for row in A.rows for v in row):
            raise SpecError("Hecke matrices must be integral n x n")
        if abs(A.det()) <= 1:
            raise SpecError("Hecke matrices need |det| > 1")
        b = h.get("translation", [0] * n)
        hecke_specs.append(HeckeSpec(h.get("name", f"A{i}"), affine(A, b)))
    linear_part = None
    if lin is not None:
        kind = lin.get("type")
        if kind == "det":
            linear_part = det_power(int(lin.get("power", 1)), dim)
        elif kind == "power":
            linear_part = power_character(_matrix_from(lin["matrix"]), to_fraction(lin["value"]), dim)
        else:
            raise SpecError(f"unknown linear part {kind!r}")
    elif hecke_specs:
        linear_part = det_power(0, dim)
    if hecke_specs and any(m != Matrix.identity(dim) for m in mats):
        raise SpecError("Hecke operators on tori need translations acting trivially")
    try:
        rep = lattice_rep(mats, linear_part, rep_spec.get("name", "lattice"))
    except GroupError as exc:
        raise SpecError(str(exc)) from None
    K = build_torus(n)
    tspec = spec.get("transfer", {})
    B = _matrix_from(tspec.get("lattice", [[2 if i == j else 0 for j in range(n)] for i in range(n)]))
    sub = lattice_subgroup(K, B)
    return Model("torus", {"n": n}, K, rep, torus_vertex_rule, hecke_specs, sub, None)


def lattice_subgroup(K: EquivariantPairComplex, B: Matrix) -> SubgroupDatum:
    """The translations by B Z^n inside Z^n."""
    if B.det() == 0:
        raise SpecError("sublattice matrix must be nonsingular")
    Bi = B.inverse()

    def contains(x):
        if not K.group.contains(x):
            return False
        _, v = _affine_split(x)
        return all(t.denominator == 1 for t in Bi.apply(v))

    cos = enumerate_cosets(K.group.generators, contains, K.group.identity)
    return SubgroupDatum(contains, cos, None, "sublattice")


def _rotation_model(params: dict, spec: dict) -> Model:
    r = _int_param(params, "order")
    if not 2 <= r <= MAX_ROTATION_ORDER:
        raise SpecError(f"rotation order must lie in 2..{MAX_ROTATION_ORDER}")
    rep = rotation_rep(r, spec.get("rep", {}))
    return Model("finite_rotation", {"order": r}, build_finite_rotation(r), rep)


def _modular_model(params: dict, spec: dict) -> Model:
    N = _int_param(params, "level")
    k = _int_param(params, "weight", 2)
    if not 1 <= N <= MAX_LEVEL:
        raise SpecError(f"level must lie in 1..{MAX_LEVEL}")
    rep = modular_rep(k)
    K = build_modular_complex(N)
    hecke_specs = []
    for h in spec.get("hecke_elements", []):
        if "p" in h:
            p = h["p"]
            if not isinstance(p, int) or p < 2 or any(p % q == 0 for q in range(2, p)):
                raise SpecError("Hecke prime must be a prime")
            hecke_specs.append(HeckeSpec(h.get("name", f"T{p}"), hecke_matrix_element(p)))
        else:
            A = _matrix_from(h["matrix"])
            if A.shape != (2, 2) or A.det() <= 0:
                raise SpecError("Hecke matrix must be 2 x 2 with positive determinant")
            hecke_specs.append(HeckeSpec(h.get("name", "g"), GroupElement(A, projective=True)))
    sub = None
    sublevel = spec.get("transfer", {}).get("level", 2 * N)
    if sublevel is not None:
        if not isinstance(sublevel, int) or sublevel % N or sublevel > 2 * MAX_LEVEL:
            raise SpecError("transfer level must be a multiple of the level")
        sub = gamma0_in(K, sublevel)
    chi_degree = spec.get("chi_degree", 2)
    return Model("modular", {"level": N, "weight": k}, K, rep, modular_vertex_rule, hecke_specs, sub, chi_degree)
