"""Cup products, integration over the fundamental class and the duality pairing."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .complex import Cochain, ComplexError, EquivariantPairComplex
from .groups import Representation, trivial_rep
from .linalg import Matrix, rank
from .report import CheckReport

# one shared object so that the scalar cochain spaces are cached once per complex
SCALARS = trivial_rep()

PAIRING_VARIANTS = ("compact", "interior")


def _dot(a, b) -> Fraction:
    return sum((x * y for x, y in zip(a, b) if x and y), Fraction(0))


def cup_product(K: EquivariantPairComplex, f: Cochain, h: Cochain) -> Cochain:
    """Alexander-Whitney product of f (values in E) and h (values in E*) into scalars.

    The result is relative when either factor is.  On a cell sigma of degree
    p+q the value is <rho(a) f(front), rho*(b) h(back)> with a, b the
    attaching elements of the front p-face and back q-face.
    """
    p, q = f.degree, h.degree
    d = p + q
    if d > K.dimension:
        raise ComplexError(f"cup product degree {d} exceeds the dimension {K.dimension}")
    relative = f.relative or h.relative
    E = f.space.model.rep
    Ed = h.space.model.rep
    if E.dim != Ed.dim:
        raise ComplexError("cup product factors have coefficient dimensions that do not pair")
    out = K.model(SCALARS).space(d, relative)
    vals = [Fraction(0)] * out.dim
    for cid in out.cells:
        a, F = K.front(cid, p)
        b, B = K.back(cid, q)
        fv = f.value(F)
        if not any(fv):
            continue
        hv = h.value(B)
        if not any(hv):
            continue
        vals[out.offsets[cid]] = _dot(E(a).apply(fv), Ed(b).apply(hv))
    return Cochain(out, tuple(vals))


def integrate(K: EquivariantPairComplex, top: Cochain) -> Fraction:
    """Sum of orientation times value over the top orbit cells."""
    if top.degree != K.dimension:
        raise ComplexError("only top-degree cochains can be integrated")
    if top.space.model.rep.dim != 1:
        raise ComplexError("integration needs one-dimensional trivial coefficients")
    total = Fraction(0)
    for cid in K.by_dim[K.dimension]:
        o = K.cells[cid].orientation
        if o not in (1, -1):
            raise ComplexError(f"top cell {cid} has no orientation")
        if cid in top.space.offsets:
            total += o * top.vector[top.space.offsets[cid]]
    return total


def bilinear_form(
    K: EquivariantPairComplex, rep: Representation, m: int, dual: Optional[Representation] = None, relative: bool = True
) -> Matrix:
    """W with integrate(f cup h) = f^T W h for f in C^m(E), h in C^{n-m}(E*)."""
    dual = dual if dual is not None else rep.dual()
    n = K.dimension
    mf = K.model(rep)
    mh = K.model(dual)
    sf = mf.space(m, relative)
    sh = mh.space(n - m, False)
    rows = [[Fraction(0)] * sh.dim for _ in range(sf.dim)]
    for cid in K.by_dim[n]:
        eps = K.cells[cid].orientation
        a, F = K.front(cid, m)
        b, B = K.back(cid, n - m)
        if F not in sf.offsets or B not in sh.offsets:
            continue
        X = rep(a) @ mf.invariants(F).basis.T  # dimE x dF
        Y = dual(b) @ mh.invariants(B).basis.T  # dimE x dB
        blk = X.T @ Y
        fo, bo = sf.offsets[F], sh.offsets[B]
        for i, row in enumerate(blk.rows):
            tgt = rows[fo + i]
            for j, v in enumerate(row):
                if v:
                    tgt[bo + j] += eps * v
    return Matrix._raw(tuple(tuple(r) for r in rows), sh.dim)


@dataclass
class PairingMatrix:
    degree: int
    variant: str
    matrix: Matrix

    @property
    def rank(self) -> int:
        return rank(self.matrix)

    @property
    def nonsingular(self) -> bool:
        r, c = self.matrix.shape
        return r == c and self.rank == r


def _rows_times(U: Matrix, W: Matrix) -> Matrix:
    out = []
    ws = W.sparse_rows()
    for u in U.rows:
        acc = [Fraction(0)] * W.ncols
        for i, c in enumerate(u):
            if c:
                for j, w in ws[i]:
                    acc[j] += c * w
        out.append(tuple(acc))
    return Matrix._raw(tuple(out), W.ncols)


def _pair(U: Matrix, W: Matrix, V: Matrix) -> Matrix:
    UW = _rows_times(U, W)
    return Matrix._raw(tuple(tuple(_dot(r, v) for v in V.rows) for r in UW.rows), V.nrows)


def pairing_matrix(
    K: EquivariantPairComplex,
    rep: Representation,
    m: int,
    variant: str = "compact",
    dual: Optional[Representation] = None,
    check_representatives: bool = False,
    rng: Optional[random.Random] = None,
) -> PairingMatrix:
    """B(u_i, v_j) on H^m_c(E) x H^{n-m}(E*) or on interior cohomology.

    With ``check_representatives`` every u_i and v_j is perturbed by a random
    coboundary and the entries are recomputed; a mismatch raises.
    """
    if variant not in PAIRING_VARIANTS:
        raise ComplexError(f"unknown pairing variant {variant!r}")
    dual = dual if dual is not None else rep.dual()
    n = K.dimension
    mf, mh = K.model(rep), K.model(dual)
    if variant == "compact":
        U = mf.cohomology(m, "compact").representatives
        V = mh.cohomology(n - m, "ordinary").representatives
    else:
        U = mf.cohomology(m, "interior").lifts
        V = mh.cohomology(n - m, "interior").representatives
    W = bilinear_form(K, rep, m, dual)
    B = _pair(U, W, V)
    if check_representatives and B.nrows and B.ncols:
        rng = rng or random.Random(0)
        U2 = _perturb(mf, m, True, U, rng)
        V2 = _perturb(mh, n - m, False, V, rng)
        if _pair(U2, W, V2) != B:
            raise ComplexError("pairing depends on the choice of representatives")
    return PairingMatrix(m, variant, B)


def _perturb(model, m: int, relative: bool, reps: Matrix, rng: random.Random) -> Matrix:
    if m == 0 or model.space(m - 1, relative).dim == 0:
        return reps
    D = model.coboundary(m - 1, relative)
    rows = []
    for r in reps.rows:
        w = model.random_cochain(m - 1, relative, rng).vector
        dw = D.apply(w)
        rows.append(tuple(a + b for a, b in zip(r, dw)))
    return Matrix._raw(tuple(rows), reps.ncols)


def verify_duality(K: EquivariantPairComplex, rep: Representation, seed: int = 0) -> CheckReport:
    """Dimension symmetry and exact full rank of both pairings in every degree."""
    rpt = CheckReport("duality")
    dual = rep.dual()
    n = K.dimension
    rng = random.Random(seed)
    mf, mh = K.model(rep), K.model(dual)
    degrees = []
    for m in range(n + 1):
        entry = {"degree": m}
        for variant, left, right in (("compact", "compact", "ordinary"), ("interior", "interior", "interior")):
            a = mf.cohomology(m, left).dim
            b = mh.cohomology(n - m, right).dim
            try:
                P = pairing_matrix(K, rep, m, variant, dual, check_representatives=True, rng=rng)
            except ComplexError as exc:
                rpt.fail(degree=m, variant=variant, reason=str(exc))
                continue
            r = P.rank
            entry[variant] = {"dims": [a, b], "rank": r}
            if a != b:
                rpt.fail(degree=m, variant=variant, reason="dimension mismatch", dims=[a, b])
            elif r != a:
                rpt.fail(degree=m, variant=variant, reason="pairing is degenerate", rank=r, dim=a)
        degrees.append(entry)
    rpt.info["degrees"] = degrees
    return rpt


def verify_stokes(K: EquivariantPairComplex, samples: int = 20, seed: int = 0) -> CheckReport:
    """integrate(delta w) = 0 for random relative (n-1)-cochains w."""
    rpt = CheckReport("stokes")
    rng = random.Random(seed)
    model = K.model(SCALARS)
    n = K.dimension
    D = model.coboundary(n - 1, True)
    for s in range(samples):
        w = model.random_cochain(n - 1, True, rng)
        val = integrate(K, model.cochain(n, True, D.apply(w.vector)))
        if val != 0:
            rpt.fail(sample=s, value=str(val))
    return rpt
