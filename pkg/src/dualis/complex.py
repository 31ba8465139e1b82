"""Finite equivariant ordered-simplicial complexes and their cochain complexes.

A complex is a finite list of orbit cells.  Each orbit cell stands for the
G-orbit of one ordered simplex of the contractible space X; its i-th face is
recorded as ``attach_i * target_i``.  Cells of X are addressed as
``(cell_id, x)``, the translate of the representative by x, with x
canonicalised modulo the stabilizer.

Cochains are G-equivariant maps from chains of X into a representation E;
they are determined by their values on the representatives, which lie in the
stabilizer invariants.  Compact supports are modelled by cochains vanishing on
the at-infinity subcomplex.
"""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .groups import GroupElement, GroupError, Representation, SubgroupDatum, invariants_subspace, random_word
from .linalg import Matrix, Subspace, image_basis, kernel_basis, quotient_space, rank, rref, to_fraction
from .report import CheckReport

VARIANTS = ("ordinary", "compact", "interior")


class ComplexError(ValueError):
    pass


@dataclass(frozen=True)
class Face:
    attach: GroupElement
    target: str


@dataclass
class OrbitCell:
    id: str
    dim: int
    levels: tuple
    stabilizer: list
    faces: list = field(default_factory=list)
    at_infinity: bool = False
    orientation: int = 0

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "dim": self.dim,
            "levels": list(self.levels),
            "stabilizer": [h.to_json() for h in self.stabilizer],
            "faces": [{"attach": f.attach.to_json(), "target": f.target} for f in self.faces],
            "at_infinity": self.at_infinity,
            "orientation": self.orientation,
        }

    @classmethod
    def from_json(cls, d: dict, projective: bool) -> "OrbitCell":
        return cls(
            id=d["id"],
            dim=d["dim"],
            levels=tuple(d["levels"]),
            stabilizer=[GroupElement.from_json(h, projective) for h in d["stabilizer"]],
            faces=[Face(GroupElement.from_json(f["attach"], projective), f["target"]) for f in d["faces"]],
            at_infinity=d["at_infinity"],
            orientation=d["orientation"],
        )


@dataclass
class GroupContext:
    """What the complex needs to know about G: membership, generators, sampling."""

    identity: GroupElement
    contains: Callable[[GroupElement], bool]
    generators: list
    projective: bool = False
    name: str = "G"

    def random_element(self, rng: random.Random, length: int = 6) -> GroupElement:
        if not self.generators:
            return self.identity
        return random_word(self.generators, self.identity, length, rng)


class EquivariantPairComplex:
    """Orbit cells of a G-complex X-bar with an at-infinity subcomplex."""

    def __init__(
        self,
        dimension: int,
        cells: Sequence[OrbitCell],
        group: GroupContext,
        name: str = "complex",
        absolute_levels: bool = False,
    ):
        self.dimension = dimension
        self.group = group
        self.name = name
        self.absolute_levels = absolute_levels
        self.cells = {}
        for c in cells:
            if c.id in self.cells:
                raise ComplexError(f"duplicate cell id {c.id}")
            self.cells[c.id] = c
        self.by_dim = [
            sorted(cid for cid, c in self.cells.items() if c.dim == d) for d in range(dimension + 1)
        ]
        for cid, c in self.cells.items():
            if not 0 <= c.dim <= dimension:
                raise ComplexError(f"cell {cid} has dimension {c.dim} outside 0..{dimension}")
            for f in c.faces:
                if f.target not in self.cells:
                    raise ComplexError(f"cell {cid} has face target {f.target} not in the complex")
        self._stabsets = {cid: set(c.stabilizer) for cid, c in self.cells.items()}
        self._cofaces = None
        self._stars = None
        self._vertex_cache: dict = {}
        self._models: dict = {}

    # -- cells of X ---------------------------------------------------------

    def canonical(self, cid: str, x: GroupElement) -> GroupElement:
        stab = self.cells[cid].stabilizer
        if len(stab) == 1:
            return x
        return min((x * h for h in stab), key=lambda e: e.key)

    def ref(self, cid: str, x: GroupElement):
        return (cid, self.canonical(cid, x))

    def face(self, cid: str, i: int):
        f = self.cells[cid].faces[i]
        return f.attach, f.target

    def iterated_face(self, cid: str, indices: Sequence[int]):
        """Apply d_{indices[0]} first, then d_{indices[1]}, ...; returns (element, target)."""
        x = self.group.identity
        cur = cid
        for i in indices:
            a, cur = self.face(cur, i)
            x = x * a
        return x, cur

    def front(self, cid: str, p: int):
        """The front p-face [v_0..v_p]."""
        d = self.cells[cid].dim
        return self.iterated_face(cid, list(range(d, p, -1)))

    def back(self, cid: str, q: int):
        """The back q-face [v_{d-q}..v_d]."""
        d = self.cells[cid].dim
        return self.iterated_face(cid, [0] * (d - q))

    def vertices(self, cid: str) -> list:
        """Ordered vertices of the representative as (element, vertex id)."""
        v = self._vertex_cache.get(cid)
        if v is None:
            c = self.cells[cid]
            if c.dim == 0:
                v = [(self.group.identity, cid)]
            else:
                a, t = self.face(cid, c.dim)
                head = [(a * x, w) for x, w in self.vertices(t)]
                a0, t0 = self.face(cid, 0)
                x, w = self.vertices(t0)[-1]
                v = head + [(a0 * x, w)]
            self._vertex_cache[cid] = v
        return v

    def boundary(self, chain: dict) -> dict:
        """Boundary of a chain {(cid, x): coeff} of cells of X."""
        out: dict = {}
        for (cid, x), c in chain.items():
            for i, f in enumerate(self.cells[cid].faces):
                r = self.ref(f.target, x * f.attach)
                v = out.get(r, 0) + (c if i % 2 == 0 else -c)
                if v:
                    out[r] = v
                else:
                    out.pop(r, None)
        return out

    def translate(self, g: GroupElement, chain: dict) -> dict:
        out: dict = {}
        for (cid, x), c in chain.items():
            r = self.ref(cid, g * x)
            v = out.get(r, 0) + c
            if v:
                out[r] = v
            else:
                out.pop(r, None)
        return out

    def cofaces_of(self, cid: str) -> list:
        """Cells of X having the representative of ``cid`` as a face: (cid', x)."""
        if self._cofaces is None:
            cf: dict = {k: set() for k in self.cells}
            for sid, s in self.cells.items():
                for f in s.faces:
                    ainv = f.attach.inverse()
                    for h in self.cells[f.target].stabilizer:
                        cf[f.target].add(self.ref(sid, h * ainv))
            self._cofaces = {k: sorted(v, key=lambda r: (r[0], r[1].key)) for k, v in cf.items()}
        return self._cofaces[cid]

    def star_edges(self, vid: str) -> list:
        """Edges of X at the representative vertex: (edge ref, position of vid, other endpoint ref)."""
        if self._stars is None:
            self._stars = {}
        st = self._stars.get(vid)
        if st is None:
            st = []
            for eref in self.cofaces_of(vid):
                eid, x = eref
                (x0, w0), (x1, w1) = self.vertices(eid)
                p0 = self.ref(w0, x * x0)
                p1 = self.ref(w1, x * x1)
                me = self.ref(vid, self.group.identity)
                if p0 == me:
                    st.append((eref, 0, p1))
                if p1 == me:
                    st.append((eref, 1, p0))
            self._stars[vid] = st
        return st

    # -- bookkeeping ----------------------------------------------------------

    def cell_counts(self) -> list:
        return [len(ids) for ids in self.by_dim]

    def at_infinity_ids(self) -> list:
        return sorted(cid for cid, c in self.cells.items() if c.at_infinity)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "dimension": self.dimension,
            "projective": self.group.projective,
            "absolute_levels": self.absolute_levels,
            "cells": [self.cells[cid].to_json() for d in range(self.dimension + 1) for cid in self.by_dim[d]],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, data: dict, group: Optional[GroupContext] = None) -> "EquivariantPairComplex":
        projective = data.get("projective", False)
        cells = [OrbitCell.from_json(c, projective) for c in data["cells"]]
        if group is None:
            dim = len(cells[0].stabilizer[0].geom.rows)
            group = GroupContext(GroupElement.identity(dim, projective), lambda g: True, [], projective)
        return cls(data["dimension"], cells, group, data.get("name", "complex"), data.get("absolute_levels", False))

    def model(self, rep: Representation) -> "CochainComplex":
        m = self._models.get(id(rep))
        if m is None or m.rep is not rep:
            m = CochainComplex(self, rep)
            self._models[id(rep)] = m
        return m


# -- validation ---------------------------------------------------------------


def validate_complex(K: EquivariantPairComplex, rep: Optional[Representation] = None) -> CheckReport:
    """Check every structural axiom; the report names the cell and the axiom."""
    rpt = CheckReport("validate_complex", info={"cells": K.cell_counts()})
    n = K.dimension
    for cid, c in K.cells.items():
        if len(c.faces) != (c.dim + 1 if c.dim > 0 else 0):
            rpt.fail(cell=cid, axiom="face count")
            continue
        if len(c.levels) != c.dim + 1 or any(a >= b for a, b in zip(c.levels, c.levels[1:])):
            rpt.fail(cell=cid, axiom="levels strictly increasing")
        if any(f.target not in K.cells for f in c.faces):
            rpt.fail(cell=cid, axiom="missing face target")
            continue
        for f in c.faces:
            if f.attach.projective != K.group.projective:
                rpt.fail(cell=cid, axiom="projectivisation flag")
            if not K.group.contains(f.attach):
                rpt.fail(cell=cid, axiom="attaching element outside G")
            if K.cells[f.target].dim != c.dim - 1:
                rpt.fail(cell=cid, axiom="face dimension")
            if c.at_infinity and not K.cells[f.target].at_infinity:
                rpt.fail(cell=cid, axiom="face of an at-infinity cell not at infinity")
        stab = c.stabilizer
        if not any(h.is_identity() for h in stab):
            rpt.fail(cell=cid, axiom="stabilizer lacks identity")
        sset = K._stabsets[cid]
        for a in stab:
            if not K.group.contains(a):
                rpt.fail(cell=cid, axiom="stabilizer element outside G")
            for b in stab:
                if a * b not in sset:
                    rpt.fail(cell=cid, axiom="stabilizer not closed")
                    break
        if c.dim >= n - 1 and len(stab) != 1:
            rpt.fail(cell=cid, axiom="codimension <= 1 cell with nontrivial stabilizer")
        for h in stab:
            for i, f in enumerate(c.faces):
                w = f.attach.inverse() * h * f.attach
                if w not in K._stabsets[f.target]:
                    rpt.fail(cell=cid, axiom="stabilizer does not fix face", face=i)
        if c.dim == n:
            if c.orientation not in (1, -1):
                rpt.fail(cell=cid, axiom="top cell lacks orientation")
        elif c.orientation != 0:
            rpt.fail(cell=cid, axiom="orientation on a non-top cell")
        if c.at_infinity and c.dim >= n:
            rpt.fail(cell=cid, axiom="at-infinity cell of top dimension")
        if K.absolute_levels:
            for i, f in enumerate(c.faces):
                expect = c.levels[:i] + c.levels[i + 1 :]
                if tuple(K.cells[f.target].levels) != tuple(expect):
                    rpt.fail(cell=cid, axiom="face levels inconsistent", face=i)
        for j in range(1, c.dim + 1 if c.dim >= 2 else 1):
            for i in range(j):
                # d_i d_j = d_{j-1} d_i
                x1, t1 = K.iterated_face(cid, [j, i])
                x2, t2 = K.iterated_face(cid, [i, j - 1])
                if K.ref(t1, x1) != K.ref(t2, x2):
                    rpt.fail(cell=cid, axiom="simplicial identity", i=i, j=j)
    fatal = {"face count", "face dimension", "attaching element outside G", "missing face target"}
    if any(w.get("axiom") in fatal for w in rpt.witnesses):
        return rpt
    for cid in (c for d in range(2, n + 1) for c in K.by_dim[d]):
        dd = K.boundary(K.boundary({K.ref(cid, K.group.identity): 1}))
        if dd:
            (tc, _), coeff = min(dd.items(), key=lambda kv: kv[0][0])
            rpt.fail(axiom="boundary of boundary nonzero", cell=cid, term=tc, coefficient=coeff)
    reps = [rep] if rep is not None else []
    from .groups import trivial_rep

    reps.append(trivial_rep())
    for r in reps:
        model = K.model(r)
        for rel in (False, True):
            for m in range(n - 1):
                prod = model.coboundary(m + 1, rel) @ model.coboundary(m, rel)
                if not prod.is_zero():
                    rpt.fail(axiom="coboundary squared nonzero", degree=m, relative=rel, rep=r.name)
    return rpt


# -- cochains -----------------------------------------------------------------


class CochainSpace:
    """Coordinates of equivariant m-cochains: per cell, coordinates in E^{G_cell}."""

    def __init__(self, model: "CochainComplex", degree: int, relative: bool):
        K = model.K
        self.model = model
        self.degree = degree
        self.relative = relative
        if 0 <= degree <= K.dimension:
            ids = K.by_dim[degree]
        else:
            ids = []
        self.cells = [c for c in ids if not (relative and K.cells[c].at_infinity)]
        self.offsets = {}
        off = 0
        for c in self.cells:
            self.offsets[c] = off
            off += model.invariants(c).dim
        self.dim = off

    def block(self, cid: str) -> range:
        o = self.offsets[cid]
        return range(o, o + self.model.invariants(cid).dim)

    def value(self, vec: Sequence, cid: str) -> tuple:
        """Value of the cochain on the representative, as a vector of E."""
        n = self.model.rep.dim
        if cid not in self.offsets:
            return (Fraction(0),) * n
        B = self.model.invariants(cid).basis
        o = self.offsets[cid]
        out = [Fraction(0)] * n
        for k, row in enumerate(B.rows):
            c = vec[o + k]
            if c:
                for j, b in enumerate(row):
                    if b:
                        out[j] += c * b
        return tuple(out)

    def from_values(self, values: dict) -> tuple:
        """Coordinates from per-cell E-vectors (which must be invariant)."""
        out = [Fraction(0)] * self.dim
        for cid in self.cells:
            v = values.get(cid)
            if v is None:
                continue
            S = self.model.invariants(cid)
            coords = S.coordinates(v)
            o = self.offsets[cid]
            for k, x in enumerate(coords):
                out[o + k] = x
        return tuple(out)


@dataclass
class Cochain:
    space: CochainSpace
    vector: tuple

    @property
    def degree(self) -> int:
        return self.space.degree

    @property
    def relative(self) -> bool:
        return self.space.relative

    def value(self, cid: str) -> tuple:
        return self.space.value(self.vector, cid)


@dataclass
class CohomologyBasis:
    """Representatives (rows, in the variant's cochain coordinates) and coordinates."""

    degree: int
    variant: str
    representatives: Matrix
    coordinate_map: Matrix
    lifts: Optional[Matrix] = None  # compact representatives for the interior variant

    @property
    def dim(self) -> int:
        return self.representatives.nrows

    def coordinates(self, cocycle: Sequence) -> tuple:
        return self.coordinate_map.apply(cocycle)


class CochainComplex:
    """Cached cochain spaces, coboundaries and cohomology of (K, rep)."""

    def __init__(self, K: EquivariantPairComplex, rep: Representation):
        self.K = K
        self.rep = rep
        self._inv: dict = {}
        self._spaces: dict = {}
        self._cob: dict = {}
        self._coh: dict = {}
        self._restriction: dict = {}

    def invariants(self, cid: str) -> Subspace:
        s = self._inv.get(cid)
        if s is None:
            s = invariants_subspace(self.rep, self.K.cells[cid].stabilizer, check=False)
            self._inv[cid] = s
        return s

    def space(self, m: int, relative: bool) -> CochainSpace:
        key = (m, relative)
        s = self._spaces.get(key)
        if s is None:
            s = CochainSpace(self, m, relative)
            self._spaces[key] = s
        return s

    def coordinate_block(self, target_cid: str, g: GroupElement, source_cid: str) -> list:
        """Matrix (as row lists) of e -> coords_target(rep(g) e) on E^{G_source}."""
        St = self.invariants(target_cid)
        Bs = self.invariants(source_cid).basis
        R = self.rep(g)
        out = []
        for p in St.pivots:
            rrow = R.rows[p]
            out.append([sum((rrow[j] * b for j, b in enumerate(brow) if b), Fraction(0)) for brow in Bs.rows])
        return out

    def coboundary(self, m: int, relative: bool = False) -> Matrix:
        """Matrix of delta: C^m -> C^{m+1}."""
        key = (m, relative)
        D = self._cob.get(key)
        if D is not None:
            return D
        src = self.space(m, relative)
        tgt = self.space(m + 1, relative)
        rows = [[Fraction(0)] * src.dim for _ in range(tgt.dim)]
        K = self.K
        for tid in tgt.cells:
            to = tgt.offsets[tid]
            for i, f in enumerate(K.cells[tid].faces):
                if f.target not in src.offsets:
                    continue
                so = src.offsets[f.target]
                blk = self.coordinate_block(tid, f.attach, f.target)
                sign = 1 if i % 2 == 0 else -1
                for a, brow in enumerate(blk):
                    row = rows[to + a]
                    for b, v in enumerate(brow):
                        if v:
                            row[so + b] += sign * v
        D = Matrix._raw(tuple(tuple(r) for r in rows), src.dim)
        self._cob[key] = D
        return D

    def cohomology(self, m: int, variant: str = "ordinary") -> CohomologyBasis:
        if variant not in VARIANTS:
            raise ComplexError(f"unknown variant {variant!r}")
        key = (m, variant)
        H = self._coh.get(key)
        if H is not None:
            return H
        if variant == "interior":
            H = self._interior(m)
        else:
            relative = variant == "compact"
            space = self.space(m, relative)
            Z = kernel_basis(self.coboundary(m, relative)) if space.dim else Subspace.whole(0)
            if m > 0 and self.space(m - 1, relative).dim and space.dim:
                V = image_basis(self.coboundary(m - 1, relative))
            else:
                V = Subspace(space.dim, Matrix.zeros(0, space.dim), ())
            reps, P = quotient_space(Z, V)
            H = CohomologyBasis(m, variant, reps, P)
        self._coh[key] = H
        return H

    def extend_relative(self, m: int, vec: Sequence) -> tuple:
        """Relative cochain coordinates -> absolute coordinates (zero at infinity)."""
        rel = self.space(m, True)
        ab = self.space(m, False)
        out = [Fraction(0)] * ab.dim
        for cid in rel.cells:
            ro, ao = rel.offsets[cid], ab.offsets[cid]
            for k in range(self.invariants(cid).dim):
                out[ao + k] = vec[ro + k]
        return tuple(out)

    def restrict_to_relative(self, m: int, vec: Sequence) -> tuple:
        """Absolute coordinates -> relative coordinates, dropping at-infinity cells."""
        rel = self.space(m, True)
        ab = self.space(m, False)
        out = [Fraction(0)] * rel.dim
        for cid in rel.cells:
            ro, ao = rel.offsets[cid], ab.offsets[cid]
            for k in range(self.invariants(cid).dim):
                out[ro + k] = vec[ao + k]
        return tuple(out)

    def restriction_map(self, m: int) -> Matrix:
        """H^m_compact -> H^m_ordinary on the chosen bases (columns = images)."""
        M = self._restriction.get(m)
        if M is None:
            Hc = self.cohomology(m, "compact")
            Ho = self.cohomology(m, "ordinary")
            cols = [Ho.coordinates(self.extend_relative(m, u)) for u in Hc.representatives.rows]
            M = Matrix.from_columns(cols, Ho.dim)
            self._restriction[m] = M
        return M

    def _interior(self, m: int) -> CohomologyBasis:
        Hc = self.cohomology(m, "compact")
        Ho = self.cohomology(m, "ordinary")
        R = self.restriction_map(m)
        ab = self.space(m, False)
        if R.ncols == 0 or R.nrows == 0:
            empty = Matrix.zeros(0, ab.dim)
            return CohomologyBasis(m, "interior", empty, empty, Matrix.zeros(0, self.space(m, True).dim))
        _, piv, _ = rref(R, transform=False)
        lifts = Matrix._raw(tuple(Hc.representatives.rows[j] for j in piv), Hc.representatives.ncols)
        reps = Matrix._raw(tuple(self.extend_relative(m, u) for u in lifts.rows), ab.dim)
        # left inverse of the image columns, composed with ordinary coordinates
        C = R.submatrix(range(R.nrows), piv)  # h_ord x h_int, full column rank
        _, rpiv, T = rref(C)
        Linv = Matrix._raw(T.rows[: len(rpiv)], T.ncols)
        return CohomologyBasis(m, "interior", reps, Linv @ Ho.coordinate_map, lifts)

    def dims(self, variant: str) -> list:
        return [self.cohomology(m, variant).dim for m in range(self.K.dimension + 1)]

    def cochain(self, m: int, relative: bool, vector: Sequence) -> Cochain:
        return Cochain(self.space(m, relative), tuple(to_fraction(x) for x in vector))

    def random_cochain(self, m: int, relative: bool, rng: random.Random, bound: int = 3) -> Cochain:
        sp = self.space(m, relative)
        return Cochain(sp, tuple(Fraction(rng.randint(-bound, bound)) for _ in range(sp.dim)))


def coboundary_matrix(K: EquivariantPairComplex, rep: Representation, m: int, relative: bool = False) -> Matrix:
    return K.model(rep).coboundary(m, relative)


def cohomology(K: EquivariantPairComplex, rep: Representation, m: int, variant: str = "ordinary") -> CohomologyBasis:
    return K.model(rep).cohomology(m, variant)


def restriction_map(K: EquivariantPairComplex, rep: Representation, m: int) -> Matrix:
    return K.model(rep).restriction_map(m)


def cohomology_dims(K: EquivariantPairComplex, rep: Representation) -> dict:
    model = K.model(rep)
    return {v: model.dims(v) for v in VARIANTS}


# -- restriction to a finite-index subgroup -----------------------------------


class RestrictedComplex(EquivariantPairComplex):
    """The same space X viewed as a complex for a finite-index subgroup.

    Cells are the sub-orbits of the parent's cells, indexed by double cosets
    sub \\ G / G_cell.  ``lift[cid'] = (parent cid, y)`` with representative
    ``y * parent representative``.
    """

    def __init__(self, parent: EquivariantPairComplex, sub: SubgroupDatum, name: Optional[str] = None):
        self.parent = parent
        self.sub = sub
        G = parent.group
        m = sub.index
        inv_cosets = [c.inverse() for c in sub.cosets]
        self._orbit_of: dict = {}
        self.lift: dict = {}
        cells = []
        pending = []
        for pid in sorted(parent.cells):
            pc = parent.cells[pid]
            seen: dict = {}
            for i in range(m):
                if i in seen:
                    continue
                j = i
                seen[i] = (j, G.identity)
                orbit = [i]
                stab = []
                for h in pc.stabilizer:
                    k = sub.right_coset_index(inv_cosets[j] * h)
                    if k == j:
                        stab.append(inv_cosets[j] * h * sub.cosets[j])
                    elif k not in seen:
                        seen[k] = (j, h)
                        orbit.append(k)
                if len(orbit) * len(stab) != len(pc.stabilizer):
                    raise ComplexError(
                        f"double coset bookkeeping inconsistent for {pid}: orbit {len(orbit)}, "
                        f"stabilizer {len(stab)}, |G_cell| {len(pc.stabilizer)}"
                    )
                cid = f"{pid}.{j:03d}"
                self.lift[cid] = (pid, inv_cosets[j])
                cells.append(OrbitCell(cid, pc.dim, pc.levels, stab, [], pc.at_infinity, pc.orientation))
                pending.append((cid, pid))
            for k, (j, h) in seen.items():
                self._orbit_of[(pid, k)] = (f"{pid}.{j:03d}", h)
        cellmap = {c.id: c for c in cells}
        for cid, pid in pending:
            y = self.lift[cid][1]
            faces = []
            for f in parent.cells[pid].faces:
                d, tid = self._locate(f.target, y * f.attach)
                faces.append(Face(d, tid))
            cellmap[cid].faces = faces
        group = GroupContext(G.identity, sub.contains, _schreier_generators(G, sub), G.projective, sub.name)
        super().__init__(parent.dimension, cells, group, name or f"{parent.name}|{sub.name}", parent.absolute_levels)

    def _locate(self, pid: str, x: GroupElement):
        i = self.sub.right_coset_index(x)
        cid, h = self._orbit_of[(pid, i)]
        y = self.lift[cid][1]
        d = x * h.inverse() * y.inverse()
        return d, cid

    def locate(self, pid: str, x: GroupElement):
        """Write the parent cell x * pid as d * (representative of a sub-cell), d in sub."""
        return self._locate(pid, x)


def _schreier_generators(G: GroupContext, sub: SubgroupDatum) -> list:
    gens = []
    seen = set()
    for ci in sub.cosets:
        ci_inv = ci.inverse()
        for s in G.generators:
            x = s * ci
            j = sub.coset_index(x)
            t = sub.cosets[j].inverse() * x
            if not t.is_identity() and t not in seen:
                seen.add(t)
                gens.append(t)
    return gens


def restrict_complex(K: EquivariantPairComplex, sub: SubgroupDatum, name: Optional[str] = None) -> RestrictedComplex:
    return RestrictedComplex(K, sub, name)


# -- paths and fillings in X ---------------------------------------------------


def shortest_path(K: EquivariantPairComplex, start, goal, at_infinity_only: bool = False, limit: int = 200_000) -> dict:
    """1-chain of X with boundary goal - start, by bidirectional breadth-first search."""
    if start == goal:
        return {}
    # prev[side][node] = (parent, edge, sign of the edge oriented parent -> node)
    prev = ({start: None}, {goal: None})
    fronts = [[start], [goal]]
    while fronts[0] and fronts[1]:
        side = 0 if len(fronts[0]) <= len(fronts[1]) else 1
        mine, other = prev[side], prev[1 - side]
        nxt = []
        for cur in fronts[side]:
            vid, x = cur
            for (eid, ex), pos, (wid, wx) in K.star_edges(vid):
                if at_infinity_only and not K.cells[eid].at_infinity:
                    continue
                nb = K.ref(wid, x * wx)
                if nb in mine:
                    continue
                mine[nb] = (cur, K.ref(eid, x * ex), 1 if pos == 0 else -1)
                if nb in other:
                    return _join_paths(prev, nb)
                nxt.append(nb)
        fronts[side] = nxt
        if len(prev[0]) + len(prev[1]) > limit:
            raise ComplexError("path search exceeded its limit")
    raise ComplexError("no path between the given vertices")


def _join_paths(prev, meet) -> dict:
    chain: dict = {}
    for tree, sign in ((prev[0], 1), (prev[1], -1)):
        node = meet
        while tree[node] is not None:
            p, e, s = tree[node]
            v = chain.get(e, 0) + sign * s
            if v:
                chain[e] = v
            else:
                chain.pop(e, None)
            node = p
    return chain


def fill_cycle(K: EquivariantPairComplex, z: dict, degree: int, at_infinity_only: bool = False, max_rounds: int = 8) -> dict:
    """A (degree+1)-chain of X whose boundary is the degree-cycle z."""
    if not z:
        return {}
    if degree == 0:
        items = sorted(z.items(), key=lambda kv: (kv[0][0], kv[0][1].key))
        if sum(c for _, c in items) != 0:
            raise ComplexError("0-cycle has nonzero augmentation")
        base = items[0][0]
        out: dict = {}
        for r, c in items[1:]:
            for e, s in shortest_path(K, base, r, at_infinity_only).items():
                v = out.get(e, 0) + c * s
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return out
    cand: set = set()
    frontier = set(z)
    for _ in range(max_rounds):
        new = set()
        for cid, x in frontier:
            for sid, sx in K.cofaces_of(cid):
                if at_infinity_only and not K.cells[sid].at_infinity:
                    continue
                r = K.ref(sid, x * sx)
                if r not in cand:
                    new.add(r)
        cand |= new
        sol = _solve_filling(K, z, sorted(cand, key=lambda r: (r[0], r[1].key)))
        if sol is not None:
            return sol
        frontier = set()
        for r in new:
            frontier |= set(K.boundary({r: 1}))
    raise ComplexError("could not fill cycle within the search radius")


def _solve_filling(K, z, cand):
    from .linalg import solve

    bds = [K.boundary({r: 1}) for r in cand]
    rows_idx: dict = {}
    for b in bds:
        for r in b:
            rows_idx.setdefault(r, len(rows_idx))
    for r in z:
        if r not in rows_idx:
            return None
    A = [[Fraction(0)] * len(cand) for _ in range(len(rows_idx))]
    for j, b in enumerate(bds):
        for r, c in b.items():
            A[rows_idx[r]][j] = Fraction(c)
    rhs = [Fraction(0)] * len(rows_idx)
    for r, c in z.items():
        rhs[rows_idx[r]] = Fraction(c)
    x = solve(Matrix(A, len(cand)), rhs)
    if x is None:
        return None
    return {cand[j]: v for j, v in enumerate(x) if v}
