"""Acceptance criteria 1-10, one test each; every test prints a PASS/FAIL line."""

import random
import time

import pytest

from conftest import STRUCTURAL_SPECS, model_for
from dualis.duality import SCALARS, bilinear_form, cup_product, integrate, pairing_matrix
from dualis.hecke import (
    hecke_on_H0,
    hecke_operator,
    verify_adjointness,
    verify_coset_independence,
    verify_double_coset,
    verify_hecke_h0,
    verify_transfer_identities,
)
from dualis.linalg import Matrix, charpoly, format_poly, rank
from dualis.models import (
    ELLIPTIC_CURVES,
    count_points,
    finite_quotient_oracle,
    genus_oracle,
    koszul_cohomology,
    translation,
)

DUALITY_LIMIT = 60.0
CLASSICAL_LIMIT = 120.0
SUITE_LIMIT = 600.0
SUITE_START = time.perf_counter()


def verdict(capsys, n, title, ok, detail=""):
    with capsys.disabled():
        print(f"\n[criterion {n:2d}] {'PASS' if ok else 'FAIL'} {title}: {detail}")
    assert ok, detail


def _timed(fn):
    t = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t


# -- 1. duality ---------------------------------------------------------------------------

DUALITY_CONFIGS = {
    "circle": {"family": "torus", "parameters": {"n": 1}},
    "circle-char2": {"family": "torus", "parameters": {"n": 1}, "rep": {"translations": [[[2]]]}},
    "torus2": {"family": "torus", "parameters": {"n": 2}},
    "torus2-char(1,2)": {"family": "torus", "parameters": {"n": 2}, "rep": {"translations": [[[1]], [[2]]]}},
    "torus2-unipotent": {
        "family": "torus",
        "parameters": {"n": 2},
        "rep": {"translations": [[[1, 1], [0, 1]], [[1, 0], [0, 1]]]},
    },
    "disk2-sign": {"family": "finite_rotation", "parameters": {"order": 2}, "rep": {"type": "sign"}},
    "disk3": {"family": "finite_rotation", "parameters": {"order": 3}},
    "disk4-rotation": {"family": "finite_rotation", "parameters": {"order": 4}, "rep": {"type": "rotation"}},
    "disk4-regular": {"family": "finite_rotation", "parameters": {"order": 4}, "rep": {"type": "regular"}},
}
for _N in (1, 11, 14, 15):
    for _k in (2, 4):
        DUALITY_CONFIGS[f"level{_N}-k{_k}"] = {"family": "modular", "parameters": {"level": _N, "weight": _k}}


def _duality(m):
    K, rep = m.complex, m.rep
    n = K.dimension
    E, D = K.model(rep), K.model(rep.dual())
    rows = []
    for k in range(n + 1):
        a = E.cohomology(k, "interior").dim
        b = D.cohomology(n - k, "interior").dim
        r = pairing_matrix(K, rep, k, "interior").rank
        rows.append((a, b, r))
    return rows


def test_criterion_01_duality(capsys):
    bad, details = [], []
    for name, spec in DUALITY_CONFIGS.items():
        (rows, dt) = _timed(lambda: _duality(model_for(spec)))
        ok = all(a == b == r for a, b, r in rows) and dt <= DUALITY_LIMIT
        details.append(f"{name}={[a for a, _, _ in rows]}({dt:.1f}s)")
        if not ok:
            bad.append((name, rows, round(dt, 2)))
    verdict(
        capsys,
        1,
        f"interior duality on {len(DUALITY_CONFIGS)} configurations",
        not bad and len(DUALITY_CONFIGS) >= 8,
        f"failures={bad} " + " ".join(details),
    )


# -- 2. Koszul comparison ---------------------------------------------------------------------

KOSZUL_REPS = [
    (1, [[[1]]]),
    (1, [[[2]]]),
    (1, [[[-1]]]),
    (1, [[[1, 1], [0, 1]]]),
    (2, [[[1]], [[2]]]),
    (2, [[[-1]], [[1]]]),
    (2, [[[0, -1], [1, 0]], [[1, 0], [0, 1]]]),
    (2, [[[1, 1], [0, 1]], [[1, 0], [0, 1]]]),
    (3, [[[1]], [[1]], [[3]]]),
]


def test_criterion_02_grothendieck(capsys):
    bad, count = [], 0
    for n, trans in KOSZUL_REPS:
        m = model_for({"family": "torus", "parameters": {"n": n}, "rep": {"translations": trans}})
        basis = [translation([1 if i == j else 0 for i in range(n)]) for j in range(n)]
        for rep in (m.rep, m.rep.dual()):
            got = m.complex.model(rep).dims("ordinary")
            oracle = koszul_cohomology([rep(t) for t in basis])
            count += 1
            if got != oracle:
                bad.append((n, trans, got, oracle))
    nontrivial = sum(1 for _, t in KOSZUL_REPS if any(Matrix(x) != Matrix.identity(len(x)) for x in t))
    verdict(
        capsys,
        2,
        "torus models against the Koszul oracle",
        not bad and len(KOSZUL_REPS) >= 5 and nontrivial >= 2,
        f"{count} comparisons over {len(KOSZUL_REPS)} representations ({nontrivial} non-trivial), failures={bad}",
    )


# -- 3. finite quotients ----------------------------------------------------------------------

EXTRA = {
    2: [[-1, 0], [0, 1]],
    3: [[0, -1, 0], [1, -1, 0], [0, 0, 1]],
    4: [[0, -1, 0], [1, 0, 0], [0, 0, 1]],
    6: [[1, -1, 0], [1, 0, 0], [0, 0, 1]],
}


def test_criterion_03_finite_quotient(capsys):
    bad, count = [], 0
    for r in (2, 3, 4, 6):
        reps = [{"type": "trivial"}, {"type": "regular"}, {"type": "cyclotomic"}, {"type": "matrix", "matrix": EXTRA[r]}]
        if r % 2 == 0:
            reps.append({"type": "sign"})
        for rs in reps:
            m = model_for({"family": "finite_rotation", "parameters": {"order": r}, "rep": rs})
            gen = m.complex.group.generators[0]
            for rep in (m.rep, m.rep.dual()):
                got = m.complex.model(rep).dims("compact")
                oracle = finite_quotient_oracle(r, rep(gen))
                count += 1
                if got != oracle:
                    bad.append((r, rs, got, oracle))
    verdict(capsys, 3, "disk models against invariants of compact supports", not bad, f"{count} comparisons, failures={bad}")


# -- 4. transfer --------------------------------------------------------------------------------


def test_criterion_04_transfer(capsys, gamma11):
    circle = model_for({"family": "torus", "parameters": {"n": 1}})
    r1 = verify_transfer_identities(circle.complex, circle.rep, circle.transfer_sub, samples=5, seed=1)
    r2 = verify_transfer_identities(gamma11.complex, gamma11.rep, gamma11.transfer_sub, samples=3, seed=1)
    verdict(
        capsys,
        4,
        "transfer identities (index, integral, projection formula)",
        r1.passed and r2.passed and r1.info["index"] == 2 and r2.info["index"] == 3,
        f"circle index {r1.info['index']} {r1.witnesses[:2]}; level 22 in 11 index {r2.info['index']} {r2.witnesses[:2]}",
    )


# -- 5. closed form in degree 0 ---------------------------------------------------------------

HECKE_DATA = [
    ({"family": "torus", "parameters": {"n": 1}, "hecke_elements": [{"matrix": [[2]]}]}, "A0", [[2]]),
    ({"family": "torus", "parameters": {"n": 1}, "hecke_elements": [{"matrix": [[3]]}]}, "A0", [[3]]),
    (
        {
            "family": "torus",
            "parameters": {"n": 1},
            "rep": {"linear": {"type": "power", "matrix": [[2]], "value": "5/3"}},
            "hecke_elements": [{"matrix": [[2]]}],
        },
        "A0",
        [["10/3"]],
    ),
    ({"family": "torus", "parameters": {"n": 2}, "hecke_elements": [{"matrix": [[2, 1], [1, 2]]}]}, "A0", [[3]]),
    ({"family": "torus", "parameters": {"n": 2}, "hecke_elements": [{"matrix": [[1, 1], [-1, 1]]}]}, "A0", [[2]]),
    (
        {"family": "torus", "parameters": {"n": 2}, "rep": {"linear": {"type": "det", "power": 1}}, "hecke_elements": [{"matrix": [[2, 0], [0, 1]]}]},
        "A0",
        [[4]],
    ),
    (
        {"family": "modular", "parameters": {"level": 11, "weight": 2}, "hecke_elements": [{"p": 2}], "transfer": {"level": 22}},
        "T2",
        [[3]],
    ),
]


def test_criterion_05_degree_zero_closed_form(capsys):
    bad, lines = [], []
    for spec, name, expected in HECKE_DATA:
        m = model_for(spec)
        hd = m.hecke(name)
        rpt = verify_hecke_h0(m.complex, m.rep, hd)
        closed = hecke_on_H0(m.complex, m.rep, hd)
        lines.append(f"{m.name}:{closed.to_strings()}")
        if not rpt.passed or closed != Matrix.from_strings([[str(x) for x in r] for r in expected]):
            bad.append((m.name, rpt.witnesses, closed.to_strings()))
    verdict(capsys, 5, f"closed-form degree-0 operator on {len(HECKE_DATA)} data", not bad, f"{' '.join(lines)} failures={bad}")


# -- 6. adjointness ------------------------------------------------------------------------------


def test_criterion_06_adjointness(capsys, doubling, gamma11):
    results = []
    for k in (0, 1):
        results.append(("circle", k, verify_adjointness(doubling.complex, doubling.rep, doubling.hecke("A0"), k)))
    results.append(("level11", 1, verify_adjointness(gamma11.complex, gamma11.rep, gamma11.hecke("T2"), 1)))
    ok = all(r.passed for _, _, r in results)
    detail = "; ".join(f"{n} m={k} T(g)={r.info['interior']['T_g']}" for n, k, r in results)
    verdict(capsys, 6, "B(T(g)u, v) = B(u, T(g^-1)v)", ok, detail)


# -- 7. double cosets -------------------------------------------------------------------------------


def test_criterion_07_double_coset(capsys, doubling, gamma11):
    torus = model_for({"family": "torus", "parameters": {"n": 2}, "hecke_elements": [{"matrix": [[2, 1], [1, 2]]}]})
    bad, count = [], 0
    for m, name, degrees, variants in (
        (doubling, "A0", [0, 1], ("ordinary", "compact", "interior")),
        (torus, "A0", [0, 1, 2], ("ordinary", "compact", "interior")),
        (gamma11, "T2", [1], ("interior", "compact")),
    ):
        rng = random.Random(7)
        hd = m.hecke(name)
        for _ in range(3):
            a, b = m.random_element(rng), m.random_element(rng)
            other = m.hecke_for(a * hd.g * b)
            rpt = verify_double_coset(m.complex, m.rep, hd, other, degrees, variants)
            count += 1
            if not rpt.passed:
                bad.append((m.name, rpt.witnesses))
    verdict(capsys, 7, "T(a g b) = T(g) with rebuilt data", not bad, f"{count} random pairs over 3 models, failures={bad}")


# -- 8. coset independence ------------------------------------------------------------------------


def test_criterion_08_coset_independence(capsys, doubling, gamma11):
    torus = model_for({"family": "torus", "parameters": {"n": 2}, "hecke_elements": [{"matrix": [[2, 1], [1, 2]]}]})
    bad = []
    for m, name, degrees, variants in (
        (doubling, "A0", [0, 1], ("ordinary", "compact", "interior")),
        (torus, "A0", [0, 1, 2], ("ordinary", "compact", "interior")),
        (gamma11, "T2", [1], ("interior",)),
    ):
        rpt = verify_coset_independence(m.complex, m.rep, m.hecke(name), degrees, variants, trials=10, seed=3)
        if not rpt.passed:
            bad.append((m.name, rpt.witnesses[:3]))
    verdict(capsys, 8, "T(g) and transfer unchanged under gamma_i -> gamma_i d_i", not bad, f"10 trials x 3 data, failures={bad}")


# -- 9. the classical datum -------------------------------------------------------------------------


def test_criterion_09_level11(capsys):
    t0 = time.perf_counter()
    # the point count comes first and fixes the expected eigenvalue
    n2 = count_points(ELLIPTIC_CURVES[11], 2)
    a2 = 2 + 1 - n2
    genus = genus_oracle(11)[2]
    m = model_for(
        {"family": "modular", "parameters": {"level": 11, "weight": 2}, "hecke_elements": [{"p": 2}], "transfer": {"level": 22}}
    )
    dim = m.complex.model(m.rep).cohomology(1, "interior").dim
    T = hecke_operator(m.complex, m.rep, m.hecke("T2"), 1, "interior")
    cp = charpoly(T)
    dt = time.perf_counter() - t0
    expected = [1, -2 * a2, a2 * a2]
    ok = a2 == -2 and dim == 2 * genus == 2 and cp == expected and dt <= CLASSICAL_LIMIT
    verdict(
        capsys,
        9,
        "level 11 weight 2",
        ok,
        f"#E(F_2)={n2} a_2={a2} dim H^1_!={dim} (2g={2 * genus}) charpoly={format_poly(cp)} in {dt:.1f}s",
    )


# -- 10. structural suite -----------------------------------------------------------------------------

SAMPLES = 100


def _random_chain(K, rng, d):
    chain = {}
    for _ in range(3):
        cid = rng.choice(K.by_dim[d])
        r = K.ref(cid, K.group.random_element(rng, 4))
        chain[r] = chain.get(r, 0) + rng.choice([-2, -1, 1, 2])
    return {k: v for k, v in chain.items() if v}


def _structural(m, rng):
    K, rep = m.complex, m.rep
    n = K.dimension
    E, D, S = K.model(rep), K.model(rep.dual()), K.model(SCALARS)
    failures = []
    for s in range(SAMPLES):
        d = rng.randrange(2, n + 1) if n >= 2 else None
        if d is not None and K.boundary(K.boundary(_random_chain(K, rng, d))):
            failures.append(("dd", s))
        rel = bool(s % 2)
        k = rng.randrange(n - 1) if n >= 2 else None
        if k is not None:
            f = E.random_cochain(k, rel, rng)
            if any(E.coboundary(k + 1, rel).apply(E.coboundary(k, rel).apply(f.vector))):
                failures.append(("deltadelta", s))
        # Leibniz
        p = rng.randrange(n)
        q = rng.randrange(n - p)
        f = E.random_cochain(p, True, rng)
        h = D.random_cochain(q, False, rng)
        lhs = S.coboundary(p + q, True).apply(cup_product(K, f, h).vector)
        df = E.cochain(p + 1, True, E.coboundary(p, True).apply(f.vector))
        dh = D.cochain(q + 1, False, D.coboundary(q, False).apply(h.vector))
        sign = -1 if p % 2 else 1
        rhs = [x + sign * y for x, y in zip(cup_product(K, df, h).vector, cup_product(K, f, dh).vector)]
        if list(lhs) != rhs:
            failures.append(("leibniz", s))
        # Stokes
        w = S.random_cochain(n - 1, True, rng)
        if integrate(K, S.cochain(n, True, S.coboundary(n - 1, True).apply(w.vector))) != 0:
            failures.append(("stokes", s))
        # representative independence of B on a random class pair
        k = rng.randrange(n + 1)
        U = E.cohomology(k, "compact").representatives
        V = D.cohomology(n - k, "ordinary").representatives
        if U.nrows and V.nrows:
            W = bilinear_form(K, rep, k)
            u = [rng.randint(-3, 3) for _ in range(U.nrows)]
            v = [rng.randint(-3, 3) for _ in range(V.nrows)]
            uu = U.T.apply(u)
            vv = V.T.apply(v)
            base = sum(x * y for x, y in zip(uu, W.apply(vv)))
            if k > 0:
                uu = [x + y for x, y in zip(uu, E.coboundary(k - 1, True).apply(E.random_cochain(k - 1, True, rng).vector))]
            if n - k > 0:
                vv = [x + y for x, y in zip(vv, D.coboundary(n - k - 1, False).apply(D.random_cochain(n - k - 1, False, rng).vector))]
            if sum(x * y for x, y in zip(uu, W.apply(vv))) != base:
                failures.append(("representatives", s))
    return failures


def test_criterion_10_structural(capsys):
    bad, timings = [], []
    for name, spec in STRUCTURAL_SPECS.items():
        rng = random.Random(2024)
        fails, dt = _timed(lambda: _structural(model_for(spec), rng))
        timings.append(f"{name}({dt:.1f}s)")
        if fails:
            bad.append((name, fails[:5]))
    elapsed = time.perf_counter() - SUITE_START
    verdict(
        capsys,
        10,
        f"structural properties, {SAMPLES} samples per model",
        not bad and elapsed <= SUITE_LIMIT,
        f"{len(STRUCTURAL_SPECS)} models {' '.join(timings)}; acceptance module so far {elapsed:.0f}s; failures={bad}",
    )


def test_interior_pairings_are_square_full_rank(gamma11):
    # supporting check for criterion 1 at the headline datum
    P = pairing_matrix(gamma11.complex, gamma11.rep, 1, "interior")
    assert P.matrix.shape == (2, 2) and rank(P.matrix) == 2


if __name__ == "__main__":  # pragma: no cover
    pytest.main([__file__, "-v"])
