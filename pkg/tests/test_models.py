import math
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from dualis.complex import VARIANTS, validate_complex
from dualis.hecke import hecke_operator
from dualis.linalg import Matrix, charpoly
from dualis.models import (
    ELLIPTIC_CURVES,
    SpecError,
    build_model,
    count_points,
    cusp_components,
    finite_quotient_oracle,
    frobenius_trace,
    gamma0_contains,
    genus_oracle,
    hnf_split,
    koszul_cohomology,
    p1_key,
)


def dims(m, variant="ordinary"):
    return m.complex.model(m.rep).dims(variant)


# -- tori ---------------------------------------------------------------------------


def test_circle_and_torus_dims():
    assert dims(build_model({"family": "torus", "parameters": {"n": 1}})) == [1, 1]
    assert dims(build_model({"family": "torus", "parameters": {"n": 2}})) == [1, 2, 1]


@pytest.mark.parametrize(
    "translations,expected",
    [
        ([[[1]]], [1, 1]),
        ([[[2]]], [0, 0]),
        ([[[1]], [[2]]], [0, 0, 0]),
        ([[[1, 1], [0, 1]]], [1, 1]),
    ],
)
def test_koszul_examples(translations, expected):
    assert koszul_cohomology([Matrix(t) for t in translations]) == expected


def test_koszul_against_model_for_mixed_character():
    spec = {"family": "torus", "parameters": {"n": 2}, "rep": {"translations": [[[1]], [[2]]]}}
    m = build_model(spec)
    assert dims(m) == koszul_cohomology([Matrix([[1]]), Matrix([[2]])]) == [0, 0, 0]


# -- finite rotations -------------------------------------------------------------------


def test_rotation_examples():
    r3 = build_model({"family": "finite_rotation", "parameters": {"order": 3}})
    assert dims(r3, "ordinary") == [1, 0, 0]
    assert dims(r3, "compact") == [0, 0, 1]
    assert dims(r3, "interior") == [0, 0, 0]
    r2 = build_model({"family": "finite_rotation", "parameters": {"order": 2}, "rep": {"type": "sign"}})
    assert dims(r2, "ordinary") == [0, 0, 0]
    r4 = build_model({"family": "finite_rotation", "parameters": {"order": 4}, "rep": {"type": "rotation"}})
    assert dims(r4, "ordinary")[0] == 0


def test_finite_quotient_oracle_examples():
    assert finite_quotient_oracle(3, Matrix([[1]])) == [0, 0, 1]
    assert finite_quotient_oracle(2, Matrix([[-1]])) == [0, 0, 0]
    assert finite_quotient_oracle(4, Matrix([[0, -1], [1, 0]])) == [0, 0, 0]


@pytest.mark.parametrize("r", [2, 3, 4, 6])
def test_rotation_regular_rep(r):
    m = build_model({"family": "finite_rotation", "parameters": {"order": r}, "rep": {"type": "regular"}})
    assert dims(m, "compact") == [0, 0, 1]
    assert validate_complex(m.complex, m.rep).passed


# -- modular curves -------------------------------------------------------------------


def classical_counts(N):
    """Index, elliptic points, cusps and genus of Gamma_0(N), elliptic points by brute force mod N."""
    index = N
    for p in sympy.primefactors(N):
        index = index * (p + 1) // p
    nu2 = sum(1 for x in range(N) if (x * x + 1) % N == 0)
    nu3 = sum(1 for x in range(N) if (x * x + x + 1) % N == 0)
    cusps = sum(sympy.totient(math.gcd(d, N // d)) for d in sympy.divisors(N))
    genus = 1 + Fraction(index, 12) - Fraction(nu2, 4) - Fraction(nu3, 3) - Fraction(cusps, 2)
    return index, nu2, nu3, cusps, int(genus)


def cusp_form_dim(N, k):
    _, nu2, nu3, c, g = classical_counts(N)
    if k == 2:
        return g
    return (k - 1) * (g - 1) + (k // 2 - 1) * c + nu2 * (k // 4) + nu3 * (k // 3)


@pytest.mark.parametrize("N,expected", [(1, (1, 1, 0)), (11, (12, 2, 1)), (22, (36, 4, 2))])
def test_genus_oracle_examples(N, expected):
    assert genus_oracle(N) == expected


@pytest.mark.parametrize("N", [1, 2, 3, 4, 5, 6, 7, 9, 11, 13, 14, 15, 22, 30])
def test_genus_oracle_matches_brute_force(N):
    index, _, _, cusps, genus = classical_counts(N)
    assert genus_oracle(N) == (index, cusps, genus)


@pytest.mark.parametrize("N", [1, 2, 3, 5, 6, 7, 11, 13, 14, 15, 22])
@pytest.mark.parametrize("k", [2, 4, 6])
def test_interior_dimension_is_twice_cusp_forms(N, k):
    if N == 22 and k == 6:
        pytest.skip("covered by weight 2 and 4 at this level")
    m = build_model({"family": "modular", "parameters": {"level": N, "weight": k}})
    assert dims(m, "interior") == [0, 2 * cusp_form_dim(N, k), 0]


@pytest.mark.parametrize("N", [1, 11, 14, 15, 22])
def test_cusps_and_validity(N):
    m = build_model({"family": "modular", "parameters": {"level": N}})
    assert validate_complex(m.complex, m.rep).passed
    assert cusp_components(m.complex) == genus_oracle(N)[1]


def test_point_counts():
    # [a1, a2, a3, a4, a6] of the conductor-11 curve: #E(F_2) = 5 so a_2 = -2
    assert count_points(ELLIPTIC_CURVES[11], 2) == 5
    # traces from the standard tables of the weight-2 newforms of these levels
    table = {(11, 2): -2, (11, 3): -1, (11, 5): 1, (11, 7): -2, (14, 3): -2, (14, 5): 0, (15, 2): -1, (15, 7): 0}
    for (N, p), a in table.items():
        assert frobenius_trace(N, p) == a


@pytest.mark.slow
@pytest.mark.parametrize("N,p", [(11, 3), (14, 3), (15, 2)])
def test_hecke_eigenvalue_matches_point_count(N, p):
    m = build_model(
        {"family": "modular", "parameters": {"level": N}, "hecke_elements": [{"p": p}], "chi_degree": 1}
    )
    T = hecke_operator(m.complex, m.rep, m.hecke(f"T{p}"), 1, "interior")
    a = frobenius_trace(N, p)
    assert charpoly(T) == [1, -2 * a, a * a]


@given(st.integers(-30, 30), st.integers(-30, 30), st.sampled_from([2, 3, 5, 7]), st.integers(0, 10))
def test_hnf_split(a, c, p, seed):
    if math.gcd(a, c) != 1:
        return
    x, y, _ = sympy.gcdex(a, c)
    # an integral matrix of determinant p with first column (a, c) up to a unit
    u = Matrix([[a, -int(y)], [c, int(x)]])
    rng = random.Random(seed)
    b = rng.randrange(p)
    Y = u @ Matrix([[1, b], [0, p]])
    w, M = hnf_split(Y)
    assert w.geom @ M == Y or w.geom @ M == Y.scale(-1)
    assert M.rows[1][0] == 0 and M.rows[0][0] > 0 and M.rows[1][1] > 0
    assert 0 <= M.rows[0][1] < M.rows[1][1]
    assert w.geom.det() == 1


@given(st.integers(0, 100), st.integers(0, 100), st.sampled_from([5, 11, 14, 15]), st.integers(0, 50))
def test_p1_key_unit_invariant(a, c, N, s):
    if math.gcd(math.gcd(a, c), N) != 1:
        return
    units = [u for u in range(1, N) if math.gcd(u, N) == 1]
    lam = units[s % len(units)]
    assert p1_key(a, c, N) == p1_key(lam * a, lam * c, N)


def test_gamma0_membership():
    from dualis.models import sl2

    inside = gamma0_contains(11)
    assert inside(sl2(1, 1, 0, 1))
    assert inside(sl2(1, 0, 11, 1))
    assert not inside(sl2(0, -1, 1, 0))


# -- specification errors -------------------------------------------------------------


@pytest.mark.parametrize(
    "spec",
    [
        [],
        {"family": "sphere"},
        {"family": "torus", "parameters": {"n": 0}},
        {"family": "torus", "parameters": {"n": "2"}},
        {"family": "torus", "parameters": {"n": 1}, "rep": {"translations": [[[0]]]}},
        {"family": "torus", "parameters": {"n": 2}, "rep": {"translations": [[[1]]]}},
        {"family": "torus", "parameters": {"n": 1}, "hecke_elements": [{"matrix": [[1]]}]},
        {"family": "torus", "parameters": {"n": 1}, "rep": {"translations": [[[2]]]}, "hecke_elements": [{"matrix": [[2]]}]},
        {"family": "finite_rotation", "parameters": {"order": 1}},
        {"family": "finite_rotation", "parameters": {"order": 5}, "rep": {"type": "mystery"}},
        {"family": "modular", "parameters": {"level": 11, "weight": 3}},
        {"family": "modular", "parameters": {"level": 0}},
        {"family": "modular", "parameters": {"level": 11}, "hecke_elements": [{"p": 4}]},
        {"family": "modular", "parameters": {"level": 11}, "transfer": {"level": 13}},
    ],
)
def test_invalid_specs_rejected(spec):
    with pytest.raises(SpecError):
        build_model(spec)


def test_all_variants_available_for_each_family():
    for spec in (
        {"family": "torus", "parameters": {"n": 1}},
        {"family": "finite_rotation", "parameters": {"order": 2}},
        {"family": "modular", "parameters": {"level": 1}},
    ):
        m = build_model(spec)
        for v in VARIANTS:
            assert len(dims(m, v)) == m.complex.dimension + 1
