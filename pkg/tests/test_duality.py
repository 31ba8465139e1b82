import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import STRUCTURAL_SPECS, model_for
from dualis.duality import (
    SCALARS,
    bilinear_form,
    cup_product,
    integrate,
    pairing_matrix,
    verify_duality,
    verify_stokes,
)
from dualis.models import build_model

seeds = st.integers(0, 2**32 - 1)


def _dot(a, b):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def test_zero_factor_gives_zero(torus2):
    K = torus2.complex
    cc = K.model(torus2.rep)
    rng = random.Random(0)
    h = cc.random_cochain(1, False, rng)
    f = cc.cochain(1, True, [0] * cc.space(1, True).dim)
    assert not any(cup_product(K, f, h).vector)
    zero_top = K.model(SCALARS).cochain(2, True, [0] * K.model(SCALARS).space(2, True).dim)
    assert integrate(K, zero_top) == 0


def test_circle_hand_computation(circle):
    K = circle.complex
    cc = K.model(circle.rep)
    edge = cc.cochain(1, True, [1])
    assert integrate(K, edge) in (1, -1)
    u = cc.cohomology(0, "compact").representatives.rows[0]
    v = cc.cohomology(1, "ordinary").representatives.rows[0]
    prod = cup_product(K, cc.cochain(0, True, u), cc.cochain(1, False, v))
    assert abs(integrate(K, prod)) == 1
    P = pairing_matrix(K, circle.rep, 0)
    assert P.matrix.shape == (1, 1) and P.nonsingular


def test_stokes_on_torus(torus2):
    assert verify_stokes(torus2.complex, samples=20, seed=5).passed


@pytest.mark.parametrize("name", sorted(STRUCTURAL_SPECS))
@given(seed=seeds)
def test_leibniz(name, seed):
    m = model_for(STRUCTURAL_SPECS[name])
    K = m.complex
    n = K.dimension
    rng = random.Random(seed)
    E, D = K.model(m.rep), K.model(m.rep.dual())
    S = K.model(SCALARS)
    p = rng.randrange(n)
    q = rng.randrange(n - p)
    f = E.random_cochain(p, True, rng)
    h = D.random_cochain(q, False, rng)
    lhs = S.coboundary(p + q, True).apply(cup_product(K, f, h).vector)
    df = E.cochain(p + 1, True, E.coboundary(p, True).apply(f.vector))
    dh = D.cochain(q + 1, False, D.coboundary(q, False).apply(h.vector))
    a = cup_product(K, df, h).vector
    b = cup_product(K, f, dh).vector
    sign = -1 if p % 2 else 1
    assert tuple(lhs) == tuple(x + sign * y for x, y in zip(a, b))


@pytest.mark.parametrize("name", sorted(STRUCTURAL_SPECS))
@given(seed=seeds)
def test_bilinear_form_matches_cup_then_integrate(name, seed):
    m = model_for(STRUCTURAL_SPECS[name])
    K = m.complex
    n = K.dimension
    rng = random.Random(seed)
    k = rng.randrange(n + 1)
    E, D = K.model(m.rep), K.model(m.rep.dual())
    f = E.random_cochain(k, True, rng)
    h = D.random_cochain(n - k, False, rng)
    W = bilinear_form(K, m.rep, k)
    assert integrate(K, cup_product(K, f, h)) == _dot(f.vector, W.apply(h.vector))


@pytest.mark.parametrize("name", sorted(STRUCTURAL_SPECS))
def test_representative_independence(name):
    m = model_for(STRUCTURAL_SPECS[name])
    rng = random.Random(11)
    for k in range(m.complex.dimension + 1):
        for variant in ("compact", "interior"):
            # raises if a coboundary perturbation changes an entry
            pairing_matrix(m.complex, m.rep, k, variant, check_representatives=True, rng=rng)


def test_disk_interior_pairings_empty():
    m = build_model({"family": "finite_rotation", "parameters": {"order": 3}})
    for k in range(3):
        P = pairing_matrix(m.complex, m.rep, k, "interior")
        assert P.matrix.shape == (0, 0) and P.nonsingular


def test_torus2_duality(torus2):
    rpt = verify_duality(torus2.complex, torus2.rep)
    assert rpt.passed
    assert [e["interior"]["dims"][0] for e in rpt.info["degrees"]] == [1, 2, 1]


def test_twisted_circle_duality():
    m = build_model({"family": "torus", "parameters": {"n": 1}, "rep": {"translations": [[[2]]]}})
    rpt = verify_duality(m.complex, m.rep)
    assert rpt.passed
    assert all(e["compact"]["dims"] == [0, 0] for e in rpt.info["degrees"])


def test_level11_interior_pairing(gamma11):
    P = pairing_matrix(gamma11.complex, gamma11.rep, 1, "interior")
    assert P.matrix.shape == (2, 2) and P.rank == 2


def test_unknown_variant_rejected(torus2):
    from dualis.complex import ComplexError

    with pytest.raises(ComplexError):
        pairing_matrix(torus2.complex, torus2.rep, 0, "ordinary")
