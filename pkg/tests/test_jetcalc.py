import random

import pytest
from hypothesis import given, settings, strategies as st

from cyclicchar.coefficients import Rat, Scalar
from cyclicchar.jetcalc import (
    POLY,
    TORUS,
    AlgebraSpec,
    DiffForm,
    MultiVec,
    UnsupportedVolume,
    bivector_from_matrix,
    dR,
    divergence,
    eval_at_zero,
    exp_iota_over_u,
    iota,
    iota_hat,
    is_exact,
    lie,
    partial,
    poincare_homotopy,
    poisson_bracket,
    schouten,
    torus_integral,
    volume_form,
)
from cyclicchar.randgen import poisson_from_gradient, rand_fn, rand_form, rand_multivec

P2 = AlgebraSpec(POLY, 2, 3, 3)
T2 = AlgebraSpec(TORUS, 2, 3, 3)
seeds = st.integers(0, 2**32)


def vec(alg, idx, f=None):
    return MultiVec.basis(alg, idx, alg.one() if f is None else f)


def form(alg, idx, f=None):
    return DiffForm.basis(alg, idx, alg.one() if f is None else f)


def test_partial_examples():
    x1 = P2.var(1)
    assert partial(x1 * x1, 1) == x1 * 2
    z1, z2 = T2.var(1), T2.var(2)
    assert partial(z1, 1) == z1 * T2.tau()
    assert not partial(z2, 1)


def test_schouten_examples():
    x1 = P2.var(1)
    assert schouten(vec(P2, (1,)), vec(P2, (2,), x1)) == vec(P2, (2,))
    pi = bivector_from_matrix(P2, [[0, P2.hbar()], [-P2.hbar(), 0]])
    assert not schouten(pi, pi)
    # anchoring of the function case
    assert schouten(vec(P2, (1, 2)), vec(P2, (), x1)) == vec(P2, (2,), -P2.one())


def test_dR_examples():
    x1 = P2.var(1)
    assert dR(form(P2, (2,), x1)) == form(P2, (1, 2))
    assert not dR(form(P2, (1, 2)))
    z1 = T2.var(1)
    assert dR(form(T2, (), z1)) == form(T2, (1,), z1 * T2.tau())


def test_iota_examples():
    assert iota(vec(P2, (1,)), form(P2, (1,))) == form(P2, ())
    assert iota(vec(P2, (1, 2)), form(P2, (1, 2))) == form(P2, (), -P2.one())
    assert not iota(vec(P2, (1, 2)), form(P2, (1,)))


def test_lie_examples():
    x1 = P2.var(1)
    assert lie(vec(P2, (1,)), form(P2, (), x1)) == form(P2, ())
    pi = bivector_from_matrix(P2, [[0, 1], [-1, 0]])
    assert not lie(pi, form(P2, (1,)))
    # L_{d1^d2}(x1 dx1^dx2) = d iota - iota d = d(-x1) = -dx1
    assert lie(vec(P2, (1, 2)), form(P2, (1, 2), x1)) == form(P2, (1,), -P2.one())


def test_iota_hat_examples():
    pi = bivector_from_matrix(P2, [[0, 1], [-1, 0]])
    om = form(P2, (1, 2))
    assert iota_hat(pi, om) == iota(pi, om)
    x1, x2 = P2.var(1), P2.var(2)
    X = vec(P2, (1,), x2)
    f = form(P2, (), x1 * x1)
    # iota_X f = 0, so the result is (u/2) d(X f)
    assert iota_hat(X, f) == dR(form(P2, (), x2 * x1 * 2)).scale(P2.u() / 2)


def test_exp_iota_examples():
    theta = Rat(3, 2)
    pi = bivector_from_matrix(T2, [[0, T2.hbar() * theta], [-T2.hbar() * theta, 0]])
    om = form(T2, (1, 2))
    expect = om - form(T2, (), T2.const(T2.hbar() * theta * Scalar.monomial(u=-1, nh=3, nu=3)))
    assert exp_iota_over_u(pi, om) == expect
    f = form(T2, (), T2.var(1))
    assert exp_iota_over_u(pi, f) == f
    assert exp_iota_over_u(MultiVec(T2, {}), om) == om


def test_poincare_examples():
    x1, x2 = P2.var(1), P2.var(2)
    assert poincare_homotopy(form(P2, (1,))) == form(P2, (), x1)
    expect = (form(P2, (2,), x1) - form(P2, (1,), x2)) / 2
    assert poincare_homotopy(form(P2, (1, 2))) == expect
    assert not poincare_homotopy(form(P2, ()))


def test_divergence_examples():
    pi = bivector_from_matrix(P2, [[0, 1], [-1, 0]])
    assert not divergence(pi, volume_form(P2))
    x1 = P2.var(1)
    pi = MultiVec.basis(P2, (1, 2), x1)
    assert divergence(pi, volume_form(P2)) == vec(P2, (2,))
    with pytest.raises(UnsupportedVolume):
        divergence(pi, form(P2, (1, 2), x1))


def test_divergence_with_monomial_density_on_torus():
    pi = bivector_from_matrix(T2, [[0, T2.hbar()], [-T2.hbar(), 0]])
    vol = form(T2, (1, 2), T2.var(1))
    # d_1 log z1 = tau, pi^{12} = h
    assert divergence(pi, vol) == vec(T2, (2,), T2.const(T2.hbar() * T2.tau()))


def test_torus_integral_examples():
    z1 = T2.var(1)
    assert torus_integral(volume_form(T2)) == 1
    assert torus_integral(form(T2, (1, 2), z1)) == 0
    assert torus_integral(form(T2, (1, 2), z1 * z1 ** -1)) == 1


def test_poisson_bracket():
    x1, x2 = P2.var(1), P2.var(2)
    pi = bivector_from_matrix(P2, [[0, 1], [-1, 0]])
    assert poisson_bracket(pi, x1, x2) == P2.one()


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from([POLY, TORUS]), st.integers(2, 3))
def test_d_squared_zero(seed, kind, dim):
    rng = random.Random(seed)
    alg = AlgebraSpec(kind, dim, 2, 2)
    om = rand_form(rng, alg, rng.randint(0, dim))
    assert not dR(dR(om))


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from([POLY, TORUS]))
def test_iota_composition(seed, kind):
    rng = random.Random(seed)
    alg = AlgebraSpec(kind, 3, 2, 2)
    p, q = rng.randint(0, 2), rng.randint(0, 1)
    g, e = rand_multivec(rng, alg, p), rand_multivec(rng, alg, q)
    om = rand_form(rng, alg, rng.randint(p + q, 3), terms=3)
    assert iota(g, iota(e, om)) == iota(g.wedge(e), om)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_schouten_graded_lie(seed):
    rng = random.Random(seed)
    alg = AlgebraSpec(POLY, 3, 2, 2)
    p, q, r = (rng.randint(0, 3) for _ in range(3))
    P, Q, R = (rand_multivec(rng, alg, k, coeff_deg=2) for k in (p, q, r))
    s = (-1) ** ((p - 1) * (q - 1))
    assert schouten(P, Q) == schouten(Q, P) * (-s)
    assert schouten(P, schouten(Q, R)) == schouten(schouten(P, Q), R) + schouten(Q, schouten(P, R)) * s
    leib = (-1) ** ((p - 1) * q)
    assert schouten(P, Q.wedge(R)) == schouten(P, Q).wedge(R) + Q.wedge(schouten(P, R)) * leib


@settings(max_examples=30, deadline=None)
@given(seeds, st.sampled_from([POLY, TORUS]))
def test_cartan_formula_with_iota_hat(seed, kind):
    rng = random.Random(seed)
    alg = AlgebraSpec(kind, 3, 2, 2)
    p = rng.randint(0, 3)
    g = rand_multivec(rng, alg, p)
    om = rand_form(rng, alg, rng.randint(0, 3))
    sign = -1 if p % 2 == 0 else 1
    assert lie(g, om) == dR(iota_hat(g, om)) + iota_hat(g, dR(om)) * sign


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_poincare_homotopy(seed):
    rng = random.Random(seed)
    alg = AlgebraSpec(POLY, 3, 2, 2)
    om = rand_form(rng, alg, rng.randint(0, 3), terms=3)
    assert dR(poincare_homotopy(om)) + poincare_homotopy(dR(om)) == om - eval_at_zero(om)
    ok, K = is_exact(dR(om))
    assert ok and dR(K) == dR(om)


def test_not_exact_detected():
    ok, _ = is_exact(form(P2, (), P2.one()) + form(P2, (1,), P2.var(2)))
    assert not ok


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_gradient_bivectors_are_poisson(seed):
    rng = random.Random(seed)
    alg = AlgebraSpec(POLY, 3, 2, 2)
    pi = poisson_from_gradient(alg, rand_fn(rng, alg, 1, 1), rand_fn(rng, alg, 2, 2, True))
    assert not schouten(pi, pi)
