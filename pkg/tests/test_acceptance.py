import random
import time

import pytest

from conftest import ACCEPTANCE
from cyclicchar.charmap import a_hat_det, a_hat_exp, tt_check, v0_hkr
from cyclicchar.coefficients import Rat, bernoulli
from cyclicchar.gauss_manin import check_cycle, transport
from cyclicchar.graphs import ShoikhetGraph, d_gamma_eval, enumerate_graphs, mc_weight, validate, wheel_weight
from cyclicchar.hochschild import (
    Chain,
    Cochain,
    chain_b,
    coch_b,
    connes_B,
    cyclic_D,
    gm_contraction,
    h_op,
    i_op,
    ihat,
    l_act,
)
from cyclicchar.jetcalc import (
    POLY,
    TORUS,
    AlgebraSpec,
    bivector_from_matrix,
    dR,
    exp_iota_over_u,
    is_exact,
    schouten,
    volume_form,
)
from cyclicchar.randgen import (
    antisymmetrized,
    poisson_from_gradient,
    rand_chain,
    rand_cochain,
    rand_const_bivector,
    rand_curvature,
    rand_fn,
    rand_form,
    rand_multivec,
)
from cyclicchar.star import StarFamily, associator, gamma_dot, mc_check, star_cochain
from test_graphs import subset_oracle


def record(k, ok, detail, start, budget):
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < budget
    ACCEPTANCE[k] = (ok, f"{detail} ({elapsed:.1f}s, budget {budget}s)")
    return ok


def comm(X, Y, dX, dY, c):
    return X(Y(c)) - Y(X(c)) * (-1) ** (dX * dY)


def hochschild_instances(count=200):
    rng = random.Random("acceptance-1")
    alg = AlgebraSpec(POLY, 2, 3, 3)
    for _ in range(count):
        n, p = rng.randint(0, 5), rng.randint(1, 3)
        c = rand_chain(rng, alg, n, terms=2, max_deg=3, u_powers=(-1, 0, 1))
        phi = rand_cochain(rng, alg, p, terms=2, max_order=2, coeff_deg=2)
        yield alg, c, phi, p


# -- criterion 1 ---------------------------------------------------------------


def displayed_hochschild_failures():
    """Counts of instances violating each identity with the displayed signs."""
    fails = {"differentials": 0, "module": 0, "[B,H]": 0, "[b,I]": 0, "cartan": 0, "gm_homotopy": 0}
    for alg, c, phi, p in hochschild_instances():
        mu = Cochain.product(alg)
        b = lambda x: chain_b(mu, x)
        D = lambda x: cyclic_D(mu, x)
        bphi = coch_b(phi, mu)
        L = l_act(phi, c)
        if b(b(c)) or connes_B(connes_B(c)) or b(connes_B(c)) + connes_B(b(c)):
            fails["differentials"] += 1
        if b(L) - l_act(phi, b(c)) * (-1) ** (p - 1) != l_act(bphi, c):
            fails["module"] += 1
        if comm(connes_B, lambda x: h_op(phi, x), 1, p, c):
            fails["[B,H]"] += 1
        if comm(b, lambda x: i_op(phi, x), 1, p, c) != i_op(bphi, c):
            fails["[b,I]"] += 1
        lemma = comm(connes_B, lambda x: i_op(phi, x), 1, p, c) - h_op(bphi, c) \
            + comm(b, lambda x: h_op(phi, x), 1, p, c)
        if L != lemma:
            fails["cartan"] += 1
        if L.shift_u(1) != comm(D, lambda x: ihat(phi, x), 1, p, c) - ihat(bphi, c):
            fails["gm_homotopy"] += 1
    return fails


@pytest.mark.xfail(strict=True, reason="displayed signs of [b, I], the Cartan homotopy formula and the Gauss-Manin homotopy "
                                       "conflict with the module property; see the corrected test below")
def test_criterion_1_hochschild_as_displayed():
    start = time.perf_counter()
    fails = displayed_hochschild_failures()
    ok = not any(fails.values())
    record(1, ok, f"200 instances, failures per displayed identity {fails}", start, 120)
    assert ok


def test_criterion_1_hochschild_corrected_signs():
    start = time.perf_counter()
    bad = 0
    for alg, c, phi, p in hochschild_instances():
        mu = Cochain.product(alg)
        b = lambda x: chain_b(mu, x)
        D = lambda x: cyclic_D(mu, x)
        bphi = coch_b(phi, mu)
        L = l_act(phi, c)
        checks = [
            not b(b(c)), not connes_B(connes_B(c)), not b(connes_B(c)) + connes_B(b(c)),
            b(L) - l_act(phi, b(c)) * (-1) ** (p - 1) == l_act(bphi, c),
            not comm(connes_B, lambda x: h_op(phi, x), 1, p, c),
            comm(b, lambda x: i_op(phi, x), 1, p, c) == -i_op(bphi, c),
            L == comm(connes_B, lambda x: i_op(phi, x), 1, p, c) - h_op(bphi, c)
            - comm(b, lambda x: h_op(phi, x), 1, p, c),
            L.shift_u(1) == comm(D, lambda x: gm_contraction(phi, x), 1, p, c) + gm_contraction(bphi, c),
        ]
        bad += not all(checks)
    elapsed = time.perf_counter() - start
    print(f"criterion 1 (corrected signs): {'PASS' if not bad else 'FAIL'} {bad} failures in 200 ({elapsed:.1f}s)")
    assert bad == 0 and elapsed < 120


# -- criterion 2 ---------------------------------------------------------------


def test_criterion_2_star():
    start = time.perf_counter()
    rng = random.Random("acceptance-2")
    bad = 0
    for trial in range(12):
        dim = 2 + trial % 3
        alg = AlgebraSpec(POLY if trial % 2 else TORUS, dim, 4, 0)
        fam = StarFamily(alg, rand_const_bivector(rng, alg))
        f, g, h = (rand_fn(rng, alg, 2, 2) for _ in range(3))
        m = star_cochain(fam)
        ok = not associator(fam, f, g, h) and not mc_check(fam) and not coch_b(gamma_dot(fam), m)
        bad += not ok
    assert record(2, bad == 0, f"12 families, dim 2..4, formal in t through hbar^4, {bad} failures", start, 60)


# -- criterion 3 ---------------------------------------------------------------


def test_criterion_3_gauss_manin():
    start = time.perf_counter()
    rng = random.Random("acceptance-3")
    bad, moved = 0, 0
    for trial in range(8):
        alg = AlgebraSpec(TORUS if trial % 2 else POLY, 2, 3, 5)
        fam = StarFamily(alg, rand_const_bivector(rng, alg))
        fns = [rand_fn(rng, alg, 1, 2, nonconstant=True) for _ in range(2)]
        c0 = antisymmetrized(fns, alg) + Chain.one(alg)
        r = transport(fam, c0, 1)
        ok = not check_cycle(fam, None, r.path_expansion)
        moved += r.path_expansion != c0
        mid = transport(fam, c0, Rat(1, 2))
        ok &= transport(fam, mid.c_at_target, 1, t_start=Rat(1, 2)).c_at_target == r.c_at_target
        one = Chain.one(alg)
        ok &= transport(fam, one, 1).path_expansion == one
        short = rand_chain(rng, alg, 0) + rand_chain(rng, alg, 1)
        ok &= transport(fam, short, 1, check=False).path_expansion == short
        bad += not ok
    assert record(3, bad == 0, f"8 families, Nhbar = 3, {moved} with nontrivial transport, {bad} failures", start, 60)


# -- criterion 4 ---------------------------------------------------------------


def bernoulli_by_recurrence(n):
    # sum_{k<m} C(m+1, k) B_k = -(m+1) B_m with B_1 = -1/2
    from fractions import Fraction
    from math import comb
    B = [Fraction(1)]
    for m in range(1, n + 1):
        B.append(-sum(comb(m + 1, k) * B[k] for k in range(m)) / (m + 1))
    return B


def test_criterion_4_ahat():
    from math import factorial
    start = time.perf_counter()
    rng = random.Random("acceptance-4")
    bad = sum(a_hat_exp(R, 3) != a_hat_det(R, 3)
              for R in (rand_curvature(rng, rng.randint(1, 3)) for _ in range(20)))
    B = bernoulli_by_recurrence(12)
    wheels_ok = wheel_weight(2) == Rat(1, 48) and wheel_weight(4) == Rat(1, 5760)
    for j in range(1, 13):
        sign = -1 if (j * (j - 1) // 2) % 2 else 1
        expect = 0 if j % 2 else -sign * B[j] / (2 * j * factorial(j))
        wheels_ok &= wheel_weight(j) == Rat(expect.numerator, expect.denominator)
        if j % 2 == 0:
            wheels_ok &= bernoulli(j) == Rat(B[j].numerator, B[j].denominator)
    assert record(4, bad == 0 and wheels_ok, f"20 curvatures, {bad} mismatches; wheel weights ok = {wheels_ok}",
                  start, 30)


# -- criterion 5 ---------------------------------------------------------------


def test_criterion_5_hkr():
    start = time.perf_counter()
    rng = random.Random("acceptance-5")
    bad = 0
    for trial in range(200):
        alg = AlgebraSpec(POLY if trial % 2 else TORUS, rng.randint(2, 3), 2, 2)
        c = rand_chain(rng, alg, rng.randint(0, 4), terms=2, max_deg=2)
        bad += v0_hkr(connes_B(c)) != dR(v0_hkr(c)) or bool(v0_hkr(chain_b(Cochain.product(alg), c)))
    assert record(5, bad == 0, f"200 chains, {bad} failures", start, 60)


# -- criterion 6 ---------------------------------------------------------------


def test_criterion_6_graphs():
    import itertools
    start = time.perf_counter()
    rng = random.Random("acceptance-6")
    alg = AlgebraSpec(POLY, 2, 2, 2)
    count_bad, vanish_bad, total = 0, 0, 0
    for m in range(3):
        for n in range(3):
            for degs in itertools.product(range(3), repeat=m):
                graphs = enumerate_graphs(m, n, degs)
                count_bad += {g.key() for g in graphs} != subset_oracle(m, n, degs) or any(map(validate, graphs))
                for g in graphs:
                    total += 1
                    if any(not isinstance(b, str) for _, b in g.edges):
                        mvs = [rand_multivec(rng, alg, d, terms=2, constant=True) for d in degs]
                        fns = [rand_fn(rng, alg, 2, 3) for _ in range(n + 1)]
                        vanish_bad += bool(d_gamma_eval(g, mvs, fns))
    g = ShoikhetGraph(2, 0, [(1, 2), (1, "b0"), (2, 1), (2, "b0")])
    w1, again = mc_weight(g, 10**6, 0), mc_weight(g, 10**6, 0)
    w2 = mc_weight(g, 10**6, 1)
    det_ok = w1.estimate.hex() == again.estimate.hex() and w1.to_json() == again.to_json()
    spread = (w1.stderr ** 2 + w2.stderr ** 2) ** 0.5
    seeds_ok = abs(w1.estimate - w2.estimate) <= 3 * spread
    ok = not count_bad and not vanish_bad and det_ok and seeds_ok
    detail = (f"{total} graphs, count mismatches {count_bad}, nonvanishing {vanish_bad}, deterministic {det_ok}, "
              f"weights {w1.estimate:.5f} vs {w2.estimate:.5f} (3 sigma = {3 * spread:.5f})")
    assert record(6, ok, detail, start, 300)


# -- criterion 7 ---------------------------------------------------------------


def test_criterion_7_torus_index():
    start = time.perf_counter()
    alg = AlgebraSpec(TORUS, 2, 3, 4)
    th = alg.hbar() * Rat(2, 3)
    fam = StarFamily(alg, bivector_from_matrix(alg, [[0, th], [-th, 0]]))
    rep = tt_check(Chain.one(alg), fam, volume_form(alg))
    ok = rep["lhs"] == 1 and rep["rhs"] == 1 and rep["ok"] and rep["certificate"]["all_vanish"]
    detail = (f"theta = 2/3, lhs = {rep['lhs']}, rhs = {rep['rhs']}, "
              f"certificate over {rep['certificate']['graphs_checked']} graphs")
    assert record(7, ok, detail, start, 60)


# -- criterion 8 ---------------------------------------------------------------


def test_criterion_8_replacement():
    start = time.perf_counter()
    rng = random.Random("acceptance-8")
    alg = AlgebraSpec(POLY, 3, 3, 4)
    bad, zero = 0, 0
    for trial in range(60):
        pi = poisson_from_gradient(alg, rand_fn(rng, alg, 1, 1), rand_fn(rng, alg, 2, 2, nonconstant=True))
        assert not schouten(pi, pi)
        beta = rand_form(rng, alg, rng.randint(0, 2), terms=2, coeff_deg=2)
        # closed in the sense of the twisted complex on even trials, d-closed on odd trials
        om = exp_iota_over_u(-pi, dR(beta)) if trial % 2 == 0 else dR(beta)
        diff = exp_iota_over_u(pi, om, "hat") - exp_iota_over_u(pi, om)
        ok, prim = is_exact(diff)
        bad += not ok
        zero += diff.is_zero()
    detail = f"60 closed inputs, {bad} not certified exact; difference identically zero on {zero}"
    assert record(8, bad == 0, detail, start, 60)
