"""Seeded random inputs shared by the verify suites and the tests."""

from __future__ import annotations

import itertools
import random

from .coefficients import Rat, Scalar
from .curvature import CurvatureMatrix
from .hochschild import Chain, Cochain
from .jetcalc import (
    POLY,
    TORUS,
    AlgebraSpec,
    DiffForm,
    FnElem,
    MultiVec,
    all_index_tuples,
    bivector_from_matrix,
    sort_sign,
)


def rand_rat(rng: random.Random, span: int = 3) -> Rat:
    num = rng.randint(-span, span)
    den = rng.choice((1, 1, 1, 2, 3))
    return Rat(num, den)


def rand_scalar(rng: random.Random, nh: int, nu: int, terms: int = 3, allow_s: bool = False,
                u_span: int = None) -> Scalar:
    u_span = nu if u_span is None else u_span
    out = Scalar.zero(nh, nu)
    for _ in range(terms):
        out = out + Scalar.monomial(rand_rat(rng), rng.randint(0, 2), rng.randint(0, nh),
                                    rng.randint(-u_span, u_span), rng.randint(0, 2) if allow_s else 0, nh, nu)
    return out


def rand_mono(rng: random.Random, alg: AlgebraSpec, max_deg: int = 3, nonzero: bool = False) -> tuple:
    while True:
        if alg.kind == POLY:
            e = [0] * alg.dim
            for _ in range(rng.randint(0, max_deg)):
                e[rng.randrange(alg.dim)] += 1
        else:
            e = [rng.randint(-2, 2) if rng.random() < 0.6 else 0 for _ in range(alg.dim)]
        e = tuple(e)
        if not nonzero or any(e):
            return e


def rand_fn(rng: random.Random, alg: AlgebraSpec, terms: int = 2, max_deg: int = 3,
            nonconstant: bool = False) -> FnElem:
    out = alg.zero()
    while not out:
        for _ in range(terms):
            out = out + alg.monomial(rand_mono(rng, alg, max_deg, nonconstant), rand_rat(rng))
    return out


def rand_chain(rng: random.Random, alg: AlgebraSpec, n: int, terms: int = 2, max_deg: int = 3,
               u_powers=(0,)) -> Chain:
    out = {}
    for _ in range(terms):
        key = tuple([rand_mono(rng, alg, max_deg)] + [rand_mono(rng, alg, max_deg, True) for _ in range(n)])
        c = Scalar.monomial(rand_rat(rng), u=rng.choice(u_powers), nh=alg.nh, nu=alg.nu)
        out[key] = out[key] + c if key in out else c
    return Chain(alg, out)


def rand_cochain(rng: random.Random, alg: AlgebraSpec, p: int, terms: int = 2, max_order: int = 2,
                 coeff_deg: int = 2, normalized: bool = True) -> Cochain:
    t = {}
    for _ in range(terms):
        key = []
        for _ in range(p):
            while True:
                a = [0] * alg.dim
                for _ in range(rng.randint(1 if normalized else 0, max_order)):
                    a[rng.randrange(alg.dim)] += 1
                if any(a) or not normalized:
                    break
            key.append(tuple(a))
        key = tuple(key)
        f = alg.monomial(rand_mono(rng, alg, coeff_deg), rand_rat(rng))
        t[key] = t[key] + f if key in t else f
    return Cochain(alg, p, t)


def rand_multivec(rng: random.Random, alg: AlgebraSpec, p: int, terms: int = 2, coeff_deg: int = 2,
                  constant: bool = False) -> MultiVec:
    idxs = all_index_tuples(alg.dim, p)
    out = {}
    for _ in range(terms):
        if not idxs:
            break
        k = rng.choice(idxs)
        f = alg.const(rand_rat(rng)) if constant else rand_fn(rng, alg, 1, coeff_deg)
        out[k] = out[k] + f if k in out else f
    return MultiVec(alg, out)


def rand_form(rng: random.Random, alg: AlgebraSpec, q: int, terms: int = 2, coeff_deg: int = 3) -> DiffForm:
    idxs = all_index_tuples(alg.dim, q)
    out = {}
    for _ in range(terms):
        if not idxs:
            break
        k = rng.choice(idxs)
        f = rand_fn(rng, alg, 1, coeff_deg)
        out[k] = out[k] + f if k in out else f
    return DiffForm(alg, out)


def rand_const_bivector(rng: random.Random, alg: AlgebraSpec, min_h: int = 1) -> MultiVec:
    d = alg.dim
    mat = [[alg.zero() for _ in range(d)] for _ in range(d)]
    for i in range(d):
        for j in range(i + 1, d):
            c = rand_rat(rng)
            sc = Scalar.monomial(c, h=rng.randint(min_h, min(min_h + 1, alg.nh)), nh=alg.nh, nu=alg.nu)
            mat[i][j] = alg.const(sc)
            mat[j][i] = alg.const(-sc)
    return bivector_from_matrix(alg, mat)


def poisson_from_gradient(alg: AlgebraSpec, g: FnElem, h: FnElem, hbar_power: int = 1) -> MultiVec:
    """Bivector dual (via the Levi-Civita symbol) to hbar * g grad h on R^3.

    curl(g grad h) = grad g x grad h is orthogonal to g grad h, which makes
    the bivector Poisson.
    """
    if alg.dim != 3:
        raise ValueError("needs dimension 3")
    from .jetcalc import partial

    V = [g * partial(h, i) for i in (1, 2, 3)]
    hb = Scalar.monomial(h=hbar_power, nh=alg.nh, nu=alg.nu)
    # pi^{ij} = eps^{ijk} V_k
    return MultiVec(alg, {(1, 2): V[2] * hb, (1, 3): -V[1] * hb, (2, 3): V[0] * hb})


def rand_curvature(rng: random.Random, r: int, generators: int = 3) -> CurvatureMatrix:
    alg = AlgebraSpec(POLY, generators, 0, 0)
    rows = []
    for _ in range(r):
        row = []
        for _ in range(r):
            e = alg.zero()
            for i in range(1, generators + 1):
                e = e + alg.var(i) * rng.randint(-2, 2)
            row.append(e)
        rows.append(row)
    return CurvatureMatrix(rows)


def antisymmetrized(fns, alg: AlgebraSpec, a0: FnElem = None) -> Chain:
    """sum_sigma sgn(sigma) (a_0, f_sigma(1), .., f_sigma(n))."""
    a0 = alg.one() if a0 is None else a0
    out = Chain.zero(alg)
    for perm in itertools.permutations(range(len(fns))):
        s, _ = sort_sign(perm)
        out = out + Chain.from_tensor([a0] + [fns[i] for i in perm], s)
    return out


def algebras(dim: int, nh: int, nu: int):
    return AlgebraSpec(POLY, dim, nh, nu), AlgebraSpec(TORUS, dim, nh, nu)
