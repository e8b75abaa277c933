"""A-roof genus, HKR and Connes maps, the pi = 0 character and the
index check on the flat torus."""

from __future__ import annotations

from functools import lru_cache
from math import factorial

from .coefficients import U, Rat, Scalar, bernoulli
from .curvature import AhatSeries, CurvatureMatrix, matrix_power, series_exp, trace
from .gauss_manin import NotACycle, transport
from .graphs import d_gamma_eval, enumerate_graphs
from .hochschild import Chain, Cochain, cyclic_D
from .jetcalc import (
    TORUS,
    DiffForm,
    MultiVec,
    Unsupported,
    dR,
    divergence,
    exp_iota_over_u,
    torus_integral,
)
from .star import StarFamily


class NotUnimodular(ValueError):
    pass


# ---------------------------------------------------------------------------
# A-roof genus


def ahat_trace_coefficient(j: int) -> Rat:
    """-B_{2j} / (4j (2j)!): coefficient of u^{2j} tr(R^{2j}) in log A-roof."""
    return -bernoulli(2 * j) / (4 * j * factorial(2 * j))


def a_hat_exp(R: CurvatureMatrix, order: int) -> AhatSeries:
    """exp(-sum_j B_{2j}/(4j(2j)!) u^{2j} tr(R^{2j})) up to u^order."""
    T = {}
    j = 1
    while 2 * j <= order:
        tr = trace(matrix_power(R, 2 * j))
        if tr:
            T[2 * j] = R.scale_element(tr, ahat_trace_coefficient(j))
        j += 1
    return AhatSeries(R, series_exp(R, T, order))


@lru_cache(maxsize=None)
def log_y_over_sinh(order: int) -> tuple:
    """Taylor coefficients of log(y / sinh y) up to y^order, by series arithmetic."""
    # x = sinh(y)/y - 1 = sum_{k>=1} y^{2k}/(2k+1)!
    x = [Rat(0)] * (order + 1)
    for k in range(2, order + 1, 2):
        x[k] = Rat(1, factorial(k + 1))
    # log(1 + x) = sum_r (-1)^{r+1} x^r / r
    out = [Rat(0)] * (order + 1)
    power = [Rat(1)] + [Rat(0)] * order
    for r in range(1, order + 1):
        nxt = [Rat(0)] * (order + 1)
        for i, a in enumerate(power):
            if a:
                for j, b in enumerate(x):
                    if b and i + j <= order:
                        nxt[i + j] += a * b
        power = nxt
        if not any(power):
            break
        sign = 1 if r % 2 else -1
        for i in range(order + 1):
            out[i] += sign * power[i] / r
    return tuple(-c for c in out)


def a_hat_det(R: CurvatureMatrix, order: int) -> AhatSeries:
    """det^{1/2}((uR/2)/sinh(uR/2)) = exp(1/2 tr log(...)) up to u^order."""
    coeffs = log_y_over_sinh(order)
    T = {}
    for k in range(1, order + 1):
        c = coeffs[k]
        if not c:
            continue
        tr = trace(matrix_power(R, k))
        if tr:
            T[k] = R.scale_element(tr, c / 2 / Rat(2) ** k)
    return AhatSeries(R, series_exp(R, T, order))


def ahat_form(R: CurvatureMatrix, order: int) -> DiffForm:
    """sum_k u^k Ahat_k as a single form with u carried in the coefficients."""
    if not R.is_form:
        raise ValueError("ahat_form needs a curvature matrix of genuine 2-forms")
    series = a_hat_exp(R, order)
    alg = R.alg
    out = DiffForm(alg, {})
    for k, v in series.components.items():
        out = out + v.scale(Scalar.monomial(u=k, nh=alg.nh, nu=alg.nu))
    return out


# ---------------------------------------------------------------------------
# HKR and Connes maps


def _mono_form(alg, mono, differential: bool) -> DiffForm:
    f = alg.monomial(mono)
    om = DiffForm(alg, {(): f})
    return dR(om) if differential else om


def connes_co(c: Chain) -> DiffForm:
    """(a_0, .., a_n) -> a_0 da_1 ^ .. ^ da_n, extended over the coefficients."""
    alg = c.alg
    cache = {}

    def piece(mono, differential):
        key = (mono, differential)
        if key not in cache:
            cache[key] = _mono_form(alg, mono, differential)
        return cache[key]

    out = DiffForm(alg, {})
    for key, coeff in c.terms.items():
        form = piece(key[0], False)
        for m in key[1:]:
            form = form.wedge(piece(m, True))
            if not form:
                break
        if form:
            out = out + form.scale(coeff)
    return out


def v0_hkr(c: Chain) -> DiffForm:
    """(a_0, .., a_n) -> (1/n!) a_0 da_1 ^ .. ^ da_n."""
    alg = c.alg
    out = DiffForm(alg, {})
    by_len = {}
    for key, coeff in c.terms.items():
        by_len.setdefault(len(key), {})[key] = coeff
    for length, terms in by_len.items():
        part = connes_co(Chain(alg, terms, _trusted=True))
        out = out + part / factorial(length - 1)
    return out


def character_pi0(c: Chain, R: CurvatureMatrix = None, order: int = None) -> DiffForm:
    """Ahat_u(R) ^ Co(c) for a cyclic cycle c of the undeformed algebra."""
    alg = c.alg
    res = cyclic_D(Cochain.product(alg), c)
    if res:
        raise NotACycle(f"D(c) != 0: {res}")
    co = connes_co(c)
    if R is None or R.is_zero():
        return co
    if order is None:
        order = alg.dim // 2
    return ahat_form(R, order).wedge(co)


# ---------------------------------------------------------------------------
# index on the torus


def _pi_of(fam) -> MultiVec:
    return fam.pi if isinstance(fam, StarFamily) else fam


def check_unimodular(pi: MultiVec, omega: DiffForm) -> None:
    div = divergence(pi, omega)
    if div:
        raise NotUnimodular(f"divergence of pi with respect to the volume form is {div}")


def graph_certificate(fam: StarFamily, c: Chain, max_m: int = None) -> dict:
    """Check that every graph with m >= 1 constant-pi vertices kills the 0-form part.

    For length-0 chains (a_0) the only boundary vertex is b0; each pi vertex
    needs two distinct targets, at most one of them b0, so at least one edge
    ends on a pi vertex, whose coefficients are constant.
    """
    alg = fam.alg
    if max_m is None:
        max_m = alg.nh
    a0s = {}
    for key in c.terms:
        a0s[key[0]] = alg.monomial(key[0])
    checked = 0
    nonzero = []
    per_m = {}
    for m in range(1, max_m + 1):
        graphs = enumerate_graphs(m, 0, [2] * m)
        count = 0
        for g in graphs:
            for mono, a0 in sorted(a0s.items()):
                checked += 1
                count += 1
                val = d_gamma_eval(g, [fam.pi] * m, [a0])
                if val:
                    nonzero.append(g.to_json())
        per_m[m] = count
    return {
        "max_m": max_m,
        "graphs_checked": checked,
        "per_m": {str(k): v for k, v in per_m.items()},
        "all_vanish": not nonzero,
        "nonzero": nonzero,
    }


def index_I(c: Chain, fam, omega: DiffForm, certify: bool = True):
    """integral over T^d of the u^0 part of V_0(c) * Omega; returns (value, certificate)."""
    alg = c.alg
    if alg.kind != TORUS:
        raise Unsupported("index_I is implemented on the torus")
    pi = _pi_of(fam)
    check_unimodular(pi, omega)
    if not isinstance(fam, StarFamily):
        fam = StarFamily(alg, pi)
    if any(len(k) != 1 for k in c.terms):
        raise Unsupported("graph corrections are only certified for length-0 chains")
    cert = graph_certificate(fam, c) if certify else None
    if cert is not None and not cert["all_vanish"]:
        raise Unsupported("graph corrections could not be certified to vanish")
    a0 = DiffForm(alg, {})
    for key, coeff in c.terms.items():
        a0 = a0 + DiffForm(alg, {(): alg.monomial(key[0])}).scale(coeff.select(U, 0))
    return torus_integral(a0.wedge(omega)), cert


def tt_check(c: Chain, fam: StarFamily, omega: DiffForm, R: CurvatureMatrix = None) -> dict:
    """Compare index_I(c) with integral Ahat(R) Co(c transported to t=0) e^{iota_pi/u} Omega."""
    alg = c.alg
    lhs, cert = index_I(c, fam, omega)
    moved = transport(fam, c, 0, t_start=1).c_at_target
    ch = connes_co(moved)
    if R is not None and not R.is_zero():
        ch = ahat_form(R, alg.dim // 2).wedge(ch)
    rhs = torus_integral(ch.wedge(exp_iota_over_u(fam.pi, omega)))
    diff = lhs - rhs
    return {
        "lhs": lhs,
        "rhs": rhs,
        "difference": diff,
        "ok": diff.is_zero(),
        "certificate": cert,
    }


__all__ = [
    "AhatSeries",
    "CurvatureMatrix",
    "NotACycle",
    "NotUnimodular",
    "a_hat_det",
    "a_hat_exp",
    "ahat_form",
    "ahat_trace_coefficient",
    "character_pi0",
    "check_unimodular",
    "connes_co",
    "graph_certificate",
    "index_I",
    "log_y_over_sinh",
    "torus_integral",
    "tt_check",
    "v0_hkr",
]
