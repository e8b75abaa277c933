"""Chain-level Gauss-Manin transport along a star-product family.

The path c(t) solves dc/dt + (1/u) J_{gamma_dot(t)} c(t) = 0 with
J_phi = I_phi - u H_phi (see ``hochschild.gm_contraction``). Because
gamma_dot carries a positive power of hbar, Picard iteration

    c <- c0 - int_{t0}^{t} (1/u) J_{gamma_dot(s)} c(s) ds

reaches a fixed point after at most Nh + 1 rounds, and the path is an exact
polynomial in the formal parameter s.
"""

from __future__ import annotations

from dataclasses import dataclass

from .coefficients import PoleOverflow, Scalar, as_rat
from .hochschild import Chain, chain_b, connes_B, gm_contraction, ihat
from .star import StarFamily, gamma_dot, star_cochain


class NotACycle(ValueError):
    pass


def _contraction(variant: str):
    if variant == "gm":
        return gm_contraction
    if variant == "ihat":
        # the verbatim I + uH; kept as a negative control
        return ihat
    raise ValueError(f"unknown contraction variant {variant!r}")


def cyclic_D_at(fam: StarFamily, t, c: Chain) -> Chain:
    """D_t c = b_*(t) c + u B c (t=None keeps the path parameter formal)."""
    return chain_b(star_cochain(fam, t), c) + connes_B(c).shift_u(1)


def check_cycle(fam: StarFamily, t, c: Chain) -> Chain:
    """Residual D_t(c); zero iff c is a cyclic cycle of the product at t."""
    return cyclic_D_at(fam, t, c)


def theta(fam: StarFamily, c: Chain, variant: str = "gm") -> Chain:
    """The Gauss-Manin one-form (1/u) J_{gamma_dot(s)} applied to c, formal in s."""
    J = _contraction(variant)
    return J(gamma_dot(fam), c, star_cochain(fam)).shift_u(-1)


def check_horizontal(fam: StarFamily, c_path: Chain, variant: str = "gm") -> Chain:
    """dc/ds + (1/u) J_{gamma_dot(s)} c, identically in s."""
    return c_path.map_scalars(Scalar.diff_s) + theta(fam, c_path, variant)


def pole_order(c: Chain) -> int:
    return max(0, -c.min_u())


@dataclass
class TransportResult:
    family: StarFamily
    c0: Chain
    t_start: object
    t_target: object
    path_expansion: Chain
    c_at_target: Chain
    iterations: int


def transport(fam: StarFamily, c0: Chain, t_target, t_start=0, *,
              check: bool = True, variant: str = "gm") -> TransportResult:
    """Parallel transport of the cycle c0 (at t_start) to t_target."""
    alg = fam.alg
    t_start = as_rat(t_start)
    need = pole_order(c0) + alg.nh
    if alg.nu < need:
        raise PoleOverflow(f"transport needs Nu >= {need} (pole {pole_order(c0)} + Nh {alg.nh}), got {alg.nu}")
    if check:
        res = check_cycle(fam, t_start, c0)
        if res:
            raise NotACycle(f"D(c0) != 0 at t={t_start}: {res}")
    J = _contraction(variant)
    gd = gamma_dot(fam)
    m = star_cochain(fam)
    c = c0
    rounds = 0
    while True:
        rounds += 1
        if rounds > alg.nh + 2:
            raise RuntimeError("Picard iteration did not stabilize")
        step = J(gd, c, m).shift_u(-1).map_scalars(lambda sc: sc.integrate_s(t_start))
        nxt = c0 - step
        if nxt == c:
            break
        c = nxt
    at = c.map_scalars(lambda sc: sc.eval_s(t_target))
    return TransportResult(fam, c0, t_start, as_rat(t_target), c, at, rounds)


def eval_path(c_path: Chain, t) -> Chain:
    return c_path.map_scalars(lambda sc: sc.eval_s(t))


__all__ = [
    "NotACycle",
    "TransportResult",
    "check_cycle",
    "check_horizontal",
    "cyclic_D_at",
    "eval_path",
    "pole_order",
    "theta",
    "transport",
]
