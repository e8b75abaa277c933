"""Constant-coefficient star-product families f * g = exp(t pi^{ij} d_i (x) d_j)(f (x) g).

The path parameter t is either a rational number or the formal symbol ``s``
of the coefficient ring, in which case every identity is checked for all t
at once (coefficient-wise in s).
"""

from __future__ import annotations

from dataclasses import dataclass

from .coefficients import Scalar, as_rat
from .hochschild import Cochain, coch_b, gbracket
from .jetcalc import AlgebraSpec, FnElem, MultiVec, schouten


class NonConstantPi(ValueError):
    pass


@dataclass(frozen=True)
class StarFamily:
    alg: AlgebraSpec
    pi: MultiVec

    def __post_init__(self):
        if self.pi.degrees() not in ([], [2]):
            raise ValueError("pi must be a bivector")
        if not self.pi.is_constant_coefficient():
            raise NonConstantPi("only constant-coefficient bivectors are supported")
        if self.pi and self.pi.min_h() < 1:
            raise ValueError("pi must carry a positive power of hbar")

    @property
    def nh(self) -> int:
        return self.alg.nh

    def matrix(self):
        """Full antisymmetric coefficient matrix as Scalars."""
        d = self.alg.dim
        return [[self.pi.matrix_entry(i, j).constant_part() for j in range(1, d + 1)]
                for i in range(1, d + 1)]

    def is_poisson(self) -> bool:
        return not schouten(self.pi, self.pi)


def _t_scalar(alg: AlgebraSpec, t) -> Scalar:
    if t is None:
        return alg.s()
    if isinstance(t, Scalar):
        return t
    return alg.scalar(as_rat(t))


def star_cochain(fam: StarFamily, t=None, *, drop_order=None) -> Cochain:
    """Bidifferential operator of f * g at parameter t (formal s when t is None).

    ``drop_order`` removes the k-th order term; it exists only to build
    negative controls.
    """
    alg = fam.alg
    ts = _t_scalar(alg, t)
    entries = []
    for i, row in enumerate(fam.matrix()):
        for j, pij in enumerate(row):
            if pij:
                entries.append((i, j, pij * ts))
    zero = alg.zero_mono
    layer = {(zero, zero): alg.scalar(1)}
    total = dict(layer)
    k = 0
    while layer:
        k += 1
        nxt = {}
        for (a, b), c in layer.items():
            for i, j, w in entries:
                val = c * w
                if not val:
                    continue
                a2 = a[:i] + (a[i] + 1,) + a[i + 1:]
                b2 = b[:j] + (b[j] + 1,) + b[j + 1:]
                key = (a2, b2)
                cur = nxt.get(key)
                nxt[key] = val if cur is None else cur + val
        layer = {key: v / k for key, v in nxt.items() if v}
        if k != drop_order:
            for key, v in layer.items():
                cur = total.get(key)
                total[key] = v if cur is None else cur + v
    return Cochain(alg, 2, {key: alg.const(v) for key, v in total.items()})


def gamma(fam: StarFamily, t=None) -> Cochain:
    """star_cochain - mu."""
    return star_cochain(fam, t) - Cochain.product(fam.alg)


def mc_check(fam: StarFamily, t=None, g: Cochain = None) -> Cochain:
    """Maurer-Cartan residual b g + 1/2 [g, g] (zero for an associative deformation)."""
    if g is None:
        g = gamma(fam, t)
    mu = Cochain.product(fam.alg)
    return coch_b(g, mu) + gbracket(g, g).scale(as_rat(1) / 2)


def gamma_dot(fam: StarFamily, t=None) -> Cochain:
    """t-derivative of the star cochain (formal in s when t is None)."""
    dot = star_cochain(fam, None).map_scalars(Scalar.diff_s)
    if t is None:
        return dot
    return dot.map_scalars(lambda sc: sc.eval_s(t))


def star(fam: StarFamily, f: FnElem, g: FnElem, t=None) -> FnElem:
    return star_cochain(fam, t)(f, g)


def associator(fam: StarFamily, f, g, h, t=None) -> FnElem:
    m = star_cochain(fam, t)
    return m(m(f, g), h) - m(f, m(g, h))


def eval_cochain_at(phi: Cochain, t) -> Cochain:
    return phi.map_scalars(lambda sc: sc.eval_s(t))


__all__ = [
    "NonConstantPi",
    "StarFamily",
    "associator",
    "eval_cochain_at",
    "gamma",
    "gamma_dot",
    "mc_check",
    "star",
    "star_cochain",
]
