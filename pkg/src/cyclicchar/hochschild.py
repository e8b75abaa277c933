"""Normalized Hochschild cochains and chains with the cap/Cartan calculus.

Cochains are multidifferential operators ``(a_1..a_p) -> sum f * d^{A_1}a_1 ... d^{A_p}a_p``
stored as ``{(A_1, ..., A_p): f}``. Chains are linear combinations of tensors
of monomials ``(m_0, m_1, ..., m_n)`` over the Scalar ring; a tensor with a
constant monomial in any slot >= 1 is zero (normalization is applied on every
construction).

All sign conventions are the ones of the displayed formulas for the bullet
product, L_phi, B, I_phi and H_phi; nothing is re-derived from other sources.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations, product
from math import factorial

from .coefficients import Scalar, as_rat
from .jetcalc import (
    AlgebraSpec,
    FnElem,
    MultiVec,
    _add_into,
    _scale,
    deriv_mono,
    multinomial,
    sort_sign,
)


def _sgn(k: int) -> int:
    return -1 if k % 2 else 1


@lru_cache(maxsize=None)
def _compositions_1d(total: int, parts: int):
    if parts == 1:
        return ((total,),)
    out = []
    for first in range(total + 1):
        for rest in _compositions_1d(total - first, parts - 1):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def split_multiindex(alpha: tuple, parts: int):
    """All ways to write alpha = beta_0 + ... + beta_{parts-1}, with multinomial weights."""
    per_dim = [_compositions_1d(a, parts) for a in alpha]
    out = []
    for choice in product(*per_dim):
        split = tuple(tuple(choice[d][k] for d in range(len(alpha))) for k in range(parts))
        out.append((split, multinomial(alpha, split)))
    return tuple(out)


def _add_idx(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


class Cochain:
    """Multidifferential Hochschild cochain of fixed arity."""

    __slots__ = ("alg", "arity", "terms", "_cache")

    def __init__(self, alg: AlgebraSpec, arity: int, terms=None):
        self.alg = alg
        self.arity = arity
        self.terms = {}
        for k, v in (terms or {}).items():
            k = tuple(tuple(a) for a in k)
            if len(k) != arity:
                raise ValueError(f"term {k} does not have arity {arity}")
            if v:
                self.terms[k] = v
        self._cache = {}

    # constructors ------------------------------------------------------
    @classmethod
    def product(cls, alg: AlgebraSpec) -> Cochain:
        z = alg.zero_mono
        return cls(alg, 2, {(z, z): alg.one()})

    @classmethod
    def identity(cls, alg: AlgebraSpec) -> Cochain:
        return cls(alg, 1, {(alg.zero_mono,): alg.one()})

    @classmethod
    def from_function(cls, f: FnElem) -> Cochain:
        return cls(f.alg, 0, {(): f})

    @classmethod
    def vector_field(cls, alg: AlgebraSpec, coeffs) -> Cochain:
        """a -> sum_i coeffs[i] d_i a."""
        terms = {}
        for i, c in enumerate(coeffs):
            c = c if isinstance(c, FnElem) else alg.const(c)
            if c:
                e = [0] * alg.dim
                e[i] = 1
                terms[(tuple(e),)] = c
        return cls(alg, 1, terms)

    @classmethod
    def zero(cls, alg: AlgebraSpec, arity: int) -> Cochain:
        return cls(alg, arity, {})

    # linear structure --------------------------------------------------
    def __add__(self, other: Cochain) -> Cochain:
        if self.arity != other.arity:
            if not other.terms:
                return self
            if not self.terms:
                return other
            raise ValueError("cannot add cochains of different arity")
        out = dict(self.terms)
        for k, v in other.terms.items():
            cur = out.get(k)
            out[k] = v if cur is None else cur + v
        return Cochain(self.alg, self.arity, out)

    def __neg__(self):
        return Cochain(self.alg, self.arity, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> Cochain:
        return Cochain(self.alg, self.arity, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Cochain):
            return NotImplemented
        if not self.terms and not other.terms:
            return True
        return self.arity == other.arity and self.terms == other.terms

    def __hash__(self):
        return hash((self.arity, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def map_scalars(self, fn) -> Cochain:
        return Cochain(self.alg, self.arity, {k: v.map_scalars(fn) for k, v in self.terms.items()})

    def is_normalized(self) -> bool:
        """Every slot carries a derivative of order >= 1."""
        return all(all(any(a) for a in k) for k in self.terms)

    def min_h(self) -> int:
        return min((v.min_h() for v in self.terms.values()), default=self.alg.nh + 1)

    def __repr__(self):
        body = ", ".join(f"{k}: {v}" for k, v in sorted(self.terms.items()))
        return f"Cochain(arity={self.arity}, {{{body}}})"

    # evaluation --------------------------------------------------------
    def eval_monos(self, monos: tuple) -> dict:
        """phi(m_1, ..., m_p) for monomials, as ``{mono: Scalar}``."""
        hit = self._cache.get(monos)
        if hit is not None:
            return hit
        kind = self.alg.kind
        out = {}
        for alphas, coef in self.terms.items():
            c = 1
            tp = 0
            shift = None
            for m, a in zip(monos, alphas):
                d = deriv_mono(kind, m, a)
                if d is None:
                    break
                c *= d[0]
                tp += d[1]
                shift = d[2] if shift is None else _add_idx(shift, d[2])
            else:
                if shift is None:
                    shift = self.alg.zero_mono
                for fm, sc in coef.terms.items():
                    _add_into(out, _add_idx(fm, shift), _scale(sc, c, tp))
        self._cache[monos] = out
        return out

    def __call__(self, *fns: FnElem) -> FnElem:
        if len(fns) != self.arity:
            raise ValueError(f"expected {self.arity} arguments")
        out = {}
        items = [list(f.terms.items()) for f in fns]
        for combo in product(*items):
            monos = tuple(m for m, _ in combo)
            coeff = None
            for _, sc in combo:
                coeff = sc if coeff is None else coeff * sc
            for m, sc in self.eval_monos(monos).items():
                _add_into(out, m, sc if coeff is None else sc * coeff)
        return FnElem(self.alg, out)


# ---------------------------------------------------------------------------
# Gerstenhaber structure


def circ(phi: Cochain, psi: Cochain) -> Cochain:
    """phi . psi = sum_i (-1)^{(i-1)q} phi(a_1, .., psi(a_i, .., a_{i+q}), ..)."""
    arity = phi.arity + psi.arity - 1
    q = psi.arity - 1
    alg = phi.alg
    nh = alg.nh
    out = {}
    psi_items = [(k, g, g.min_h()) for k, g in psi.terms.items()]
    nparts = psi.arity + 1
    for alphas, f in phi.terms.items():
        fh = f.min_h()
        for i in range(1, phi.arity + 1):
            sign = _sgn((i - 1) * q)
            a = alphas[i - 1]
            head, tail = alphas[:i - 1], alphas[i:]
            for betas, g, gh in psi_items:
                if fh + gh > nh:
                    continue
                for split, mult in split_multiindex(a, nparts):
                    dg = g.deriv(split[0])
                    if not dg:
                        continue
                    new_betas = tuple(_add_idx(b, s) for b, s in zip(betas, split[1:]))
                    key = head + new_betas + tail
                    val = f * dg
                    if sign * mult != 1:
                        val = val * (sign * mult)
                    cur = out.get(key)
                    out[key] = val if cur is None else cur + val
    return Cochain(alg, arity, out)


def gbracket(phi: Cochain, psi: Cochain) -> Cochain:
    """[phi, psi] = phi.psi - (-1)^{pq} psi.phi with shifted degrees p, q."""
    p, q = phi.arity - 1, psi.arity - 1
    a = circ(phi, psi)
    b = circ(psi, phi)
    return a - b if _sgn(p * q) > 0 else a + b


def coch_b(phi: Cochain, product: Cochain) -> Cochain:
    """Hochschild differential b = [product, .]."""
    return gbracket(product, phi)


# ---------------------------------------------------------------------------
# chains


class Chain:
    """Finite combination of normalized monomial tensors with Scalar coefficients."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: AlgebraSpec, terms=None, *, _trusted=False):
        self.alg = alg
        if _trusted:
            self.terms = terms
            return
        zero = alg.zero_mono
        out = {}
        for key, c in (terms or {}).items():
            key = tuple(tuple(m) for m in key)
            if any(m == zero for m in key[1:]):
                continue
            if not isinstance(c, Scalar):
                c = alg.scalar(c)
            _add_into(out, key, c)
        self.terms = out

    @classmethod
    def one(cls, alg: AlgebraSpec) -> Chain:
        return cls(alg, {(alg.zero_mono,): alg.scalar(1)})

    @classmethod
    def zero(cls, alg: AlgebraSpec) -> Chain:
        return cls(alg, {})

    @classmethod
    def from_tensor(cls, fns, coeff=1) -> Chain:
        """Multilinear expansion of (a_0, ..., a_n) times ``coeff``."""
        alg = fns[0].alg
        coeff = coeff if isinstance(coeff, Scalar) else alg.scalar(coeff)
        out = {}
        zero = alg.zero_mono
        items = [[(m, sc) for m, sc in f.terms.items() if not (pos and m == zero)]
                 for pos, f in enumerate(fns)]
        for combo in product(*items):
            c = coeff
            for _, sc in combo:
                c = c * sc
            _add_into(out, tuple(m for m, _ in combo), c)
        return cls(alg, out, _trusted=True)

    def __add__(self, other: Chain) -> Chain:
        out = dict(self.terms)
        for k, v in other.terms.items():
            _add_into(out, k, v)
        return Chain(self.alg, out, _trusted=True)

    def __neg__(self):
        return Chain(self.alg, {k: -v for k, v in self.terms.items()}, _trusted=True)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> Chain:
        out = {}
        for k, v in self.terms.items():
            w = v * c
            if w:
                out[k] = w
        return Chain(self.alg, out, _trusted=True)

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self.scale(1 / as_rat(c))

    def map_scalars(self, fn) -> Chain:
        out = {}
        for k, v in self.terms.items():
            w = fn(v)
            if w:
                out[k] = w
        return Chain(self.alg, out, _trusted=True)

    def shift_u(self, k: int) -> Chain:
        return self.map_scalars(lambda v: v.shift_u(k))

    def __eq__(self, other):
        if not isinstance(other, Chain):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def lengths(self):
        return sorted({len(k) for k in self.terms})

    def total_degrees(self):
        """Set of -n + 2m over tensors of length n+1 and u-powers m present."""
        degs = set()
        for k, v in self.terms.items():
            for key in v.terms:
                degs.add(-(len(k) - 1) + 2 * key[2])
        return sorted(degs)

    def min_u(self) -> int:
        return min((v.min_u() for v in self.terms.values()), default=0)

    def min_h(self) -> int:
        return min((v.min_h() for v in self.terms.values()), default=self.alg.nh + 1)

    def length_part(self, length: int) -> Chain:
        return Chain(self.alg, {k: v for k, v in self.terms.items() if len(k) == length}, _trusted=True)

    def __repr__(self):
        if not self.terms:
            return "Chain(0)"
        from .jetcalc import _mono_str

        parts = []
        for k in sorted(self.terms, key=lambda k: (len(k), k)):
            slots = ", ".join(_mono_str(self.alg, m) or "1" for m in k)
            parts.append(f"({self.terms[k]})*({slots})")
        return "Chain(" + " + ".join(parts) + ")"


PeriodicChain = Chain


def _emit(out: dict, zero, head: tuple, val: dict, tail: tuple, coeff: Scalar, sign: int):
    """Add coeff*sign*(head, m, tail) for each monomial m of ``val``, normalizing."""
    pos = len(head)
    for m, sc in val.items():
        if pos and m == zero:
            continue
        w = coeff * sc
        if sign < 0:
            w = -w
        _add_into(out, head + (m,) + tail, w)


def l_act(phi: Cochain, c: Chain) -> Chain:
    """Action L_phi of phi in C^{p+1} on chains (both sums, wrap-around included)."""
    p = phi.arity - 1
    zero = c.alg.zero_mono
    out = {}
    for key, coeff in c.terms.items():
        n = len(key) - 1
        if n < p:
            continue
        base = _sgn(p)
        for i in range(0, n - p + 1):
            val = phi.eval_monos(key[i:i + p + 1])
            if not val:
                continue
            _emit(out, zero, key[:i], val, key[i + p + 1:], coeff, base * _sgn(i * p))
        for i in range(n - p + 1, n + 1):
            args = key[i:] + key[:p - n + i]
            val = phi.eval_monos(args)
            if not val:
                continue
            _emit(out, zero, (), val, key[p - n + i:i], coeff, base * _sgn(i * n))
    return Chain(c.alg, out, _trusted=True)


def chain_b(product: Cochain, c: Chain) -> Chain:
    """Hochschild boundary b = L_product."""
    return l_act(product, c)


def connes_B(c: Chain) -> Chain:
    """B(a_0..a_n) = sum_i (-1)^{in} (1, a_i, .., a_n, a_0, .., a_{i-1})."""
    zero = c.alg.zero_mono
    out = {}
    for key, coeff in c.terms.items():
        n = len(key) - 1
        for i in range(n + 1):
            new = (zero,) + key[i:] + key[:i]
            if any(m == zero for m in new[1:]):
                continue
            _add_into(out, new, coeff if _sgn(i * n) > 0 else -coeff)
    return Chain(c.alg, out, _trusted=True)


def i_op(phi: Cochain, c: Chain, product: Cochain = None) -> Chain:
    """I_phi(a_0, .., a_n) = (a_0 phi(a_1, .., a_p), a_{p+1}, .., a_n).

    ``product`` is the multiplication used for a_0 * phi(..); pointwise by
    default, a star product for the deformed algebras.
    """
    p = phi.arity
    zero = c.alg.zero_mono
    out = {}
    for key, coeff in c.terms.items():
        n = len(key) - 1
        if n < p:
            continue
        val = phi.eval_monos(key[1:p + 1])
        if not val:
            continue
        a0 = key[0]
        if product is None:
            shifted = {_add_idx(m, a0): sc for m, sc in val.items()}
        else:
            shifted = {}
            for m, sc in val.items():
                for m2, sc2 in product.eval_monos((a0, m)).items():
                    _add_into(shifted, m2, sc * sc2)
        _emit(out, zero, (), shifted, key[p + 1:], coeff, 1)
    return Chain(c.alg, out, _trusted=True)


def h_op(phi: Cochain, c: Chain) -> Chain:
    """Getzler's homotopy H_phi (double sum with sign (-1)^{i(n-p+1)+j(p+1)})."""
    p = phi.arity
    zero = c.alg.zero_mono
    out = {}
    for key, coeff in c.terms.items():
        n = len(key) - 1
        if n < p:
            continue
        for i in range(0, n - p + 1):
            wrap = key[n + 1 - i:]
            for j in range(0, n - p - i + 1):
                head = (zero,) + wrap + key[0:j + 1]
                if any(m == zero for m in head[1:]):
                    continue
                tail = key[j + p + 1:n - i + 1]
                val = phi.eval_monos(key[j + 1:j + p + 1])
                if not val:
                    continue
                sign = _sgn(i * (n - p + 1) + j * (p + 1))
                _emit(out, zero, head, val, tail, coeff, sign)
    return Chain(c.alg, out, _trusted=True)


def ihat(phi: Cochain, c: Chain, product: Cochain = None) -> Chain:
    """I_phi + u H_phi."""
    return i_op(phi, c, product) + h_op(phi, c).shift_u(1)


def cyclic_D(product: Cochain, c: Chain) -> Chain:
    """D = b + u B."""
    return chain_b(product, c) + connes_B(c).shift_u(1)


# ---------------------------------------------------------------------------
# HKR maps between multivectors and cochains


def hkr_cochain(P: MultiVec) -> Cochain:
    """HKR image of a homogeneous multivector:
    xi_1^..^xi_p -> (a_1..a_p) -> (1/p!) sum_sigma sgn(sigma) xi_{sigma(p)}(a_1)...xi_{sigma(1)}(a_p).
    """
    alg = P.alg
    degs = P.degrees()
    if len(degs) > 1:
        raise ValueError("hkr_cochain needs a homogeneous multivector")
    p = degs[0] if degs else 0
    if p == 0:
        return Cochain(alg, 0, {(): P.terms.get((), alg.zero())})
    out = {}
    norm = as_rat(1) / factorial(p)
    for idx, g in P.terms.items():
        for perm in permutations(range(p)):
            sign, _ = sort_sign(perm)
            # slot k (0-based) receives direction idx[perm[p-1-k]]
            key = []
            for k in range(p):
                e = [0] * alg.dim
                e[idx[perm[p - 1 - k]] - 1] = 1
                key.append(tuple(e))
            key = tuple(key)
            val = g * (sign * norm)
            cur = out.get(key)
            out[key] = val if cur is None else cur + val
    return Cochain(alg, p, out)


def hkr_symbol(phi: Cochain) -> MultiVec:
    """Left inverse of hkr_cochain killing Hochschild coboundaries.

    Keeps the terms that differentiate every slot exactly once and sends
    d_{j_1} x ... x d_{j_p} to d_{j_p} ^ ... ^ d_{j_1}.
    """
    alg = phi.alg
    if phi.arity == 0:
        return MultiVec(alg, {(): phi.terms.get((), alg.zero())})
    out = MultiVec(alg, {})
    for key, g in phi.terms.items():
        if not all(sum(a) == 1 for a in key):
            continue
        dirs = [a.index(1) + 1 for a in key]
        out = out + MultiVec.basis(alg, tuple(reversed(dirs)), g)
    return out


def gm_contraction(phi: Cochain, c: Chain, product: Cochain = None) -> Chain:
    """I_phi - u H_phi.

    With b = L_mu this is the combination satisfying
    u L_phi = [D, J_phi] + J_{b phi}; it drives the Gauss-Manin transport.
    """
    return i_op(phi, c, product) - h_op(phi, c).shift_u(1)
