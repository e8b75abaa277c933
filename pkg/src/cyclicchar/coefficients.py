"""Exact ground ring: rationals extended by tau, hbar, u and the path parameter s.

A :class:`Scalar` is a finite sum of monomials ``c * tau^a * h^b * u^k * s^j``
with rational ``c``. The hbar-degree is truncated at ``nh`` and the u-degree
lives in the window ``[-nu, nu]``: powers above ``nu`` are dropped, powers
below ``-nu`` raise :class:`PoleOverflow`. ``tau`` stands for ``2*pi*i`` in
the torus model and is never evaluated; ``s`` is the formal deformation
parameter of star-product families (polynomial, untruncated).
"""

from __future__ import annotations

from functools import lru_cache
from math import comb

from gmpy2 import mpq

Rat = mpq

DEFAULT_NH = 6
DEFAULT_NU = 6

# exponent slots of a monomial key
TAU, HBAR, U, S = range(4)
_SYMBOLS = ("t", "h", "u", "s")
_ZERO_KEY = (0, 0, 0, 0)


class PoleOverflow(ArithmeticError):
    """A u-power fell below the declared pole bound."""


class NotNilpotent(ArithmeticError):
    """An exponential series does not terminate under the truncation."""


def as_rat(x) -> mpq:
    if isinstance(x, str):
        return mpq(x.strip())
    return mpq(x)


@lru_cache(maxsize=None)
def bernoulli(n: int) -> mpq:
    """B_n with the convention t/(e^t - 1) = sum B_n t^n / n!  (so B_1 = -1/2)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return mpq(1)
    if n > 1 and n % 2 == 1:
        return mpq(0)
    # sum_{k<n+1} C(n+1, k) B_k = 0
    acc = mpq(0)
    for k in range(n):
        acc += comb(n + 1, k) * bernoulli(k)
    return -acc / (n + 1)


class Scalar:
    __slots__ = ("terms", "nh", "nu")

    def __init__(self, terms=None, nh: int = DEFAULT_NH, nu: int = DEFAULT_NU, *, _trusted=False):
        self.nh = nh
        self.nu = nu
        if _trusted:
            self.terms = terms
            return
        clean = {}
        if terms:
            for key, c in terms.items():
                if not c:
                    continue
                if key[HBAR] > nh or key[U] > nu:
                    continue
                if key[U] < -nu:
                    raise PoleOverflow(f"u^{key[U]} below window -{nu}")
                clean[key] = clean.get(key, 0) + mpq(c)
        self.terms = {k: v for k, v in clean.items() if v}

    # constructors ------------------------------------------------------
    @classmethod
    def const(cls, c, nh=DEFAULT_NH, nu=DEFAULT_NU) -> Scalar:
        c = as_rat(c)
        return cls({_ZERO_KEY: c} if c else {}, nh, nu, _trusted=True)

    @classmethod
    def monomial(cls, c=1, tau=0, h=0, u=0, s=0, nh=DEFAULT_NH, nu=DEFAULT_NU) -> Scalar:
        return cls({(tau, h, u, s): as_rat(c)}, nh, nu)

    @classmethod
    def zero(cls, nh=DEFAULT_NH, nu=DEFAULT_NU) -> Scalar:
        return cls({}, nh, nu, _trusted=True)

    @classmethod
    def one(cls, nh=DEFAULT_NH, nu=DEFAULT_NU) -> Scalar:
        return cls.const(1, nh, nu)

    def _coerce(self, other) -> Scalar:
        if isinstance(other, Scalar):
            return other
        return Scalar.const(other, self.nh, self.nu)

    def with_window(self, nh: int, nu: int) -> Scalar:
        return Scalar(self.terms, nh, nu)

    # ring structure ----------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        nh, nu = min(self.nh, other.nh), min(self.nu, other.nu)
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k)
            if v is None:
                out[k] = c
            else:
                v = v + c
                if v:
                    out[k] = v
                else:
                    del out[k]
        if nh < max(self.nh, other.nh) or nu < max(self.nu, other.nu):
            return Scalar(out, nh, nu)
        return Scalar(out, nh, nu, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return Scalar({k: -c for k, c in self.terms.items()}, self.nh, self.nu, _trusted=True)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            c = as_rat(other)
            if not c:
                return Scalar.zero(self.nh, self.nu)
            return Scalar({k: v * c for k, v in self.terms.items()}, self.nh, self.nu, _trusted=True)
        nh, nu = min(self.nh, other.nh), min(self.nu, other.nu)
        out = {}
        for (a1, b1, u1, s1), c1 in self.terms.items():
            for (a2, b2, u2, s2), c2 in other.terms.items():
                b = b1 + b2
                if b > nh:
                    continue
                u = u1 + u2
                if u > nu:
                    continue
                if u < -nu:
                    raise PoleOverflow(f"u^{u} below window -{nu}")
                key = (a1 + a2, b, u, s1 + s2)
                v = out.get(key)
                out[key] = c1 * c2 if v is None else v + c1 * c2
        return Scalar({k: v for k, v in out.items() if v}, nh, nu, _trusted=True)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Scalar):
            if len(other.terms) == 1 and _ZERO_KEY in other.terms:
                other = other.terms[_ZERO_KEY]
            else:
                return self * other ** -1
        return self * (1 / as_rat(other))

    def __pow__(self, k: int):
        if k < 0:
            if len(self.terms) != 1:
                raise ZeroDivisionError("only monomials are invertible")
            ((key, c),) = self.terms.items()
            if key[HBAR] or key[TAU] or key[S]:
                raise ZeroDivisionError("only rational multiples of u^k are invertible")
            return Scalar({(0, 0, key[U] * k, 0): c ** k}, self.nh, self.nu)
        out = Scalar.one(self.nh, self.nu)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.terms == other.terms
        try:
            return self.terms == Scalar.const(other).terms
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # inspection --------------------------------------------------------
    def is_rational(self) -> bool:
        return all(k == _ZERO_KEY for k in self.terms)

    def constant_term(self) -> mpq:
        return self.terms.get(_ZERO_KEY, mpq(0))

    def min_h(self) -> int:
        return min((k[HBAR] for k in self.terms), default=self.nh + 1)

    def min_u(self) -> int:
        return min((k[U] for k in self.terms), default=0)

    def max_s(self) -> int:
        return max((k[S] for k in self.terms), default=0)

    def coefficient(self, tau=0, h=0, u=0, s=0) -> mpq:
        return self.terms.get((tau, h, u, s), mpq(0))

    def select(self, slot: int, power: int) -> Scalar:
        """Part whose exponent in ``slot`` equals ``power`` (exponent kept)."""
        return Scalar({k: c for k, c in self.terms.items() if k[slot] == power},
                      self.nh, self.nu, _trusted=True)

    def truncate_h(self, order: int) -> Scalar:
        return Scalar({k: c for k, c in self.terms.items() if k[HBAR] <= order},
                      self.nh, self.nu, _trusted=True)

    # u and s operations ------------------------------------------------
    def shift_u(self, k: int) -> Scalar:
        """Multiply by u^k."""
        out = {}
        for key, c in self.terms.items():
            e = key[U] + k
            if e > self.nu:
                continue
            if e < -self.nu:
                raise PoleOverflow(f"u^{e} below window -{self.nu}")
            out[(key[0], key[1], e, key[3])] = c
        return Scalar(out, self.nh, self.nu, _trusted=True)

    def diff_s(self) -> Scalar:
        return Scalar({(a, b, u, s - 1): c * s for (a, b, u, s), c in self.terms.items() if s},
                      self.nh, self.nu, _trusted=True)

    def eval_s(self, value) -> Scalar:
        value = as_rat(value)
        out = {}
        for (a, b, u, s), c in self.terms.items():
            key = (a, b, u, 0)
            out[key] = out.get(key, 0) + c * value ** s
        return Scalar(out, self.nh, self.nu)

    def integrate_s(self, lower=0) -> Scalar:
        """Antiderivative in s vanishing at s = lower."""
        out = {}
        for (a, b, u, s), c in self.terms.items():
            out[(a, b, u, s + 1)] = c / (s + 1)
        prim = Scalar(out, self.nh, self.nu, _trusted=True)
        if lower:
            prim = prim - prim.eval_s(lower)
        return prim

    def exp(self) -> Scalar:
        """exp of a scalar that is nilpotent under the truncation window.

        Every monomial must carry a positive power of hbar or of u; tau and s
        are free symbols and do not make a monomial nilpotent.
        """
        if self.constant_term():
            raise NotNilpotent("nonzero constant coefficient")
        for key in self.terms:
            if key[HBAR] <= 0 and key[U] <= 0:
                raise NotNilpotent(f"monomial {key} is not nilpotent under truncation")
        out = Scalar.one(self.nh, self.nu)
        term = Scalar.one(self.nh, self.nu)
        k = 0
        while True:
            k += 1
            term = term * self / k
            if not term:
                return out
            out = out + term

    # formatting --------------------------------------------------------
    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for key in sorted(self.terms, key=_order_key):
            c = self.terms[key]
            factors = [f"{sym}^{e}" for sym, e in zip(_SYMBOLS, key) if e]
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            elif c == -1:
                parts.append("-" + "*".join(factors))
            else:
                parts.append(str(c) + "*" + "*".join(factors))
        out = " + ".join(parts)
        return out.replace("+ -", "- ")

    def __repr__(self):
        return f"Scalar({self})"


def _order_key(key):
    return (key[HBAR], key[U], key[TAU], key[S])


def tau(nh=DEFAULT_NH, nu=DEFAULT_NU) -> Scalar:
    return Scalar.monomial(tau=1, nh=nh, nu=nu)


def hbar(nh=DEFAULT_NH, nu=DEFAULT_NU) -> Scalar:
    return Scalar.monomial(h=1, nh=nh, nu=nu)


def u_var(nh=DEFAULT_NH, nu=DEFAULT_NU) -> Scalar:
    return Scalar.monomial(u=1, nh=nh, nu=nu)


def s_var(nh=DEFAULT_NH, nu=DEFAULT_NU) -> Scalar:
    return Scalar.monomial(s=1, nh=nh, nu=nu)


def scalar_mul(a: Scalar, b: Scalar) -> Scalar:
    return a * b


def scalar_exp(a: Scalar) -> Scalar:
    return a.exp()
