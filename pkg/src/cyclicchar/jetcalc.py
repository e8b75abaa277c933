"""Functions, multivector fields and differential forms at desk scale.

Two function algebras are modelled:

* ``PolyRd`` -- polynomials in x_1..x_d (formal R^d),
* ``Torus``  -- Laurent polynomials in z_i = exp(tau * x_i) on T^d, so that
  d/dx_i z^k = tau * k_i * z^k and integration picks the z^0 coefficient.

Multivectors and forms are stored in the exterior basis with strictly
increasing index tuples (1-based directions). A bivector
``pi = sum_{i<j} pi^{ij} d_i ^ d_j`` is paired with its full antisymmetric
coefficient matrix whenever a formula sums over all (i, j).

Schouten bracket convention: ``[P, Q] = sum_i (P <-d/dtheta_i)(d_i Q)
- (-1)^{(p-1)(q-1)} (Q <-d/dtheta_i)(d_i P)`` with right theta-derivatives.
It is anchored by ``[X, f] = X(f)`` and satisfies
``[a ^ b, c] = a ^ [b, c] + (-1)^{|a||b|} b ^ [a, c]``; for example
``[d_1 ^ d_2, x_1] = -d_2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import factorial

from .coefficients import (
    DEFAULT_NH,
    DEFAULT_NU,
    NotNilpotent,
    PoleOverflow,
    Scalar,
    as_rat,
)

POLY = "PolyRd"
TORUS = "Torus"


class Unsupported(ValueError):
    pass


class UnsupportedVolume(Unsupported):
    pass


@dataclass(frozen=True)
class AlgebraSpec:
    kind: str
    dim: int
    nh: int = DEFAULT_NH
    nu: int = DEFAULT_NU

    def __post_init__(self):
        if self.kind not in (POLY, TORUS):
            raise ValueError(f"unknown algebra kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")

    @property
    def zero_mono(self):
        return (0,) * self.dim

    def scalar(self, c=0) -> Scalar:
        if isinstance(c, Scalar):
            return c.with_window(min(c.nh, self.nh), min(c.nu, self.nu))
        return Scalar.const(c, self.nh, self.nu)

    def u(self) -> Scalar:
        return Scalar.monomial(u=1, nh=self.nh, nu=self.nu)

    def hbar(self) -> Scalar:
        return Scalar.monomial(h=1, nh=self.nh, nu=self.nu)

    def tau(self) -> Scalar:
        return Scalar.monomial(tau=1, nh=self.nh, nu=self.nu)

    def s(self) -> Scalar:
        return Scalar.monomial(s=1, nh=self.nh, nu=self.nu)

    def const(self, c) -> FnElem:
        c = self.scalar(c)
        return FnElem(self, {self.zero_mono: c} if c else {})

    def one(self) -> FnElem:
        return self.const(1)

    def zero(self) -> FnElem:
        return FnElem(self, {})

    def monomial(self, exps, c=1) -> FnElem:
        exps = tuple(exps)
        if len(exps) != self.dim:
            raise ValueError("exponent vector has wrong length")
        if self.kind == POLY and min(exps, default=0) < 0:
            raise ValueError("negative exponent in a polynomial algebra")
        c = self.scalar(c)
        return FnElem(self, {exps: c} if c else {})

    def var(self, i: int) -> FnElem:
        """x_i (PolyRd) or z_i (Torus), 1-based."""
        e = [0] * self.dim
        e[i - 1] = 1
        return self.monomial(e)

    def with_truncation(self, nh=None, nu=None) -> AlgebraSpec:
        return AlgebraSpec(self.kind, self.dim,
                           self.nh if nh is None else nh,
                           self.nu if nu is None else nu)


@lru_cache(maxsize=1 << 18)
def deriv_mono(kind: str, exps: tuple, alpha: tuple):
    """d^alpha of the monomial ``exps``: (rational factor, tau power, new exps) or None."""
    if kind == POLY:
        c = 1
        new = []
        for e, a in zip(exps, alpha):
            if a > e:
                return None
            for k in range(a):
                c *= e - k
            new.append(e - a)
        return as_rat(c), 0, tuple(new)
    c = 1
    for e, a in zip(exps, alpha):
        if a:
            if e == 0:
                return None
            c *= e ** a
    return as_rat(c), sum(alpha), exps


def _scale(sc: Scalar, c, tau_pow: int) -> Scalar:
    """sc * c * tau^tau_pow without re-validating the window."""
    if not tau_pow:
        return Scalar({k: v * c for k, v in sc.terms.items()}, sc.nh, sc.nu, _trusted=True)
    return Scalar({(k[0] + tau_pow, k[1], k[2], k[3]): v * c for k, v in sc.terms.items()},
                  sc.nh, sc.nu, _trusted=True)


def _add_into(out: dict, key, val: Scalar):
    cur = out.get(key)
    if cur is None:
        if val:
            out[key] = val
    else:
        cur = cur + val
        if cur:
            out[key] = cur
        else:
            del out[key]


class FnElem:
    """Element of the function algebra: map monomial exponent vector -> Scalar."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: AlgebraSpec, terms=None):
        self.alg = alg
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    def _coerce(self, other) -> FnElem:
        if isinstance(other, FnElem):
            return other
        return self.alg.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            _add_into(out, k, v)
        return FnElem(self.alg, out)

    __radd__ = __add__

    def __neg__(self):
        return FnElem(self.alg, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, FnElem):
            if isinstance(other, (MultiVec, DiffForm)):
                return NotImplemented
            return FnElem(self.alg, {k: v * other for k, v in self.terms.items()})
        out = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                _add_into(out, tuple(a + b for a, b in zip(k1, k2)), v1 * v2)
        return FnElem(self.alg, out)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return FnElem(self.alg, {k: v / c for k, v in self.terms.items()})

    def __pow__(self, k: int):
        if k < 0:
            if len(self.terms) != 1 or self.alg.kind != TORUS:
                raise ZeroDivisionError("only torus monomials are invertible")
            ((mono, c),) = self.terms.items()
            return FnElem(self.alg, {tuple(e * k for e in mono): c ** k})
        out = self.alg.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, FnElem):
            try:
                other = self._coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(k) for k in self.terms)

    def constant_part(self) -> Scalar:
        return self.terms.get(self.alg.zero_mono, self.alg.scalar(0))

    def map_scalars(self, fn) -> FnElem:
        return FnElem(self.alg, {k: fn(v) for k, v in self.terms.items()})

    def deriv(self, alpha) -> FnElem:
        alpha = tuple(alpha)
        if not any(alpha):
            return self
        out = {}
        for mono, sc in self.terms.items():
            d = deriv_mono(self.alg.kind, mono, alpha)
            if d is None:
                continue
            c, tp, new = d
            _add_into(out, new, _scale(sc, c, tp))
        return FnElem(self.alg, out)

    def min_h(self) -> int:
        return min((v.min_h() for v in self.terms.values()), default=self.alg.nh + 1)

    def __str__(self):
        return format_fn(self)

    def __repr__(self):
        return f"FnElem({self})"


def partial(f: FnElem, i: int) -> FnElem:
    if not 1 <= i <= f.alg.dim:
        raise ValueError(f"direction {i} out of range 1..{f.alg.dim}")
    alpha = [0] * f.alg.dim
    alpha[i - 1] = 1
    return f.deriv(alpha)


def _mono_str(alg: AlgebraSpec, mono) -> str:
    sym = "x" if alg.kind == POLY else "z"
    parts = []
    for i, e in enumerate(mono, start=1):
        if e == 1:
            parts.append(f"{sym}{i}")
        elif e:
            parts.append(f"{sym}{i}^{e}")
    return "*".join(parts)


def _coeff_str(sc: Scalar) -> str:
    s = str(sc)
    return s if len(sc.terms) == 1 else f"({s})"


def format_fn(f: FnElem) -> str:
    if not f.terms:
        return "0"
    parts = []
    for mono in sorted(f.terms):
        sc = f.terms[mono]
        m = _mono_str(f.alg, mono)
        if not m:
            parts.append(_coeff_str(sc))
        elif sc == 1:
            parts.append(m)
        else:
            parts.append(f"{_coeff_str(sc)}*{m}")
    return " + ".join(parts)


# ---------------------------------------------------------------------------
# exterior algebra helpers


def merge_sign(a: tuple, b: tuple):
    """(sign, merged) for e_a ^ e_b with sorted index tuples, or (0, None)."""
    if set(a) & set(b):
        return 0, None
    inv = 0
    for x in a:
        for y in b:
            if x > y:
                inv += 1
    return (-1 if inv % 2 else 1), tuple(sorted(a + b))


def sort_sign(idx):
    """Sign of the permutation sorting ``idx`` and the sorted tuple (0 on repeats)."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, None
    sign = 1
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                sign = -sign
    return sign, tuple(sorted(idx))


class _Exterior:
    """Common storage: strictly increasing index tuple -> FnElem."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: AlgebraSpec, terms=None):
        self.alg = alg
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    def _new(self, terms):
        return type(self)(self.alg, terms)

    @classmethod
    def from_function(cls, f: FnElem):
        return cls(f.alg, {(): f})

    @classmethod
    def basis(cls, alg, idx, coeff=None):
        sign, key = sort_sign(idx)
        if not sign:
            return cls(alg, {})
        f = alg.one() if coeff is None else (coeff if isinstance(coeff, FnElem) else alg.const(coeff))
        return cls(alg, {key: f * sign})

    def __add__(self, other):
        if not isinstance(other, type(self)):
            return NotImplemented
        out = dict(self.terms)
        for k, v in other.terms.items():
            cur = out.get(k)
            out[k] = v if cur is None else cur + v
        return self._new(out)

    def __neg__(self):
        return self._new({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> _Exterior:
        """Multiply coefficients by a function, Scalar or rational."""
        return self._new({k: v * c for k, v in self.terms.items()})

    def __mul__(self, c):
        if isinstance(c, _Exterior):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self._new({k: v / c for k, v in self.terms.items()})

    def wedge(self, other):
        out = {}
        for k1, f1 in self.terms.items():
            for k2, f2 in other.terms.items():
                sign, key = merge_sign(k1, k2)
                if not sign:
                    continue
                val = f1 * f2 if sign > 0 else -(f1 * f2)
                cur = out.get(key)
                out[key] = val if cur is None else cur + val
        return self._new(out)

    __xor__ = wedge

    def __eq__(self, other):
        if not isinstance(other, type(self)):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self):
        return sorted({len(k) for k in self.terms})

    @property
    def degree(self):
        ds = self.degrees()
        if not ds:
            return 0
        if len(ds) > 1:
            raise ValueError(f"inhomogeneous element with degrees {ds}")
        return ds[0]

    def component(self, q: int):
        return self._new({k: v for k, v in self.terms.items() if len(k) == q})

    def coefficient(self, idx) -> FnElem:
        sign, key = sort_sign(idx)
        if not sign:
            return self.alg.zero()
        return self.terms.get(key, self.alg.zero()) * sign

    def map_coeffs(self, fn):
        return self._new({k: fn(v) for k, v in self.terms.items()})

    def map_scalars(self, fn):
        return self._new({k: v.map_scalars(fn) for k, v in self.terms.items()})

    def partial(self, i: int):
        return self._new({k: partial(v, i) for k, v in self.terms.items()})

    def min_h(self) -> int:
        return min((v.min_h() for v in self.terms.values()), default=self.alg.nh + 1)

    def is_constant_coefficient(self) -> bool:
        return all(v.is_constant() for v in self.terms.values())

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, key=lambda k: (len(k), k)):
            basis = "^".join(f"{self._sym}{i}" for i in k)
            coeff = format_fn(self.terms[k])
            if not basis:
                parts.append(f"({coeff})")
            else:
                parts.append(f"({coeff})*{basis}")
        return " + ".join(parts)

    def __repr__(self):
        return f"{type(self).__name__}({self})"


class MultiVec(_Exterior):
    """Antisymmetric multivector field sum_I g_I d_I."""

    __slots__ = ()
    _sym = "d"

    def matrix_entry(self, i: int, j: int) -> FnElem:
        """Full antisymmetric coefficient pi^{ij} of a bivector."""
        return self.coefficient((i, j))


class DiffForm(_Exterior):
    """Differential form sum_I f_I dx_I (possibly of mixed degree)."""

    __slots__ = ()
    _sym = "dx"


def multivec(alg, terms) -> MultiVec:
    return MultiVec(alg, {tuple(k): (v if isinstance(v, FnElem) else alg.const(v)) for k, v in terms.items()})


def form(alg, terms) -> DiffForm:
    return DiffForm(alg, {tuple(k): (v if isinstance(v, FnElem) else alg.const(v)) for k, v in terms.items()})


def bivector_from_matrix(alg: AlgebraSpec, matrix) -> MultiVec:
    """Bivector with pi^{ij} = matrix[i-1][j-1]; the matrix must be antisymmetric."""
    d = alg.dim
    terms = {}
    for i in range(d):
        for j in range(d):
            a, b = matrix[i][j], matrix[j][i]
            a = a if isinstance(a, FnElem) else alg.const(a)
            b = b if isinstance(b, FnElem) else alg.const(b)
            if a + b:
                raise ValueError("bivector matrix must be antisymmetric")
            if i < j and a:
                terms[(i + 1, j + 1)] = a
    return MultiVec(alg, terms)


def volume_form(alg: AlgebraSpec, c=1) -> DiffForm:
    return DiffForm(alg, {tuple(range(1, alg.dim + 1)): alg.const(c)})


# ---------------------------------------------------------------------------
# Schouten bracket


def _right_theta_derivative(P: MultiVec, i: int) -> MultiVec:
    out = {}
    for idx, f in P.terms.items():
        if i in idx:
            r = idx.index(i)
            sign = -1 if (len(idx) - 1 - r) % 2 else 1
            key = idx[:r] + idx[r + 1:]
            out[key] = f * sign
    return MultiVec(P.alg, out)


def _homogeneous(X):
    return [(q, X.component(q)) for q in X.degrees()]


def schouten(P: MultiVec, Q: MultiVec) -> MultiVec:
    alg = P.alg
    out = MultiVec(alg, {})
    for p, Pp in _homogeneous(P):
        for q, Qq in _homogeneous(Q):
            sign = -1 if ((p - 1) * (q - 1)) % 2 else 1
            for i in range(1, alg.dim + 1):
                out = out + _right_theta_derivative(Pp, i).wedge(Qq.partial(i))
                term = _right_theta_derivative(Qq, i).wedge(Pp.partial(i))
                out = out - term if sign > 0 else out + term
    return out


# ---------------------------------------------------------------------------
# Cartan calculus


def dR(omega: DiffForm) -> DiffForm:
    out = {}
    alg = omega.alg
    for idx, f in omega.terms.items():
        for i in range(1, alg.dim + 1):
            if i in idx:
                continue
            df = partial(f, i)
            if not df:
                continue
            sign, key = merge_sign((i,), idx)
            cur = out.get(key)
            val = df if sign > 0 else -df
            out[key] = val if cur is None else cur + val
    return DiffForm(alg, out)


def _iota_basis(vec_idx: tuple, form_idx: tuple):
    """iota_{d_I} dx_J = iota_{i1} ... iota_{ip} dx_J (innermost i_p first)."""
    sign = 1
    cur = form_idx
    for i in reversed(vec_idx):
        if i not in cur:
            return 0, None
        r = cur.index(i)
        if r % 2:
            sign = -sign
        cur = cur[:r] + cur[r + 1:]
    return sign, cur


def iota(gamma: MultiVec, omega: DiffForm) -> DiffForm:
    out = {}
    for I, g in gamma.terms.items():
        for J, f in omega.terms.items():
            if len(I) > len(J):
                continue
            sign, key = _iota_basis(I, J)
            if not sign:
                continue
            val = g * f
            if sign < 0:
                val = -val
            cur = out.get(key)
            out[key] = val if cur is None else cur + val
    return DiffForm(omega.alg, out)


def lie(gamma: MultiVec, omega: DiffForm) -> DiffForm:
    """L_gamma = d iota_gamma - (-1)^p iota_gamma d, per homogeneous component."""
    out = DiffForm(omega.alg, {})
    for p, gp in _homogeneous(gamma):
        a = dR(iota(gp, omega))
        b = iota(gp, dR(omega))
        out = out + (a + b if p % 2 else a - b)
    return out


def iota_hat(gamma: MultiVec, omega: DiffForm) -> DiffForm:
    """iota_gamma + (u/2) d L_gamma."""
    alg = omega.alg
    return iota(gamma, omega) + dR(lie(gamma, omega)).scale(alg.u() / 2)


def exp_iota_over_u(pi: MultiVec, omega: DiffForm, variant: str = "plain") -> DiffForm:
    """sum_k (iota_pi / u)^k omega / k!  (``variant='hat'`` uses iota_hat)."""
    if variant not in ("plain", "hat"):
        raise ValueError("variant must be 'plain' or 'hat'")
    op = iota if variant == "plain" else iota_hat
    alg = omega.alg
    inv_u = Scalar.monomial(u=-1, nh=alg.nh, nu=alg.nu)
    has_h0 = pi.min_h() == 0
    limit = (alg.nh + 2) * (alg.dim + 2) + 2 * alg.nu + 4
    out = omega
    term = omega
    k = 0
    try:
        while term:
            k += 1
            if k > limit:
                raise NotNilpotent("exp(iota_pi/u) series did not terminate")
            term = op(pi, term).scale(inv_u) / k
            out = out + term
    except PoleOverflow as exc:
        if has_h0:
            raise NotNilpotent(f"pi has an hbar^0 part and the u-window is exhausted: {exc}") from exc
        raise
    return out


def eval_at_zero(omega: DiffForm) -> DiffForm:
    f = omega.terms.get(())
    if f is None:
        return DiffForm(omega.alg, {})
    return DiffForm(omega.alg, {(): omega.alg.const(f.constant_part())})


def poincare_homotopy(omega: DiffForm) -> DiffForm:
    """Radial homotopy K with dK + Kd = id - eval_0 on polynomial forms."""
    alg = omega.alg
    if alg.kind != POLY:
        raise Unsupported("the radial homotopy is only available on PolyRd")
    out = {}
    for idx, f in omega.terms.items():
        q = len(idx)
        if q == 0:
            continue
        for mono, sc in f.terms.items():
            weight = sum(mono) + q
            for r, i in enumerate(idx):
                new = list(mono)
                new[i - 1] += 1
                key = idx[:r] + idx[r + 1:]
                val = sc * as_rat(-1 if r % 2 else 1) / weight
                cur = out.setdefault(key, {})
                _add_into(cur, tuple(new), val)
    return DiffForm(alg, {k: FnElem(alg, v) for k, v in out.items()})


def is_exact(omega: DiffForm):
    """(certified, primitive): omega == dK(omega) with K the radial homotopy."""
    K = poincare_homotopy(omega)
    return dR(K) == omega, K


def divergence(pi: MultiVec, volume: DiffForm) -> MultiVec:
    """Divergence of pi for the volume form rho dx_1^...^dx_d:

    sum_{i,j} (d_i pi^{ij} + pi^{ij} d_i log rho) d_j. The density rho must be
    invertible: a nonzero constant, or a single Laurent monomial on the torus
    (where d_i log rho = tau a_i for rho = c z^a).
    """
    alg = pi.alg
    top = tuple(range(1, alg.dim + 1))
    rho = volume.terms.get(top)
    if set(volume.terms) != {top} or len(rho.terms) != 1:
        raise UnsupportedVolume("volume must be rho dx_1^...^dx_d with rho a single nonzero monomial")
    (mono,) = rho.terms
    if any(mono) and alg.kind != TORUS:
        raise UnsupportedVolume("on PolyRd the volume density must be constant")
    log_rho = [alg.const(alg.tau() * mono[i - 1]) if mono[i - 1] else None for i in range(1, alg.dim + 1)]
    out = {}
    for i in range(1, alg.dim + 1):
        for j in range(1, alg.dim + 1):
            if i == j:
                continue
            pij = pi.matrix_entry(i, j)
            val = partial(pij, i)
            if log_rho[i - 1] is not None:
                val = val + pij * log_rho[i - 1]
            if val:
                cur = out.get((j,))
                out[(j,)] = val if cur is None else cur + val
    return MultiVec(alg, out)


def poisson_bracket(pi: MultiVec, f: FnElem, g: FnElem) -> FnElem:
    """{f, g} = sum_{i,j} pi^{ij} d_i f d_j g."""
    alg = f.alg
    out = alg.zero()
    for i in range(1, alg.dim + 1):
        dfi = partial(f, i)
        if not dfi:
            continue
        for j in range(1, alg.dim + 1):
            if i == j:
                continue
            pij = pi.matrix_entry(i, j)
            if pij:
                out = out + pij * dfi * partial(g, j)
    return out


class DegreeMismatch(ValueError):
    pass


def torus_integral(omega: DiffForm) -> Scalar:
    """Coefficient of z^0 dx_1^...^dx_d (normalized volume of T^d is 1).

    Lower-degree components of a mixed form integrate to zero; a nonzero form
    without top-degree part is rejected.
    """
    alg = omega.alg
    if alg.kind != TORUS:
        raise Unsupported("torus_integral needs a Torus algebra")
    top = tuple(range(1, alg.dim + 1))
    f = omega.terms.get(top)
    if f is None:
        if omega:
            raise DegreeMismatch(f"form of degrees {omega.degrees()} has no top-degree part")
        return alg.scalar(0)
    return f.constant_part()


def wedge_all(forms, alg) -> DiffForm:
    out = DiffForm(alg, {(): alg.one()})
    for f in forms:
        out = out.wedge(f)
    return out


def exp_form(omega: DiffForm) -> DiffForm:
    """exp of a form with no degree-0 part (nilpotent in the exterior algebra)."""
    if omega.terms.get(()):
        raise NotNilpotent("exp_form needs a form without 0-form part")
    alg = omega.alg
    out = DiffForm(alg, {(): alg.one()})
    term = out
    k = 0
    while True:
        k += 1
        term = term.wedge(omega) / k
        if not term:
            return out
        out = out + term


def all_index_tuples(dim: int, degree: int):
    return list(combinations(range(1, dim + 1), degree))


def multinomial(total: tuple, parts) -> int:
    c = 1
    for d, t in enumerate(total):
        c *= factorial(t)
        for p in parts:
            c //= factorial(p[d])
    return c
