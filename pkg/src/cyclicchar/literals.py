"""Text and JSON formats for scalars, functions, forms, chains and inputs.

Literals are arithmetic expressions in the names x1..xd (PolyRd) or z1..zd
(Torus) and the ring symbols t (tau), h (hbar), u and s, e.g.
``"3/4*t^1*h^2*u^-1 + 1"`` or ``"z1^-1*z2 - h*x1"``. They are parsed with the
Python ``ast`` module; ``^`` means power.
"""

from __future__ import annotations

import ast
import re

from .coefficients import DEFAULT_NH, DEFAULT_NU, Rat, Scalar
from .curvature import CurvatureMatrix
from .hochschild import Chain, Cochain
from .jetcalc import POLY, TORUS, AlgebraSpec, DiffForm, FnElem, MultiVec, bivector_from_matrix

SCHEMA_VERSION = 1


class LiteralError(ValueError):
    pass


_NAME = re.compile(r"^([xz])_?(\d+)$")
_SYMBOLS = {"t": "tau", "h": "hbar", "u": "u", "s": "s"}


def _eval(node, alg: AlgebraSpec) -> FnElem:
    if isinstance(node, ast.Expression):
        return _eval(node.body, alg)
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return alg.const(node.value)
    if isinstance(node, ast.Name):
        name = node.id
        if name in _SYMBOLS:
            return alg.const(getattr(alg, _SYMBOLS[name])())
        m = _NAME.match(name)
        if m:
            sym, i = m.group(1), int(m.group(2))
            want = "x" if alg.kind == POLY else "z"
            if sym != want or not 1 <= i <= alg.dim:
                raise LiteralError(f"unknown variable {name!r} for {alg.kind} of dimension {alg.dim}")
            return alg.var(i)
        raise LiteralError(f"unknown name {name!r}")
    if isinstance(node, ast.UnaryOp):
        val = _eval(node.operand, alg)
        if isinstance(node.op, ast.USub):
            return -val
        if isinstance(node.op, ast.UAdd):
            return val
    if isinstance(node, ast.BinOp):
        left = _eval(node.left, alg)
        if isinstance(node.op, ast.Pow):
            k = _int_exponent(node.right)
            if k < 0 and left.is_constant():
                return alg.const(left.constant_part() ** k)
            try:
                return left ** k
            except ZeroDivisionError as exc:
                raise LiteralError(str(exc)) from exc
        right = _eval(node.right, alg)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            if not right.is_constant() or not right.constant_part().is_rational() or not right:
                raise LiteralError("division only by non-zero rational constants")
            return left / right.constant_part().constant_term()
    raise LiteralError(f"unsupported syntax: {ast.dump(node)}")


def _int_exponent(node) -> int:
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return -_int_exponent(node.operand)
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return node.value
    raise LiteralError("exponents must be integer literals")


def parse_fn(text, alg: AlgebraSpec) -> FnElem:
    if isinstance(text, int):
        return alg.const(text)
    if not isinstance(text, str):
        raise LiteralError(f"expected a string literal, got {type(text).__name__}")
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise LiteralError(f"cannot parse {text!r}: {exc.msg}") from exc
    return _eval(tree, alg)


def parse_scalar(text, nh: int = DEFAULT_NH, nu: int = DEFAULT_NU) -> Scalar:
    alg = AlgebraSpec(POLY, 1, nh, nu)
    f = parse_fn(text, alg)
    if not f.is_constant():
        raise LiteralError(f"{text!r} is not a scalar")
    return f.constant_part()


def parse_algebra(data, nh: int, nu: int) -> AlgebraSpec:
    if not isinstance(data, dict):
        raise LiteralError("algebra must be an object with kind and dim")
    kind = data.get("kind")
    if kind not in (POLY, TORUS):
        raise LiteralError(f"algebra kind must be {POLY!r} or {TORUS!r}")
    dim = data.get("dim")
    if not isinstance(dim, int) or dim < 1:
        raise LiteralError("algebra dim must be a positive integer")
    return AlgebraSpec(kind, dim, nh, nu)


def _parse_basis_key(key: str, sym: str) -> tuple:
    key = key.strip()
    if key in ("", "1"):
        return ()
    out = []
    for part in key.split("^"):
        part = part.strip()
        if not part.startswith(sym) or not part[len(sym):].isdigit():
            raise LiteralError(f"bad basis element {part!r}")
        out.append(int(part[len(sym):]))
    return tuple(out)


def _parse_exterior(cls, data, alg, sym):
    if not isinstance(data, dict):
        raise LiteralError("expected an object mapping basis elements to coefficients")
    out = cls(alg, {})
    for key, val in data.items():
        idx = _parse_basis_key(key, sym)
        if any(not 1 <= i <= alg.dim for i in idx):
            raise LiteralError(f"index out of range in {key!r}")
        out = out + cls.basis(alg, idx, parse_fn(val, alg))
    return out


def parse_form(data, alg: AlgebraSpec) -> DiffForm:
    """{"dx1^dx2": "x1", "": "1"}"""
    return _parse_exterior(DiffForm, data, alg, "dx")


def parse_multivec(data, alg: AlgebraSpec) -> MultiVec:
    """{"d1^d2": "h"}"""
    return _parse_exterior(MultiVec, data, alg, "d")


def parse_bivector(data, nh: int, nu: int):
    """{"kind":"Torus","dim":2,"matrix":[["0","h"],["-h","0"]]} -> (alg, pi)."""
    alg = parse_algebra(data, nh, nu)
    mat = data.get("matrix")
    if not isinstance(mat, list) or len(mat) != alg.dim or any(not isinstance(r, list) or len(r) != alg.dim for r in mat):
        raise LiteralError("matrix must be dim x dim")
    try:
        return alg, bivector_from_matrix(alg, [[parse_fn(e, alg) for e in r] for r in mat])
    except ValueError as exc:
        raise LiteralError(str(exc)) from exc


def parse_chain(data, alg: AlgebraSpec) -> Chain:
    """{"tensors":[{"coeff":"1","slots":["x1","x2*x1"]}]}"""
    if not isinstance(data, dict) or not isinstance(data.get("tensors"), list):
        raise LiteralError("chain must be an object with a tensors list")
    out = Chain.zero(alg)
    for t in data["tensors"]:
        if not isinstance(t, dict) or not isinstance(t.get("slots"), list) or not t["slots"]:
            raise LiteralError("each tensor needs a non-empty slots list")
        coeff = parse_fn(str(t.get("coeff", "1")), alg)
        if not coeff.is_constant():
            raise LiteralError("tensor coefficients must be scalars")
        out = out + Chain.from_tensor([parse_fn(s, alg) for s in t["slots"]], coeff.constant_part())
    return out


def parse_cochain(data, alg: AlgebraSpec, arity: int) -> Cochain:
    """[{"coeff": "x1", "slots": [[1,0],[0,2]]}, ...]"""
    if not isinstance(data, list):
        raise LiteralError("cochain must be a list of terms")
    terms = {}
    for t in data:
        slots = tuple(tuple(int(a) for a in s) for s in t["slots"])
        f = parse_fn(t["coeff"], alg)
        terms[slots] = terms[slots] + f if slots in terms else f
    return Cochain(alg, arity, terms)


def parse_curvature(data) -> CurvatureMatrix:
    """{"size":2,"entries":[["0","x2"],["-x2","0"]]}; x_i are commuting 2-form symbols."""
    if not isinstance(data, dict):
        raise LiteralError("curvature must be an object")
    size = data.get("size")
    entries = data.get("entries")
    if not isinstance(size, int) or size < 1 or not isinstance(entries, list) or len(entries) != size:
        raise LiteralError("curvature needs a positive size and size rows")
    names = set()
    for r in entries:
        if not isinstance(r, list) or len(r) != size:
            raise LiteralError("curvature rows must have length size")
        for e in r:
            names.update(int(i) for i in re.findall(r"x_?(\d+)", str(e)))
    gens = max(names, default=1)
    alg = AlgebraSpec(POLY, gens, 0, 0)
    try:
        return CurvatureMatrix([[parse_fn(str(e), alg) for e in r] for r in entries])
    except ValueError as exc:
        raise LiteralError(str(exc)) from exc


# ---------------------------------------------------------------------------
# output


def chain_to_json(c: Chain) -> dict:
    from .jetcalc import _mono_str

    tensors = []
    for key in sorted(c.terms, key=lambda k: (len(k), k)):
        tensors.append({
            "coeff": str(c.terms[key]),
            "slots": [_mono_str(c.alg, m) or "1" for m in key],
        })
    return {"tensors": tensors}


def scalar_to_str(sc: Scalar) -> str:
    return str(sc)


def as_rat_str(x) -> str:
    return str(Rat(x))
