"""Curvature matrices of 2-forms and u-graded characteristic series.

Entries are either genuine 2-forms (``DiffForm`` of degree 2) or elements of
a polynomial ring whose generators x_1, x_2, .. stand for commuting 2-forms
(``FnElem`` of polynomial degree 1). Even forms commute, so ordinary matrix
algebra applies in both models.
"""

from __future__ import annotations

from .coefficients import as_rat
from .jetcalc import POLY, AlgebraSpec, DiffForm, FnElem


class CurvatureMatrix:
    def __init__(self, entries):
        rows = [list(r) for r in entries]
        if not rows or any(len(r) != len(rows) for r in rows):
            raise ValueError("curvature matrix must be square and non-empty")
        self.entries = rows
        self.size = len(rows)
        first = rows[0][0]
        self.alg = first.alg
        self.is_form = isinstance(first, DiffForm)
        for r in rows:
            for e in r:
                if isinstance(e, DiffForm) != self.is_form or e.alg != self.alg:
                    raise ValueError("all entries must live in the same model")
                if self.is_form:
                    if e.degrees() not in ([], [2]):
                        raise ValueError("entries must be homogeneous 2-forms")
                elif not isinstance(e, FnElem) or any(sum(k) != 1 for k in e.terms):
                    raise ValueError("symbolic entries must be linear in the 2-form generators")

    @classmethod
    def symbolic(cls, rows, generators: int = None, nh=0, nu=0) -> CurvatureMatrix:
        """Matrix over the ring of 2-form symbols x_1..x_g from a nested list of FnElem or ints."""
        alg = None
        for r in rows:
            for e in r:
                if isinstance(e, FnElem):
                    alg = e.alg
        if alg is None:
            alg = AlgebraSpec(POLY, generators or 1, nh, nu)
        return cls([[e if isinstance(e, FnElem) else alg.const(e) for e in r] for r in rows])

    @classmethod
    def zero(cls, alg: AlgebraSpec, size: int = 1, form: bool = True) -> CurvatureMatrix:
        z = DiffForm(alg, {}) if form else alg.zero()
        return cls([[z] * size for _ in range(size)])

    # element ring ------------------------------------------------------
    def zero_el(self):
        return DiffForm(self.alg, {}) if self.is_form else self.alg.zero()

    def one_el(self):
        return DiffForm(self.alg, {(): self.alg.one()}) if self.is_form else self.alg.one()

    def mul(self, a, b):
        return a.wedge(b) if self.is_form else a * b

    def scale_element(self, a, c):
        return a.scale(c) if self.is_form else a * c

    def form_degree(self, a) -> list:
        if self.is_form:
            return a.degrees()
        return sorted({2 * sum(k) for k in a.terms})

    def is_zero(self) -> bool:
        return all(not e for r in self.entries for e in r)


def matmul(R: CurvatureMatrix, A, B):
    n = R.size
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = R.zero_el()
            for k in range(n):
                if A[i][k] and B[k][j]:
                    acc = acc + R.mul(A[i][k], B[k][j])
            row.append(acc)
        out.append(row)
    return out


def identity(R: CurvatureMatrix):
    return [[R.one_el() if i == j else R.zero_el() for j in range(R.size)] for i in range(R.size)]


def matrix_power(R: CurvatureMatrix, k: int):
    out = identity(R)
    for _ in range(k):
        out = matmul(R, out, R.entries)
    return out


def trace(M):
    acc = M[0][0]
    for i in range(1, len(M)):
        acc = acc + M[i][i]
    return acc


class AhatSeries:
    """u-graded series: map u-power k -> element of form degree 2k."""

    def __init__(self, R: CurvatureMatrix, components: dict):
        self.R = R
        self.components = {k: v for k, v in components.items() if v}

    def __getitem__(self, k):
        return self.components.get(k, self.R.zero_el())

    def __eq__(self, other):
        if not isinstance(other, AhatSeries):
            return NotImplemented
        return self.components == other.components

    def __sub__(self, other):
        keys = set(self.components) | set(other.components)
        return AhatSeries(self.R, {k: self[k] - other[k] for k in keys})

    def is_zero(self) -> bool:
        return not self.components

    def order(self) -> int:
        return max(self.components, default=0)

    def to_json(self) -> dict:
        return {str(k): str(v) for k, v in sorted(self.components.items())}

    def __repr__(self):
        parts = [f"u^{k}: {v}" for k, v in sorted(self.components.items())]
        return "AhatSeries(" + "; ".join(parts) + ")"


def series_mul(R: CurvatureMatrix, a: dict, b: dict, order: int) -> dict:
    out = {}
    for i, x in a.items():
        for j, y in b.items():
            if i + j > order:
                continue
            val = R.mul(x, y)
            if val:
                out[i + j] = out[i + j] + val if i + j in out else val
    return {k: v for k, v in out.items() if v}


def series_exp(R: CurvatureMatrix, T: dict, order: int) -> dict:
    """exp of a series without u^0 part, truncated at u^order."""
    if T.get(0):
        raise ValueError("series_exp needs a series without constant term")
    out = {0: R.one_el()}
    term = {0: R.one_el()}
    r = 0
    while True:
        r += 1
        term = series_mul(R, term, T, order)
        term = {k: R.scale_element(v, as_rat(1) / r) for k, v in term.items()}
        if not term:
            return out
        for k, v in term.items():
            out[k] = out[k] + v if k in out else v
