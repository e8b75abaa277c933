"""Shoikhet graphs: validation, enumeration, the D_Gamma evaluator,
Monte-Carlo weights on the disk and closed-form wheel weights.

Vertices are the integers 0..m (0 is the center, 1..m are type I) and the
strings "b0".."bn" (type II, on the boundary circle). Edges may leave the
center: their number is the form degree of D_Gamma.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from math import comb, factorial, pi as PI

import numpy as np

from .coefficients import Rat, bernoulli
from .jetcalc import DegreeMismatch, DiffForm, FnElem, MultiVec, all_index_tuples, sort_sign

DEFAULT_SIZE_LIMIT = 200_000


class SizeLimit(RuntimeError):
    pass


def bvert(k: int) -> str:
    return f"b{k}"


def is_boundary(v) -> bool:
    return isinstance(v, str)


def boundary_index(v) -> int:
    return int(v[1:])


def vertex_key(v):
    """Canonical order: type I vertices (center first), then b0, b1, ..."""
    return (1, boundary_index(v)) if is_boundary(v) else (0, v)


def _parse_vertex(v):
    if isinstance(v, str) and not v.startswith("b"):
        return int(v)
    return v


@dataclass
class ShoikhetGraph:
    m: int
    n: int
    edges: list
    star_order: dict = field(default_factory=dict)

    def __post_init__(self):
        self.edges = [(_parse_vertex(a), _parse_vertex(b)) for a, b in self.edges]
        if not self.star_order:
            self.star_order = canonical_star_order(self.edges)
        else:
            self.star_order = {int(k): [(_parse_vertex(a), _parse_vertex(b)) for a, b in v]
                               for k, v in self.star_order.items()}

    def vertices(self):
        return list(range(self.m + 1)) + [bvert(k) for k in range(self.n + 1)]

    def out_edges(self, v):
        return list(self.star_order.get(v, []))

    def in_edges(self, v):
        return [e for e in self.ordered_edges() if e[1] == v]

    def out_degree(self, v) -> int:
        return sum(1 for e in self.edges if e[0] == v)

    def ordered_edges(self):
        """Edges grouped by source (ascending) in star order."""
        out = []
        for v in range(self.m + 1):
            out.extend(self.out_edges(v))
        return out

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "edges": [list(e) for e in self.ordered_edges()],
            "star_order": {str(k): [list(e) for e in v] for k, v in sorted(self.star_order.items()) if v},
        }

    @classmethod
    def from_json(cls, data: dict) -> ShoikhetGraph:
        return cls(int(data["m"]), int(data["n"]), [tuple(e) for e in data["edges"]],
                   dict(data.get("star_order") or {}))

    def key(self):
        return (self.m, self.n, tuple(sorted(self.edges, key=lambda e: (vertex_key(e[0]), vertex_key(e[1])))))


def canonical_star_order(edges) -> dict:
    order = {}
    for a, b in edges:
        if not is_boundary(a):
            order.setdefault(a, []).append((a, b))
    for v in order:
        order[v].sort(key=lambda e: vertex_key(e[1]))
    return order


def validate(g: ShoikhetGraph) -> list:
    """Violations of the graph conditions; empty iff g is a Shoikhet graph."""
    problems = []
    verts = set(g.vertices())
    seen = set()
    for e in g.edges:
        a, b = e
        if a not in verts or b not in verts:
            problems.append(f"edge {e} uses an unknown vertex")
            continue
        if e in seen:
            problems.append(f"double edge {e}")
        seen.add(e)
        if is_boundary(a):
            problems.append(f"edge {e} starts at type II")
        if b == 0:
            problems.append(f"edge {e} ends at vertex 0")
        if a == b:
            problems.append(f"tadpole {e}")
    for v in range(g.m + 1):
        mine = sorted((e for e in g.edges if e[0] == v), key=str)
        listed = g.star_order.get(v, [])
        if sorted(listed, key=str) != mine or len(set(listed)) != len(listed):
            problems.append(f"star ordering at vertex {v} is not a total order of its outgoing edges")
    for v in g.star_order:
        if not (isinstance(v, int) and 0 <= v <= g.m):
            problems.append(f"star ordering given for non type I vertex {v}")
    return problems


def enumerate_graphs(m: int, n: int, out_degrees, center_degree: int = 0,
                     size_limit: int = DEFAULT_SIZE_LIMIT) -> list:
    """All Shoikhet graphs with the given out-degrees (vertices 1..m, and 0)."""
    out_degrees = list(out_degrees)
    if len(out_degrees) != m:
        raise ValueError("need one out-degree per type I vertex 1..m")
    degs = [center_degree] + out_degrees
    verts = list(range(m + 1)) + [bvert(k) for k in range(n + 1)]
    choices = []
    total = 1
    for v, d in enumerate(degs):
        targets = [w for w in verts if w != 0 and w != v]
        total *= comb(len(targets), d)
        choices.append([tuple((v, w) for w in sub) for sub in combinations(targets, d)])
    if total > size_limit:
        raise SizeLimit(f"{total} graphs exceed the limit {size_limit}")
    out = []
    for pick in product(*choices):
        edges = [e for part in pick for e in part]
        out.append(ShoikhetGraph(m, n, edges))
    return out


def mirror(g: ShoikhetGraph) -> ShoikhetGraph:
    """Image under complex conjugation: b0 fixed, b_k <-> b_{n+1-k}."""
    def f(v):
        if is_boundary(v):
            k = boundary_index(v)
            return v if k == 0 else bvert(g.n + 1 - k)
        return v
    edges = [(f(a), f(b)) for a, b in g.edges]
    order = {v: [(f(a), f(b)) for a, b in es] for v, es in g.star_order.items()}
    return ShoikhetGraph(g.m, g.n, edges, order)


# ---------------------------------------------------------------------------
# D_Gamma


def _components(gamma: MultiVec, idx: tuple) -> FnElem:
    """Antisymmetric component gamma^{i_1..i_p} (sign of the sorting permutation)."""
    return gamma.coefficient(idx)


def d_gamma_eval(g: ShoikhetGraph, multivecs, fns) -> DiffForm:
    """Multidifferential form of the graph on (gamma_1..gamma_m; a_0..a_n).

    For a constant d-vector gamma_0 = d_K the index-assignment sum over
    maps phi: E -> {1..dim} gives A_K; the dx_K coefficient of the result is
    (-1)^{d(d+1)/2} A_K so that (-1)^d iota_{gamma_0} D = A_K. The function
    a_k sits at the boundary vertex b_k, a_0 included.
    """
    multivecs = list(multivecs)
    fns = list(fns)
    if len(multivecs) != g.m or len(fns) != g.n + 1:
        raise ValueError("need m multivectors and n+1 functions")
    alg = fns[0].alg if fns else multivecs[0].alg
    dim = alg.dim
    for j, gamma in enumerate(multivecs, start=1):
        if gamma.degrees() not in ([], [g.out_degree(j)]):
            raise DegreeMismatch(f"vertex {j} has out-degree {g.out_degree(j)} but the multivector has degrees {gamma.degrees()}")
    edges = g.ordered_edges()
    pos = {e: i for i, e in enumerate(edges)}
    d = g.out_degree(0)
    center_edges = [pos[e] for e in g.out_edges(0)]
    vertex_data = []
    for j in range(1, g.m + 1):
        vertex_data.append((multivecs[j - 1], [pos[e] for e in g.out_edges(j)], [pos[e] for e in edges if e[1] == j]))
    bnd = [(fns[k], [pos[e] for e in edges if e[1] == bvert(k)]) for k in range(g.n + 1)]
    out = {}
    for K in all_index_tuples(dim, d):
        total = alg.zero()
        for phi in product(range(1, dim + 1), repeat=len(edges)):
            sign, _ = sort_sign([phi[i] for i in center_edges])
            if not sign or tuple(sorted(phi[i] for i in center_edges)) != K:
                continue
            term = alg.const(sign)
            for gamma, outs, ins in vertex_data:
                comp = _components(gamma, tuple(phi[i] for i in outs))
                if not comp:
                    term = None
                    break
                alpha = [0] * dim
                for i in ins:
                    alpha[phi[i] - 1] += 1
                comp = comp.deriv(alpha)
                if not comp:
                    term = None
                    break
                term = term * comp
            if term is None:
                continue
            for f, ins in bnd:
                alpha = [0] * dim
                for i in ins:
                    alpha[phi[i] - 1] += 1
                val = f.deriv(alpha)
                if not val:
                    term = None
                    break
                term = term * val
            if term is None:
                continue
            total = total + term
        if total:
            out[K] = total if (d * (d + 1) // 2) % 2 == 0 else -total
    return DiffForm(alg, out)


# ---------------------------------------------------------------------------
# Monte-Carlo weights


@dataclass
class WeightEstimate:
    graph: ShoikhetGraph
    samples: int
    seed: int
    estimate: float
    stderr: float
    flag: str = ""
    rejected: int = 0

    def to_json(self) -> dict:
        return {
            "graph": self.graph.to_json(),
            "samples": self.samples,
            "seed": self.seed,
            "estimate": self.estimate,
            "stderr": self.stderr,
            "flag": self.flag,
            "rejected": self.rejected,
        }


CHUNK = 1 << 15
_EPS = 1e-9


def _angle_partials(z, w):
    """Partials of phi(z, w) = arg[(w - z) / ((1 - conj(z) w)(-z))].

    Returns (d/dx_z, d/dy_z, C) where C = dL/dw for the holomorphic target
    derivative (phi = Im L).
    """
    zb = np.conj(z)
    A = -1.0 / (w - z) - 1.0 / z
    B = w / (1.0 - zb * w)
    C = 1.0 / (w - z) + zb / (1.0 - zb * w)
    return np.imag(A + B), np.real(A - B), C


def angle(z, w):
    return np.angle((w - z) / ((1.0 - np.conj(z) * w) * (-z)))


def _sample_chunk(rng, m, n, size):
    r = np.sqrt(rng.random((size, m)))
    t = 2 * PI * rng.random((size, m))
    zs = r * np.exp(1j * t)
    th = np.sort(2 * PI * rng.random((size, n)), axis=1)
    return zs, th


def _density(g: ShoikhetGraph, zs, th):
    """Pullback density of the wedge of normalized angle forms, and a bad-sample mask."""
    m, n = g.m, g.n
    size = zs.shape[0]
    ncols = 2 * m + n
    edges = g.ordered_edges()
    J = np.zeros((size, len(edges), ncols))
    bnd = np.exp(1j * th) if n else np.zeros((size, 0))
    bad = np.zeros(size, dtype=bool)
    for a in range(m):
        za = zs[:, a]
        bad |= np.abs(za) < _EPS
        bad |= 1 - np.abs(za) < _EPS
        for c in range(a + 1, m):
            bad |= np.abs(za - zs[:, c]) < _EPS
    for row, (src, dst) in enumerate(edges):
        z = zs[:, src - 1]
        if is_boundary(dst):
            k = boundary_index(dst)
            w = np.ones(size, dtype=complex) if k == 0 else bnd[:, k - 1]
        else:
            w = zs[:, dst - 1]
        dx, dy, C = _angle_partials(z, w)
        J[:, row, 2 * (src - 1)] += dx
        J[:, row, 2 * (src - 1) + 1] += dy
        if is_boundary(dst):
            k = boundary_index(dst)
            if k:
                J[:, row, 2 * m + k - 1] += np.imag(C * 1j * w)
        else:
            J[:, row, 2 * (dst - 1)] += np.imag(C)
            J[:, row, 2 * (dst - 1) + 1] += np.real(C)
    J /= 2 * PI
    return np.linalg.det(J), bad


def domain_volume(m: int, n: int) -> float:
    return PI ** m * (2 * PI) ** n / factorial(n)


def mc_weight(g: ShoikhetGraph, samples: int, seed: int) -> WeightEstimate:
    """Monte-Carlo estimate of the weight integral of a graph without center edges."""
    if samples <= 0:
        raise ValueError("samples must be positive")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    problems = validate(g)
    if problems:
        raise ValueError("invalid graph: " + "; ".join(problems))
    if g.out_degree(0):
        raise ValueError("graphs with edges out of the center are outside the Monte-Carlo scope")
    if len(g.edges) != 2 * g.m + g.n:
        return WeightEstimate(g, samples, seed, 0.0, 0.0, flag="degree_mismatch")
    vol = domain_volume(g.m, g.n)
    total = 0.0
    total_sq = 0.0
    done = 0
    rejected = 0
    chunk = 0
    while done < samples:
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, chunk])))
        chunk += 1
        size = min(CHUNK, samples - done)
        zs, th = _sample_chunk(rng, g.m, g.n, size)
        dens, bad = _density(g, zs, th)
        good = dens[~bad] * vol
        rejected += int(bad.sum())
        total += float(good.sum())
        total_sq += float((good * good).sum())
        done += good.size
    mean = total / done
    var = max(total_sq / done - mean * mean, 0.0)
    stderr = (var / max(done - 1, 1)) ** 0.5
    return WeightEstimate(g, samples, seed, mean, stderr, rejected=rejected)


# ---------------------------------------------------------------------------
# wheels


def wheel_weight(j: int) -> Rat:
    """w_j = -(-1)^{j(j-1)/2} B_j / (2 j j!), zero for odd j."""
    if j < 1:
        raise ValueError("j must be positive")
    if j % 2:
        return Rat(0)
    sign = -1 if (j * (j - 1) // 2) % 2 else 1
    return -sign * bernoulli(j) / (2 * j * factorial(j))


def wheel_form(R, j: int):
    """(u-power, form) of (-1)^{j(j-1)/2} u^j tr(R^j)."""
    from .curvature import matrix_power, trace

    sign = -1 if (j * (j - 1) // 2) % 2 else 1
    return j, R.scale_element(trace(matrix_power(R, j)), sign)
