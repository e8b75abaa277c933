from itertools import combinations
from math import comb, factorial, pi as PI

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cyclicchar.coefficients import Rat, bernoulli
from cyclicchar.graphs import (
    ShoikhetGraph,
    SizeLimit,
    _angle_partials,
    _density,
    angle,
    d_gamma_eval,
    enumerate_graphs,
    mc_weight,
    mirror,
    validate,
    wheel_weight,
)
from cyclicchar.jetcalc import POLY, AlgebraSpec, DegreeMismatch, MultiVec

A = AlgebraSpec(POLY, 2, 2, 2)
x1, x2 = A.var(1), A.var(2)
TWO_CYCLE = ShoikhetGraph(2, 0, [(1, 2), (1, "b0"), (2, 1), (2, "b0")])


def count_oracle(m, n, out_degrees, center_degree=0):
    # vertex v picks its targets among 1..m (minus itself) and the n+1 boundary points
    total = comb(m + n + 1, center_degree)
    for d in out_degrees:
        total *= comb(m - 1 + n + 1, d)
    return total


def subset_oracle(m, n, out_degrees):
    verts = list(range(1, m + 1)) + [f"b{k}" for k in range(n + 1)]
    found = set()
    cand = [(a, b) for a in range(1, m + 1) for b in verts]
    for r in range(len(cand) + 1):
        for edges in combinations(cand, r):
            if [sum(e[0] == v for e in edges) for v in range(1, m + 1)] != list(out_degrees):
                continue
            g = ShoikhetGraph(m, n, list(edges))
            if not validate(g):
                found.add(g.key())
    return found


@pytest.mark.parametrize("m,n,degs", [(0, 0, []), (1, 1, [2]), (2, 0, [2, 2]), (2, 1, [1, 2]), (1, 2, [3])])
def test_enumeration_matches_oracles(m, n, degs):
    graphs = enumerate_graphs(m, n, degs)
    assert len(graphs) == count_oracle(m, n, degs)
    assert {g.key() for g in graphs} == subset_oracle(m, n, degs)
    assert all(not validate(g) for g in graphs)


def test_center_degree_and_size_limit():
    assert len(enumerate_graphs(1, 1, [2], center_degree=2)) == count_oracle(1, 1, [2], 2)
    with pytest.raises(SizeLimit):
        enumerate_graphs(4, 4, [3] * 4, size_limit=100)


def test_validate_rejects_bad_graphs():
    assert not validate(TWO_CYCLE)
    assert validate(ShoikhetGraph(1, 0, [(1, 1)]))
    assert validate(ShoikhetGraph(1, 0, [(1, 0)]))
    assert validate(ShoikhetGraph(1, 1, [("b0", 1)]))
    assert validate(ShoikhetGraph(1, 0, [(1, 5)]))
    bad_order = ShoikhetGraph(1, 1, [(1, "b0"), (1, "b1")], {1: [(1, "b0"), (1, "b0")]})
    assert validate(bad_order)


def test_json_round_trip_and_mirror():
    g = ShoikhetGraph(1, 2, [(1, "b1"), (1, "b0"), (1, "b2")])
    assert ShoikhetGraph.from_json(g.to_json()).to_json() == g.to_json()
    mg = mirror(g)
    assert sorted(map(str, mg.edges)) == sorted(map(str, [(1, "b2"), (1, "b0"), (1, "b1")]))
    assert mirror(mg).to_json() == g.to_json()


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 0.9), st.floats(0, 2 * PI), st.floats(0.05, 0.9), st.floats(0, 2 * PI))
def test_angle_partials_match_finite_differences(r1, t1, r2, t2):
    z = r1 * np.exp(1j * t1)
    w = r2 * np.exp(1j * t2)
    if abs(z - w) < 0.05:
        return
    dx, dy, C = _angle_partials(np.array([z]), np.array([w]))
    eps = 1e-6

    def fd(f, dz):
        return float(np.angle(np.exp(1j * (f(dz) - f(-dz))))) / (2 * eps)

    assert dx[0] == pytest.approx(fd(lambda e: angle(z + e * eps, w), 1), abs=1e-4)
    assert dy[0] == pytest.approx(fd(lambda e: angle(z + 1j * e * eps, w), 1), abs=1e-4)
    # target moves: d/dx_w = Im C, d/dy_w = Re C
    assert np.imag(C[0]) == pytest.approx(fd(lambda e: angle(z, w + e * eps), 1), abs=1e-4)
    assert np.real(C[0]) == pytest.approx(fd(lambda e: angle(z, w + 1j * e * eps), 1), abs=1e-4)


def test_density_matches_finite_difference_jacobian():
    zs = np.array([[0.3 + 0.2j, -0.4 + 0.1j]])
    dens, bad = _density(TWO_CYCLE, zs, np.zeros((1, 0)))
    assert not bad[0]
    eps = 1e-6

    def angles(coords):
        a, b = coords[0] + 1j * coords[1], coords[2] + 1j * coords[3]
        pts = {1: a, 2: b, "b0": 1.0 + 0j}
        return np.array([angle(pts[s], pts[t]) for s, t in TWO_CYCLE.ordered_edges()])

    base = np.array([0.3, 0.2, -0.4, 0.1])
    J = np.zeros((4, 4))
    for k in range(4):
        e = np.zeros(4)
        e[k] = eps
        diff = angles(base + e) - angles(base - e)
        J[:, k] = np.angle(np.exp(1j * diff)) / (2 * eps)
    assert dens[0] == pytest.approx(np.linalg.det(J / (2 * PI)), rel=1e-5)


def test_d_gamma_one_edge_vector_field():
    g = ShoikhetGraph(1, 1, [(1, "b1")])
    v = MultiVec(A, {(1,): x2, (2,): x1 * x1})
    f = x1 ** 2 * x2 + x2 ** 3
    out = d_gamma_eval(g, [v], [A.one(), f])
    assert out.coefficient(()) == x2 * (2 * x1 * x2) + x1 * x1 * (x1 * x1 + 3 * x2 * x2)


def test_d_gamma_wedge_graph():
    g = ShoikhetGraph(1, 2, [(1, "b1"), (1, "b2")])
    pi = MultiVec(A, {(1, 2): A.one()})
    assert d_gamma_eval(g, [pi], [A.one(), x1, x2]).coefficient(()) == A.one()
    assert d_gamma_eval(g, [pi], [A.one(), x2, x1]).coefficient(()) == -A.one()


def test_d_gamma_center_edge_gives_one_form():
    g = ShoikhetGraph(0, 1, [(0, "b1")])
    out = d_gamma_eval(g, [], [A.one(), x1 * x2])
    # (-1)^d iota_{d_K} D = sum over index maps; here D = -d(x1 x2)
    assert out.coefficient((1,)) == -x2
    assert out.coefficient((2,)) == -x1


def test_d_gamma_degree_mismatch():
    g = ShoikhetGraph(1, 1, [(1, "b1")])
    with pytest.raises(DegreeMismatch):
        d_gamma_eval(g, [MultiVec(A, {(1, 2): A.one()})], [A.one(), x1])


def test_mc_weight_flags_and_errors():
    g = ShoikhetGraph(1, 1, [(1, "b0"), (1, "b1")])
    w = mc_weight(g, 1000, 0)
    assert w.flag == "degree_mismatch" and w.estimate == 0.0
    with pytest.raises(ValueError):
        mc_weight(ShoikhetGraph(0, 1, [(0, "b1")]), 100, 0)
    with pytest.raises(ValueError):
        mc_weight(TWO_CYCLE, 0, 0)
    with pytest.raises(ValueError):
        mc_weight(TWO_CYCLE, 10, -1)


def test_mc_weight_deterministic_and_seed_stable():
    a = mc_weight(TWO_CYCLE, 100_000, 7)
    b = mc_weight(TWO_CYCLE, 100_000, 7)
    assert a.to_json() == b.to_json()
    c = mc_weight(TWO_CYCLE, 100_000, 8)
    assert abs(a.estimate - c.estimate) <= 4 * (a.stderr ** 2 + c.stderr ** 2) ** 0.5
    # relabelling 1 <-> 2 permutes rows and columns evenly
    swapped = ShoikhetGraph(2, 0, [(2, 1), (2, "b0"), (1, 2), (1, "b0")])
    d = mc_weight(swapped, 100_000, 7)
    assert abs(a.estimate - d.estimate) <= 4 * (a.stderr ** 2 + d.stderr ** 2) ** 0.5


def test_wheel_weights():
    assert wheel_weight(2) == Rat(1, 48)
    assert wheel_weight(4) == Rat(1, 5760)
    assert wheel_weight(3) == 0
    for j in (2, 4, 6, 8):
        sign = -1 if (j * (j - 1) // 2) % 2 else 1
        assert wheel_weight(j) == -sign * bernoulli(j) / (2 * j * factorial(j))
    with pytest.raises(ValueError):
        wheel_weight(0)
