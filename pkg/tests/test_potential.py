import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, strategies as st

from dirichlet_spectra import (
    EmptySet,
    NegativePotential,
    NonPositiveAlpha,
    assemble,
    build_graph,
    capacity_qp,
    equilibrium_potential,
    hitting_laplace_exact,
    hitting_probability_exact,
    kato_constant,
    restrict,
    solve_spd,
    tail_sets,
)
from dirichlet_spectra.potential import DIRECT_SOLVE_LIMIT

from conftest import graph_and_subset


def test_two_vertex_equilibrium(two_vertex):
    eq = equilibrium_potential(two_vertex, [1])
    assert np.allclose(eq.e_B, [0.5, 1.0], atol=1e-15)
    assert math.isclose(eq.cap, math.sqrt(1.5), rel_tol=1e-14)
    assert math.isclose(eq.cap_squared, 1.5, rel_tol=1e-14)
    assert set(eq.to_dict()) == {"B", "e_B", "cap", "cap_squared"}


def test_whole_space(path3):
    eq = equilibrium_potential(path3, [0, 1, 2])
    assert np.array_equal(eq.e_B, np.ones(3))
    assert math.isclose(eq.cap, math.sqrt(3.0))


def test_path_equilibrium(path3):
    eq = equilibrium_potential(path3, [2])
    assert np.allclose(eq.e_B, [0.2, 0.4, 1.0], atol=1e-15)


def test_empty_set_rejected(path3):
    with pytest.raises(EmptySet):
        equilibrium_potential(path3, [])


def test_capacity_qp_examples(two_vertex):
    assert math.isclose(capacity_qp(two_vertex, [1]), math.sqrt(1.5), rel_tol=1e-12)
    assert capacity_qp(two_vertex, []) == 0.0
    assert math.isclose(capacity_qp(two_vertex, [0, 1]), math.sqrt(2.0), rel_tol=1e-12)


@given(graph_and_subset(proper=False))
def test_linear_solve_matches_qp(data):
    g, B = data
    fs = assemble(g)
    eq = equilibrium_potential(fs, B)
    cap, v = capacity_qp(fs, B, return_minimizer=True)
    assert math.isclose(eq.cap, cap, rel_tol=1e-8)
    assert np.allclose(eq.e_B, v, atol=1e-8)


@given(graph_and_subset(proper=False))
def test_maximum_principle_and_laplace_identity(data):
    g, B = data
    fs = assemble(g)
    e = equilibrium_potential(fs, B).e_B
    assert e.min() >= 0 and e.max() <= 1
    assert np.all(e[B] == 1)
    assert np.allclose(e, hitting_laplace_exact(fs, B), atol=1e-10)


@given(graph_and_subset(min_n=3))
def test_capacity_monotone_in_set(data):
    g, B = data
    fs = assemble(g)
    small = equilibrium_potential(fs, B[:1])
    big = equilibrium_potential(fs, B)
    assert small.cap <= big.cap + 1e-12
    assert np.all(small.e_B <= big.e_B + 1e-12)


def test_hitting_probability_examples(two_vertex):
    p = hitting_probability_exact(two_vertex, [1], 1.0)
    assert math.isclose(p[0], 1 - math.exp(-1), rel_tol=1e-12) and p[1] == 1.0
    assert hitting_probability_exact(two_vertex, [1], 0.0).tolist() == [0.0, 1.0]


@given(graph_and_subset(), st.floats(0.01, 5.0))
def test_hitting_probability_bounds(data, t):
    g, B = data
    fs = assemble(g)
    p = hitting_probability_exact(fs, B, t)
    e = equilibrium_potential(fs, B).e_B
    # P{sigma <= t} <= e^t E[e^{-sigma}]
    assert np.all(p <= math.exp(t) * e + 1e-10)
    assert np.all(p <= hitting_probability_exact(fs, B, 2 * t) + 1e-12)
    assert np.all(p[B] == 1)


def test_hitting_probability_with_killing():
    # killing at rate 1 competes with the jump at rate 1
    fs = assemble(build_graph(2, [(0, 1, 1.0)], kill=[1.0, 0.0]))
    p = hitting_probability_exact(fs, [1], 50.0)
    assert math.isclose(p[0], 0.5, rel_tol=1e-10)


def test_tail_sets():
    eq = equilibrium_potential(assemble(build_graph(2, [(0, 1, 1.0)])), [1])
    assert tail_sets(eq, 1) == ()
    assert tail_sets(eq, 2) == (1,)
    assert tail_sets(eq, 3) == (0, 1)


def test_kato_examples(two_vertex):
    rep = kato_constant(two_vertex, [1.0, 0.0], 1.0)
    assert math.isclose(rep.c_alpha, 2 / 3, rel_tol=1e-14)
    assert np.allclose(rep.resolvent_image, [2 / 3, 1 / 3])
    assert kato_constant(two_vertex, [0.0, 0.0], 1.0).c_alpha == 0.0
    assert math.isclose(kato_constant(two_vertex, [0.3, 0.3], 2.0).c_alpha, 0.15, rel_tol=1e-14)
    with pytest.raises(NegativePotential):
        kato_constant(two_vertex, [-1.0, 0.0], 1.0)
    with pytest.raises(NonPositiveAlpha):
        kato_constant(two_vertex, [1.0, 0.0], 0.0)


@given(graph_and_subset(), st.floats(0.1, 10.0), st.floats(0.1, 3.0))
def test_kato_linear_and_oracle(data, alpha, scale):
    g, _ = data
    fs = assemble(g)
    V = np.random.default_rng(g.n).uniform(0, 1, g.n)
    rep = kato_constant(fs, V, alpha)
    oracle = np.linalg.solve(fs.Q.toarray() + alpha * np.diag(g.measure), g.measure * V)
    assert math.isclose(rep.c_alpha, oracle.max(), rel_tol=1e-9)
    assert math.isclose(kato_constant(fs, scale * V, alpha).c_alpha, scale * rep.c_alpha, rel_tol=1e-9)


def test_solve_spd_iterative_branch():
    n = DIRECT_SOLVE_LIMIT + 10
    fs = assemble(build_graph(n, [(i, i + 1, 1.0) for i in range(n - 1)], kill=1.0))
    rhs = np.ones(n)
    x = solve_spd(fs.Q, rhs)
    assert np.allclose(fs.Q @ x, rhs, atol=1e-8)


def test_restricted_system_equilibrium(path3):
    rs = restrict(path3, [0])
    eq = equilibrium_potential(rs, [1])
    # local vertices (1, 2); vertex 1 local index 1 is vertex 2
    oracle = sla.solve(np.array([[2.0 + 1.0]]), np.array([1.0]))
    assert np.allclose(eq.e_B, [oracle[0], 1.0])
