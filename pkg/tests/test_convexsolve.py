import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from qgh.convexsolve import (AtomicGauge, EuclideanGauge, LinearProgram, MaxGauge, Polytope, gauge_value,
                             in_hull, min_norm_weights, nearest_point, solve_lp)
from qgh.errors import Infeasible, Unbounded


def test_textbook_lp():
    # max 3x + 2y  s.t. x + y <= 4, x + 3y <= 6
    lp = LinearProgram(c=[-3, -2], A_ub=[[1, 1], [1, 3]], b_ub=[4, 6])
    res = solve_lp(lp)
    assert res.value == pytest.approx(-12.0)
    assert res.x == pytest.approx([4.0, 0.0])


def test_infeasible_and_unbounded():
    with pytest.raises(Infeasible):
        solve_lp(LinearProgram(c=[1.0], A_eq=[[1.0]], b_eq=[-1.0]))
    with pytest.raises(Unbounded):
        solve_lp(LinearProgram(c=[-1.0, 0.0], A_eq=[[1.0, -1.0]], b_eq=[0.0]))


def test_free_and_bounded_variables():
    lp = LinearProgram(c=[1.0, 1.0], A_eq=[[1.0, -1.0]], b_eq=[3.0], lb=[-np.inf, -2.0], ub=[np.inf, 5.0])
    res = solve_lp(lp)
    assert res.value == pytest.approx(-1.0)
    assert res.x == pytest.approx([1.0, -2.0])


def test_degenerate_lp_terminates():
    # a classic cycling example for the largest-coefficient rule
    c = [-0.75, 150, -0.02, 6]
    A = [[0.25, -60, -0.04, 9], [0.5, -90, -0.02, 3], [0, 0, 1, 0]]
    res = solve_lp(LinearProgram(c=c, A_ub=A, b_ub=[0, 0, 1]))
    assert res.value == pytest.approx(-0.05)


@pytest.mark.parametrize("seed", range(25))
def test_agrees_with_highs(seed):
    rng = np.random.default_rng(seed)
    n, me, mu = 6, 2, 4
    x = rng.random(n)
    Ae, Au = rng.normal(size=(me, n)), rng.normal(size=(mu, n))
    be, bu = Ae @ x, Au @ x + rng.random(mu)
    c = rng.normal(size=n)
    ub = np.where(rng.random(n) < 0.5, 2.0, np.inf)
    ref = linprog(c, A_ub=Au, b_ub=bu, A_eq=Ae, b_eq=be, bounds=[(0, None if np.isinf(u) else u) for u in ub])
    if ref.status == 0:
        assert solve_lp(LinearProgram(c, Ae, be, Au, bu, ub=ub)).value == pytest.approx(ref.fun, abs=1e-8)


def test_lexicographic_tie_break():
    # every point of the segment x + y = 1 is optimal for c = 0
    lp = LinearProgram(c=[0.0, 0.0], A_eq=[[1.0, 1.0]], b_eq=[1.0])
    assert solve_lp(lp, lexicographic=True).x == pytest.approx([0.0, 1.0])


def test_atomic_gauge_is_l1_for_unit_atoms():
    g = AtomicGauge(np.eye(3))
    assert gauge_value(g, [1.0, -2.0, 0.5]) == pytest.approx(3.5)


def test_max_and_euclidean_gauges():
    assert gauge_value(MaxGauge(np.eye(2)), [3.0, -4.0]) == pytest.approx(4.0)
    assert gauge_value(EuclideanGauge(2.0), [3.0, -4.0]) == pytest.approx(10.0)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=2, max_size=2))
def test_nearest_point_on_square(z):
    square = Polytope([[0, 0], [1, 0], [0, 1], [1, 1]])
    z = np.array(z)
    expect = np.clip(z, 0, 1)
    np_e = nearest_point(z, square, EuclideanGauge())
    assert np_e.distance == pytest.approx(np.linalg.norm(z - expect), abs=1e-7)
    np_inf = nearest_point(z, square, MaxGauge(np.eye(2)))
    assert np_inf.distance == pytest.approx(np.abs(z - expect).max(), abs=1e-8)
    np_1 = nearest_point(z, square, AtomicGauge(np.eye(2)))
    assert np_1.distance == pytest.approx(np.abs(z - expect).sum(), abs=1e-8)


def test_min_norm_point_of_simplex():
    w = min_norm_weights(np.eye(3))
    assert w @ np.eye(3) == pytest.approx(np.full(3, 1 / 3), abs=1e-9)


def test_in_hull():
    tri = Polytope([[0, 0], [1, 0], [0, 1]])
    assert in_hull([0.2, 0.2], tri)
    assert not in_hull([0.8, 0.8], tri)
