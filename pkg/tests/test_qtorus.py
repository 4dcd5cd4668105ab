import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qgh.errors import BridgeInvalid, DimensionMismatch, InputError, NoConvergence, WindowTooSmall
from qgh.qtorus import (SkewMatrix, StateField, TorusElement, TorusSpace, basis_state, derivative,
                        length_lipnorm, lie_lipnorm, norm_theta, random_density, rational_symbol_norm,
                        rep_window, sigma, torus_distq_upper, translate, twisted_multiply, window_norm)

TH = SkewMatrix.from_upper(2, [0.37])


def rand_elem(rng, d=2, r=2, herm=False):
    pts = np.stack(np.meshgrid(*[np.arange(-r, r + 1)] * d, indexing="ij"), -1).reshape(-1, d)
    f = TorusElement(d, {tuple(int(x) for x in p): rng.normal() + 1j * rng.normal() for p in pts})
    return f + f.star() if herm else f


def test_skew_matrix_normalises():
    S = SkewMatrix.from_upper(2, [2.25])
    assert S.entries[0, 1] == pytest.approx(0.25) and S.entries[1, 0] == pytest.approx(-0.25)
    with pytest.raises(InputError):
        SkewMatrix(np.array([[0.0, 1.0], [0.5, 0.0]]))


def test_sigma_half_gives_i():
    assert sigma((1, 0), (0, 1), SkewMatrix.from_upper(2, [0.5])) == pytest.approx(1j)


def test_zero_theta_is_convolution(rng):
    f, g = rand_elem(rng, r=1), rand_elem(rng, r=1)
    h = twisted_multiply(f, g, np.zeros((2, 2)))
    for p, v in h.coeffs.items():
        ref = sum(a * g.get(tuple(x - y for x, y in zip(p, q))) for q, a in f.coeffs.items())
        assert v == pytest.approx(ref)


def test_commutation_relation():
    e1, e2 = TorusElement.delta((1, 0)), TorusElement.delta((0, 1))
    t = 0.37
    ab = twisted_multiply(e1, e2, TH).get((1, 1))
    ba = twisted_multiply(e2, e1, TH).get((1, 1))
    assert ab == pytest.approx(np.exp(2j * np.pi * t) * ba)


def test_associative_and_star_antimultiplicative(rng):
    f, g, h = (rand_elem(rng, r=1) for _ in range(3))
    lhs = twisted_multiply(twisted_multiply(f, g, TH), h, TH)
    rhs = twisted_multiply(f, twisted_multiply(g, h, TH), TH)
    assert (lhs - rhs).l1() < 1e-10
    st_ = twisted_multiply(f, g, TH).star() - twisted_multiply(g.star(), f.star(), TH)
    assert st_.l1() < 1e-10


def test_window_rep_matches_product(rng):
    f, g = rand_elem(rng, r=1), rand_elem(rng, r=1)
    M = 5
    A, B = rep_window(f, TH, M), rep_window(g, TH, M)
    C = rep_window(twisted_multiply(f, g, TH), TH, M)
    # compressions agree with the product away from the window edge
    P = np.stack(np.meshgrid(np.arange(-M, M + 1), np.arange(-M, M + 1), indexing="ij"), -1).reshape(-1, 2)
    inner = np.all(np.abs(P) <= M - 2, axis=1)
    assert np.abs((A @ B - C)[:, inner]).max() < 1e-10


def test_window_rep_adjoint_and_identity(rng):
    f = rand_elem(rng)
    assert np.abs(rep_window(f.star(), TH, 4) - rep_window(f, TH, 4).conj().T).max() < 1e-13
    assert np.allclose(rep_window(TorusElement.delta((0, 0)), TH, 3), np.eye(49))


def test_zero_theta_shift():
    A = rep_window(TorusElement.delta((1,)), np.zeros((1, 1)), 3)
    assert np.allclose(A, np.eye(7, k=-1))


@pytest.mark.parametrize("p", [(0, 0), (1, 0), (3, -2)])
def test_point_mass_norm_one(p):
    assert norm_theta(TorusElement.delta(p), TH).estimate == pytest.approx(1.0)


def test_commutative_norm_tends_to_two():
    f = TorusElement(1, {(0,): 1.0, (1,): 1.0})
    est = norm_theta(f, np.zeros((1, 1)), tol=1e-3, window_max=40)
    vals = [v for _, v in est.history]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert 1.95 < est.estimate <= 2.0


def test_harper_bracket():
    h = TorusElement(2, {(1, 0): 1, (-1, 0): 1, (0, 1): 1, (0, -1): 1})
    est = norm_theta(h, TH, window_max=10)
    assert est.lower <= est.upper == 4.0
    assert 2.0 < est.lower


def test_strict_cap_raises():
    f = TorusElement(1, {(0,): 1.0, (1,): 1.0})
    with pytest.raises(NoConvergence) as info:
        norm_theta(f, np.zeros((1, 1)), tol=1e-9, window_max=4, strict=True)
    lo, hi = info.value.bracket
    assert lo <= hi


def test_window_monotone_and_below_l1(rng):
    f = rand_elem(rng)
    vals = [window_norm(f, TH, M) for M in range(2, 7)]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
    assert vals[-1] <= f.l1()


def test_even_shift_invariance(rng):
    f = rand_elem(rng, herm=True)
    raw = np.array([[0, 0.37], [-0.37, 0]])
    shifted = raw + np.array([[0, 2.0], [-2.0, 0]])
    assert np.abs(rep_window(f, raw, 4) - rep_window(f, shifted, 4)).max() < 1e-9
    assert TH.shifted(0, 1, 3).entries == pytest.approx(TH.entries)


def test_rational_oracle_dominates_window():
    h = TorusElement(2, {(1, 0): 1, (-1, 0): 1, (0, 1): 1, (0, -1): 1})
    exact = rational_symbol_norm(h, 1, 3)
    w = window_norm(h, SkewMatrix.from_upper(2, [1 / 3]), 8)
    assert w <= exact + 1e-9
    assert exact - w < 0.05


def test_lie_lipnorm_circle():
    assert lie_lipnorm(TorusElement.delta((1,)), np.zeros((1, 1))).estimate == pytest.approx(2 * np.pi)
    assert lie_lipnorm(TorusElement.delta((0, 0)), TH).estimate == 0.0


@pytest.mark.parametrize("seed", range(4))
def test_lie_below_l1_bound(seed):
    rng = np.random.default_rng(seed)
    f = rand_elem(rng, herm=True)
    L = lie_lipnorm(f, TH, sphere_samples=32, window=5).estimate
    bound = 2 * np.pi * sum(np.linalg.norm(p) * abs(v) for p, v in f.coeffs.items())
    assert 0 < L <= bound


def test_lie_homogeneous(rng):
    f = rand_elem(rng, herm=True)
    a = lie_lipnorm(f, TH, sphere_samples=16, window=4).estimate
    b = lie_lipnorm(f * 3.0, TH, sphere_samples=16, window=4).estimate
    assert b == pytest.approx(3 * a, rel=1e-9)


def test_length_lipnorm_circle():
    v = length_lipnorm(TorusElement.delta((1,)), np.zeros((1, 1)), grid=64, window=4)
    assert v == pytest.approx(2 * np.pi, rel=1e-9)


def test_length_and_lie_agree_on_circle(rng):
    f = TorusElement(1, {(k,): rng.normal() for k in range(-2, 3)})
    f = f + f.star()
    th = np.zeros((1, 1))
    a = lie_lipnorm(f, th, window=6).estimate
    b = length_lipnorm(f, th, grid=128, window=6)
    assert b <= a * (1 + 1e-9)
    assert b > 0.98 * a


def test_derivative_and_translate():
    f = TorusElement(1, {(2,): 1.0})
    assert derivative(f, [1.0]).get((2,)) == pytest.approx(4j * np.pi)
    assert translate(f, [0.25]).get((2,)) == pytest.approx(-1.0)


def test_state_fields():
    S = basis_state(2, 2, (1, -1))
    assert S(TH, TorusElement.delta((0, 0))) == pytest.approx(1.0)
    assert S(TH, TorusElement.delta((1, 0))) == pytest.approx(0.0)
    with pytest.raises(WindowTooSmall):
        S(TH, TorusElement.delta((5, 0)))
    with pytest.raises(InputError):
        StateField(np.diag([0.5, 0.6, -0.1]), 1)


def test_state_continuity(rng):
    S = random_density(2, 2, rng)
    f = rand_elem(rng, r=2)
    gaps = [abs(S(SkewMatrix.from_upper(2, [0.3 + h]), f) - S(SkewMatrix.from_upper(2, [0.3]), f))
            for h in (1e-1, 1e-2, 1e-3)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-1


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=9, max_size=9))
def test_torus_space_round_trip(x):
    V = TorusSpace(2, [(a, b) for a in (-1, 0, 1) for b in (-1, 0, 1)])
    f = V.element(x)
    assert f.is_self_adjoint()
    assert V.coords(f) == pytest.approx(np.array(x))


def test_json_round_trip(rng):
    f = rand_elem(rng, r=1)
    g = TorusElement.from_json(f.to_json())
    assert (f - g).l1() < 1e-15


def test_dimension_checks():
    with pytest.raises(DimensionMismatch):
        rep_window(TorusElement.delta((1,)), TH, 2)
    with pytest.raises(InputError):
        TorusSpace(1, [(0,), (1,)])


def test_bridge_identical_fields():
    cert = torus_distq_upper(TH, TH, 1, 0.1, window=4, sphere_samples=8, random_w=2, density_samples=2)
    g = cert.diagnostics
    assert cert.upper == 0.0 and g["certificate"] == 0.0 and g["bridge_valid"]
    assert g["provenance"] == "sampled-estimate"


def test_bridge_strict_tiny_eps():
    psi = SkewMatrix.from_upper(2, [0.45])
    with pytest.raises(BridgeInvalid):
        torus_distq_upper(TH, psi, 1, 1e-6, window=4, sphere_samples=8, random_w=2, density_samples=2,
                          strict=True)
