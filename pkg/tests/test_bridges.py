import numpy as np
import pytest

from qgh.bridges import (RECIPES, Bridge, certify, chain, combine, distq_lower, distq_upper, make_bridge,
                         measure_dual_gap, perturbation_bridge, quotient_doubling_upper, validate_bridge)
from qgh.classical import appendix1_instance, embed_cqms, random_metric
from qgh.errors import DimensionMismatch, HypothesisViolated, InvalidParams
from qgh.lipnorm import PolyhedralLip, radius_diameter
from qgh.ouspace import scalars
from qgh.statemetric import hausdorff_states, rho


@pytest.fixture
def Y():
    inst = appendix1_instance()
    return inst.A, inst.L


@pytest.mark.parametrize("eps", [1e-3, 0.1, 1.0])
def test_doubling_distance_is_eps(Y, eps):
    A, L = Y
    N = make_bridge("doubling", A, epsilon=eps)
    M, gap = combine(L, L, N)
    assert gap == pytest.approx(eps)
    assert hausdorff_states(M, 0, 1) == pytest.approx(eps, abs=1e-9)
    assert validate_bridge(N, L, L, samples=8).ok


def test_to_scalars_collapses_to_radius(Y):
    A, L = Y
    r = radius_diameter(L)[0]
    cert = certify(L, PolyhedralLip(scalars(), np.zeros((0, 1))), make_bridge("to_scalars", A, r=r), validate_samples=8)
    assert cert.bracket == pytest.approx((r, r), abs=1e-9)
    assert cert.diagnostics["bridge_ok"]


def test_two_points_bridge(Y):
    A, L = Y
    inst = appendix1_instance()
    B, LZ = embed_cqms(inst.Z)
    N = make_bridge("two_points", A, B, mu0=[0, 1, 0], nu0=[1, 0], gamma=1.0)
    up = distq_upper(L, LZ, N)
    assert distq_lower(L, LZ) <= up
    # combined metric reaches every state within gap + diameter
    assert up <= 1.0 + 3.0


def test_along_map_inclusion(Y):
    A, L = Y
    # constants sit inside C(Y): ι(t) = t·e
    N = make_bridge("along_map", A, scalars(), inclusion=np.ones((3, 1)), gamma=1.0)
    assert N.gap == pytest.approx(1.0)


def test_bad_params(Y):
    A, _ = Y
    with pytest.raises(InvalidParams):
        make_bridge("doubling", A, epsilon=-1)
    with pytest.raises(InvalidParams):
        make_bridge("nope", A)
    with pytest.raises(DimensionMismatch):
        Bridge(A, A, np.ones((1, 2)))
    assert "state_family" in RECIPES


def test_state_family_bridge(Y):
    A, L = Y
    N = make_bridge("state_family", A, A, pairs=(A.states, A.states), epsilon=0.2)
    assert distq_upper(L, L, N) == pytest.approx(0.2, abs=1e-9)


def test_chain_triangle(Y):
    A, L = Y
    links = [make_bridge("doubling", A, epsilon=0.1), make_bridge("doubling", A, epsilon=0.2)]
    res = chain([L, L, L], links)
    assert res.link_distances == pytest.approx([0.1, 0.2], abs=1e-9)
    assert res.end_to_end <= res.link_sum + 1e-9


@pytest.mark.parametrize("factor", [1.05, 1.3])
def test_perturbation_bridge(Y, factor):
    A, L = Y
    L2 = PolyhedralLip(A, L.functionals / factor)
    cert = perturbation_bridge(L, L2, samples=64)
    assert cert.upper <= cert.diagnostics["measured_delta"] + 1e-7
    delta, _ = measure_dual_gap(L, L2, samples=64)
    with pytest.raises(HypothesisViolated):
        perturbation_bridge(L, L2, delta=delta / 2, samples=64)


def test_quotient_doubling_gives_half(Y):
    A, L = Y
    inst = appendix1_instance()
    up = quotient_doubling_upper(L, np.eye(3), inst.K1)
    assert 0.5 <= up <= 0.5 + 1e-6


def test_quotient_doubling_same_set_is_eps(Y):
    A, L = Y
    assert quotient_doubling_upper(L, np.eye(3), np.eye(3), epsilon=1e-3) == pytest.approx(1e-3, abs=1e-9)


def test_lower_bound_is_half_diameter_gap(rng):
    X, Z = random_metric(4, rng), random_metric(3, rng)
    _, LX = embed_cqms(X)
    _, LZ = embed_cqms(Z)
    assert distq_lower(LX, LZ) == pytest.approx(abs(X.diameter - Z.diameter) / 2)
