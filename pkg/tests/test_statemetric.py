import numpy as np
import pytest

from qgh.classical import appendix1_instance, embed_cqms, random_metric
from qgh.convexsolve import AtomicGauge, EuclideanGauge
from qgh.errors import HypothesisViolated, NotStates
from qgh.statemetric import (StateMetricContext, base_norm_stability_check, candidate_states, directed_hausdorff,
                             finite_approximation, hausdorff, rho, scv)


@pytest.fixture
def ctx():
    return StateMetricContext(appendix1_instance().L)


def test_rho_requires_states(ctx):
    assert rho(ctx, [1, 0, 0], [0, 0, 1]) == pytest.approx(2.0)
    with pytest.raises(NotStates):
        rho(ctx, [2, 0, 0], [0, 0, 1])


def test_generator_distances(ctx):
    assert np.allclose(ctx.generator_distances, appendix1_instance().Y.dist)


def test_hausdorff_basic():
    P = np.array([[0.0, 0.0], [1.0, 0.0]])
    Q = P + [0.0, 0.5]
    g = EuclideanGauge()
    assert hausdorff(g, P, P) == pytest.approx(0.0, abs=1e-9)
    assert hausdorff(g, P, Q) == pytest.approx(0.5, abs=1e-7)
    # one-sided: a point inside the segment hull is at distance 0
    assert directed_hausdorff(g, [[0.5, 0.0]], P) == pytest.approx(0.0, abs=1e-9)
    assert hausdorff(AtomicGauge(np.eye(2)), P, Q) == pytest.approx(0.5, abs=1e-9)


def test_candidates_include_midpoints(ctx):
    C = candidate_states(ctx.space, depth=1)
    assert C.shape == (6, 3)
    assert any(np.allclose(c, [0.5, 0.5, 0.0]) for c in C)


def test_scv_packing_on_the_path(ctx):
    b = scv(ctx, 0.4)
    assert b.lower >= 3 and b.lower <= b.upper


@pytest.mark.parametrize("eps", [0.3, 0.75, 1.5, 2.5])
def test_scv_bracket_ordered(ctx, eps):
    b = scv(ctx, eps)
    assert 1 <= b.lower <= b.upper


def test_finite_approximation_bound_below_eps(rng):
    for _ in range(5):
        X = random_metric(5, rng)
        _, L = embed_cqms(X)
        c = StateMetricContext(L)
        for eps in (0.3, 1.0, 2.0):
            fa = finite_approximation(c, eps)
            assert fa.bound < eps


def test_finite_approximation_small_eps_is_everything(ctx):
    fa = finite_approximation(ctx, 1e-6)
    assert fa.space.dimension == 3 and fa.bound == pytest.approx(0.0, abs=1e-9)


def test_finite_approximation_large_eps_for_path(ctx):
    fa = finite_approximation(ctx, 10.0)
    assert len(fa.net) == 1
    assert fa.bound <= 1.0 + 1e-9  # the centre of the path


def _bases(rng, dim=3, k=6, scale=0.02):
    V = np.hstack([np.ones((k, 1)), rng.uniform(-1, 1, size=(k, dim - 1))])
    W = V.copy()
    W[:, 1:] += scale * rng.normal(size=(k, dim - 1))
    return V, W


def test_stability_identical_bases(rng):
    V, _ = _bases(rng)
    rep = base_norm_stability_check(V, V, samples=2000)
    assert rep.delta == 0.0 and rep.hausdorff == pytest.approx(0.0, abs=1e-9) and rep.holds


def test_stability_perturbed_bases(rng):
    V, W = _bases(rng)
    rep = base_norm_stability_check(V, W, samples=2000)
    assert rep.holds and rep.hausdorff < rep.eps


def test_stability_rejects_off_hyperplane(rng):
    V, _ = _bases(rng)
    with pytest.raises(HypothesisViolated):
        base_norm_stability_check(V, 2 * V, eta=np.array([1.0, 0.0, 0.0]))


def test_extreme_hausdorff_dominates_hull_version(rng):
    from qgh.bridges import combine, make_bridge
    from qgh.classical import embed_cqms, random_metric
    from qgh.statemetric import extreme_hausdorff, hausdorff_states

    A, L = embed_cqms(random_metric(3, rng))
    B, LB = embed_cqms(random_metric(2, rng))
    N = make_bridge("two_points", A, B, mu0=[1, 0, 0], nu0=[0.5, 0.5], gamma=0.7)
    J, _ = combine(L, LB, N)
    assert extreme_hausdorff(J) >= hausdorff_states(J) - 1e-9
