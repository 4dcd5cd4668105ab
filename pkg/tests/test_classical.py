import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qgh.classical import (EXACT_CAP, FiniteMetricSpace, appendix1_instance, compare_gh_vs_q, cov_growth,
                           gh_distance, random_metric, union_metric, validate_metric)
from qgh.errors import NotAMetric, TooLarge


def brute_gh(X, Y):
    """Half the least distortion over every relation with full projections."""
    pairs = list(itertools.product(range(len(X)), range(len(Y))))
    best = np.inf
    for mask in range(1, 1 << len(pairs)):
        R = [p for k, p in enumerate(pairs) if mask >> k & 1]
        if {a for a, _ in R} != set(range(len(X))) or {b for _, b in R} != set(range(len(Y))):
            continue
        dis = max(abs(X.dist[a, c] - Y.dist[b, d]) for a, b in R for c, d in R)
        best = min(best, dis)
    return best / 2


def test_three_versus_two_points_gh_is_one():
    inst = appendix1_instance()
    res = gh_distance(inst.Y, inst.Z)
    assert res.exact and res.value == 1.0


@pytest.mark.parametrize("seed", range(6))
def test_gh_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    X, Y = random_metric(3, rng), random_metric(3, rng)
    assert gh_distance(X, Y).value == pytest.approx(brute_gh(X, Y), abs=1e-12)


def test_gh_identity_and_symmetry(rng):
    X, Y = random_metric(4, rng), random_metric(4, rng)
    assert gh_distance(X, X).value == 0.0
    assert gh_distance(X, Y).value == pytest.approx(gh_distance(Y, X).value)


def test_gh_against_point_is_half_diameter(rng):
    X = random_metric(5, rng)
    P = FiniteMetricSpace(("p",), [[0.0]])
    assert gh_distance(X, P).value == pytest.approx(X.diameter / 2)


def test_exhaustive_cap_and_local_search(rng):
    X, Y = random_metric(6, rng), random_metric(5, rng)
    assert len(X) * len(Y) > EXACT_CAP
    with pytest.raises(TooLarge):
        gh_distance(X, Y)
    approx = gh_distance(X, Y, exact=False)
    assert not approx.exact and approx.value >= abs(X.diameter - Y.diameter) / 2 - 1e-12


@pytest.mark.parametrize("D,axiom", [
    ([[0, 1], [2, 0]], "symmetry"),
    ([[0, 1, 5], [1, 0, 1], [5, 1, 0]], "triangle inequality"),
    ([[1, 1], [1, 0]], "zero diagonal"),
    ([[0, 0], [0, 0]], "positivity"),
])
def test_metric_axioms_named(D, axiom):
    with pytest.raises(NotAMetric) as err:
        validate_metric(np.asarray(D, float))
    assert err.value.axiom == axiom


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 7), st.integers(0, 10_000))
def test_random_metrics_are_metrics(n, seed):
    X = random_metric(n, np.random.default_rng(seed))
    validate_metric(X.dist)


def test_cov_growth_on_the_path():
    Y = appendix1_instance().Y
    # open balls of radius 0.9 are single points; radius just over 1 reaches from the middle
    assert cov_growth(Y, 0.9) == (3, True)
    assert cov_growth(Y, 1.01) == (1, True)
    assert cov_growth(Y, 3.0) == (1, True)


@pytest.mark.parametrize("seed", range(4))
def test_union_metric_is_admissible(seed):
    rng = np.random.default_rng(seed)
    X, Y = random_metric(3, rng), random_metric(4, rng)
    res = gh_distance(X, Y)
    D = union_metric(X, Y, res.correspondence)
    validate_metric(D)
    assert np.allclose(D[:3, :3], X.dist) and np.allclose(D[3:, 3:], Y.dist)


def test_compare_shows_strict_gap():
    inst = appendix1_instance()
    rep = compare_gh_vs_q(inst.Y, inst.Z, K=inst.K1)
    assert rep.gh == 1.0
    assert rep.q_lower == pytest.approx(0.5)
    assert rep.q_upper <= 0.5 + 1e-6
    assert rep.strict_gap


def test_json_round_trip():
    Y = appendix1_instance().Y
    assert np.array_equal(FiniteMetricSpace.from_json(Y.to_json()).dist, Y.dist)
