"""Metric geometry of state spaces: ρ_L, Hausdorff distances, nets and packings."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.spatial import ConvexHull

from .config import DEFAULT
from .convexsolve import EuclideanGauge, Polytope, nearest_point
from .errors import HypothesisViolated, NotStates
from .lipnorm import PolyhedralLip, distance_matrix, dual_seminorm
from .ouspace import OrderUnitSpace, Projection, restrict_to_states


@dataclass
class StateMetricContext:
    lip: PolyhedralLip

    @property
    def space(self) -> OrderUnitSpace:
        return self.lip.space

    @cached_property
    def generator_distances(self) -> np.ndarray:
        return distance_matrix(self.lip)


def _as_state(A: OrderUnitSpace, mu) -> np.ndarray:
    mu = A.check(mu)
    if abs(mu @ A.unit - 1.0) > DEFAULT.center_check:
        raise NotStates(f"functional takes value {mu @ A.unit!r} on the unit")
    return mu


def rho(ctx: StateMetricContext, mu, nu, tol: float = DEFAULT.tol_lp) -> float:
    A = ctx.space
    return dual_seminorm(ctx.lip, _as_state(A, mu) - _as_state(A, nu), tol)


def directed_hausdorff(gauge, P: np.ndarray, Q: np.ndarray, tol: float = DEFAULT.tol_lp) -> float:
    """max over vertices p of P of the gauge distance from p to co(Q)."""
    target = Polytope(Q)
    return float(max(nearest_point(p, target, gauge, tol).distance for p in np.atleast_2d(P)))


def hausdorff(gauge, P, Q, tol: float = DEFAULT.tol_lp) -> float:
    """Hausdorff distance between co(P) and co(Q); exact since the outer sup sits at a vertex."""
    return float(max(directed_hausdorff(gauge, P, Q, tol), directed_hausdorff(gauge, Q, P, tol)))


def hausdorff_states(L: PolyhedralLip, left=0, right=1, tol: float = DEFAULT.tol_lp) -> float:
    """Hausdorff distance under ρ_L between two summands' state spaces.

    ``left``/``right`` are block indices of the host direct sum or explicit
    arrays of states in the host coordinates.
    """
    A = L.space
    P = A.block_states(left) if np.ndim(left) == 0 else np.atleast_2d(left)
    Q = A.block_states(right) if np.ndim(right) == 0 else np.atleast_2d(right)
    return hausdorff(L.gauge, P, Q, tol)


def extreme_hausdorff(L: PolyhedralLip, left=0, right=1, tol: float = DEFAULT.tol_lp) -> float:
    """Hausdorff distance between the generator sets themselves, not their hulls.

    Experimental diagnostic: it dominates ``hausdorff_states`` and is not
    claimed to equal any distance between extreme-state sets in general.
    """
    A = L.space
    P = A.block_states(left) if np.ndim(left) == 0 else np.atleast_2d(left)
    Q = A.block_states(right) if np.ndim(right) == 0 else np.atleast_2d(right)
    D = np.array([[dual_seminorm(L, p - q, tol) for q in Q] for p in P])
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


# ---------------------------------------------------------------------------
# nets and packings


def candidate_states(A: OrderUnitSpace, depth: int = 2, cap: int = 256) -> np.ndarray:
    """Generators plus iterated pairwise midpoints, ``depth`` rounds deep."""
    pts = [tuple(r) for r in A.states]
    seen = {np.round(np.array(p), 12).tobytes() for p in pts}
    for _ in range(depth):
        new = []
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                m = (np.array(pts[i]) + np.array(pts[j])) / 2.0
                key = np.round(m, 12).tobytes()
                if key not in seen:
                    seen.add(key)
                    new.append(tuple(m))
                    if len(pts) + len(new) >= cap:
                        break
            if len(pts) + len(new) >= cap:
                break
        pts.extend(new)
        if not new:
            break
    return np.array(pts[:cap])


def _cover_by_greedy(D: np.ndarray, eps: float) -> list[int]:
    k = D.shape[0]
    covers = D < eps - 1e-12
    ecc = D.max(axis=1)
    uncovered = np.ones(k, bool)
    chosen = []
    while uncovered.any():
        gain = (covers & uncovered[None, :]).sum(axis=1)
        best = gain.max()
        ties = np.flatnonzero(gain == best)
        pick = int(ties[np.lexsort((ties, ecc[ties]))[0]])
        chosen.append(pick)
        uncovered &= ~covers[pick]
    return chosen


def _pack_greedy(D: np.ndarray, eps: float) -> list[int]:
    chosen = []
    for i in range(D.shape[0]):
        if all(D[i, j] >= 2 * eps - 1e-12 for j in chosen):
            chosen.append(i)
    return chosen


@dataclass
class ScvBounds:
    upper: int
    lower: int
    net: np.ndarray = field(repr=False)
    packing: np.ndarray = field(repr=False)
    candidates: int = 0


def scv(ctx: StateMetricContext, eps: float, depth: int = 2, cap: int = 256) -> ScvBounds:
    """Bracket the smallest size of an ε-dense subset of the state space.

    ``upper`` is a greedy ε-net covering the candidate set; ``lower`` is a
    greedily grown 2ε-separated packing, a rigorous lower bound because
    each open ε-ball holds at most one packing point.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if depth == 0:
        C = ctx.space.states
        D = ctx.generator_distances
    else:
        C = candidate_states(ctx.space, depth, cap)
        D = distance_matrix(ctx.lip, C)
    net = _cover_by_greedy(D, eps)
    pack = _pack_greedy(D, eps)
    return ScvBounds(len(net), len(pack), C[net], C[pack], C.shape[0])


@dataclass
class FiniteApproximation:
    space: OrderUnitSpace
    projection: Projection
    bound: float
    net: np.ndarray = field(repr=False)


def finite_approximation(ctx: StateMetricContext, eps: float, depth: int = 0) -> FiniteApproximation:
    """Quotient onto the hull of a greedy ε-net, with its exact Hausdorff bound.

    With generator-only candidates (the default) the bound is below ε.
    """
    res = scv(ctx, eps, depth)
    F = res.net
    B, proj = restrict_to_states(ctx.space, F)
    bound = directed_hausdorff(ctx.lip.gauge, ctx.space.states, F)
    return FiniteApproximation(B, proj, bound, F)


# ---------------------------------------------------------------------------
# base-norm stability harness


class _SymmetricHullGauge:
    """Minkowski functional of co(S ∪ -S), evaluated through its facets."""

    def __init__(self, vertices: np.ndarray):
        pts = np.vstack([vertices, -vertices])
        hull = ConvexHull(pts)
        normals = hull.equations[:, :-1]
        offsets = -hull.equations[:, -1]
        self.facets = normals / offsets[:, None]

    def __call__(self, X: np.ndarray) -> np.ndarray:
        return np.max(np.atleast_2d(X) @ self.facets.T, axis=1)


@dataclass
class StabilityReport:
    delta: float
    eps: float
    hausdorff: float
    holds: bool
    samples: int
    applicable: bool = True


def base_norm_stability_check(base1, base2, ref_scale: float | None = None, samples: int = DEFAULT.stability_samples,
                              seed: int = 0, margin: float = 1e-6, eta=None) -> StabilityReport:
    """Measure how close two base norms are and test the resulting Hausdorff bound.

    The reference norm is ‖x‖_* = ‖x‖₂ / R with R the largest vertex length
    of either base (so it is dominated by both base norms), unless
    ``ref_scale`` overrides R.  δ is the sampled sup of
    |‖x‖₁ - ‖x‖₂| / ‖x‖_*; the check is dist_H^*(S₁, S₂) < 4δ(1 + margin).
    """
    V1 = np.atleast_2d(np.asarray(base1, float))
    V2 = np.atleast_2d(np.asarray(base2, float))
    if eta is None:
        eta = np.linalg.lstsq(V1, np.ones(V1.shape[0]), rcond=None)[0]
    eta = np.asarray(eta, float)
    for name, V in (("first", V1), ("second", V2)):
        bad = np.abs(V @ eta - 1.0)
        if bad.max() > 1e-9:
            raise HypothesisViolated(f"{name} base has a vertex where the centering functional is {V[np.argmax(bad)] @ eta!r}")
    R = ref_scale if ref_scale is not None else max(np.linalg.norm(V1, axis=1).max(), np.linalg.norm(V2, axis=1).max())
    g1, g2 = _SymmetricHullGauge(V1), _SymmetricHullGauge(V2)
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(samples, V1.shape[1]))
    X /= np.linalg.norm(X, axis=1)[:, None]
    star = 1.0 / R
    n1, n2 = g1(X), g2(X)
    if np.any(n1 < star - 1e-12) or np.any(n2 < star - 1e-12):
        raise HypothesisViolated("reference norm is not dominated by the base norms")
    ratio = np.abs(n1 - n2) / star
    delta = float(ratio.max())
    # local refinement around the worst samples
    order = np.argsort(ratio)[::-1][:10]
    for i in order:
        x = X[i].copy()
        step = 0.1
        best = ratio[i]
        for _ in range(200):
            trial = x + step * rng.normal(size=x.size)
            trial /= np.linalg.norm(trial)
            val = abs(g1(trial)[0] - g2(trial)[0]) / star
            if val > best:
                best, x = val, trial
            else:
                step *= 0.97
        delta = max(delta, float(best))
    eps = 4.0 * delta * (1.0 + margin)
    dH = hausdorff(EuclideanGauge(scale=1.0 / R), V1, V2)
    holds = dH < eps or (delta == 0.0 and dH <= 1e-12)
    # the bound is only claimed for ε < 2
    return StabilityReport(delta, eps, dH, bool(holds), samples, applicable=eps < 2.0)
