"""Lip-norms on order-unit spaces and their duals.

A polyhedral Lip-norm is L(a) = max_j |ν_j(a)| with every ν_j(e) = 0.  Its
dual on centered functionals is the atomic gauge

    L'(λ) = min Σ|c_j|  subject to  λ = Σ c_j ν_j,

which is solved as an LP.  Metrics on state spaces, radii and quotient
duals all reduce to evaluations of L'.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .config import DEFAULT
from .convexsolve import AtomicGauge, gauge_value
from .errors import DimensionMismatch, Infeasible, InputError, NotCentered
from .ouspace import OrderUnitSpace, Projection


@dataclass(frozen=True)
class PolyhedralLip:
    space: OrderUnitSpace
    functionals: np.ndarray

    def __post_init__(self):
        F = np.asarray(self.functionals, dtype=float)
        n = self.space.dimension
        F = F.reshape(-1, n) if F.size else np.zeros((0, n))
        if np.any(np.abs(F @ self.space.unit) > DEFAULT.center_check * np.maximum(1.0, np.abs(F).max(axis=1))):
            raise NotCentered("a Lip-norm functional does not vanish on the unit")
        object.__setattr__(self, "functionals", F)

    def __call__(self, a) -> float:
        return eval_lip(self, a)

    @property
    def gauge(self) -> AtomicGauge:
        return AtomicGauge(self.functionals)


@dataclass(frozen=True)
class OracleLip:
    """Lip-norm known through an evaluator, plus sampled functionals with
    |ν(a)| <= L(a) that give a polyhedral minorant (hence upper bounds on L')."""

    space: OrderUnitSpace
    evaluator: Callable
    sampled_functionals: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))

    def __call__(self, a) -> float:
        return eval_lip(self, a)

    def minorant(self) -> PolyhedralLip:
        return PolyhedralLip(self.space, self.sampled_functionals)


LipNorm = PolyhedralLip | OracleLip


def lipnorm_from_metric(space: OrderUnitSpace, dist) -> PolyhedralLip:
    """Classical Lipschitz seminorm on C(X): functionals (δ_x - δ_y)/ρ(x, y)."""
    D = np.asarray(dist, dtype=float)
    k = D.shape[0]
    if space.dimension != k:
        raise DimensionMismatch("metric size differs from the function space")
    rows = []
    for i in range(k):
        for j in range(i + 1, k):
            v = np.zeros(k)
            v[i], v[j] = 1.0, -1.0
            rows.append(v / D[i, j])
    return PolyhedralLip(space, np.array(rows).reshape(-1, k))


def eval_lip(L, a) -> float:
    a = L.space.check(a)
    if isinstance(L, OracleLip):
        return float(L.evaluator(a))
    if L.functionals.shape[0] == 0:
        return 0.0
    return float(np.max(np.abs(L.functionals @ a)))


def dual_seminorm(L: PolyhedralLip, lam, tol: float = DEFAULT.tol_lp) -> float:
    """L'(λ) for a centered functional λ."""
    if isinstance(L, OracleLip):
        L = L.minorant()
    lam = L.space.check(lam)
    scale = max(1.0, float(np.abs(lam).max()))
    if abs(lam @ L.space.unit) > DEFAULT.center_check * scale:
        raise NotCentered(f"functional takes value {lam @ L.space.unit!r} on the unit")
    if not np.any(np.abs(lam) > 1e-15):
        return 0.0
    if L.functionals.shape[0] == 0:
        raise Infeasible("functional outside the span of the Lip-norm functionals")
    return gauge_value(L.gauge, lam, tol)


def rho(L, mu, nu, tol: float = DEFAULT.tol_lp) -> float:
    return dual_seminorm(L, np.asarray(mu, float) - np.asarray(nu, float), tol)


def distance_matrix(L, states=None) -> np.ndarray:
    S = L.space.states if states is None else np.atleast_2d(states)
    k = S.shape[0]
    D = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            D[i, j] = D[j, i] = rho(L, S[i], S[j])
    return D


def radius_diameter(L) -> tuple[float, float]:
    """Diameter of the state space, attained on a pair of generators."""
    S = L.space.states
    diam = 0.0
    for i in range(S.shape[0]):
        for j in range(i + 1, S.shape[0]):
            diam = max(diam, rho(L, S[i], S[j]))
    return diam / 2.0, diam


def quotient_dual(proj: Projection, L, lam, tol: float = DEFAULT.tol_lp) -> float:
    """Dual of the quotient Lip-norm at λ on B, computed as L'(π'(λ))."""
    return dual_seminorm(L, proj.pullback(lam), tol)


@dataclass(frozen=True)
class QuotientLip:
    """Quotient Lip-norm on B, represented only through its dual."""

    space: OrderUnitSpace
    parent: PolyhedralLip
    proj: Projection

    def dual(self, lam, tol: float = DEFAULT.tol_lp) -> float:
        if abs(np.asarray(lam, float) @ self.space.unit) > DEFAULT.center_check:
            raise NotCentered("functional is not centered on B")
        return quotient_dual(self.proj, self.parent, lam, tol)


@dataclass
class LipReport:
    valid: bool
    null_space_dim: int
    radius: float
    problems: list


def validate_lipnorm(L) -> LipReport:
    if isinstance(L, OracleLip):
        L = L.minorant()
    A = L.space
    problems = []
    F = L.functionals
    if F.shape[0] and np.max(np.abs(F @ A.unit)) > DEFAULT.center_check:
        problems.append("L(e) != 0")
    rank = int(np.linalg.matrix_rank(F)) if F.shape[0] else 0
    null_dim = A.dimension - rank
    if null_dim != 1:
        problems.append(f"null space has dimension {null_dim}, expected 1")
    radius = float("nan")
    if not problems:
        radius = radius_diameter(L)[0]
        if not np.isfinite(radius):
            problems.append("infinite radius")
    return LipReport(not problems, null_dim, radius, problems)


def from_json(doc: dict, space: OrderUnitSpace | None = None):
    """Parse ``{"type": "polyhedral", ...}`` or ``{"type": "metric", ...}``."""
    kind = doc.get("type")
    if kind == "polyhedral":
        if space is None:
            raise InputError("polyhedral Lip-norm needs a host space")
        return PolyhedralLip(space, np.asarray(doc["functionals"], float))
    if kind == "metric":
        from .classical import FiniteMetricSpace, embed_cqms
        X = FiniteMetricSpace.from_json(doc["space"])
        return embed_cqms(X)[1]
    raise InputError(f"unknown Lip-norm type {kind!r}")


def to_json(L: PolyhedralLip) -> dict:
    return {"type": "polyhedral", "functionals": L.functionals.tolist()}
