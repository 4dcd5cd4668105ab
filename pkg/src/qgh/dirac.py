"""Pair-swap Dirac operators whose commutator norms reproduce metric Lipschitz constants."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classical import FiniteMetricSpace
from .errors import DimensionMismatch, InputError, NonpositiveWeight, TooSmall


@dataclass(frozen=True)
class DiracTriple:
    """D on ℓ²(Y, m_i m_j) with Y the off-diagonal pairs and (Dξ)(i, j) = ξ(j, i)/ρ(i, j)."""

    points: FiniteMetricSpace
    weights: np.ndarray
    pairs: list = field(repr=False)

    @property
    def dimension(self) -> int:
        return len(self.pairs)

    @property
    def pair_weights(self) -> np.ndarray:
        m = self.weights
        return np.array([m[i] * m[j] for i, j in self.pairs])

    def operator(self) -> np.ndarray:
        """Matrix of D in the pair basis (weights do not enter D itself)."""
        idx = {p: k for k, p in enumerate(self.pairs)}
        Dm = np.zeros((self.dimension, self.dimension))
        rho = self.points.dist
        for k, (i, j) in enumerate(self.pairs):
            Dm[k, idx[(j, i)]] = 1.0 / rho[i, j]
        return Dm

    def multiplication(self, f) -> np.ndarray:
        f = _function(self, f)
        return np.diag([f[i] for i, _ in self.pairs])

    def commutator(self, f) -> np.ndarray:
        Dm = self.operator()
        M = self.multiplication(f)
        return Dm @ M - M @ Dm


def build_dirac(X: FiniteMetricSpace, m=None) -> DiracTriple:
    n = len(X)
    if n < 2:
        raise TooSmall("a Dirac operator needs at least two points")
    m = np.ones(n) if m is None else np.asarray(m, float).ravel()
    if m.size != n:
        raise DimensionMismatch(f"{m.size} weights for {n} points")
    if np.any(~np.isfinite(m)) or np.any(m <= 0):
        raise NonpositiveWeight("weights must be strictly positive")
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    return DiracTriple(X, m, pairs)


def _function(T: DiracTriple, f) -> np.ndarray:
    f = np.asarray(f)
    if f.ndim != 1 or f.size != len(T.points):
        raise DimensionMismatch(f"function has shape {f.shape}, space has {len(T.points)} points")
    if np.iscomplexobj(f):
        if np.abs(f.imag).max() > 0:
            raise InputError("function must be real-valued")
        f = f.real
    return f.astype(float)


def commutator_lipnorm(T: DiracTriple, f) -> float:
    """‖[D, f]‖ from the 2×2 blocks: max over pairs of |f(i) − f(j)|/ρ(i, j).

    Each block {(i, j), (j, i)} carries the same weight m_i m_j on both
    coordinates, so the weighting is a scalar on the block and cancels.
    """
    f = _function(T, f)
    rho = T.points.dist
    return float(max(abs(f[i] - f[j]) / rho[i, j] for i, j in T.pairs))


def weighted_norm(T: DiracTriple, A: np.ndarray) -> float:
    """Operator norm of A on ℓ²(Y) with inner product weights m_i m_j."""
    w = np.sqrt(T.pair_weights)
    return float(np.linalg.norm(w[:, None] * A / w[None, :], 2))


def dense_commutator_norm(T: DiracTriple, f) -> float:
    return weighted_norm(T, T.commutator(f))


def self_adjoint_residual(T: DiracTriple) -> float:
    """‖D − D‡‖ where ‡ is the adjoint for the weighted inner product."""
    w = T.pair_weights
    Dm = T.operator()
    adj = (Dm.T * w[None, :]) / w[:, None]
    return float(np.abs(Dm - adj).max())


def spectrum(T: DiracTriple) -> np.ndarray:
    w = np.sqrt(T.pair_weights)
    S = w[:, None] * T.operator() / w[None, :]
    return np.sort(np.linalg.eigvalsh((S + S.T) / 2))


@dataclass
class DiracReport:
    points: int
    samples: int
    max_gap_metric: float  # |block − metric Lipschitz constant|
    max_gap_dense: float  # |block − dense weighted norm|
    self_adjoint: float

    @property
    def ok(self) -> bool:
        return self.max_gap_metric <= 1e-10 and self.max_gap_dense <= 1e-10 and self.self_adjoint <= 1e-12


def dirac_check(X: FiniteMetricSpace, m=None, samples: int = 20, seed: int = 0, dense_cap: int = 12) -> DiracReport:
    """Compare commutator norms with metric Lipschitz constants on random functions."""
    from .lipnorm import eval_lip, lipnorm_from_metric
    from .ouspace import function_space

    T = build_dirac(X, m)
    L = lipnorm_from_metric(function_space(len(X)), X.dist)
    rng = np.random.default_rng(seed)
    g_metric = g_dense = 0.0
    for _ in range(samples):
        f = rng.normal(size=len(X))
        c = commutator_lipnorm(T, f)
        g_metric = max(g_metric, abs(c - eval_lip(L, f)) / max(1.0, c))
        if len(X) <= dense_cap:
            g_dense = max(g_dense, abs(c - dense_commutator_norm(T, f)) / max(1.0, c))
    return DiracReport(len(X), samples, g_metric, g_dense, self_adjoint_residual(T))


def from_json(doc: dict) -> tuple[FiniteMetricSpace, np.ndarray | None]:
    X = FiniteMetricSpace.from_json(doc)
    w = doc.get("weights")
    return X, (None if w is None else np.asarray(w, float))
