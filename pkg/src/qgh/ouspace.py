"""Finite-dimensional order-unit spaces described by a generating set of states."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT
from .convexsolve import AtomicGauge, LinearProgram, Polytope, gauge_value, solve_lp
from .errors import DimensionMismatch, EmptyPolytope, InputError, UnitViolation


@dataclass(frozen=True)
class OrderUnitSpace:
    """ℝⁿ with unit ``e``; the state space is the convex hull of the rows of ``states``.

    ``blocks`` records the summand sizes of a direct sum and ``owner`` the
    summand each state generator comes from (both trivial otherwise).
    """

    unit: np.ndarray
    states: np.ndarray
    labels: tuple = ()
    blocks: tuple = ()
    owner: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        e = np.asarray(self.unit, dtype=float).ravel()
        S = np.atleast_2d(np.asarray(self.states, dtype=float))
        if S.shape[0] == 0 or S.size == 0:
            raise EmptyPolytope("an order-unit space needs at least one state")
        if S.shape[1] != e.size:
            raise DimensionMismatch(f"states have length {S.shape[1]}, unit {e.size}")
        off = np.abs(S @ e - 1.0)
        if off.max() > DEFAULT.unit_check:
            i = int(np.argmax(off))
            raise UnitViolation(f"state {i} takes value {S[i] @ e!r} on the unit")
        if np.linalg.matrix_rank(S) < e.size:
            raise InputError("state generators do not separate points")
        object.__setattr__(self, "unit", e)
        object.__setattr__(self, "states", S)
        object.__setattr__(self, "labels", tuple(self.labels))
        blocks = tuple(self.blocks) or (e.size,)
        if sum(blocks) != e.size:
            raise DimensionMismatch("block sizes do not add up to the dimension")
        object.__setattr__(self, "blocks", blocks)
        owner = np.zeros(S.shape[0], int) if self.owner is None else np.asarray(self.owner, int)
        object.__setattr__(self, "owner", owner)

    @property
    def dimension(self) -> int:
        return self.unit.size

    @property
    def n_states(self) -> int:
        return self.states.shape[0]

    def state_polytope(self) -> Polytope:
        return Polytope(self.states)

    def block_slice(self, j: int) -> slice:
        start = sum(self.blocks[:j])
        return slice(start, start + self.blocks[j])

    def block_states(self, j: int) -> np.ndarray:
        return self.states[self.owner == j]

    def check(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=float).ravel()
        if a.size != self.dimension:
            raise DimensionMismatch(f"element has length {a.size}, space {self.dimension}")
        return a


def scalars() -> OrderUnitSpace:
    """The one-dimensional space ℝ with its single state."""
    return OrderUnitSpace([1.0], [[1.0]], labels=("pt",))


def function_space(n: int, labels=()) -> OrderUnitSpace:
    """C(X) for an n-point X, with the point evaluations as generators."""
    return OrderUnitSpace(np.ones(n), np.eye(n), labels=labels or tuple(range(n)))


def order_unit_norm(A: OrderUnitSpace, a) -> tuple[float, bool]:
    values = A.states @ A.check(a)
    return float(np.max(np.abs(values))), bool(np.all(values >= -DEFAULT.tol_lp))


def norm(A: OrderUnitSpace, a) -> float:
    return order_unit_norm(A, a)[0]


def reduced_norm(A: OrderUnitSpace, a) -> float:
    """min over t of ‖a - t e‖, i.e. half the spread of the state values."""
    values = A.states @ A.check(a)
    return float(values.max() - values.min()) / 2.0


def unit_interval_norm(A: OrderUnitSpace, a, tol: float = DEFAULT.tol_lp) -> float:
    """inf{r : -r e <= a <= r e} computed as an LP over the order."""
    a = A.check(a)
    # variable r >= 0; constraints μ(a) - r <= 0 and -μ(a) - r <= 0 for every generator
    v = A.states @ a
    k = v.size
    A_ub = -np.ones((2 * k, 1))
    b_ub = np.concatenate([-v, v])
    return solve_lp(LinearProgram([1.0], A_ub=A_ub, b_ub=b_ub), tol).value


def base_norm(A: OrderUnitSpace, lam, tol: float = DEFAULT.tol_lp) -> float:
    """Dual norm ‖λ‖' = min Σ|c_i| over λ = Σ c_i μ_i."""
    return gauge_value(AtomicGauge(A.states), A.check(lam), tol)


def direct_sum(*spaces: OrderUnitSpace) -> OrderUnitSpace:
    """A ⊕ B ⊕ ... with each summand's generators acting on its own block.

    Each argument becomes one block of the result, even if it is itself a sum.
    """
    n = sum(S.dimension for S in spaces)
    rows, owners, labels = [], [], []
    offset = 0
    for j, S in enumerate(spaces):
        pad = np.zeros((S.n_states, n))
        pad[:, offset:offset + S.dimension] = S.states
        rows.append(pad)
        owners.append(np.full(S.n_states, j))
        labels.extend(f"{j}:{lab}" for lab in (S.labels or range(S.n_states)))
        offset += S.dimension
    unit = np.concatenate([S.unit for S in spaces])
    return OrderUnitSpace(unit, np.vstack(rows), labels=tuple(labels),
                          blocks=tuple(S.dimension for S in spaces), owner=np.concatenate(owners))


def embed_block(host: OrderUnitSpace, j: int, v) -> np.ndarray:
    """Place a vector (or rows of vectors) of summand j into the host coordinates."""
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape[:-1] + (host.dimension,))
    out[..., host.block_slice(j)] = v
    return out


@dataclass(frozen=True)
class Projection:
    """Restriction map π: A → B realized as a ↦ U a, with π'(β) = β U."""

    U: np.ndarray
    identity: bool

    def forward(self, a):
        return self.U @ np.asarray(a, dtype=float)

    def pullback(self, beta):
        return np.asarray(beta, dtype=float) @ self.U


def restrict_to_states(A: OrderUnitSpace, K) -> tuple[OrderUnitSpace, Projection]:
    """Quotient of A given by restricting elements to the convex set co(K)."""
    P = K if isinstance(K, Polytope) else Polytope(K)
    V = P.generators
    if V.shape[1] != A.dimension:
        raise DimensionMismatch("states of K live in a different dual space")
    off = np.abs(V @ A.unit - 1.0)
    if off.max() > DEFAULT.unit_check:
        raise UnitViolation(f"vertex {int(np.argmax(off))} is not 1 on the unit")
    r = np.linalg.matrix_rank(V)
    if r == A.dimension:
        U = np.eye(A.dimension)
        identity = True
    else:
        # orthonormal basis of the row space of V: B is V's joint-kernel quotient
        _, s, Vt = np.linalg.svd(V)
        U = Vt[:r]
        identity = False
    unit = U @ A.unit
    states = V @ U.T
    labels = tuple(f"k{i}" for i in range(V.shape[0]))
    return OrderUnitSpace(unit, states, labels=labels), Projection(U, identity)


def to_json(A: OrderUnitSpace) -> dict:
    return {
        "dimension": A.dimension,
        "unit": A.unit.tolist(),
        "states": A.states.tolist(),
        "labels": [str(x) for x in A.labels],
    }


def from_json(doc: dict) -> OrderUnitSpace:
    try:
        unit = doc["unit"]
        states = doc["states"]
    except KeyError as exc:
        raise InputError(f"space file lacks field {exc}") from exc
    if "dimension" in doc and int(doc["dimension"]) != len(unit):
        raise DimensionMismatch("declared dimension disagrees with the unit")
    return OrderUnitSpace(unit, states, labels=tuple(doc.get("labels", ())))
