"""Bridges between order-unit spaces and the brackets they give on dist_q.

A bridge is a polyhedral seminorm N on A ⊕ B with N(e_A, e_B) = 0 and
N(e_A, 0) ≠ 0.  Joined with the two Lip-norms it gives the admissible
Lip-norm L = L_A ∨ L_B ∨ N, and the Hausdorff distance between the two
state spaces under ρ_L is an upper bound for the quantum distance.  Half
the difference of the diameters is a lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .config import DEFAULT
from .convexsolve import LinearProgram, solve_lp
from .errors import BoundViolated, DimensionMismatch, HypothesisViolated, InvalidParams
from .lipnorm import PolyhedralLip, dual_seminorm, radius_diameter
from .ouspace import OrderUnitSpace, base_norm, direct_sum, embed_block, scalars
from .statemetric import hausdorff_states

RECIPES = ("two_points", "to_scalars", "doubling", "along_map", "state_family", "custom")


@dataclass(frozen=True)
class Bridge:
    """N(a, b) = max_j |f_j · (a, b)| on A ⊕ B."""

    A: OrderUnitSpace
    B: OrderUnitSpace
    functionals: np.ndarray
    recipe: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        F = np.atleast_2d(np.asarray(self.functionals, float))
        if F.shape[1] != self.A.dimension + self.B.dimension:
            raise DimensionMismatch("bridge functionals do not match A ⊕ B")
        object.__setattr__(self, "functionals", F)

    @property
    def host(self) -> OrderUnitSpace:
        return direct_sum(self.A, self.B)

    def __call__(self, a, b) -> float:
        return float(np.max(np.abs(self.functionals @ np.concatenate([a, b]))))

    @property
    def gap(self) -> float:
        """γ = 1 / N(e_A, 0)."""
        v = self(self.A.unit, np.zeros(self.B.dimension))
        return 1.0 / v if v > 0 else float("inf")

    @property
    def canonical(self) -> bool:
        return self.recipe != "custom"


def _pair_rows(left: np.ndarray, right: np.ndarray, scale: float) -> np.ndarray:
    return np.hstack([np.atleast_2d(left), -np.atleast_2d(right)]) / scale


def make_bridge(recipe: str, A: OrderUnitSpace, B: OrderUnitSpace | None = None, **params) -> Bridge:
    """Build one of the standard bridges.

    two_points(mu0, nu0, gamma)     N = γ⁻¹ |μ₀(a) - ν₀(b)|
    to_scalars(r)                   B = ℝ, N = r⁻¹ max_μ |μ(a) - b|
    doubling(epsilon)               B = A, N = ε⁻¹ ‖a - b‖
    along_map(phi, gamma)           φ: A → B unital, N = γ⁻¹ ‖φ(a) - b‖_B
    along_map(inclusion, gamma)     ι: B → A unital, N = γ⁻¹ ‖a - ι(b)‖_A
    state_family(pairs, epsilon)    N = ε⁻¹ max_Ω |Ω_A(a) - Ω_B(b)|
    """
    if recipe == "two_points":
        gamma = _positive(params, "gamma")
        mu0 = np.asarray(params["mu0"], float)
        nu0 = np.asarray(params["nu0"], float)
        _check_state(A, mu0)
        _check_state(B, nu0)
        F = _pair_rows(mu0, nu0, gamma)
    elif recipe == "to_scalars":
        r = _positive(params, "r")
        B = scalars()
        F = _pair_rows(A.states, np.ones((A.n_states, 1)), r)
    elif recipe == "doubling":
        eps = _positive(params, "epsilon")
        B = A if B is None else B
        if B.dimension != A.dimension:
            raise InvalidParams("doubling needs two copies of the same space")
        F = _pair_rows(A.states, A.states, eps)
    elif recipe == "along_map":
        gamma = _positive(params, "gamma")
        if "phi" in params:
            phi = np.asarray(params["phi"], float)
            if phi.shape != (B.dimension, A.dimension):
                raise InvalidParams("phi must map A into B")
            if not np.allclose(phi @ A.unit, B.unit, atol=1e-12):
                raise InvalidParams("phi is not unital")
            F = _pair_rows(B.states @ phi, B.states, gamma)
        elif "inclusion" in params:
            iota = np.asarray(params["inclusion"], float)
            if iota.shape != (A.dimension, B.dimension):
                raise InvalidParams("inclusion must map B into A")
            if not np.allclose(iota @ B.unit, A.unit, atol=1e-12):
                raise InvalidParams("inclusion is not unital")
            F = _pair_rows(A.states, A.states @ iota, gamma)
        else:
            raise InvalidParams("along_map needs 'phi' or 'inclusion'")
    elif recipe == "state_family":
        eps = _positive(params, "epsilon")
        pairs = params.get("pairs")
        if pairs is None or len(pairs[0]) == 0:
            raise InvalidParams("empty state family")
        left, right = (np.atleast_2d(np.asarray(p, float)) for p in pairs)
        for s in left:
            _check_state(A, s)
        for s in right:
            _check_state(B, s)
        F = _pair_rows(left, right, eps)
    else:
        raise InvalidParams(f"unknown recipe {recipe!r}")
    clean = {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in params.items()}
    return Bridge(A, B, F, recipe, clean)


def _positive(params, key) -> float:
    if key not in params:
        raise InvalidParams(f"missing parameter {key!r}")
    v = float(params[key])
    if not v > 0:
        raise InvalidParams(f"{key} must be positive, got {v}")
    return v


def _check_state(A, mu):
    if mu.size != A.dimension or abs(mu @ A.unit - 1.0) > DEFAULT.center_check:
        raise InvalidParams("parameter is not a state of its space")


# ---------------------------------------------------------------------------


def combine(L_A: PolyhedralLip, L_B: PolyhedralLip, N: Bridge) -> tuple[PolyhedralLip, float]:
    """L = L_A ∨ L_B ∨ N on A ⊕ B, together with the gap of N."""
    host = N.host
    rows = [embed_block(host, 0, L_A.functionals), embed_block(host, 1, L_B.functionals), N.functionals]
    return PolyhedralLip(host, np.vstack(rows)), N.gap


@dataclass
class BridgeReport:
    unit_vanishes: bool
    separates_units: bool
    gap: float
    samples: int
    residual_ab: float
    residual_ba: float
    certified_by_construction: bool

    @property
    def ok(self) -> bool:
        return (self.unit_vanishes and self.separates_units
                and self.residual_ab <= DEFAULT.residual and self.residual_ba <= DEFAULT.residual)


def _best_partner(N: Bridge, L_B: PolyhedralLip, a: np.ndarray, forward: bool, tol: float) -> float:
    """min over b of L_B(b) ∨ N(a, b)."""
    nA = N.A.dimension
    F = N.functionals
    Fa, Fb = (F[:, :nA], F[:, nA:]) if forward else (F[:, nA:], F[:, :nA])
    G = L_B.functionals
    n = Fb.shape[1]
    na = Fa @ a
    rows = [np.hstack([Fb, -np.ones((len(F), 1))]), np.hstack([-Fb, -np.ones((len(F), 1))])]
    rhs = [-na, na]
    if G.shape[0]:
        rows += [np.hstack([G, -np.ones((len(G), 1))]), np.hstack([-G, -np.ones((len(G), 1))])]
        rhs += [np.zeros(len(G)), np.zeros(len(G))]
    c = np.zeros(n + 1)
    c[-1] = 1.0
    lp = LinearProgram(c, A_ub=np.vstack(rows), b_ub=np.concatenate(rhs), lb=np.full(n + 1, -np.inf))
    return solve_lp(lp, tol).value


def validate_bridge(N: Bridge, L_A: PolyhedralLip, L_B: PolyhedralLip, samples: int = DEFAULT.sphere_samples,
                    seed: int = 0, tol: float = DEFAULT.tol_lp) -> BridgeReport:
    """Check the bridge axioms; the third one on seeded random directions."""
    at_units = N(N.A.unit, N.B.unit)
    at_first = N(N.A.unit, np.zeros(N.B.dimension))
    rng = np.random.default_rng(seed)
    worst = []
    for forward, (L_from, L_to) in ((True, (L_A, L_B)), (False, (L_B, L_A))):
        # the unit itself: its partner must reach N = 0 with L = 0
        worst_r = _best_partner(N, L_to, L_from.space.unit, forward, tol)
        drawn = 0
        if L_from.space.dimension == 1:
            drawn = samples
        while drawn < samples:
            a = rng.normal(size=L_from.space.dimension)
            la = L_from(a)
            if la < 1e-9:
                continue
            drawn += 1
            a /= la
            worst_r = max(worst_r, _best_partner(N, L_to, a, forward, tol) - 1.0)
        worst.append(float(worst_r) if samples else 0.0)
    return BridgeReport(at_units <= DEFAULT.residual, at_first > DEFAULT.residual, N.gap, samples,
                        worst[0], worst[1], N.canonical)


def distq_upper(L_A: PolyhedralLip, L_B: PolyhedralLip, N: Bridge, tol: float = DEFAULT.tol_lp) -> float:
    L, _ = combine(L_A, L_B, N)
    return hausdorff_states(L, 0, 1, tol)


def distq_lower(L_A: PolyhedralLip, L_B: PolyhedralLip) -> float:
    return abs(radius_diameter(L_A)[1] - radius_diameter(L_B)[1]) / 2.0


@dataclass
class DistqCertificate:
    upper: float
    lower: float
    bridge: Bridge | None
    diagnostics: dict = field(default_factory=dict)

    @property
    def bracket(self) -> tuple[float, float]:
        return self.lower, self.upper


def certify(L_A: PolyhedralLip, L_B: PolyhedralLip, N: Bridge, validate_samples: int = 0,
            seed: int = 0) -> DistqCertificate:
    """Bracket [lower, upper] for dist_q from one bridge."""
    diag = {"recipe": N.recipe, "gap": N.gap}
    if validate_samples:
        rep = validate_bridge(N, L_A, L_B, validate_samples, seed)
        diag.update(residual_ab=rep.residual_ab, residual_ba=rep.residual_ba, bridge_ok=rep.ok)
    cert = DistqCertificate(distq_upper(L_A, L_B, N), distq_lower(L_A, L_B), N, diag)
    if cert.lower > cert.upper + 1e-8:
        raise BoundViolated(f"lower {cert.lower} exceeds upper {cert.upper}")
    return cert


# ---------------------------------------------------------------------------
# chains


@dataclass
class ChainResult:
    host: OrderUnitSpace
    J: PolyhedralLip
    end_to_end: float
    link_distances: list
    dual: Callable = field(repr=False)

    @property
    def link_sum(self) -> float:
        return float(sum(self.link_distances))


def chain(lips: list[PolyhedralLip], links: list, tol: float = DEFAULT.tol_lp) -> ChainResult:
    """Glue A₁ - A₂ - ... - A_k along admissible Lip-norms on consecutive pairs.

    ``links[j]`` is a Bridge between A_j and A_{j+1} or an admissible
    PolyhedralLip on A_j ⊕ A_{j+1}.  J = sup_j M_j lives on ⊕A_j; the
    Hausdorff distance from S(A₁) to S(A_k) under J is returned, checked
    against the sum of the link distances.
    """
    if len(links) != len(lips) - 1:
        raise InvalidParams("need exactly one link per consecutive pair")
    host = direct_sum(*(L.space for L in lips))
    rows = []
    link_d = []
    for j, link in enumerate(links):
        M = combine(lips[j], lips[j + 1], link)[0] if isinstance(link, Bridge) else link
        if M.space.dimension != lips[j].space.dimension + lips[j + 1].space.dimension:
            raise DimensionMismatch(f"link {j} lives on the wrong space")
        link_d.append(hausdorff_states(M, 0, 1, tol))
        nj = lips[j].space.dimension
        rows.append(embed_block(host, j, M.functionals[:, :nj]) + embed_block(host, j + 1, M.functionals[:, nj:]))
    J = PolyhedralLip(host, np.vstack(rows))
    k = len(lips)
    end = hausdorff_states(J, 0, k - 1, tol) if k > 1 else 0.0
    if end > sum(link_d) + 1e-7:
        raise BoundViolated(f"end-to-end distance {end} exceeds link sum {sum(link_d)}")

    first, last = host.block_slice(0), host.block_slice(k - 1)

    def dual(lam):
        lam = np.asarray(lam, float)
        full = np.zeros(host.dimension)
        n1 = first.stop - first.start
        full[first] = lam[:n1]
        full[last] = lam[n1:]
        return dual_seminorm(J, full, tol)

    return ChainResult(host, J, end, link_d, dual)


# ---------------------------------------------------------------------------
# perturbation of the Lip-norm


def _centered_samples(A: OrderUnitSpace, samples: int, rng) -> np.ndarray:
    S = A.states
    diffs = [S[i] - S[j] for i in range(len(S)) for j in range(i + 1, len(S))]
    rand = rng.normal(size=(samples, A.dimension))
    # move into the annihilator of e along the first state
    rand -= np.outer(rand @ A.unit, S[0])
    return np.vstack(diffs + [rand]) if diffs else rand


def measure_dual_gap(L1: PolyhedralLip, L2: PolyhedralLip, samples: int = DEFAULT.sphere_samples,
                     seed: int = 0) -> tuple[float, np.ndarray]:
    """Sampled sup of |L₁'(λ) - L₂'(λ)| / ‖λ‖' and a worst λ."""
    A = L1.space
    rng = np.random.default_rng(seed)
    best, arg = 0.0, np.zeros(A.dimension)
    for lam in _centered_samples(A, samples, rng):
        nb = base_norm(A, lam)
        if nb < 1e-12:
            continue
        r = abs(dual_seminorm(L1, lam) - dual_seminorm(L2, lam)) / nb
        if r > best:
            best, arg = r, lam
    return float(best), arg


def perturbation_bridge(L1: PolyhedralLip, L2: PolyhedralLip, delta: float | None = None,
                        samples: int = DEFAULT.sphere_samples, seed: int = 0,
                        validate_samples: int = 32) -> DistqCertificate:
    """Bracket dist_q((A, L₁), (A, L₂)) through N(a, b) = δ⁻¹‖a - b‖."""
    measured, worst = measure_dual_gap(L1, L2, samples, seed)
    if delta is None:
        delta = measured
    elif measured > delta * (1 + 1e-9) + DEFAULT.residual:
        raise HypothesisViolated(f"dual seminorms differ by {measured} > δ = {delta} at λ = {worst.tolist()}")
    if delta <= 0:
        raise HypothesisViolated("δ must be positive; the Lip-norms agree, pass a small δ explicitly")
    N = make_bridge("doubling", L1.space, epsilon=delta)
    diag = {"measured_delta": measured, "delta": delta, "samples": samples}
    if validate_samples:
        rep = validate_bridge(N, L1, L2, validate_samples, seed)
        diag.update(residual_ab=rep.residual_ab, residual_ba=rep.residual_ba)
        if not rep.ok:
            raise HypothesisViolated(
                f"bridge fails the third axiom (residuals {rep.residual_ab:.3g}, {rep.residual_ba:.3g})")
    upper = distq_upper(L1, L2, N)
    if upper > delta + 1e-7:
        raise BoundViolated(f"upper bound {upper} exceeds δ = {delta}")
    return DistqCertificate(upper, distq_lower(L1, L2), N, diag)


# ---------------------------------------------------------------------------


def quotient_doubling_upper(L: PolyhedralLip, K1, K2, epsilon: float = 1e-7, tol: float = DEFAULT.tol_lp) -> float:
    """Upper bound for the distance between the quotients of (A, L) by co(K₁) and co(K₂).

    Both quotients are restrictions of B = A|co(K₁ ∪ K₂), joined by the
    doubling bridge on B ⊕ B at ``epsilon``.  The computation stays in A ⊕ A:
    L ∨ L ∨ N_K with N_K(a, b) = ε⁻¹ max_κ |κ(a) - κ(b)| over the vertices κ
    of K₁ ∪ K₂ has exactly the quotient seminorm of B ⊕ B as its quotient,
    so its dual metric agrees on pulled-back states.  The value is at most
    dist_H(K₁, K₂) + ε.
    """
    A = L.space
    K1 = np.atleast_2d(np.asarray(K1, float))
    K2 = np.atleast_2d(np.asarray(K2, float))
    for k in np.vstack([K1, K2]):
        _check_state(A, k)
    K = np.vstack([K1, K2])
    host = direct_sum(A, A)
    rows = np.vstack([embed_block(host, 0, L.functionals), embed_block(host, 1, L.functionals),
                      _pair_rows(K, K, epsilon)])
    J = PolyhedralLip(host, rows)
    return hausdorff_states(J, embed_block(host, 0, K1), embed_block(host, 1, K2), tol)
