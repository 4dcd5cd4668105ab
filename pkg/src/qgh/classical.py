"""Finite metric spaces, classical Gromov-Hausdorff distance and the golden 3-point/2-point pair."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .bridges import DistqCertificate, distq_lower, make_bridge, quotient_doubling_upper
from .errors import InputError, NotAMetric, TooLarge
from .lipnorm import PolyhedralLip, lipnorm_from_metric
from .ouspace import OrderUnitSpace, direct_sum, function_space
from .statemetric import hausdorff_states

EXACT_CAP = 20


@dataclass(frozen=True)
class FiniteMetricSpace:
    labels: tuple
    dist: np.ndarray

    def __post_init__(self):
        D = np.asarray(self.dist, dtype=float)
        object.__setattr__(self, "dist", D)
        object.__setattr__(self, "labels", tuple(self.labels) or tuple(range(D.shape[0])))
        validate_metric(D)
        if len(self.labels) != D.shape[0]:
            raise InputError("label count differs from the distance matrix")

    def __len__(self):
        return self.dist.shape[0]

    @property
    def diameter(self) -> float:
        return float(self.dist.max()) if len(self) else 0.0

    @classmethod
    def from_json(cls, doc: dict) -> "FiniteMetricSpace":
        try:
            return cls(tuple(doc.get("labels", ())), np.asarray(doc["dist"], float))
        except KeyError as exc:
            raise InputError("metric-space file needs a 'dist' matrix") from exc

    def to_json(self) -> dict:
        return {"labels": [str(x) for x in self.labels], "dist": self.dist.tolist()}


def validate_metric(D: np.ndarray, tol: float = 1e-9) -> None:
    if D.ndim != 2 or D.shape[0] != D.shape[1] or D.shape[0] == 0:
        raise NotAMetric("shape", "distance matrix must be square and non-empty")
    if not np.all(np.isfinite(D)):
        raise NotAMetric("finiteness")
    if np.any(np.diag(D) != 0):
        raise NotAMetric("zero diagonal")
    if not np.array_equal(D, D.T):
        raise NotAMetric("symmetry")
    off = D[~np.eye(len(D), dtype=bool)]
    if np.any(off <= 0):
        raise NotAMetric("positivity", "distinct points at distance <= 0")
    # D[i,k] <= D[i,j] + D[j,k]
    viol = D[:, None, :] - D[:, :, None] - D[None, :, :]
    if viol.max() > tol:
        i, j, k = np.unravel_index(np.argmax(viol), viol.shape)
        raise NotAMetric("triangle inequality", f"points {i}, {j}, {k}")


def random_metric(n: int, rng, low: float = 0.5, high: float = 2.0) -> FiniteMetricSpace:
    """Shortest-path closure of random positive weights."""
    W = rng.uniform(low, high, size=(n, n))
    W = np.minimum(W, W.T)
    np.fill_diagonal(W, 0.0)
    for k in range(n):
        W = np.minimum(W, W[:, k:k + 1] + W[k:k + 1, :])
    return FiniteMetricSpace(tuple(range(n)), W)


# ---------------------------------------------------------------------------
# Gromov-Hausdorff via correspondences


@dataclass
class GHResult:
    value: float
    exact: bool
    correspondence: list = field(default_factory=list)


def _distortion(DX, DY, pairs) -> float:
    if not pairs:
        return 0.0
    xs = np.array([p[0] for p in pairs])
    ys = np.array([p[1] for p in pairs])
    return float(np.max(np.abs(DX[np.ix_(xs, xs)] - DY[np.ix_(ys, ys)])))


def gh_distance(X: FiniteMetricSpace, Y: FiniteMetricSpace, exact: bool = True, seed: int = 0) -> GHResult:
    """Half the least distortion of a correspondence between X and Y.

    Exact search is a branch and bound over the minimal correspondences:
    every correspondence contains the union of a graph x ↦ f(x) and a
    co-graph y ↦ g(y), and shrinking a relation never raises its
    distortion, so those unions suffice.
    """
    DX, DY = X.dist, Y.dist
    nx, ny = len(X), len(Y)
    if not exact or nx * ny > EXACT_CAP:
        if exact:
            raise TooLarge(f"|X|·|Y| = {nx * ny} exceeds the exhaustive cap {EXACT_CAP}")
        return _gh_local_search(DX, DY, seed)
    # items to place: each x picks a y, then each y picks an x
    order = [("x", i) for i in range(nx)] + [("y", j) for j in range(ny)]
    best = [np.inf, []]
    # greedy seed for the bound
    start = [(i, int(np.argmin(np.abs(DY.max(axis=1) - DX[i].max())))) for i in range(nx)]
    start += [(int(np.argmin(np.abs(DX.max(axis=1) - DY[j].max()))), j) for j in range(ny)]
    best[0] = _distortion(DX, DY, list(set(start)))
    best[1] = sorted(set(start))

    def extend(pairs, current, k):
        if current >= best[0] - 1e-15:
            return
        if k == len(order):
            best[0], best[1] = current, sorted(pairs)
            return
        side, idx = order[k]
        choices = range(ny) if side == "x" else range(nx)
        for c in choices:
            pair = (idx, c) if side == "x" else (c, idx)
            if pair in pairs:
                extend(pairs, current, k + 1)
                continue
            worst = current
            for (a, b) in pairs:
                worst = max(worst, abs(DX[pair[0], a] - DY[pair[1], b]))
                if worst >= best[0]:
                    break
            if worst < best[0]:
                pairs.add(pair)
                extend(pairs, worst, k + 1)
                pairs.discard(pair)

    extend(set(), 0.0, 0)
    return GHResult(float(best[0]) / 2.0, True, best[1])


def _gh_local_search(DX, DY, seed, restarts: int = 50) -> GHResult:
    rng = np.random.default_rng(seed)
    nx, ny = len(DX), len(DY)
    best = (np.inf, [])
    for _ in range(restarts):
        f = rng.integers(ny, size=nx)
        g = rng.integers(nx, size=ny)

        def pairs_of(f, g):
            return sorted({(i, int(f[i])) for i in range(nx)} | {(int(g[j]), j) for j in range(ny)})

        cur = _distortion(DX, DY, pairs_of(f, g))
        improved = True
        while improved:
            improved = False
            for i in range(nx):
                for c in range(ny):
                    if c == f[i]:
                        continue
                    old = f[i]
                    f[i] = c
                    v = _distortion(DX, DY, pairs_of(f, g))
                    if v < cur - 1e-15:
                        cur, improved = v, True
                    else:
                        f[i] = old
            for j in range(ny):
                for c in range(nx):
                    if c == g[j]:
                        continue
                    old = g[j]
                    g[j] = c
                    v = _distortion(DX, DY, pairs_of(f, g))
                    if v < cur - 1e-15:
                        cur, improved = v, True
                    else:
                        g[j] = old
        if cur < best[0]:
            best = (cur, pairs_of(f, g))
    return GHResult(float(best[0]) / 2.0, False, best[1])


def cov_growth(X: FiniteMetricSpace, eps: float, exact_cap: int = 15) -> tuple[int, bool]:
    """Fewest open ε-balls centred at points of X that cover X.

    Returns (count, exact); beyond ``exact_cap`` points a greedy cover is
    returned and flagged as an upper bound.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    covers = X.dist < eps
    n = len(X)
    if n <= exact_cap:
        full = (1 << n) - 1
        masks = [sum(1 << j for j in np.flatnonzero(covers[i])) for i in range(n)]
        for size in range(1, n + 1):
            for combo in itertools.combinations(range(n), size):
                m = 0
                for i in combo:
                    m |= masks[i]
                if m == full:
                    return size, True
    uncovered = np.ones(n, bool)
    count = 0
    while uncovered.any():
        i = int(np.argmax((covers & uncovered).sum(axis=1)))
        uncovered &= ~covers[i]
        count += 1
    return count, False


# ---------------------------------------------------------------------------
# compact quantum metric spaces from finite metric spaces


def embed_cqms(X: FiniteMetricSpace) -> tuple[OrderUnitSpace, PolyhedralLip]:
    A = function_space(len(X), labels=tuple(str(x) for x in X.labels))
    return A, lipnorm_from_metric(A, X.dist)


def union_metric(X: FiniteMetricSpace, Y: FiniteMetricSpace, correspondence, r: float | None = None) -> np.ndarray:
    """Metric on X ⊔ Y glued along a correspondence R:

        ρ(x, y) = min over (x', y') in R of ρ_X(x, x') + r + ρ_Y(y', y),

    with r = dis(R)/2 (a small positive r when R is distortion-free).  It
    restricts to ρ_X and ρ_Y, and the Hausdorff distance of X and Y inside
    it is r.
    """
    DX, DY = X.dist, Y.dist
    if r is None:
        r = _distortion(DX, DY, correspondence) / 2.0
    r = max(r, 1e-9)
    nx, ny = len(X), len(Y)
    cross = np.full((nx, ny), np.inf)
    for (a, b) in correspondence:
        cross = np.minimum(cross, DX[:, a:a + 1] + r + DY[b:b + 1, :])
    D = np.zeros((nx + ny, nx + ny))
    D[:nx, :nx] = DX
    D[nx:, nx:] = DY
    D[:nx, nx:] = cross
    D[nx:, :nx] = cross.T
    return D


def union_lipnorm(X: FiniteMetricSpace, Y: FiniteMetricSpace, D: np.ndarray) -> PolyhedralLip:
    """Lipschitz seminorm of a metric on X ⊔ Y, on the host C(X) ⊕ C(Y)."""
    host = direct_sum(function_space(len(X)), function_space(len(Y)))
    return lipnorm_from_metric(host, D)


@dataclass
class GHvsQReport:
    gh: float
    q_upper: float
    q_lower: float
    union_hausdorff: float
    strict_gap: bool
    details: dict = field(default_factory=dict)


def compare_gh_vs_q(X: FiniteMetricSpace, Y: FiniteMetricSpace, K=None) -> GHvsQReport:
    """Classical distance against the quantum bracket for C(X), C(Y).

    The quantum upper bound is the best of: the Lip-norm of the glued
    metric from an optimal correspondence (never above gh), and, when a
    state set ``K`` of C(X) realizing C(Y) as a quotient is given, the
    quotient/doubling construction.
    """
    gh = gh_distance(X, Y)
    D = union_metric(X, Y, gh.correspondence)
    LU = union_lipnorm(X, Y, D)
    union_h = hausdorff_states(LU, 0, 1)
    _, LX = embed_cqms(X)
    _, LY = embed_cqms(Y)
    lower = distq_lower(LX, LY)
    upper = union_h
    details = {"union_upper": union_h}
    if K is not None:
        qd = quotient_doubling_upper(LX, np.eye(len(X)), K)
        details["quotient_upper"] = qd
        upper = min(upper, qd)
    if X.dist.shape == Y.dist.shape and np.allclose(X.dist, Y.dist):
        # identical spaces: the doubling bridge drives the bound to zero
        A, L = embed_cqms(X)
        from .bridges import distq_upper
        dbl = distq_upper(L, L, make_bridge("doubling", A, epsilon=1e-9))
        details["doubling_upper"] = dbl
        upper = min(upper, dbl)
    return GHvsQReport(gh.value, upper, lower, union_h, upper < gh.value - 1e-9, details)


# ---------------------------------------------------------------------------


@dataclass
class GoldenPair:
    Y: FiniteMetricSpace
    Z: FiniteMetricSpace
    A: OrderUnitSpace
    L: PolyhedralLip
    w1: np.ndarray
    w2: np.ndarray
    K: np.ndarray
    K1: np.ndarray
    expected: dict


def appendix1_instance() -> GoldenPair:
    """Three points on a line at spacing 1 against two points at distance 3."""
    Y = FiniteMetricSpace(("y1", "y2", "y3"), np.array([[0, 1, 2], [1, 0, 1], [2, 1, 0.0]]))
    Z = FiniteMetricSpace(("z1", "z2"), np.array([[0, 3], [3, 0.0]]))
    A, L = embed_cqms(Y)
    y = np.eye(3)
    w1 = y[0] + (y[1] - y[2]) / 2
    w2 = y[2] + (y[1] - y[0]) / 2
    K = np.vstack([y, w1, w2])
    K1 = np.vstack([w1, w2])
    expected = {
        "rho_Y(y1,y3)": 2.0,
        "rho_Z(z1,z2)": 3.0,
        "diam Y": 2.0,
        "diam Z": 3.0,
        "rho(w1,w2)": 3.0,
        "rho(y1,w1)": 0.5,
        "rho(y2,mid w)": 0.5,
        "dist_GH": 1.0,
        "dist_q": 0.5,
    }
    return GoldenPair(Y, Z, A, L, w1, w2, K, K1, expected)
