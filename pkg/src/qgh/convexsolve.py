"""Dense linear programming and nearest-point computations over polytopes.

The LP solver is a two-phase tableau simplex.  It prices with Dantzig's
rule and switches to Bland's smallest-index rule after a run of degenerate
pivots, which rules out cycling while keeping the pivot count modest.  At
the optimum the basic solution is recomputed from the original (scaled)
constraint matrix, so the reported values do not carry tableau drift.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT
from .errors import (
    DimensionMismatch,
    EmptyPolytope,
    Infeasible,
    InputError,
    NumericalFailure,
    Unbounded,
)

_PIVOT_TOL = 1e-9
_DEGENERATE_RUN = 8
_REFACTOR_EVERY = 64


@dataclass
class LinearProgram:
    """minimize c @ x  s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  lb <= x <= ub.

    Bounds default to ``0 <= x < inf``; use ``-np.inf`` for free variables.
    """

    c: np.ndarray
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    lb: np.ndarray | None = None
    ub: np.ndarray | None = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        n = self.c.size
        self.A_eq, self.b_eq = _rows(self.A_eq, self.b_eq, n, "equality")
        self.A_ub, self.b_ub = _rows(self.A_ub, self.b_ub, n, "inequality")
        self.lb = np.zeros(n) if self.lb is None else np.broadcast_to(np.asarray(self.lb, float), (n,)).copy()
        self.ub = np.full(n, np.inf) if self.ub is None else np.broadcast_to(np.asarray(self.ub, float), (n,)).copy()
        if np.any(self.lb > self.ub) or np.any(self.lb == np.inf) or np.any(self.ub == -np.inf):
            raise InputError("empty variable bound interval")

    @property
    def n(self) -> int:
        return self.c.size


def _rows(A, b, n, what):
    if A is None:
        if b is not None and np.size(b):
            raise DimensionMismatch(f"{what} rhs given without matrix")
        return np.zeros((0, n)), np.zeros(0)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    if A.shape[0] == 0:
        return np.zeros((0, n)), np.zeros(0)
    if A.shape[1] != n:
        raise DimensionMismatch(f"{what} matrix has {A.shape[1]} columns, expected {n}")
    if A.shape[0] != b.size:
        raise DimensionMismatch(f"{what} matrix has {A.shape[0]} rows but rhs has {b.size}")
    return A, b


@dataclass
class LPResult:
    value: float
    x: np.ndarray
    duals_eq: np.ndarray
    duals_ub: np.ndarray
    iterations: int


def _standard_form(lp: LinearProgram):
    """Rewrite as min ĉ·y, Â y = b̂, y >= 0 with x = x0 + T y."""
    n = lp.n
    cols = []  # (original index, sign)
    x0 = np.zeros(n)
    upper_rows = []  # (std column, width)
    for k in range(n):
        lo, hi = lp.lb[k], lp.ub[k]
        if np.isfinite(lo):
            x0[k] = lo
            cols.append((k, 1.0))
            if np.isfinite(hi):
                upper_rows.append((len(cols) - 1, hi - lo))
        elif np.isfinite(hi):
            x0[k] = hi
            cols.append((k, -1.0))
        else:
            cols.append((k, 1.0))
            cols.append((k, -1.0))
    ny = len(cols)
    T = np.zeros((n, ny))
    for j, (k, s) in enumerate(cols):
        T[k, j] = s
    m_eq, m_ub, m_bd = lp.A_eq.shape[0], lp.A_ub.shape[0], len(upper_rows)
    nslack = m_ub + m_bd
    A = np.zeros((m_eq + m_ub + m_bd, ny + nslack))
    b = np.zeros(m_eq + m_ub + m_bd)
    A[:m_eq, :ny] = lp.A_eq @ T
    b[:m_eq] = lp.b_eq - lp.A_eq @ x0
    A[m_eq:m_eq + m_ub, :ny] = lp.A_ub @ T
    A[m_eq:m_eq + m_ub, ny:ny + m_ub] = np.eye(m_ub)
    b[m_eq:m_eq + m_ub] = lp.b_ub - lp.A_ub @ x0
    for r, (j, width) in enumerate(upper_rows):
        A[m_eq + m_ub + r, j] = 1.0
        A[m_eq + m_ub + r, ny + m_ub + r] = 1.0
        b[m_eq + m_ub + r] = width
    c = np.concatenate([lp.c @ T, np.zeros(nslack)])
    return A, b, c, x0, T, (m_eq, m_ub)


class _Tableau:
    def __init__(self, A, b, max_pivots):
        m, n = A.shape
        self.n = n
        self.T = np.zeros((m, n + m + 1))
        self.T[:, :n] = A
        self.T[:, n:n + m] = np.eye(m)
        self.T[:, -1] = b
        self.basis = list(range(n, n + m))
        self.iterations = 0
        self.max_pivots = max_pivots
        self.original = self.T.copy()
        self.rows = np.arange(m)

    def pivot(self, r, j):
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        self.basis[r] = j
        self.iterations += 1
        if self.iterations > self.max_pivots:
            raise NumericalFailure("simplex pivot cap reached")
        if self.iterations % _REFACTOR_EVERY == 0:
            self.refactor()

    def refactor(self):
        """Rebuild the tableau from the original rows to shed accumulated rounding."""
        O = self.original[self.rows]
        B = O[:, self.basis]
        try:
            if np.linalg.cond(B) > 1e10:
                return
            T = np.linalg.solve(B, O)
        except np.linalg.LinAlgError:
            return
        if np.all(np.isfinite(T)):
            T[:, -1] = np.maximum(T[:, -1], 0.0)
            self.T = T

    def run(self, cost, allowed, bounded: bool = False):
        """Minimize cost over the current feasible basis; columns outside `allowed` never enter."""
        scale = max(1.0, float(np.max(np.abs(cost))))
        degenerate = 0
        while True:
            T = self.T
            cb = cost[self.basis]
            reduced = cost - cb @ T[:, :cost.size]
            reduced = np.where(allowed, reduced, 0.0)
            colsize = np.maximum(1.0, np.abs(T[:, :cost.size]).max(axis=0))
            candidates = np.flatnonzero(reduced < -1e-10 * scale * colsize)
            if candidates.size == 0:
                return
            order = candidates if degenerate >= _DEGENERATE_RUN else candidates[np.argsort(reduced[candidates], kind="stable")]
            j = rows = None
            for cand in order:
                colj = T[:, cand]
                top = float(colj.max())
                if top <= 1e-12:
                    if bounded:
                        continue  # phase one is bounded below; this is rounding
                    raise Unbounded("objective unbounded below")
                ok = np.flatnonzero(colj > _PIVOT_TOL * max(1.0, float(np.abs(colj).max())))
                if ok.size:
                    j, rows = int(cand), ok
                    break
            if j is None:
                return  # only numerically ambiguous columns remain
            ratios = np.maximum(T[rows, -1], 0.0) / colj[rows]
            best = ratios.min()
            tied = rows[ratios <= best + 1e-9 * max(1.0, abs(best))]
            if degenerate >= _DEGENERATE_RUN:
                r = int(min(tied, key=lambda i: self.basis[i]))
            else:
                r = int(tied[np.argmax(colj[tied])])
            # once stalling is seen, Bland's rule stays on for the rest of the phase
            if degenerate < _DEGENERATE_RUN:
                degenerate = degenerate + 1 if T[r, -1] <= 1e-9 * max(1.0, abs(T[:, -1]).max()) else 0
            self.pivot(r, j)


def _simplex(A, b, c, tol, max_pivots):
    """Two-phase simplex on min c·y, A y = b, y >= 0.  Returns (y, duals, iters)."""
    m, n = A.shape
    sign = np.where(b < 0, -1.0, 1.0)
    A = A * sign[:, None]
    b = b * sign
    scale = np.max(np.abs(A), axis=1)
    scale[scale == 0] = 1.0
    A = A / scale[:, None]
    b = b / scale
    if m == 0:
        if np.any(c < -tol):
            raise Unbounded("objective unbounded below")
        return np.zeros(n), np.zeros(0), 0
    tab = _Tableau(A, b, max_pivots)
    phase1 = np.concatenate([np.zeros(n), np.ones(m)])
    tab.run(phase1, np.concatenate([np.ones(n, bool), np.zeros(m, bool)]), bounded=True)
    infeas = float(phase1[tab.basis] @ tab.T[:, -1])
    if infeas > max(tol, 1e-9 * max(1.0, float(np.max(np.abs(b))))):
        raise Infeasible(f"constraints infeasible (phase-one residual {infeas:.3g})")
    keep = np.ones(m, bool)
    for r in range(m):
        if tab.basis[r] >= n:
            row = tab.T[r, :n]
            nz = np.flatnonzero(np.abs(row) > 1e-7)
            if nz.size:
                tab.pivot(r, int(nz[np.argmax(np.abs(row[nz]))]))
            else:
                keep[r] = False
    if not keep.all():
        tab.T = tab.T[keep]
        tab.rows = tab.rows[keep]
        tab.basis = [bv for bv, k in zip(tab.basis, keep) if k]
    cost = np.concatenate([c, np.zeros(m)])
    tab.run(cost, np.concatenate([np.ones(n, bool), np.zeros(m, bool)]))
    basis = np.array(tab.basis)
    if np.any(basis >= n):
        raise NumericalFailure("artificial variable left in final basis")
    # recompute the basic solution from the scaled original data
    Ak, bk = A[keep], b[keep]
    B = Ak[:, basis]
    try:
        yB = np.linalg.solve(B, bk)
        duals_k = np.linalg.solve(B.T, c[basis])
        if not np.all(np.isfinite(yB)) or np.linalg.cond(B) > 1e12:
            raise np.linalg.LinAlgError("ill-conditioned basis")
    except np.linalg.LinAlgError:
        # nearly dependent rows survived phase one: trust the tableau itself
        yB = tab.T[:, -1].copy()
        duals_k = np.linalg.lstsq(B.T, c[basis], rcond=None)[0]
    y = np.zeros(n)
    y[basis] = np.maximum(yB, 0.0)
    duals = np.zeros(m)
    duals[keep] = duals_k
    duals = duals / scale * sign
    return y, duals, tab.iterations


def solve_lp(lp: LinearProgram, tol: float = DEFAULT.tol_lp, lexicographic: bool = False,
             max_pivots: int = DEFAULT.max_pivots) -> LPResult:
    """Solve ``lp`` and return the optimum with one optimal point.

    With ``lexicographic=True`` the optimal face is searched for its
    lexicographically smallest point by a chain of follow-up LPs.
    """
    A, b, c, x0, T, (m_eq, m_ub) = _standard_form(lp)
    y, duals, iters = _simplex(A, b, c, tol, max_pivots)
    x = x0 + T @ y[:T.shape[1]]
    value = float(lp.c @ x)
    if lexicographic:
        x, extra = _lex_refine(lp, value, tol, max_pivots)
        iters += extra
    return LPResult(value=value, x=x, duals_eq=duals[:m_eq], duals_ub=-duals[m_eq:m_eq + m_ub],
                    iterations=iters)


def _lex_refine(lp, value, tol, max_pivots):
    A_ub = np.vstack([lp.A_ub, lp.c[None, :]])
    b_ub = np.concatenate([lp.b_ub, [value + tol * max(1.0, abs(value))]])
    fixed_rows, fixed_rhs = [], []
    x = None
    iters = 0
    for k in range(lp.n):
        e = np.zeros(lp.n)
        e[k] = 1.0
        A_eq = np.vstack([lp.A_eq] + fixed_rows) if fixed_rows else lp.A_eq
        b_eq = np.concatenate([lp.b_eq, fixed_rhs]) if fixed_rhs else lp.b_eq
        sub = LinearProgram(e, A_eq, b_eq, A_ub, b_ub, lp.lb, lp.ub)
        try:
            res = solve_lp(sub, tol, max_pivots=max_pivots)
        except Unbounded:
            break
        x = res.x
        iters += res.iterations
        fixed_rows.append(e[None, :])
        fixed_rhs.append(res.x[k])
    return x, iters


# --------------------------------------------------------------------------
# polytopes and gauges


@dataclass(frozen=True)
class Polytope:
    """Convex hull of finitely many generators (rows)."""

    generators: np.ndarray

    def __post_init__(self):
        G = np.atleast_2d(np.asarray(self.generators, dtype=float))
        if G.size == 0 or G.shape[0] == 0:
            raise EmptyPolytope("polytope needs at least one generator")
        object.__setattr__(self, "generators", G)

    @property
    def dimension(self) -> int:
        return self.generators.shape[1]

    def __len__(self):
        return self.generators.shape[0]


@dataclass(frozen=True)
class AtomicGauge:
    """g(v) = min Σ w_j |c_j| over representations v = Σ c_j a_j.

    This is the dual of the seminorm a ↦ max_j |a_j(a)| / w_j, and the
    base norm when the atoms are the generators of a base.
    """

    atoms: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.atoms, dtype=float))
        object.__setattr__(self, "atoms", A)
        w = np.ones(A.shape[0]) if self.weights is None else np.asarray(self.weights, float)
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class MaxGauge:
    """g(v) = max_j |f_j · v|."""

    functionals: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "functionals", np.atleast_2d(np.asarray(self.functionals, float)))


@dataclass(frozen=True)
class EuclideanGauge:
    scale: float = 1.0


def _atom_columns(g: AtomicGauge):
    norms = np.linalg.norm(g.atoms, axis=1)
    live = norms > 0
    atoms = g.atoms[live] / norms[live, None]
    cost = g.weights[live] / norms[live]
    return atoms, cost


def gauge_value(g, v, tol: float = DEFAULT.tol_lp) -> float:
    v = np.asarray(v, dtype=float)
    if isinstance(g, EuclideanGauge):
        return float(np.linalg.norm(v)) * g.scale
    if isinstance(g, MaxGauge):
        if g.functionals.shape[1] != v.size:
            raise DimensionMismatch("gauge/vector dimension mismatch")
        return float(np.max(np.abs(g.functionals @ v), initial=0.0))
    if isinstance(g, AtomicGauge):
        if g.atoms.shape[1] != v.size:
            raise DimensionMismatch("gauge/vector dimension mismatch")
        if not np.any(v):
            return 0.0
        atoms, cost = _atom_columns(g)
        m = atoms.shape[0]
        lp = LinearProgram(np.concatenate([cost, cost]),
                           A_eq=np.hstack([atoms.T, -atoms.T]), b_eq=v)
        return solve_lp(lp, tol).value
    raise InputError(f"unknown gauge {g!r}")


@dataclass
class NearestPoint:
    point: np.ndarray
    distance: float
    weights: np.ndarray = field(repr=False)


def nearest_point(z, P: Polytope, gauge, tol: float = DEFAULT.tol_lp) -> NearestPoint:
    """Closest point of ``P`` to ``z`` measured by ``gauge(z - ·)``."""
    z = np.asarray(z, dtype=float).ravel()
    G = P.generators
    if z.size != P.dimension:
        raise DimensionMismatch(f"point has dimension {z.size}, polytope {P.dimension}")
    k, n = G.shape
    if isinstance(gauge, EuclideanGauge):
        w = min_norm_weights(G - z, tol)
        p = w @ G
        return NearestPoint(p, float(np.linalg.norm(z - p)) * gauge.scale, w)
    if isinstance(gauge, AtomicGauge):
        atoms, cost = _atom_columns(gauge)
        m = atoms.shape[0]
        c = np.concatenate([np.zeros(k), cost, cost])
        A_eq = np.zeros((n + 1, k + 2 * m))
        A_eq[:n, :k] = G.T
        A_eq[:n, k:k + m] = atoms.T
        A_eq[:n, k + m:] = -atoms.T
        A_eq[n, :k] = 1.0
        b_eq = np.concatenate([z, [1.0]])
        res = solve_lp(LinearProgram(c, A_eq, b_eq), tol)
        w = res.x[:k]
    elif isinstance(gauge, MaxGauge):
        F = gauge.functionals
        m = F.shape[0]
        # variables (w, t); |F z - F G^T w| <= t
        c = np.zeros(k + 1)
        c[-1] = 1.0
        FG = F @ G.T
        Fz = F @ z
        A_ub = np.vstack([np.hstack([-FG, -np.ones((m, 1))]),
                          np.hstack([FG, -np.ones((m, 1))])])
        b_ub = np.concatenate([-Fz, Fz])
        A_eq = np.concatenate([np.ones(k), [0.0]])[None, :]
        res = solve_lp(LinearProgram(c, A_eq, [1.0], A_ub, b_ub), tol)
        w = res.x[:k]
    else:
        raise InputError(f"unknown gauge {gauge!r}")
    w = np.maximum(w, 0.0)
    w = w / w.sum()
    p = w @ G
    return NearestPoint(p, max(res.value, 0.0), w)


def min_norm_weights(Q: np.ndarray, tol: float = DEFAULT.euclid) -> np.ndarray:
    """Convex weights of the minimum-Euclidean-norm point of co(rows of Q).

    Wolfe's active-set algorithm: terminates finitely and returns the exact
    minimizer up to rounding.
    """
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    k = Q.shape[0]
    sq = np.einsum("ij,ij->i", Q, Q)
    big = max(1.0, float(sq.max()))
    S = [int(np.argmin(sq))]
    lam = np.array([1.0])
    x = Q[S[0]].copy()
    for _ in range(50 * k + 100):
        j = int(np.argmin(Q @ x))
        if x @ x - Q[j] @ x <= tol * tol * big or j in S:
            break
        S.append(j)
        lam = np.append(lam, 0.0)
        while True:
            QS = Q[S]
            ns = len(S)
            M = np.zeros((ns + 1, ns + 1))
            M[:ns, :ns] = QS @ QS.T
            M[:ns, ns] = 1.0
            M[ns, :ns] = 1.0
            rhs = np.zeros(ns + 1)
            rhs[ns] = 1.0
            alpha = np.linalg.lstsq(M, rhs, rcond=None)[0][:ns]
            if np.all(alpha > 1e-14):
                lam = alpha
                x = alpha @ QS
                break
            neg = alpha <= 1e-14
            with np.errstate(divide="ignore", invalid="ignore"):
                steps = np.where(neg, lam / (lam - alpha), np.inf)
            t = float(np.min(steps))
            lam = lam + t * (alpha - lam)
            drop = lam <= 1e-14
            drop[int(np.argmin(np.where(neg, steps, np.inf)))] = True
            S = [s for s, d in zip(S, drop) if not d]
            lam = lam[~drop]
            lam = lam / lam.sum()
            x = lam @ Q[S]
    w = np.zeros(k)
    w[S] = lam
    return w


def in_hull(z, P: Polytope, tol: float = DEFAULT.tol_lp) -> bool:
    """Feasibility of z = Σ w_i g_i with convex weights (phase-one LP)."""
    z = np.asarray(z, dtype=float).ravel()
    G = P.generators
    k = G.shape[0]
    A_eq = np.vstack([G.T, np.ones((1, k))])
    b_eq = np.concatenate([z, [1.0]])
    # slack form: minimize total deviation so borderline points get a numeric verdict
    n = A_eq.shape[0]
    c = np.concatenate([np.zeros(k), np.ones(2 * n)])
    A = np.hstack([A_eq, np.eye(n), -np.eye(n)])
    res = solve_lp(LinearProgram(c, A, b_eq), tol)
    return res.value <= 1e-7 * max(1.0, float(np.abs(z).max(initial=0.0)))
