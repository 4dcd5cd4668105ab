"""Character kernels on 𝕋ᵈ, the truncation bound δₙ and the multiplier projection Pₙ."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT
from .errors import BoundViolated, DimensionMismatch, GridTooCoarse, InputError
from .qtorus import TorusElement, _derivative_blocks, _op_norm, length_of, lie_lipnorm, sphere_directions, window_norm


@dataclass(frozen=True)
class CharacterPoly:
    """Trigonometric polynomial with non-negative integer coefficients, χ ≥ 0 pointwise."""

    d: int
    coeffs: dict

    def __post_init__(self):
        for p, c in self.coeffs.items():
            if len(p) != self.d:
                raise DimensionMismatch(f"frequency {p} not in ℤ^{self.d}")
            if c < 0:
                raise InputError("character coefficients must be non-negative")
            if self.coeffs.get(tuple(-x for x in p), 0) != c:
                raise InputError("character coefficients must be symmetric")
        if self.coeffs.get((0,) * self.d, 0) <= 0:
            raise InputError("constant coefficient must be positive")

    @property
    def radius(self) -> int:
        return max(max(abs(x) for x in p) for p in self.coeffs)

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_2d(x)
        return sum(c * np.cos(2 * np.pi * (x @ np.array(p))) for p, c in self.coeffs.items())


def build_character(d: int, frequencies=None) -> CharacterPoly:
    """|χ₀|² for the representation π₀ with the given frequency multiset.

    The default π₀ is the trivial character plus the d coordinate
    characters, so coeffs(p) counts pairs (q, q′) of frequencies with q − q′ = p.
    """
    if d < 1:
        raise InputError("d must be at least 1")
    if frequencies is None:
        frequencies = [(0,) * d] + [tuple(int(i == k) for i in range(d)) for k in range(d)]
    freqs = [tuple(int(x) for x in q) for q in frequencies]
    if any(len(q) != d for q in freqs):
        raise DimensionMismatch("frequencies must lie in ℤᵈ")
    coeffs: dict = {}
    for q in freqs:
        for r in freqs:
            p = tuple(a - b for a, b in zip(q, r))
            coeffs[p] = coeffs.get(p, 0) + 1
    return CharacterPoly(d, coeffs)


def _power(chi: CharacterPoly, n: int) -> tuple[np.ndarray, int]:
    """Coefficients of χⁿ on the box of radius n·R, exact integers (object dtype)."""
    R = chi.radius * n
    shape = (2 * R + 1,) * chi.d
    out = np.zeros(shape, dtype=object)
    out[(R,) * chi.d] = 1
    for _ in range(n):
        nxt = np.zeros(shape, dtype=object)
        for p, c in chi.coeffs.items():
            # nxt[k + p] += c * out[k]; the box is wide enough that nothing wraps
            nxt += c * np.roll(out, p, axis=tuple(range(chi.d)))
        out = nxt
    return out, R


@dataclass
class FejerKernel:
    n: int
    d: int
    multiplier: dict = field(repr=False)
    delta: float = 0.0
    residual: float = 0.0
    support: list = field(default_factory=list, repr=False)
    grid: int = 0

    def __call__(self, p) -> float:
        return self.multiplier.get(tuple(p), 0.0)


def length_function(length="euclidean", d: int = 1):
    """Resolve a length descriptor to a callable ℓ on points of ℝᵈ (rows)."""
    if callable(length):
        return length
    if length in ("circle", "geodesic"):
        length = "euclidean"
    return lambda X: length_of(X, length)


def _phi_on_grid(coef: np.ndarray, R: int, d: int, N: int) -> np.ndarray:
    x = (np.arange(N) + 0.5) / N - 0.5
    E = np.exp(2j * np.pi * np.outer(np.arange(-R, R + 1), x))
    out = coef.astype(complex)
    for _ in range(d):
        # contract the leading frequency axis; the new grid axis goes last
        out = np.tensordot(out, E, axes=([0], [0]))
    return out.real


def _quadrature(coef, R, d, N, ell):
    x = (np.arange(N) + 0.5) / N - 0.5
    X = np.stack(np.meshgrid(*[x] * d, indexing="ij"), axis=-1).reshape(-1, d)
    phi = _phi_on_grid(coef, R, d, N).reshape(-1)
    return float(np.mean(phi * ell(X)))


def build_kernel(chi: CharacterPoly, n: int, length="euclidean", grid: int = DEFAULT.grid,
                 tol: float = 1e-4) -> FejerKernel:
    """φₙ = χⁿ/‖χⁿ‖₁ with δₙ = ∫φₙℓ by midpoint quadrature.

    The residual is the change between the grid and the half grid;
    GridTooCoarse is raised below 64 points per axis or when the residual
    exceeds ``tol``.
    """
    if n < 1:
        raise InputError("n must be at least 1")
    if grid < 64:
        raise GridTooCoarse(f"grid {grid} is below the 64-point minimum")
    ints, R = _power(chi, n)
    c0 = ints[(R,) * chi.d]
    coef = np.vectorize(lambda c: float(c) / float(c0) if c else 0.0, otypes=[float])(ints)
    pts = np.argwhere(ints != 0) - R
    support = sorted(tuple(int(v) for v in p) for p in pts)
    multiplier = {p: float(coef[tuple(np.array(p) + R)]) for p in support}
    ell = length_function(length, chi.d)
    fine = _quadrature(coef, R, chi.d, grid, ell)
    coarse = _quadrature(coef, R, chi.d, grid // 2, ell)
    residual = abs(fine - coarse)
    if residual > tol:
        raise GridTooCoarse(f"quadrature residual {residual:.3g} exceeds {tol:.3g}")
    return FejerKernel(n, chi.d, multiplier, fine, residual, support, grid)


def apply_Pn(kernel: FejerKernel, f: TorusElement) -> TorusElement:
    if f.d != kernel.d:
        raise DimensionMismatch("kernel and element dimensions differ")
    return TorusElement(f.d, {p: kernel(p) * v for p, v in f.coeffs.items() if kernel(p) != 0.0})


@dataclass
class TruncationReport:
    residual_norm: float  # ‖f − Pₙf‖ on the window
    delta_L: float  # δₙ·L(f)
    lip_f: float
    lip_Pf: float  # L(Pₙf) over the same directions as lip_f's grid
    lip_f_grid: float
    margin_83: float
    margin_84: float
    window: int
    directions: int


def truncation_check(kernel: FejerKernel, f: TorusElement, theta, window: int = 8,
                     sphere_samples: int = DEFAULT.torus_directions, rel_tol: float = 1e-3,
                     abs_tol: float = 1e-9) -> TruncationReport:
    """Evaluate ‖f − Pₙf‖ ≤ δₙL(f) and L(Pₙf) ≤ L(f) on one window.

    Compressing to the window commutes with every translation, so both
    inequalities survive compression.  The second is compared on one
    shared direction set, where it is exact up to rounding.  The first
    uses the refined Lie estimate, which may still sit below the true
    supremum; ``rel_tol`` absorbs that direction-sampling bias.
    """
    Pf = apply_Pn(kernel, f)
    herm = f.is_self_adjoint()
    dirs = sphere_directions(f.d, sphere_samples)
    r = window_norm(f - Pf, theta, window) if (f - Pf).coeffs else 0.0
    L_full = lie_lipnorm(f, theta, sphere_samples=sphere_samples, window=window).estimate

    def grid_lip(g):
        if not g.coeffs:
            return 0.0
        H = [h.toarray() for h in _derivative_blocks(g, theta, window)]
        return max(_op_norm(sum(x * h for x, h in zip(X, H)), herm) for X in dirs)

    Lg, LPg = grid_lip(f), grid_lip(Pf)
    bound = kernel.delta * L_full
    m83 = bound * (1 + rel_tol) + abs_tol - r
    m84 = Lg * (1 + 1e-10) + abs_tol - LPg
    rep = TruncationReport(r, bound, L_full, LPg, Lg, m83, m84, window, len(dirs))
    if m83 < 0:
        raise BoundViolated(f"‖f − Pf‖ = {r:.6g} exceeds δ·L = {bound:.6g}")
    if m84 < 0:
        raise BoundViolated(f"L(Pf) = {LPg:.6g} exceeds L(f) = {Lg:.6g}")
    return rep


def fejer_table(d: int = 1, n_max: int = 8, length="euclidean", grid: int = DEFAULT.grid,
                frequencies=None, tol: float = 1e-4) -> list[dict]:
    chi = build_character(d, frequencies)
    rows = []
    for n in range(1, n_max + 1):
        k = build_kernel(chi, n, length, grid, tol)
        rows.append({"n": n, "support_size": len(k.support), "delta": k.delta, "residual": k.residual})
    return rows


def table_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "support_size", "delta", "residual"])
    for r in rows:
        w.writerow([r["n"], r["support_size"], f"{r['delta']:.12g}", f"{r['residual']:.3e}"])
    return buf.getvalue()
