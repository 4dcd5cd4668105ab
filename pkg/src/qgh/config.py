"""Central tolerance record shared by every module."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    tol_lp: float = 1e-9
    unit_check: float = 1e-12
    center_check: float = 1e-9
    residual: float = 1e-7
    euclid: float = 1e-9
    norm: float = 1e-6
    sphere_samples: int = 512
    torus_directions: int = 256
    random_states: int = 16
    stability_samples: int = 10_000
    window_max: int = 12
    grid: int = 256
    max_pivots: int = 50_000


DEFAULT = Tolerances()
