"""Commutators with the pair-swap Dirac operator recover Lipschitz constants."""
import numpy as np

from qgh.classical import random_metric
from qgh.dirac import build_dirac, commutator_lipnorm, dense_commutator_norm, spectrum

rng = np.random.default_rng(0)
X = random_metric(5, rng)
T = build_dirac(X, rng.uniform(0.5, 2, size=5))
f = rng.normal(size=5)
lip = max(abs(f[i] - f[j]) / X.dist[i, j] for i in range(5) for j in range(i))
print("Lipschitz constant:", lip)
print("block formula:     ", commutator_lipnorm(T, f))
print("dense matrix norm: ", dense_commutator_norm(T, f))
print("spectrum of D:", np.round(spectrum(T), 4))
