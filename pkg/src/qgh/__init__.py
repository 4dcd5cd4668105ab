"""Desk-scale computations for quantum Gromov-Hausdorff distances.

Finite-dimensional order-unit spaces with polyhedral Lip-norms, certified
brackets on the quantum distance via bridges and diameters, classical GH
comparisons, Fejer truncation on tori, quantum-torus fields and the
pair-swap Dirac realization of metric Lipschitz seminorms.
"""

__version__ = "0.1.0"
