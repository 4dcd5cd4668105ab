"""Bridge estimates between finite models of quantum tori as θ approaches ψ.

Slow (about two minutes on one core) because every row re-estimates
Lie-derivative norms on a 17×17 window.
"""
from qgh.qtorus import torus_sweep

for r in torus_sweep(d=2, n=2, theta0=0.30, steps=6, step=0.01, window=8):
    print(f"theta={r['theta']:.2f} psi={r['psi']:.2f}  certificate={r['certificate']:.6f}  "
          f"hausdorff~{r['hausdorff_estimate']:.6f}  full chain~{r['full_chain']:.4f}  "
          f"valid={r['bridge_valid']}")
