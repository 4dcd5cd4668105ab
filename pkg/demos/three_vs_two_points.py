"""Three points on a line against two points at distance 3.

The classical distance is 1, but the quantum distance drops to 1/2:
the state space of the three-point space contains two non-pure states
w1, w2 at distance 3, so C(Z) sits inside it as a quotient.
"""
import numpy as np

from qgh.bridges import distq_lower, quotient_doubling_upper
from qgh.classical import appendix1_instance, embed_cqms, gh_distance
from qgh.lipnorm import rho

inst = appendix1_instance()
L = inst.L
y = np.eye(3)

print("classical GH distance:", gh_distance(inst.Y, inst.Z).value)
print("rho(w1, w2) =", rho(L, inst.w1, inst.w2))
print("rho(y1, w1) =", rho(L, y[0], inst.w1))
print("rho(y2, (w1 + w2)/2) =", rho(L, y[1], (inst.w1 + inst.w2) / 2))

lower = distq_lower(L, embed_cqms(inst.Z)[1])
upper = quotient_doubling_upper(L, np.eye(3), inst.K1)
print(f"quantum distance bracket: [{lower:.9f}, {upper:.9f}]")
