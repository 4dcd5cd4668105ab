"""How fast the truncation constant δₙ shrinks for two choices of character on the circle."""
from qgh.fejer import build_character, fejer_table

for label, freqs in [("trivial + coordinate", None), ("frequencies 0, 1, 2", [(0,), (1,), (2,)])]:
    rows = fejer_table(1, 12, frequencies=freqs)
    print(label)
    for r in rows:
        print(f"  n={r['n']:2d}  support={r['support_size']:3d}  delta={r['delta']:.6f}")
print("closed form for n = 1 with the default character:", 0.25 - 1 / 3.141592653589793 ** 2)
print("character coefficients:", build_character(1).coeffs)
