"""How much integrability does a quasiconformal change of variables cost?

Run with ``python3 demos/01_exponent_tour.py``.  Writes ``diagram.svg`` to the
current directory.
"""

from fractions import Fraction as F

from qcc.diagram import build
from qcc.exponents import (
    QCRegularity,
    interpolation_indices,
    planar_bounds,
    planar_regularity,
    regime_of,
    target_q,
)

# A planar map with distortion K has Jacobian powers J^a and J^{-b} integrable
# for a < K/(K-1) and b < 1/(K-1).
for K in (F(3, 2), 2, 3):
    a_K, b_K = planar_bounds(K)
    print(f"K = {K}: a < {a_K}, b < {b_K}")

# Below the critical line sp = n the loss is governed by b, above it by a.
reg = QCRegularity(n=2, a=2, b=1)
print("\n  s    p   regime         q")
for s, p in [(F(1, 2), 2), (F(1, 2), 3), (1, 2), (1, 4), (F(3, 4), 6)]:
    print(f"{str(s):>4} {str(p):>4}   {regime_of(s, p, 2).value:<13} {target_q(s, p, reg)}")

# On the critical line nothing is lost, whatever the map.
print("\ncritical line, n = 3:", target_q(F(3, 4), 4, QCRegularity(3, a=F(3, 2), b=F(1, 5))))

# The proof interpolates between a Lebesgue end point (s = 0) and a Sobolev one
# (s = 1).  Both lie on the same line through (1, n) in the (1/p, s) plane.
idx = interpolation_indices(F(1, 2), 2, QCRegularity(2, b=1))
print("\nend points for s = 1/2, p = 2, b = 1:")
for name, inv in idx.inverse.items():
    print(f"  1/{name} = {inv}")

# Same picture for an actual planar map, K = 2, halfway inside its window.
reg2 = planar_regularity(2)
print(f"\nK = 2 with a = {reg2.a}, b = {reg2.b}: q(1/2, 3) = {target_q(F(1, 2), 3, reg2)}")

fig = build(QCRegularity(2, b=1, a=2), index_for=(F(1, 2), 2))
with open("diagram.svg", "w") as fh:
    fh.write(fig.svg(title="arrows (1/p, s) -> (1/q, s)"))
print(f"\nwrote diagram.svg with {len(fig.arrows)} arrows; all proportional:",
      all(a.proportional() for a in fig.arrows))
