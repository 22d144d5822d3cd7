"""The radial stretch x|x|^{k-1} and where its Jacobian stops being integrable."""

from fractions import Fraction as F

import numpy as np

from qcc.profiles import custom, singular_power
from qcc.radial_maps import (
    Ball,
    RadialStretch,
    change_of_variables_check,
    evaluate,
    jacobian,
    jacobian_power_integral,
    jacobian_power_integral_quadrature,
)

phi = RadialStretch(2)
x = np.array([[0.5, 0.0], [0.3, 0.4], [0.0, 0.0]])
print("phi_2(x):\n", evaluate(phi, x))
print("J(x) for |x| = 1/2, 1/2, 0:", jacobian(phi, x))

# Closed form against an independent graded-mesh quadrature.
print("\n   k      t      closed form     quadrature")
for k, t in [(2, 1), (2, -0.5), (0.5, 1.5), (3, -0.4)]:
    m = RadialStretch(k)
    print(f"{k:>4} {t:>6}   {jacobian_power_integral(m, Ball(), t):>14.10f} "
          f"{jacobian_power_integral_quadrature(m, Ball(), t):>14.10f}")

# For k > 1 the negative power J^{-b} is integrable exactly when b < 1/(k-1).
# Exact fractions put the edge precisely where it belongs.
k = F(3, 2)
edge = -1 / (k - 1)
for t in (edge * F(99, 100), edge, edge * F(101, 100)):
    print(f"k = {k}, t = {t}: {jacobian_power_integral(RadialStretch(k), Ball(), t)}")

# Changing variables by phi_k and integrating over phi_k(B) agree.
for k, prof in [(2, custom([(0, 10, 1.0, 0.0)])), (0.5, custom([(0, 10, 1.0, 1.0)])),
                (1.7, singular_power(0.6))]:
    print(f"change of variables, k = {k}: residual {change_of_variables_check(RadialStretch(k), prof, Ball()):.2e}")
