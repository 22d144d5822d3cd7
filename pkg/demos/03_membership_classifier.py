"""Deciding numerically whether a singular profile has s derivatives in L^p.

f_rho = max(|x|^{-rho} - 1, 0) lies in the fractional space at (s, p) on the
plane exactly when rho < 2/p - s.  Here the double integral is truncated at
radius eps and the growth of the truncations is read off as eps -> 0.
"""

from fractions import Fraction as F

from qcc.norms import FractionalNormSpec, estimate
from qcc.profiles import membership_oracle, singular_power

s, p = F(1, 2), 2
print(f"s = {s}, p = {p}: threshold 2/p - s = {2 / p - s}\n")
print(" rho   oracle        gagliardo     modulus       decay exp.")
for rho in (F(1, 10), F(3, 10), F(2, 5), F(1, 2), F(3, 5), F(9, 10)):
    prof = singular_power(rho)
    g = estimate(prof, FractionalNormSpec(float(s), p))
    m = estimate(prof, FractionalNormSpec(float(s), p, estimator="modulus_of_smoothness"), samples=40_000)
    print(f"{float(rho):4.1f}  {membership_oracle(prof, s, p, 2).value:<13} {g.verdict.value:<13} "
          f"{m.verdict.value:<13} {g.decay_exponent:+.3f}")

# The decay exponent of the increments is about -2(rho - threshold); right at
# the threshold it tends to zero and neither verdict can be trusted.
prof = singular_power(F(3, 10))
est = estimate(prof, FractionalNormSpec(0.5, 2))
print("\ntruncated integrals for rho = 0.3:")
for eps, part in zip(est.cutoffs, est.partials):
    print(f"  eps = {eps:.2e}   {part:.8f}")
print(f"seminorm ~ {est.value:.6f}, log-slope {est.log_slope:+.4f}")
