"""The guaranteed exponent cannot be improved: building a counterexample.

Asking for any q' beyond the guaranteed q, we pick a stretch phi_k and a
profile that sits inside the source space while its composition with phi_k
falls out of the target space at q'.
"""

from fractions import Fraction as F

from qcc.exponents import QCRegularity
from qcc.sharpness import build_witness, positive_direction_sweep, verify_witness_numerically

w = build_witness("subcritical", s=F(1, 2), p=2, q_prime=F(3, 2), n=2, a_or_b=1)
print(f"epsilon = {w.epsilon}, delta = {float(w.delta):.6f}, k = {float(w.k):.6f}, "
      f"rho = {float(w.rho):.6f}, k*rho = {float(w.k * w.rho):.6f}")
for c in w.checks:
    print(f"  [{'ok' if c.holds else '!!'}] {c.name}   margin {float(c.margin):.3e}")

report = verify_witness_numerically(w)
for side in ("source", "composed"):
    r = report[side]
    print(f"{side:>8}: rho = {r['rho']:.4f} at exponent {r['exponent']:.4f}  "
          f"analytic {r['analytic']}, numerical {r['numerical']} (margin {r['margin']:+.4f})")
# The source profile sits only 0.011 inside its threshold, below what the
# truncation sequence resolves, so "inconclusive" is the honest answer there.

sup = build_witness("supercritical", s=1, p=4, q_prime=3, n=2, a_or_b=2)
rep = verify_witness_numerically(sup)
print(f"\nsupercritical: k = {float(sup.k):.4f} ({sup.binding} binds), verdicts "
      f"{rep['source']['numerical']} / {rep['composed']['numerical']}, ok = {rep['ok']}")

# At the guaranteed exponent itself compositions stay in the space.
sweep = positive_direction_sweep(F(1, 2), 2, 2, QCRegularity(2, b=1), [F(3, 2), F(19, 10)])
print("\npositive direction at q = 4/3:")
for row in sweep["rows"]:
    print(f"  k = {row['k']:.2f}, rho = {row['rho']:.3f}: {row['numerical']}")
