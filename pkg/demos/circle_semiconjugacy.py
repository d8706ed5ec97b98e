"""Arnold family: mode locking, bounded deviation and the semiconjugacy.

Prints rotation numbers along a line of Omega (plateaus are the tongues),
then tunes Omega to the golden mean and shows the semiconjugacy residual
shrinking as the coboundary horizon grows.
"""
import math

import numpy as np

from foliation_lab import circle
from foliation_lab.circle import CircleLift

K = 0.8
GOLD = (math.sqrt(5) - 1) / 2

print("Omega      rho        max|F^n x - x - n rho|")
for om in np.linspace(0.0, 0.5, 11):
    lift = CircleLift.arnold(om, K)
    rho = circle.rotation_number(lift, 0.0, 10 ** 6).rho_hat
    print(f"{om:.3f}  {rho:.8f}  {circle.max_deviation(lift, 0.0, 10 ** 5, rho):.4f}")

om = circle.tune_omega_to_rho(0.5, GOLD, 1e-10)
lift = CircleLift.arnold(om, 0.5)
rho = circle.rotation_number(lift, 0.0, 10 ** 5, "weighted").rho_hat
print(f"\ntuned Omega={om:.12f}, rho={rho:.12f}")
for T in (10 ** 2, 10 ** 3, 10 ** 4, 10 ** 5):
    rep = circle.circle_semiconjugacy(lift, rho, 64, T)
    print(f"horizon {T:>6d}: residual {rep.residual_sup:.3e}, "
          f"convergence delta {rep.gamma_ref.convergence_delta:.3e}")
