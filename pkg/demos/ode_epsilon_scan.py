"""Rotation number of a quasiperiodically forced ODE against a shift eps.

With beta_2 = 0 the fiber is one-dimensional and rho(eps) is monotone;
the scan prints the table and any plateaus.
"""
import numpy as np

from foliation_lab import apode
from foliation_lab.apode import IntegratorConfig, ODESpec, TorusFourierField

field = TorusFourierField((((1, 0, 1, 0), 0.3, 0.0), ((0, 1, 1, 0), 0.2, 0.5)))
spec = ODESpec(field, beta=(1.0, 0.0))
res = apode.epsilon_scan(spec, IntegratorConfig(), np.linspace(0.0, 0.5, 26), 200.0)
print("eps      rho_hat     gap        sup|xi - t rho|")
for r in res.rows:
    print(f"{r.epsilon:.3f}  {r.rho_hat:.8f}  {r.cauchy_gap:.2e}  {r.deviation_max:.4f}")
print("monotone:", res.monotone, " plateaus:", res.plateaus)

order, _ = apode.convergence_order(ODESpec(field), 100.0, 0.1)
print(f"RK4 empirical order: {order:.3f}")
