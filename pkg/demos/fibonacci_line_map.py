"""A line map driven by the Fibonacci quasicrystal.

Builds the Fibonacci Delone set, checks patch-frequency uniformity, and
estimates the translation number of f(t) = t + phi(t) where phi is a
pattern-equivariant tent-kernel displacement.
"""
import numpy as np

from foliation_lab import quasicrystal as qc

X = qc.fibonacci_segment(20)
print(f"window {X.window}, {len(X.points)} points, gaps {X.gap_alphabet}")

classes = qc.patch_classes(X, 1.2, -200.0, 200.0)
print(f"{len(classes)} patch classes of radius 1.2")
for P, _ in classes:
    rep = qc.patch_frequency(X, P, 1000.0, [-8000, -4000, 0, 4000, 8000])
    print(f"  {np.round(P.relative_points, 4)}  freq {rep.frequency_estimate:.5f} "
          f"spread {rep.uniformity_spread:.1e}")

phi = qc.PEDisplacement(X, qc.tent_kernel(0.4, 0.3), 0.4, 2.0)
report = qc.delone_semiconjugacy_criterion(phi, N=10000, starts=(0.0, 1.3, 7.7))
print(f"\nrho = {report.rho.rho_hat:.8f} (gap {report.rho.cauchy_gap:.1e})")
prof = report.deviation_profile
print(f"deviation: {prof.classification}, slope {prof.loglog_slope:.3f}, bound {prof.bound:.3f}")
for c in report.criterion_caveats:
    print("  caveat:", c)
