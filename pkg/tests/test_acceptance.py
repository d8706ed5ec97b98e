"""Acceptance criteria 1-12.

Each test records a one-line verdict that is printed in the terminal
summary.  Run directly (``python tests/test_acceptance.py``) to execute
only this file.
"""
import math
import sys

import numpy as np
import pytest

from conftest import ACCEPTANCE
from foliation_lab import apline, apode, circle, core, quasicrystal as qc, skew
from foliation_lab.apline import FrequencyModule, LineMap, TrigPoly
from foliation_lab.apode import IntegratorConfig, ODESpec, TorusFourierField
from foliation_lab.circle import CircleLift
from foliation_lab.skew import SkewProductSystem

GOLD = (math.sqrt(5) - 1) / 2
CFG = IntegratorConfig()
TWO_MODE = TorusFourierField((((1, 0, 1, 0), 0.3, 0.1), ((0, 1, 0, 1), 0.2, 0.5)))
TENT = dict(r=0.4, amplitude=0.3, c=2.0)


def record(k, ok, detail):
    ACCEPTANCE[k] = (bool(ok), detail)
    print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def _delone_phi(n=20):
    X = qc.fibonacci_segment(n)
    return qc.PEDisplacement(X, qc.tent_kernel(TENT["r"], TENT["amplitude"]), TENT["r"], TENT["c"])


def test_criterion_01_rigid_exactness():
    errs = {}
    lift = CircleLift.rigid(0.25)
    est = circle.rotation_number(lift, 0.1, 10 ** 5)
    errs["circle rho"] = abs(est.rho_hat - 0.25)
    errs["circle dev"] = circle.max_deviation(lift, 0.1, 10 ** 5, 0.25)
    line = TrigPoly.constant(math.sqrt(2))
    est = apline.kwapisz_rho(line, 0.3, 10 ** 5)
    errs["line rho"] = abs(est.rho_hat - math.sqrt(2))
    prof = apline.line_deviation_profile(line, math.sqrt(2), [0.0, 0.3, 5.0], 10 ** 5)
    errs["line dev"] = prof.bound
    spec = ODESpec(apode.ZERO_FIELD, epsilon=0.3)
    rep = apode.boundedness_check(spec, CFG, 1000.0)
    errs["ode rho"] = abs(rep.rho.rho_hat - 0.3)
    errs["ode dev"] = rep.sup_abs_xi_minus_drift
    ok = (max(errs["circle rho"], errs["line rho"]) <= 1e-12
          and errs["ode rho"] <= 10 * CFG.tolerance
          and max(errs["circle dev"], errs["line dev"], errs["ode dev"]) <= 1e-12)
    record(1, ok, ", ".join(f"{k}={v:.2e}" for k, v in errs.items()))


def test_criterion_02_circle_deviation_bound():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for omega, K in zip(rng.random(20), rng.uniform(0.0, 0.95, 20)):
        lift = CircleLift.arnold(omega, K)
        rho = circle.rotation_number(lift, 0.0, 10 ** 7).rho_hat
        x0 = rng.random()
        worst = max(worst, circle.max_deviation(lift, x0, 10 ** 5, rho))
    record(2, worst <= 1 + 1e-3, f"worst max deviation {worst:.4f} over 20 Arnold maps (bound 1.001)")


def test_criterion_03_cocycle_identity():
    rng = np.random.default_rng(3)
    phi = TrigPoly.from_cycles(2.0, ((1.0, 0.3, 0.0), (math.sqrt(2), 0.3, 0.0)))
    discrete = {
        "circle": (CircleLift.arnold(0.3, 0.8), lambda: rng.random()),
        "skew": (SkewProductSystem.qpf_arnold(0.3, 0.8, 0.2), lambda: rng.random(2)),
        "ap-line": (LineMap(phi), lambda: rng.uniform(-10, 10)),
        "quasicrystal": (qc.induced_line_map(_delone_phi()), lambda: rng.uniform(-10, 10)),
    }
    worst = {}
    for name, (system, draw) in discrete.items():
        w = 0.0
        for _ in range(100):
            s, t = (int(v) for v in rng.integers(0, 1001, 2))
            w = max(w, float(core.check_cocycle_identity(system, draw(), s, t)))
        worst[name] = w
    flow = apode.TorusFlow(ODESpec(TWO_MODE), CFG)
    xs = rng.random((100, 4))
    st = rng.integers(0, 21, (100, 2))
    worst["ap-ode"] = max(float(core.check_cocycle_identity(flow, x, int(s), int(t)))
                          for x, (s, t) in zip(xs, st))
    ok = all(v <= 1e-9 for k, v in worst.items() if k != "ap-ode") and worst["ap-ode"] <= 10 * CFG.tolerance
    record(3, ok, ", ".join(f"{k}={v:.2e}" for k, v in worst.items()))


def test_criterion_04_coboundary_on_conjugates():
    T = 10 ** 5
    c = 0.1
    out = []
    ok = True
    lift = CircleLift.conjugate_rotation(GOLD, c)
    x = np.arange(32) / 32
    g = core.gamma_estimate(lift, x, GOLD, T)
    sup = float(np.max(np.abs(g.gamma_values - circle.sine_coboundary(x, c))))
    gfn = core.gamma_function(lift, GOLD, T)
    coh = float(np.max(core.cohomological_residual(lift, x[:8], GOLD, gfn, 7)))
    ok &= sup <= 1e-3 and coh <= 2 * g.convergence_delta
    out.append(f"circle sup={sup:.2e} coh={coh:.2e} delta={g.convergence_delta:.2e}")

    s = SkewProductSystem.fibered_conjugate(0.3, c)
    rng = np.random.default_rng(4)
    pts = rng.random((32, 2))
    g = core.gamma_estimate(s, pts, 0.3, T)
    sup = float(np.max(np.abs(g.gamma_values - skew.fibered_coboundary(pts, c))))
    gfn = core.gamma_function(s, 0.3, T)
    coh = float(np.max(core.cohomological_residual(s, pts[:8], 0.3, gfn, 7)))
    ok &= sup <= 1e-3 and coh <= 2 * g.convergence_delta
    out.append(f"skew sup={sup:.2e} coh={coh:.2e} delta={g.convergence_delta:.2e}")
    record(4, ok, "; ".join(out))


def test_criterion_05_semiconjugacy_decay():
    K = 0.5
    omega = circle.tune_omega_to_rho(K, GOLD, 1e-8)
    lift = CircleLift.arnold(omega, K)
    rho = circle.rotation_number(lift, 0.0, 10 ** 5, "weighted").rho_hat
    ok = abs(rho - GOLD) <= 1e-8
    res = {}
    for T in (10 ** 3, 10 ** 4, 10 ** 5):
        for TT in (T, 2 * T):
            if TT not in res:
                res[TT] = circle.circle_semiconjugacy(lift, rho, 64, TT).residual_sup
        ok &= res[2 * T] <= res[T]
    ok &= res[10 ** 5] <= 1e-2
    record(5, ok, "residuals " + ", ".join(f"T={k}:{v:.2e}" for k, v in sorted(res.items())))


def test_criterion_06_fibonacci_structure():
    rule = qc.SubstitutionRule.fibonacci()
    lengths = [len(qc.iterate_substitution(rule, "L", n)) for n in range(26)]
    rec = lengths[:2] == [1, 2] and all(lengths[n] == lengths[n - 1] + lengths[n - 2]
                                        for n in range(2, 26))
    freq = qc.letter_frequency(qc.iterate_substitution(rule, "L", 20), "L")
    freq_err = abs(freq - GOLD)
    X = qc.fibonacci_segment(20)
    gaps = set(np.round(np.diff(X.points), 9).tolist())
    alphabet_ok = gaps == {1.0, round((1 + math.sqrt(5)) / 2, 9)}
    anchors = [-8000.0, -4000.0, 0.0, 4000.0, 8000.0]
    spread = 0.0
    for P, _ in qc.patch_classes(X, 1.2, -50.0, 50.0):
        rep = qc.patch_frequency(X, P, 1000.0, anchors)
        spread = max(spread, rep.uniformity_spread)
    ok = rec and freq_err <= 1e-3 and alphabet_ok and spread <= 2e-3
    record(6, ok, f"recurrence={rec} L-freq err={freq_err:.2e} alphabet={sorted(gaps)} "
                  f"max patch spread={spread:.2e}")


def test_criterion_07_kwapisz_uniqueness():
    phi = TrigPoly.from_cycles(2.0, ((1.0, 0.3, 0.0), (math.sqrt(2), 0.3, 0.0)))
    # sum |a| lambda exceeds 1, so the monotonicity certificate is not
    # available; f' = 1 + phi' can be negative and the check is skipped
    starts = np.random.default_rng(7).uniform(-50, 50, 10)
    rhos = [apline.kwapisz_rho(phi, x0, 10 ** 6, check=False).rho_hat for x0 in starts]
    spread = float(np.ptp(rhos))
    record(7, spread <= 1e-4, f"spread {spread:.2e} over 10 starts, mean rho {np.mean(rhos):.8f}")


def test_criterion_08_independence_examples():
    v1 = apline.rational_independence(0.5, FrequencyModule((1.0,)), 10, 1e-12)
    v2 = apline.rational_independence(math.sqrt(2), FrequencyModule((1.0,)), 50, 1e-9)
    v3 = apline.rational_independence((1 + math.sqrt(2)) / 3,
                                      FrequencyModule((1.0, math.sqrt(2))), 10, 1e-9)
    ok = (v1.verdict == "dependent" and v1.witness == (2, (1,)) and v1.residual == 0
          and v2.verdict == "independent" and v2.search_bound == 50
          and v3.verdict == "dependent" and v3.witness == (3, (1, 1)))
    record(8, ok, f"0.5 vs {{1}}: {v1.verdict} {v1.witness}; sqrt2 vs {{1}}: {v2.verdict}"
                  f"({v2.search_bound}); (1+sqrt2)/3: {v3.verdict} {v3.witness}")


def test_criterion_09_integrator_order():
    order, _ = apode.convergence_order(ODESpec(TWO_MODE), 100.0, 0.1)
    record(9, 3.5 <= order <= 4.5, f"empirical order {order:.3f} (h=0.1, t=100)")


def test_criterion_10_section_consistency():
    spec = ODESpec(TWO_MODE)
    rng = np.random.default_rng(10)
    worst_ratio = 0.0
    for zeta in rng.random((3, 3)):
        z = apode.TorusState([0.0, zeta[0]], zeta[1:])
        for n in range(1, 21):
            y, tau = apode.poincare_map(spec, CFG, zeta, n)
            w = apode.torus_flow(spec, CFG, z, float(n))
            d = max(apode._torus_distance(y, np.concatenate([w.u[1:], w.v])),
                    abs(tau - w.accumulated_xi))
            worst_ratio = max(worst_ratio, d / (10 * n * CFG.tolerance))
    record(10, worst_ratio <= 1, f"max discrepancy / (10 n tol) = {worst_ratio:.2e} for n <= 20")


def test_criterion_11_eps_scan():
    grid = np.linspace(0.0, 0.5, 101)
    zero = apode.epsilon_scan(ODESpec(apode.ZERO_FIELD), CFG, grid, 50.0)
    err0 = float(np.max(np.abs(zero.rho() - grid)))
    field = TorusFourierField((((1, 0, 1, 0), 0.3, 0.0), ((0, 1, 1, 0), 0.2, 0.5)))
    res = apode.epsilon_scan(ODESpec(field, beta=(1.0, 0.0)), CFG, grid, 200.0)
    rho = res.rho()
    gap = np.array([r.cauchy_gap for r in res.rows])
    g = np.maximum(gap[:-1], gap[1:])
    drops = rho[:-1] - rho[1:] - 2 * g
    ok = err0 <= 1e-12 and bool(np.all(drops <= 0)) and not any(r.blowup_flag for r in res.rows)
    record(11, ok, f"F=0 max|rho-eps|={err0:.1e}; beta2=0 worst drop beyond 2 gap "
                   f"{max(float(drops.max()), 0.0):.1e}, min step {np.diff(rho).min():.2e}")


def test_criterion_12_drift_detection():
    slopes = {}
    lift = CircleLift.arnold(0.3, 0.8)
    rho = circle.rotation_number(lift, 0.0, 10 ** 6).rho_hat
    tr = core.accumulate_trace(lift, np.array([0.0, 0.5]), 10 ** 5, "geometric")
    slopes["circle"] = core.deviation_profile(tr, rho + 0.05)
    s = SkewProductSystem.qpf_arnold(0.3, 0.8, 0.2)
    rho = skew.fiber_rotation_number(s, np.zeros(2), 10 ** 6).rho_hat
    slopes["skew"] = skew.bmm_test(s, rho + 0.05, 10 ** 5)
    phi = TrigPoly.from_cycles(2.0, ((1.0, 0.05, 0.0), (math.sqrt(2), 0.05, 0.3)))
    rho = apline.kwapisz_rho(phi, 0.0, 10 ** 5, "weighted").rho_hat
    slopes["ap-line"] = apline.line_deviation_profile(phi, rho + 0.05, [0.0, 3.0], 10 ** 5)
    fmap = qc.induced_line_map(_delone_phi())
    rho = qc.delone_rho(fmap, 0.0, 5000).rho_hat
    slopes["quasicrystal"] = qc.delone_deviation_profile(fmap, rho + 0.05, [0.0, 7.0], 5000)
    rep = apode.boundedness_check(ODESpec(TWO_MODE), CFG, 2000.0)
    slopes["ap-ode"] = apode.boundedness_check(ODESpec(TWO_MODE), CFG, 2000.0,
                                              rho=rep.rho.rho_hat + 0.05).profile
    ok = all(p.classification == "unbounded" and 0.9 <= p.loglog_slope <= 1.1
             for p in slopes.values())
    record(12, ok, ", ".join(f"{k}: {p.classification} {p.loglog_slope:.3f}" for k, p in slopes.items()))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
