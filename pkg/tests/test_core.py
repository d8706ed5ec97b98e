import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from foliation_lab import core
from foliation_lab.circle import CircleLift
from foliation_lab.apline import LineMap, TrigPoly
from foliation_lab.errors import InvalidTraceError, NumericOverflowError

rigid = CircleLift.rigid(0.25)
arnold = CircleLift.arnold(0.3, 0.9)


def test_time_domain():
    assert core.DISCRETE.steps(7) == 7
    cont = core.TimeDomain("continuous", 0.5)
    assert cont.steps(3.0) == 6
    with pytest.raises(ValueError):
        cont.steps(0.7)
    with pytest.raises(ValueError):
        core.TimeDomain("continuous", 0.0)
    with pytest.raises(ValueError):
        core.DISCRETE.steps(-1)


def test_evolve_rigid():
    y, tau = core.flow(rigid, 0.0, 4)
    assert float(y) % 1.0 == 0.0 and tau == 1.0


def test_flow_identity():
    assert float(core.evolve(arnold, 0.37, 0)) == 0.37
    assert float(core.cocycle(arnold, 0.37, 0)) == 0.0


def test_evolve_arnold_against_direct_iteration():
    x = 0.1
    for _ in range(10):
        x = x + 0.3 + 0.9 / (2 * math.pi) * math.sin(2 * math.pi * x)
    y, tau = core.flow(arnold, 0.1, 10)
    assert abs(float(tau) - (x - 0.1)) < 1e-12
    assert abs(float(y) - x % 1.0) < 1e-12


class _Blowup(core.FoliatedSystem):
    def leaf_translate(self, x, s):
        return np.asarray(x) + s

    def transversal(self, x, t):
        return np.asarray(x)

    def translation(self, x):
        return np.exp(np.asarray(x, dtype=float))


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_overflow_reports_step():
    with pytest.raises(NumericOverflowError) as e:
        core.evolve(_Blowup(), 1.0, 50)
    assert e.value.step is not None and e.value.step <= 50


def test_trace_rigid_linear():
    tr = core.accumulate_trace(rigid, 0.0, 100)
    assert np.array_equal(tr.tau_values, 0.25 * tr.times)
    assert tr.times[0] == 0 and tr.horizon == 100


def test_trace_constant_line():
    tr = core.accumulate_trace(LineMap(TrigPoly.constant(1.0)), 0.0, 50)
    assert np.array_equal(tr.tau_values, np.arange(51.0))


def test_trace_arnold_direct_summation():
    tr = core.accumulate_trace(arnold, 0.1, 10 ** 5, "geometric")
    x, s, c = 0.1, 0.0, 0.0
    for _ in range(10 ** 5):
        d = 0.3 + 0.9 / (2 * math.pi) * math.sin(2 * math.pi * x)
        y = d - c
        t = s + y
        c = (t - s) - y
        s = t
        x = (x + d) % 1.0
    assert abs(tr.tau_values[-1] - s) < 1e-8


def test_trace_validation():
    with pytest.raises(InvalidTraceError):
        core.accumulate_trace(rigid, 0.0, 0)
    with pytest.raises(InvalidTraceError):
        core.CocycleTrace(0.0, np.array([0.0, 2.0, 1.0]), np.zeros(3))


def test_estimate_rho():
    tr = core.accumulate_trace(rigid, 0.0, 64)
    for m in ("endpoint", "cesaro", "weighted"):
        est = core.estimate_rho(tr, m)
        assert abs(est.rho_hat - 0.25) < 1e-15 and est.cauchy_gap < 1e-15
    fixed = CircleLift.arnold(0.0, 0.5)
    assert core.estimate_rho(core.accumulate_trace(fixed, 0.0, 100)).rho_hat == 0.0
    with pytest.raises(InvalidTraceError):
        core.estimate_rho(core.CocycleTrace(0.0, np.array([0.0]), np.array([0.0])))


def test_estimate_rho_kwapisz_sin(oracle):
    s2 = math.sqrt(2)
    phi = TrigPoly.from_cycles(2.0, [(1, 0.3, -math.pi / 2), (s2, 0.3, -math.pi / 2)])
    tr = core.accumulate_trace(LineMap(phi), 0.0, 2 * 10 ** 4, "geometric")
    assert abs(core.estimate_rho(tr).rho_hat - oracle["kwapisz_sin_1e7"]) < 1e-4


def test_deviation_profile_rigid_and_drift():
    tr = core.accumulate_trace(rigid, np.linspace(0, 1, 4), 1024)
    p = core.deviation_profile(tr, 0.25)
    assert p.bound == 0 and p.classification == "bounded"
    p = core.deviation_profile(tr, 0.35)
    assert p.classification == "unbounded"
    assert abs(p.bound - 0.1 * 1024) < 1e-9
    assert np.all(np.diff(p.deviations) >= 0)


def test_deviation_profile_circle_bounded_by_one():
    tr = core.accumulate_trace(arnold, np.linspace(0, 1, 8, endpoint=False), 4096)
    from foliation_lab.circle import rotation_number
    rho = rotation_number(arnold, 0.0, 10 ** 6).rho_hat
    assert core.deviation_profile(tr, rho).bound <= 1 + 1e-3


def test_classify_slope():
    assert core.classify_slope(0.01) == "bounded"
    assert core.classify_slope(0.5) == "unbounded"
    assert core.classify_slope(0.1) == "inconclusive"
    assert core.classify_slope(float("nan")) == "inconclusive"


def test_gamma_rigid_zero():
    g = core.gamma_estimate(rigid, np.linspace(0, 1, 5), 0.25, 100)
    assert np.all(g.gamma_values == 0) and g.convergence_delta == 0


def test_gamma_monotone_in_T():
    x = np.linspace(0, 1, 6)
    rho = 0.3
    vals = [core.estimate_gamma(arnold, x, rho, 10, T) for T in (100, 200, 400)]
    assert np.all(vals[1] >= vals[0]) and np.all(vals[2] >= vals[1])
    with pytest.raises(ValueError):
        core.estimate_gamma(arnold, x, rho, 10, 5)


def test_gamma_generic_path_matches_kernel():
    # the same estimate through the python step loop
    class Slow(CircleLift):
        _fast_running_gamma = None
    slow = Slow(arnold.displacement, "custom", ())
    x = np.linspace(0, 1, 5, endpoint=False)
    a = core.gamma_estimate(arnold, x, 0.31, 400)
    b = core.gamma_estimate(slow, x, 0.31, 400)
    assert np.max(np.abs(a.gamma_values - b.gamma_values)) < 1e-12
    assert abs(a.convergence_delta - b.convergence_delta) < 1e-12


def test_semiconjugacy_rigid_zero():
    rep = core.semiconjugacy_residual(rigid, 0.25, lambda x: np.zeros(np.shape(x)),
                                      np.linspace(0, 1, 7), [1, 3])
    assert rep.residual_sup == 0 and rep.t_tested == (1, 3)


def test_semiconjugacy_identity_equals_deviation():
    # with gamma = 0, h is the identity and the residual is |tau_t - t rho| mod 1
    x = np.linspace(0, 1, 9, endpoint=False)
    rho = 0.3
    rep = core.semiconjugacy_residual(arnold, rho, lambda p: np.zeros(np.shape(p)), x, 1)
    d = np.abs(core.cocycle(arnold, x, 1) - rho)
    assert np.allclose(rep.residuals, np.minimum(d % 1, 1 - d % 1), atol=1e-14)
    with pytest.raises(ValueError):
        core.semiconjugacy_residual(arnold, rho, lambda p: p, np.array([]), 1)


def test_structural_checks_rigid():
    assert core.check_cocycle_identity(rigid, 0.1, 0, 0) == 0
    assert core.check_cocycle_identity(rigid, 0.1, 5, 9) == 0
    assert core.check_commutation(rigid, 0.3, 2, 0.7) == 0
    assert core.check_leaf_group_law(rigid, 0.3, 0.2, 0.5) < 1e-15
    assert core.check_order_preservation(rigid, 0.3, [0, 0.1, 0.5]) == 0.0


def test_order_preservation():
    grid = np.linspace(0, 1, 2001)
    ts = np.linspace(0, 1, 101)
    assert core.check_order_preservation(arnold, grid, ts) >= -1e-12
    fold = CircleLift.custom(lambda x: 2 * np.sin(2 * np.pi * x) / np.pi, check=False)
    assert core.check_order_preservation(fold, grid, ts) < 0


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 1), st.integers(0, 300), st.integers(0, 300))
def test_cocycle_identity_property(x, s, t):
    assert core.check_cocycle_identity(arnold, x, s, t) <= 1e-9


def test_gamma_order_slack():
    # t + gamma(x . t) - gamma(x) >= -2 delta on sampled leaf offsets
    from foliation_lab.circle import rotation_number
    lift = CircleLift.arnold(0.1, 0.6)
    rho = rotation_number(lift, 0.0, 10 ** 5, "weighted").rho_hat
    x = np.linspace(0, 1, 32, endpoint=False)
    g = core.gamma_estimate(lift, x, rho, 2 * 10 ** 4)
    for t in (0.05, 0.2, 0.5):
        gt = core.estimate_gamma(lift, (x + t) % 1.0, rho, g.burn_in_T0, g.horizon_T)
        assert np.min(t + gt - g.gamma_values) >= -2 * g.convergence_delta - 1e-12
