"""Scalar ODEs ``x' = F(t alpha, x beta) + eps`` with ``F`` a Fourier sum on ``T^4``.

The solution from the phase ``z = (u, v)`` is ``xi(t)``, the solution of
``xi' = F(u + t alpha, v + xi beta) + eps`` with ``xi(0) = 0``.  This gives
the torus flow ``Phi_t(u, v) = (u + t alpha, v + xi(t) beta)`` with
translation cocycle ``tau_t(z) = xi(t)``, and the time-1 section map
``Psi(theta, xi) = (theta + alpha_1, xi + tau_1(0, theta, xi) beta)`` on
``T^3``.

Integration is classical fixed-step RK4 in numba; independent
trajectories release the GIL so scans can run on a thread pool.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from numba import njit

from . import core
from .core import FoliatedSystem, TimeDomain, TranslationEstimate
from .errors import BlowUpError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TorusFourierField:
    """``F(w) = sum a_k cos(2 pi k . w + theta_k)`` for ``w`` in ``T^4``."""

    modes: tuple = ()

    def __post_init__(self):
        modes = []
        for k, a, th in self.modes:
            k = tuple(int(v) for v in k)
            if len(k) != 4:
                raise ValueError("mode vectors must have four integer entries")
            modes.append((k, float(a), float(th)))
        object.__setattr__(self, "modes", tuple(modes))

    @property
    def K(self):
        return np.array([m[0] for m in self.modes], dtype=float).reshape(-1, 4)

    @property
    def amps(self):
        return np.array([m[1] for m in self.modes], dtype=float)

    @property
    def phases(self):
        return np.array([m[2] for m in self.modes], dtype=float)

    @property
    def lipschitz_bound(self) -> float:
        if not self.modes:
            return 0.0
        return float(np.sum(np.abs(self.amps) * TWO_PI * np.max(np.abs(self.K), axis=1)))

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        out = np.zeros(w.shape[:-1])
        for k, a, th in self.modes:
            out = out + a * np.cos(TWO_PI * (w @ np.array(k, dtype=float)) + th)
        return out


ZERO_FIELD = TorusFourierField(())


@dataclass(frozen=True)
class ODESpec:
    field: TorusFourierField
    alpha: tuple = (1.0, (math.sqrt(5) - 1) / 2)
    beta: tuple = (math.sqrt(2), math.sqrt(3))
    epsilon: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))
        if len(self.alpha) != 2 or len(self.beta) != 2:
            raise ValueError("alpha and beta must have two entries")

    def f(self, t, x):
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        w = np.stack(np.broadcast_arrays(t * self.alpha[0], t * self.alpha[1],
                                         x * self.beta[0], x * self.beta[1]), axis=-1)
        return self.field(w) + self.epsilon

    def with_epsilon(self, eps):
        return replace(self, epsilon=float(eps))

    def screen(self, K=20, tol=1e-9):
        """Screen ``(1, alpha_1, beta_1, beta_2)`` for integer relations.

        A zero entry is skipped (it is a degenerate reduction, not a
        relation of interest).  Returns the first non-independent verdict or
        the last independent one.
        """
        from .apline import FrequencyModule, rational_independence
        gens = [1.0]
        verdict = None
        for v in (self.alpha[1], self.beta[0], self.beta[1]):
            if v == 0:
                continue
            verdict = rational_independence(abs(v), FrequencyModule(tuple(gens), False), K, tol)
            if verdict.verdict != "independent":
                return verdict
            gens.append(abs(v))
        return verdict

    def _kernel_data(self):
        K = self.field.K
        a = self.field.amps
        return (np.ascontiguousarray(K), np.ascontiguousarray(a),
                np.ascontiguousarray(self.field.phases),
                np.ascontiguousarray(TWO_PI * (K[:, :2] @ np.array(self.alpha))),
                np.ascontiguousarray(TWO_PI * (K[:, 2:] @ np.array(self.beta))))


@dataclass(frozen=True)
class IntegratorConfig:
    h: float = 1e-3
    tolerance: float = 1e-9

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("step h must be positive")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")

    def steps(self, t):
        return max(1, int(round(t / self.h))) if t > 0 else 0


# ---------------------------------------------------------------------------
# kernels


@njit(cache=True, nogil=True, inline="always")
def _rhs(ph0, amp, wt, wx, eps, s, x):
    acc = eps
    for i in range(amp.shape[0]):
        acc += amp[i] * np.cos(ph0[i] + wt[i] * s + wx[i] * x)
    return acc


@njit(cache=True, nogil=True)
def _rk4(ph0, amp, wt, wx, eps, xi0, t, n, rec_every):
    """Integrate from ``xi0`` over ``[0, t]`` with ``n`` equal steps.

    Returns ``(xi(t), samples, fail_step)`` where ``samples`` holds xi at
    every ``rec_every``-th step (if ``rec_every > 0``) and ``fail_step`` is
    the first step with a non-finite value or -1.
    """
    h = t / n
    nrec = n // rec_every if rec_every > 0 else 0
    rec = np.empty(nrec)
    x = xi0
    comp = 0.0
    q = 0
    for k in range(n):
        s = k * h
        k1 = _rhs(ph0, amp, wt, wx, eps, s, x)
        k2 = _rhs(ph0, amp, wt, wx, eps, s + 0.5 * h, x + 0.5 * h * k1)
        k3 = _rhs(ph0, amp, wt, wx, eps, s + 0.5 * h, x + 0.5 * h * k2)
        k4 = _rhs(ph0, amp, wt, wx, eps, s + h, x + h * k3)
        dx = h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.isfinite(dx):
            return x, rec, k + 1
        y = dx - comp
        tt = x + y
        comp = (tt - x) - y
        x = tt
        if rec_every > 0 and (k + 1) % rec_every == 0:
            rec[q] = x
            q += 1
    return x, rec, -1


@njit(cache=True, nogil=True)
def _rk4_batch(K, amp, th, wt, wx, eps, U, V, t, n):
    # tau_t(z) for each row z = (u, v) of U, V; the phase of every mode at
    # s = 0 is 2 pi k . (u, v) + theta
    m = U.shape[0]
    out = np.empty(m)
    fail = -1
    ph0 = np.empty(amp.shape[0])
    dummy = 0
    for j in range(m):
        for i in range(amp.shape[0]):
            ph0[i] = th[i] + 2.0 * np.pi * (K[i, 0] * U[j, 0] + K[i, 1] * U[j, 1]
                                           + K[i, 2] * V[j, 0] + K[i, 3] * V[j, 1])
        x, rec, f = _rk4(ph0, amp, wt, wx, eps, 0.0, t, n, dummy)
        out[j] = x
        if f >= 0 and fail < 0:
            fail = f
    return out, fail


def _phases0(spec: ODESpec, u, v):
    K, amp, th, _, _ = spec._kernel_data()
    w = np.concatenate([np.asarray(u, float), np.asarray(v, float)])
    return np.ascontiguousarray(th + TWO_PI * (K @ w))


def _solve(spec, xi0, t, n, rec_every=0, u=(0.0, 0.0), v=(0.0, 0.0)):
    _, amp, _, wt, wx = spec._kernel_data()
    x, rec, fail = _rk4(_phases0(spec, u, v), amp, wt, wx, spec.epsilon, float(xi0),
                        float(t), int(n), int(rec_every))
    if fail >= 0:
        h = t / n
        raise BlowUpError(f"non-finite solution at step {fail} (t={fail * h:.6g})",
                          step=fail, time=fail * h)
    return x, rec


@dataclass(frozen=True)
class XiSolution:
    xi: float
    halving_error: float | None
    flagged: bool

    def __float__(self):
        return self.xi


def integrate_xi(spec: ODESpec, cfg: IntegratorConfig, t, x0=0.0, validate=True) -> XiSolution:
    """Solve ``x' = f(t, x)``, ``x(0) = x0`` up to time ``t``.

    With ``validate`` the solution is recomputed at step ``h/2`` and
    ``flagged`` is set when ``|xi_h - xi_{h/2}| > tolerance (1 + t)``.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return XiSolution(float(x0), 0.0, False)
    n = cfg.steps(t)
    x, _ = _solve(spec, x0, t, n)
    if not validate:
        return XiSolution(float(x), None, False)
    x2, _ = _solve(spec, x0, t, 2 * n)
    err = abs(x - x2)
    return XiSolution(float(x), float(err), bool(err > cfg.tolerance * (1 + t)))


def convergence_order(spec: ODESpec, t, h, x0=0.0):
    """``log2(|xi_h - xi_{h/2}| / |xi_{h/2} - xi_{h/4}|)`` and the three solutions."""
    xs = [_solve(spec, x0, t, max(1, int(round(t / hh))))[0] for hh in (h, h / 2, h / 4)]
    return math.log2(abs(xs[0] - xs[1]) / abs(xs[1] - xs[2])), xs


# ---------------------------------------------------------------------------
# torus flow and section map


@dataclass(frozen=True)
class TorusState:
    u: np.ndarray
    v: np.ndarray
    accumulated_xi: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "u", np.mod(np.asarray(self.u, dtype=float), 1.0))
        object.__setattr__(self, "v", np.mod(np.asarray(self.v, dtype=float), 1.0))
        if not np.isfinite(self.accumulated_xi):
            raise ValueError("accumulated_xi must be finite")

    def as_array(self):
        return np.concatenate([self.u, self.v])


def torus_flow(spec: ODESpec, cfg: IntegratorConfig, z: TorusState, t) -> TorusState:
    """``(u + t alpha, v + tau_t(z) beta)`` with ``tau_t(z) = xi(t)`` from phase ``z``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return z
    tau, _ = _solve(spec, 0.0, t, cfg.steps(t), u=z.u, v=z.v)
    a, b = np.array(spec.alpha), np.array(spec.beta)
    return TorusState(z.u + t * a, z.v + tau * b, z.accumulated_xi + tau)


def _torus_distance(x, y):
    d = np.mod(np.asarray(x, dtype=float) - np.asarray(y, dtype=float), 1.0)
    d = np.minimum(d, 1.0 - d)
    return np.sqrt(np.sum(d * d, axis=-1))


@dataclass(frozen=True, eq=False)
class TorusFlow(FoliatedSystem):
    """The flow on ``T^4`` sampled at unit time.

    States are arrays ``(..., 4)`` holding ``(u_1, u_2, v_1, v_2)``.  Leaves
    are the lines ``v + s beta``, the transversal action is
    ``u -> u + t alpha``.
    """

    spec: ODESpec
    cfg: IntegratorConfig = IntegratorConfig()
    time_domain: TimeDomain = TimeDomain("continuous", 1.0)

    def leaf_translate(self, x, s):
        x = np.array(x, dtype=float)
        x[..., 2:] = np.mod(x[..., 2:] + np.multiply.outer(s, self.spec.beta), 1.0)
        return x

    def transversal(self, x, t):
        x = np.array(x, dtype=float)
        x[..., :2] = np.mod(x[..., :2] + t * np.array(self.spec.alpha), 1.0)
        return x

    def translation(self, x):
        return self.tau(x, self.time_domain.sample_step)

    def tau(self, x, t):
        x = np.asarray(x, dtype=float)
        flat = np.ascontiguousarray(x.reshape(-1, 4))
        K, amp, th, wt, wx = self.spec._kernel_data()
        out, fail = _rk4_batch(K, amp, th, wt, wx, self.spec.epsilon,
                               np.ascontiguousarray(flat[:, :2]), np.ascontiguousarray(flat[:, 2:]),
                               float(t), self.cfg.steps(t))
        if fail >= 0:
            h = t / self.cfg.steps(t)
            raise BlowUpError(f"non-finite solution at step {fail}", step=fail, time=fail * h)
        return out.reshape(x.shape[:-1])

    def distance(self, x, y):
        return _torus_distance(x, y)


@dataclass(frozen=True, eq=False)
class SectionMap(FoliatedSystem):
    """The section map ``Psi`` on ``T^3`` with states ``(theta, xi_1, xi_2)``."""

    spec: ODESpec
    cfg: IntegratorConfig = IntegratorConfig()

    def __post_init__(self):
        if self.spec.alpha[0] != 1.0:
            raise ValueError("the section map needs alpha = (1, alpha_1)")

    def _lift(self, x):
        x = np.asarray(x, dtype=float)
        return np.concatenate([np.zeros(x.shape[:-1] + (1,)), x], axis=-1)

    def leaf_translate(self, x, s):
        x = np.array(x, dtype=float)
        x[..., 1:] = np.mod(x[..., 1:] + np.multiply.outer(s, self.spec.beta), 1.0)
        return x

    def transversal(self, x, t):
        x = np.array(x, dtype=float)
        x[..., 0] = np.mod(x[..., 0] + t * self.spec.alpha[1], 1.0)
        return x

    def translation(self, x):
        return TorusFlow(self.spec, self.cfg).tau(self._lift(x), 1.0)

    def distance(self, x, y):
        return _torus_distance(x, y)


def poincare_map(spec: ODESpec, cfg: IntegratorConfig, zeta, n=1):
    """``Psi^n(theta, xi_1, xi_2)``; also returns the accumulated cocycle."""
    psi = SectionMap(spec, cfg)
    return core.flow(psi, np.asarray(zeta, dtype=float), n)


# ---------------------------------------------------------------------------
# boundedness and scans


@dataclass(frozen=True)
class BoundednessReport:
    rho: TranslationEstimate
    sup_abs_xi_minus_drift: float
    sup_abs_xi: float
    classification: str
    xi_classification: str
    profile: core.DeviationProfile = field(repr=False)
    xi_profile: core.DeviationProfile = field(repr=False)


def _rho_from_samples(times, xi, x0):
    trace = core.CocycleTrace(np.array(x0), np.concatenate([[0.0], times]),
                              np.concatenate([[0.0], xi - x0]))
    return core.estimate_rho(trace, "weighted")


def boundedness_check(spec: ODESpec, cfg: IntegratorConfig, horizon, x0=0.0,
                      sample_dt=None, rho=None) -> BoundednessReport:
    """Deviation diagnostics of ``xi(t) - t rho`` and of ``xi(t)`` itself.

    ``xi`` is sampled every ``sample_dt`` (default ``10 h``).  ``rho``
    defaults to the weighted estimate from the same trajectory.
    """
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    n = cfg.steps(horizon)
    h = horizon / n
    every = max(1, int(round((sample_dt or 10 * cfg.h) / h)))
    _, rec = _solve(spec, x0, horizon, n, every)
    times = h * every * np.arange(1, len(rec) + 1)
    est = _rho_from_samples(times, rec, x0)
    r = est.rho_hat if rho is None else float(rho)
    t_all = np.concatenate([[0.0], times])
    dev = np.abs(np.concatenate([[x0], rec]) - t_all * r)
    raw = np.abs(np.concatenate([[x0], rec]))
    prof = core.profile_from_deviations(t_all, dev)
    raw_prof = core.profile_from_deviations(t_all, raw)
    return BoundednessReport(est, float(dev.max()), float(raw.max()),
                             prof.classification, raw_prof.classification, prof, raw_prof)


@dataclass(frozen=True)
class ScanRow:
    epsilon: float
    rho_hat: float
    cauchy_gap: float
    deviation_max: float
    blowup_flag: bool


@dataclass(frozen=True)
class ScanResult:
    rows: tuple
    monotone_flags: tuple
    monotone: bool
    plateaus: tuple

    def rho(self):
        return np.array([r.rho_hat for r in self.rows])


def _scan_point(spec, cfg, eps, horizon, x0):
    try:
        rep = boundedness_check(spec.with_epsilon(eps), cfg, horizon, x0)
    except BlowUpError:
        return ScanRow(float(eps), math.nan, math.nan, math.nan, True)
    return ScanRow(float(eps), rep.rho.rho_hat, rep.rho.cauchy_gap,
                   rep.sup_abs_xi_minus_drift, False)


def default_threads():
    try:
        return max(1, int(os.environ.get("FOLIATION_LAB_THREADS", "1")))
    except ValueError:
        return 1


def epsilon_scan(spec: ODESpec, cfg: IntegratorConfig, eps_grid, horizon, x0=0.0,
                 threads=None, abs_tol=1e-12) -> ScanResult:
    """Rotation number of the family ``x' = F + eps`` over a sorted ``eps_grid``.

    Adjacent points are flagged monotone when ``rho_{i+1} >= rho_i - 2 g``
    with ``g`` the larger Cauchy gap (plus ``abs_tol``).  Plateaus are the
    maximal runs of at least two points whose estimates all lie within
    twice the largest gap of the run.  The table is exploratory data; it
    does not decide whether the family mode-locks.
    """
    eps_grid = np.asarray(eps_grid, dtype=float)
    if np.any(np.diff(eps_grid) < 0):
        raise ValueError("eps_grid must be sorted")
    threads = default_threads() if threads is None else max(1, int(threads))
    if threads == 1:
        rows = [_scan_point(spec, cfg, e, horizon, x0) for e in eps_grid]
    else:
        with ThreadPoolExecutor(threads) as ex:
            rows = list(ex.map(lambda e: _scan_point(spec, cfg, e, horizon, x0), eps_grid))
    rho = np.array([r.rho_hat for r in rows])
    gap = np.array([r.cauchy_gap for r in rows])
    flags = []
    for i in range(len(rows) - 1):
        g = max(gap[i], gap[i + 1])
        flags.append(bool(rho[i + 1] >= rho[i] - 2 * g - abs_tol))
    plateaus = []
    i = 0
    while i < len(rows):
        j = i
        while j + 1 < len(rows):
            seg = rho[i:j + 2]
            if not np.all(np.isfinite(seg)):
                break
            if np.ptp(seg) <= 2 * np.max(gap[i:j + 2]):
                j += 1
            else:
                break
        if j > i:
            plateaus.append((i, j))
        i = j + 1
    return ScanResult(tuple(rows), tuple(flags), all(flags), tuple(plateaus))
