"""Generic engine for flows of the form ``Phi_t(x) = omega_t(x) . tau_t(x)``.

A system is described by three pieces of data: a leaf flow ``x . s``
(``leaf_translate``), a transversal action ``omega_t`` commuting with it
(``transversal``) and a translation function ``tau`` giving the leafwise
displacement over one sample step (``translation``).  Everything in this
module only talks to a system through that interface, so the estimators
below work unchanged for circle maps, skew products, line maps, Delone
set dynamics and ODE flows.

States are numpy arrays.  Scalar-state systems (circle, line) accept arrays
of any shape and treat every entry as an independent state; vector-state
systems use the last axis for the coordinates.  All orbit computations are
vectorised over the batch.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidTraceError, NumericOverflowError

ZERO_TOL = 1e-12
DISCRETE_TOL = 1e-9


@dataclass(frozen=True)
class TimeDomain:
    kind: str = "discrete"
    sample_step: float = 1.0

    def __post_init__(self):
        if self.kind not in ("discrete", "continuous"):
            raise ValueError(f"unknown time domain kind {self.kind!r}")
        if not self.sample_step > 0:
            raise ValueError("sample_step must be positive")
        if self.kind == "discrete" and self.sample_step != 1.0:
            raise ValueError("discrete time has sample_step 1")

    def steps(self, t) -> int:
        """Number of sample steps making up time ``t``."""
        if t < 0:
            raise ValueError(f"time must be nonnegative, got {t}")
        n = t / self.sample_step
        k = round(n)
        if abs(n - k) > 1e-9 * max(1.0, abs(n)):
            raise ValueError(
                f"time {t} is not a multiple of the sample step {self.sample_step}")
        return int(k)


DISCRETE = TimeDomain()


class FoliatedSystem(ABC):
    """Interface of a foliation-preserving flow.

    Subclasses implement ``leaf_translate``, ``transversal`` and
    ``translation``; ``distance`` defaults to the absolute difference,
    which is right for states on the real line.
    """

    time_domain: TimeDomain = DISCRETE

    @abstractmethod
    def leaf_translate(self, x, s):
        """Leaf flow ``x . s``."""

    @abstractmethod
    def transversal(self, x, t):
        """Transversal action ``omega_t(x)``."""

    @abstractmethod
    def translation(self, x):
        """Leafwise displacement ``tau`` over one sample step."""

    def distance(self, x, y):
        return np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))

    def step(self, x):
        """One sample step; returns ``(Phi_h(x), tau_h(x))``."""
        tau = self.translation(x)
        y = self.leaf_translate(self.transversal(x, self.time_domain.sample_step), tau)
        return y, tau


class _Accumulator:
    """Vectorised compensated (Neumaier) summation."""

    def __init__(self):
        self.total = 0.0
        self.comp = 0.0

    def add(self, v):
        t = self.total + v
        big = np.abs(self.total) >= np.abs(v)
        self.comp = self.comp + np.where(big, (self.total - t) + v, (v - t) + self.total)
        self.total = t

    @property
    def value(self):
        return self.total + self.comp


def _orbit(system: FoliatedSystem, x, n_steps: int):
    """Yield ``(k, Phi_k(x), dtau_k, tau_k(x))`` for k = 1..n_steps.

    ``dtau_k`` is the one-step translation from ``Phi_{k-1}(x)``; the
    cocycle is accumulated incrementally (compensated), i.e. by the identity
    ``tau_{s+t}(x) = tau_s(Phi_t(x)) + tau_t(x)``.
    """
    h = system.time_domain.sample_step
    state = np.asarray(x, dtype=float)
    acc = _Accumulator()
    for k in range(1, n_steps + 1):
        state, dtau = system.step(state)
        acc.add(dtau)
        tau = acc.value
        if not (np.all(np.isfinite(tau)) and np.all(np.isfinite(state))):
            raise NumericOverflowError(
                f"non-finite state at step {k} (t={k * h})", step=k, time=k * h)
        yield k, state, dtau, tau


def flow(system: FoliatedSystem, x, t):
    """Return ``(Phi_t(x), tau_t(x))``."""
    n = system.time_domain.steps(t)
    state = np.array(x, dtype=float)
    tau = np.zeros(np.shape(system.translation(state))) if n == 0 else 0.0
    for _, state, _, tau in _orbit(system, state, n):
        pass
    return state, tau


def evolve(system: FoliatedSystem, x, t):
    """``Phi_t(x) = omega_t(x) . tau_t(x)`` by chaining one-step evolutions."""
    return flow(system, x, t)[0]


def cocycle(system: FoliatedSystem, x, t):
    """The translation cocycle ``tau_t(x)``."""
    return flow(system, x, t)[1]


def translation_flow(system: FoliatedSystem, x, rho, t):
    """The rigid model ``T^rho_t(x) = omega_t(x) . t rho``."""
    return system.leaf_translate(system.transversal(x, t), t * rho)


# --------------------------------------------------------------------------
# traces and translation numbers


@dataclass(frozen=True)
class CocycleTrace:
    """Sampled values of ``tau_t(base_point)``.

    ``tau_values[k]`` belongs to ``times[k]``; for a batch of base points
    the trailing axes of ``tau_values`` index the batch.  The first sample
    is always ``t = 0`` with ``tau = 0``.
    """

    base_point: np.ndarray
    times: np.ndarray
    tau_values: np.ndarray

    def __post_init__(self):
        if len(self.times) != len(self.tau_values):
            raise InvalidTraceError("times and tau_values differ in length")
        if len(self.times) > 1 and np.any(np.diff(self.times) <= 0):
            raise InvalidTraceError("times must be strictly increasing")

    @property
    def horizon(self) -> float:
        return float(self.times[-1]) if len(self.times) else 0.0


def _record_steps(n, sampling, stride, ratio):
    if sampling == "linear":
        ks = np.arange(stride, n + 1, stride)
    elif sampling == "geometric":
        if ratio <= 1:
            raise ValueError("geometric ratio must exceed 1")
        count = int(math.floor(math.log(n) / math.log(ratio))) + 1 if n >= 1 else 0
        ks = np.unique(np.ceil(ratio ** np.arange(count)).astype(np.int64))
        ks = ks[ks <= n]
    else:
        raise ValueError(f"unknown sampling {sampling!r}")
    if len(ks) == 0 or ks[-1] != n:
        ks = np.append(ks, n)
    return ks


def accumulate_trace(system: FoliatedSystem, x, horizon, sampling="linear",
                     stride=1, ratio=2.0) -> CocycleTrace:
    """Integrate the cocycle up to ``horizon`` and record it.

    ``sampling`` is ``"linear"`` (every ``stride`` sample steps) or
    ``"geometric"`` (steps ``ceil(ratio**j)``).  The horizon itself is
    always recorded.
    """
    if not horizon > 0:
        raise InvalidTraceError("horizon must be positive")
    h = system.time_domain.sample_step
    n = system.time_domain.steps(horizon)
    ks = _record_steps(n, sampling, int(stride), ratio)
    x = np.asarray(x, dtype=float)
    batch = np.shape(system.translation(x))
    taus = np.zeros((len(ks) + 1,) + batch)
    j = 0
    for k, _, _, tau in _orbit(system, x, n):
        if k == ks[j]:
            j += 1
            taus[j] = tau
    times = np.concatenate([[0.0], ks * h])
    return CocycleTrace(base_point=x, times=times, tau_values=taus)


@dataclass(frozen=True)
class TranslationEstimate:
    rho_hat: float
    cauchy_gap: float
    horizon_T: float
    method: str = "endpoint"


def _weights(m):
    # smooth bump exp(-1/(s(1-s))) on (0, 1), sampled at (i + 1/2)/m
    s = (np.arange(m) + 0.5) / m
    return np.exp(-1.0 / (s * (1.0 - s)))


def _rho_from(times, taus, method):
    t = times[-1]
    if method == "endpoint":
        return taus[-1] / t
    if method == "cesaro":
        pos = times > 0
        return np.mean(taus[pos] / _bcast(times[pos], taus), axis=0)
    if method == "weighted":
        steps = np.diff(times)
        if not np.allclose(steps, steps[0], rtol=1e-9):
            raise InvalidTraceError("weighted averaging needs linear sampling")
        inc = np.diff(taus, axis=0)
        w = _bcast(_weights(len(inc)), inc)
        return np.sum(w * inc, axis=0) / (np.sum(_weights(len(inc))) * steps[0])
    raise ValueError(f"unknown method {method!r}")


def _bcast(v, like):
    return np.reshape(v, (len(v),) + (1,) * (np.ndim(like) - 1))


def _as_real(v):
    return float(v) if np.ndim(v) == 0 else np.asarray(v)


def estimate_rho(trace: CocycleTrace, method="endpoint") -> TranslationEstimate:
    """Translation number ``lim tau_t / t`` from a trace.

    ``method`` is ``"endpoint"`` (ratio at the horizon), ``"cesaro"``
    (mean of the sampled ratios) or ``"weighted"`` (smooth-bump weighted
    average of the increments; needs linear sampling, converges much faster
    on quasiperiodic orbits).  The Cauchy gap compares against the same
    estimator on the trace truncated at half the horizon.
    """
    if len(trace.times) < 2 or not trace.horizon > 0:
        raise InvalidTraceError("trace has zero horizon")
    times, taus = trace.times, trace.tau_values
    rho = _rho_from(times, taus, method)
    half = int(np.argmin(np.abs(times - trace.horizon / 2)))
    if half < 1:
        half = 1
    rho_half = _rho_from(times[: half + 1], taus[: half + 1], method)
    gap = float(np.max(np.abs(rho - rho_half)))
    return TranslationEstimate(_as_real(rho), gap, trace.horizon, method)


# --------------------------------------------------------------------------
# bounded mean motion


@dataclass(frozen=True)
class DeviationProfile:
    """Running maxima ``D(T_j) = max_{t <= T_j} |tau_t - t rho|``.

    ``loglog_slope`` is the least-squares slope of ``log D`` against
    ``log T`` over the last ``fit_fraction`` of the checkpoints.
    """

    checkpoints: np.ndarray
    deviations: np.ndarray
    classification: str
    loglog_slope: float

    @property
    def bound(self) -> float:
        return float(self.deviations[-1])


def classify_slope(slope, bounded_slope=0.05, unbounded_slope=0.2) -> str:
    if not np.isfinite(slope):
        return "inconclusive"
    if slope < bounded_slope:
        return "bounded"
    if slope > unbounded_slope:
        return "unbounded"
    return "inconclusive"


def profile_from_deviations(times, dev, ratio=2.0, fit_fraction=0.5,
                            bounded_slope=0.05, unbounded_slope=0.2,
                            zero_tol=ZERO_TOL) -> DeviationProfile:
    """Build a profile from sampled ``|tau_t - t rho|`` values at ``times``."""
    times = np.asarray(times, dtype=float)
    dev = np.asarray(dev, dtype=float)
    running = np.maximum.accumulate(dev)
    pos = times[times > 0]
    if len(pos) == 0:
        raise InvalidTraceError("no positive sample times")
    t_first, horizon = pos[0], times[-1]
    count = int(math.floor(math.log(horizon / t_first) / math.log(ratio) + 1e-12)) + 1
    checkpoints = t_first * ratio ** np.arange(count)
    if checkpoints[-1] < horizon * (1 - 1e-12):
        checkpoints = np.append(checkpoints, horizon)
    idx = np.searchsorted(times, checkpoints * (1 + 1e-12), side="right") - 1
    # drift at rounding level, relative to the elapsed time, counts as zero
    deviations = running[idx]
    if np.all(deviations <= zero_tol * np.maximum(1.0, checkpoints)):
        deviations = np.zeros_like(deviations)

    if deviations[-1] <= 0.0:
        slope = 0.0
    else:
        start = int(math.floor(len(checkpoints) * (1 - fit_fraction)))
        sel = slice(min(start, len(checkpoints) - 2), None)
        tt, dd = checkpoints[sel], deviations[sel]
        keep = dd > 0
        if keep.sum() >= 2:
            slope = float(np.polyfit(np.log(tt[keep]), np.log(dd[keep]), 1)[0])
        else:
            slope = float("nan")
    return DeviationProfile(checkpoints, deviations,
                            classify_slope(slope, bounded_slope, unbounded_slope), slope)


def deviation_profile(trace: CocycleTrace, rho, ratio=2.0, fit_fraction=0.5,
                      bounded_slope=0.05, unbounded_slope=0.2) -> DeviationProfile:
    """Bounded-mean-motion diagnostic for a trace.

    For a batch trace the worst case over the batch is taken at every
    sampled time.
    """
    if not np.all(np.isfinite(rho)):
        raise ValueError("rho must be finite")
    times, taus = trace.times, trace.tau_values
    dev = np.abs(taus - _bcast(times, taus) * rho)
    if dev.ndim > 1:
        dev = dev.reshape(len(times), -1).max(axis=1)
    return profile_from_deviations(times, dev, ratio, fit_fraction,
                                   bounded_slope, unbounded_slope)


# --------------------------------------------------------------------------
# coboundary and semiconjugacy


@dataclass(frozen=True)
class GammaEstimate:
    """Running-max approximation of ``limsup (tau_t(x) - t rho)``.

    ``convergence_delta`` is the sup over sample points of the change of
    the estimate between horizons ``T/2`` and ``T`` (same burn-in).
    ``deviation_bound`` is ``max_{t <= T} |tau_t - t rho|`` over the
    samples.
    """

    sample_points: np.ndarray
    gamma_values: np.ndarray
    burn_in_T0: float
    horizon_T: float
    convergence_delta: float
    rho: float
    deviation_bound: float


def _running_gamma(system, x, rho, T0, T, half=False):
    h = system.time_domain.sample_step
    n = system.time_domain.steps(T)
    k0 = int(math.ceil(T0 / h - 1e-9))
    n_half = n // 2
    x = np.asarray(x, dtype=float)
    fast = getattr(system, "_fast_running_gamma", None)
    if fast is not None:
        res = fast(x, rho, k0, n, n_half if half else -1)
        if res is not None:
            return res
    shape = np.shape(system.translation(x))
    g = np.zeros(shape) if k0 == 0 else np.full(shape, -np.inf)
    g_half = g.copy()
    dev = np.zeros(shape)
    drift = _Accumulator()
    for k, _, dtau, _ in _orbit(system, x, n):
        # accumulate tau_t - t rho directly; avoids cancellation at large t
        drift.add(dtau - h * rho)
        d = drift.value
        np.maximum(dev, np.abs(d), out=dev)
        if k >= k0:
            np.maximum(g, d, out=g)
        if half and k == n_half:
            g_half = g.copy()
    return g, g_half, dev


def _check_window(T0, T):
    if T0 is None:
        T0 = T / 10
    if not (T > T0 >= 0):
        raise ValueError(f"need T > T0 >= 0, got T0={T0}, T={T}")
    return T0


def estimate_gamma(system: FoliatedSystem, x, rho, T0, T):
    """Approximate coboundary ``gamma(x) = limsup_t (tau_t(x) - t rho)``.

    Returns the maximum of ``tau_t(x) - t rho`` over sampled
    ``t in [T0, T]``; ``T0=None`` uses the burn-in ``T/10``.  For fixed
    ``T0`` the value is nondecreasing in ``T``.
    """
    T0 = _check_window(T0, T)
    g, _, _ = _running_gamma(system, x, rho, T0, T)
    return _as_real(g)


def gamma_estimate(system: FoliatedSystem, points, rho, T, T0=None) -> GammaEstimate:
    """``estimate_gamma`` on a set of points with a two-horizon diagnostic."""
    T0 = _check_window(T0, T)
    if T / 2 < T0:
        raise ValueError("the half horizon must not precede the burn-in")
    g, g_half, dev = _running_gamma(system, points, rho, T0, T, half=True)
    delta = float(np.max(np.abs(g - g_half))) if np.size(g) else 0.0
    return GammaEstimate(np.asarray(points, dtype=float), np.asarray(g), T0, T,
                         delta, float(rho), float(np.max(dev)))


def gamma_function(system: FoliatedSystem, rho, T, T0=None) -> Callable:
    """Return ``x -> estimate_gamma(system, x, rho, T0, T)``."""
    T0 = _check_window(T0, T)
    return lambda x: estimate_gamma(system, x, rho, T0, T)


@dataclass(frozen=True)
class SemiconjugacyReport:
    rho_used: float
    residual_sup: float
    t_tested: tuple
    gamma_ref: GammaEstimate | None = None
    residuals: np.ndarray = field(default=None, repr=False)


def semiconjugate(system: FoliatedSystem, gamma_fn, x):
    """``h(x) = x . gamma(x)``."""
    return system.leaf_translate(x, gamma_fn(x))


def semiconjugacy_residual(system: FoliatedSystem, rho, gamma_fn, samples, t,
                           gamma_ref: GammaEstimate | None = None) -> SemiconjugacyReport:
    """Measure how far ``h o Phi_t`` is from ``T^rho_t o h``.

    ``t`` may be a single time or a sequence of times; ``residuals`` holds
    the per-sample maximum over the tested times.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise ValueError("samples must be nonempty")
    ts = tuple(np.atleast_1d(t).tolist())
    images = [evolve(system, samples, tt) for tt in ts]
    # one batched gamma evaluation over samples and all their images
    pts = np.concatenate([samples] + images, axis=0)
    gam = np.split(np.asarray(gamma_fn(pts)), len(ts) + 1, axis=0)
    hx = system.leaf_translate(samples, gam[0])
    worst = None
    for tt, y, gy in zip(ts, images, gam[1:]):
        lhs = system.leaf_translate(y, gy)
        rhs = translation_flow(system, hx, rho, tt)
        r = system.distance(lhs, rhs)
        worst = r if worst is None else np.maximum(worst, r)
    return SemiconjugacyReport(float(rho), float(np.max(worst)), ts, gamma_ref,
                               np.asarray(worst))


def cohomological_residual(system: FoliatedSystem, x, rho, gamma_fn, t):
    """``|tau_t(x) - gamma(x) + gamma(Phi_t(x)) - t rho|`` on the real line."""
    y, tau = flow(system, x, t)
    return np.abs(tau - gamma_fn(x) + gamma_fn(y) - t * rho)


# --------------------------------------------------------------------------
# structural checks


def check_cocycle_identity(system: FoliatedSystem, x, s, t):
    """``|tau_{s+t}(x) - tau_s(Phi_t(x)) - tau_t(x)|``."""
    y, tau_t = flow(system, x, t)
    _, tau_s = flow(system, y, s)
    _, tau_st = flow(system, x, s + t)
    return _as_real(np.abs(tau_st - tau_s - tau_t))


def check_commutation(system: FoliatedSystem, x, s, t):
    """``distance(omega_s(x . t), omega_s(x) . t)``."""
    lhs = system.transversal(system.leaf_translate(x, t), s)
    rhs = system.leaf_translate(system.transversal(x, s), t)
    return _as_real(system.distance(lhs, rhs))


def check_leaf_group_law(system: FoliatedSystem, x, s, t):
    """``distance((x . s) . t, x . (s + t))``."""
    lhs = system.leaf_translate(system.leaf_translate(x, s), t)
    return _as_real(system.distance(lhs, system.leaf_translate(x, s + t)))


def check_order_preservation(system: FoliatedSystem, x, t_grid: Sequence[float]):
    """Minimum over ``t_grid`` (and the batch) of ``t + tau(x . t) - tau(x)``.

    A value ``>= -tolerance`` certifies order preservation on the samples.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid < 0):
        raise ValueError("t_grid must be nonnegative")
    base = system.translation(x)
    slack = [np.min(t + system.translation(system.leaf_translate(x, t)) - base)
             for t in t_grid]
    return float(np.min(slack))
