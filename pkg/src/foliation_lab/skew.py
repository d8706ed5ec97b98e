"""Skew-product circle maps over torus translations.

The state is ``(x0, x')`` with ``x0`` in ``T^d`` (the base, rotated by the
frequency vector ``w``) and ``x'`` in ``[0, 1)`` (the fiber).  Leaves are
the fiber circles, the transversal action is the base rotation and the
translation is the fiber displacement ``F^{x0}(x') - x'`` of the lift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numba import njit

from . import core
from .core import DeviationProfile, FoliatedSystem, TranslationEstimate
from .errors import InvalidSystemError
from .interp import PeriodicInterpolant, uniform_grid

TWO_PI = 2.0 * math.pi
MONOTONE_GRID = 512

_KINDS = {"product": 0, "qpf-arnold": 1, "fibered-conjugate": 2}


def _torus_distance(x, y):
    d = np.mod(np.asarray(x, dtype=float) - np.asarray(y, dtype=float), 1.0)
    d = np.minimum(d, 1.0 - d)
    return np.sqrt(np.sum(d * d, axis=-1))


@dataclass(frozen=True, eq=False)
class SkewProductSystem(FoliatedSystem):
    """``(x0, x') -> (x0 + w, F^{x0}(x'))`` with ``F^{x0}(x') = x' + disp(x0, x')``.

    ``fiber_displacement(x0, xf)`` receives base points of shape ``(..., d)``
    and fiber coordinates of shape ``(...)``.
    """

    base_frequency: np.ndarray
    fiber_displacement: Callable
    family: str = "custom"
    params: tuple = ()

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.base_frequency, dtype=float))
        if w.ndim != 1 or len(w) < 1:
            raise InvalidSystemError("base_frequency must be a nonempty vector")
        object.__setattr__(self, "base_frequency", w)

    # constructors -------------------------------------------------------

    @classmethod
    def qpf_arnold(cls, omega, K, A, w=None):
        """Fiber map ``x' + Omega + K/(2 pi) sin(2 pi x') + A sin(2 pi x0_1)``."""
        if not 0 <= K <= 1:
            raise InvalidSystemError(f"need 0 <= K <= 1 for a fiber homeomorphism, got {K}")
        w = (math.sqrt(5) - 1) / 2 if w is None else w
        params = (float(omega), float(K), float(A), 0.0)
        fam = "product" if K == 0 and A == 0 else "qpf-arnold"
        return cls(w, _qpf_displacement(*params), fam, params)

    @classmethod
    def product(cls, omega, w=None):
        """Product of the base rotation with the fiber rotation by ``omega``."""
        return cls.qpf_arnold(omega, 0.0, 0.0, w)

    @classmethod
    def fibered_conjugate(cls, omega, c, w=None):
        """Conjugate of the product rotation by ``(x0, x') -> (x0, x' + c sin(2 pi x0_1))``.

        The coboundary is :func:`fibered_coboundary`.
        """
        w = (math.sqrt(5) - 1) / 2 if w is None else w
        params = (float(omega), 0.0, 0.0, float(c))
        return cls(w, _qpf_displacement(*params, w0=float(np.atleast_1d(w)[0])),
                   "fibered-conjugate", params)

    @classmethod
    def custom(cls, w, fiber_displacement, check=True):
        system = cls(w, fiber_displacement, "custom", ())
        if check:
            system.validate()
        return system

    # properties ---------------------------------------------------------

    @property
    def base_dim(self) -> int:
        return len(self.base_frequency)

    @property
    def _fast(self):
        return self.family in _KINDS

    def fiber_lift(self, x0, xf):
        """``F^{x0}(x')`` on lift coordinates."""
        xf = np.asarray(xf, dtype=float)
        return xf + self.fiber_displacement(np.asarray(x0, dtype=float), xf - np.floor(xf))

    def validate(self, grid=MONOTONE_GRID, base_samples=16, seed=0):
        """Grid check of fiber monotonicity; raises ``InvalidSystemError``."""
        rng = np.random.default_rng(seed)
        xs = np.linspace(0.0, 1.0, grid + 1)
        for b in rng.random((base_samples, self.base_dim)):
            y = self.fiber_lift(np.broadcast_to(b, (len(xs), self.base_dim)), xs)
            if np.any(np.diff(y) < -1e-15):
                raise InvalidSystemError(f"fiber map not monotone at base point {b}")
            if abs((y[-1] - y[0]) - 1.0) > 1e-9:
                raise InvalidSystemError("fiber lift does not commute with x' -> x' + 1")
        return True

    def screen_base(self, K=50, tol=1e-9):
        """Screen ``(1, w)`` for integer relations (minimality surrogate)."""
        from .apline import FrequencyModule, rational_independence
        gens = [1.0]
        for wi in self.base_frequency:
            v = rational_independence(float(wi), FrequencyModule(tuple(gens), screened=False), K, tol)
            if v.verdict != "independent":
                return v
            gens.append(float(wi))
        return v

    # foliated-system interface -------------------------------------------

    def leaf_translate(self, x, s):
        x = np.array(x, dtype=float)
        x[..., -1] = np.mod(x[..., -1] + s, 1.0)
        return x

    def transversal(self, x, t):
        x = np.array(x, dtype=float)
        x[..., :-1] = np.mod(x[..., :-1] + t * self.base_frequency, 1.0)
        return x

    def translation(self, x):
        x = np.asarray(x, dtype=float)
        return self.fiber_displacement(x[..., :-1], x[..., -1] - np.floor(x[..., -1]))

    def distance(self, x, y):
        return _torus_distance(x, y)

    # numba fast paths -----------------------------------------------------

    def _kernel_args(self):
        return _KINDS[self.family], np.array(self.params), self.base_frequency

    def _fast_running_gamma(self, x, rho, k0, n, n_half):
        if not self._fast:
            return None
        pts = np.ascontiguousarray(np.reshape(x, (-1, self.base_dim + 1)), dtype=float)
        g, gh, dev = _skew_running_gamma(*self._kernel_args(), pts, float(rho), k0, n, n_half)
        shape = np.shape(x)[:-1]
        return g.reshape(shape), gh.reshape(shape), dev.reshape(shape)


def as_foliated(system: SkewProductSystem) -> SkewProductSystem:
    """Validate the fiber invariants and return the system as a foliated system."""
    system.validate()
    return system


def fibered_coboundary(x0, c):
    """Coboundary ``c sin(2 pi x0_1) + |c|`` of ``fibered_conjugate``."""
    x0 = np.asarray(x0, dtype=float)
    return c * np.sin(TWO_PI * x0[..., 0]) + abs(c)


class _qpf_displacement:
    # picklable displacement of the qpf-arnold / fibered-conjugate families
    def __init__(self, omega, K, A, c, w0=0.0):
        self.omega, self.K, self.A, self.c, self.w0 = omega, K, A, c, w0

    def __call__(self, x0, xf):
        b = np.asarray(x0, dtype=float)[..., 0]
        xf = np.asarray(xf, dtype=float)
        d = self.omega + self.K / TWO_PI * np.sin(TWO_PI * xf) + self.A * np.sin(TWO_PI * b)
        if self.c:
            d = d + self.c * (np.sin(TWO_PI * b) - np.sin(TWO_PI * (b + self.w0)))
        return d


# ---------------------------------------------------------------------------
# kernels; the fiber is kept as a fractional part and drifts are compensated


@njit(cache=True, nogil=True, inline="always")
def _disp(kind, p, w0, b0, xf):
    tp = 2.0 * np.pi
    d = p[0]
    if kind == 1:
        d += p[1] / tp * np.sin(tp * xf) + p[2] * np.sin(tp * b0)
    elif kind == 2:
        d += p[3] * (np.sin(tp * b0) - np.sin(tp * (b0 + w0)))
    return d


@njit(cache=True, nogil=True)
def _skew_orbit(kind, p, w, state, n, half):
    d_dim = w.shape[0]
    b = state[:d_dim].copy()
    for i in range(d_dim):
        b[i] -= np.floor(b[i])
    xf = state[d_dim] - np.floor(state[d_dim])
    s = 0.0
    c = 0.0
    sh = 0.0
    for k in range(1, n + 1):
        d = _disp(kind, p, w[0], b[0], xf)
        y = d - c
        t = s + y
        c = (t - s) - y
        s = t
        xf += d
        xf -= np.floor(xf)
        for i in range(d_dim):
            b[i] += w[i]
            b[i] -= np.floor(b[i])
        if k == half:
            sh = s
    return sh, s


@njit(cache=True, nogil=True)
def _skew_running_gamma(kind, p, w, pts, rho, k0, n, n_half):
    m = pts.shape[0]
    d_dim = w.shape[0]
    g = np.empty(m)
    gh = np.empty(m)
    dev = np.zeros(m)
    b = np.empty(d_dim)
    for j in range(m):
        for i in range(d_dim):
            b[i] = pts[j, i] - np.floor(pts[j, i])
        xf = pts[j, d_dim] - np.floor(pts[j, d_dim])
        acc = 0.0
        c = 0.0
        gj = 0.0 if k0 == 0 else -np.inf
        ghj = gj
        dj = 0.0
        for k in range(1, n + 1):
            d = _disp(kind, p, w[0], b[0], xf)
            y = (d - rho) - c
            t = acc + y
            c = (t - acc) - y
            acc = t
            xf += d
            xf -= np.floor(xf)
            for i in range(d_dim):
                b[i] += w[i]
                b[i] -= np.floor(b[i])
            if abs(acc) > dj:
                dj = abs(acc)
            if k >= k0 and acc > gj:
                gj = acc
            if k == n_half:
                ghj = gj
        g[j] = gj
        gh[j] = ghj
        dev[j] = dj
    return g, gh, dev


@njit(cache=True, nogil=True)
def _skew_deviation_checkpoints(kind, p, w, pts, rho, ks):
    # worst |drift| over the batch, running max up to each checkpoint in ks
    out = np.zeros(ks.shape[0])
    m = pts.shape[0]
    d_dim = w.shape[0]
    b = np.empty(d_dim)
    n = ks[-1]
    for j in range(m):
        for i in range(d_dim):
            b[i] = pts[j, i] - np.floor(pts[j, i])
        xf = pts[j, d_dim] - np.floor(pts[j, d_dim])
        acc = 0.0
        c = 0.0
        run = 0.0
        q = 0
        for k in range(1, n + 1):
            d = _disp(kind, p, w[0], b[0], xf)
            y = (d - rho) - c
            t = acc + y
            c = (t - acc) - y
            acc = t
            xf += d
            xf -= np.floor(xf)
            for i in range(d_dim):
                b[i] += w[i]
                b[i] -= np.floor(b[i])
            if abs(acc) > run:
                run = abs(acc)
            if k == ks[q]:
                if run > out[q]:
                    out[q] = run
                q += 1
    return out


# ---------------------------------------------------------------------------


def fiber_rotation_number(system: SkewProductSystem, x, N, method="endpoint") -> TranslationEstimate:
    """Fiber rotation number ``tau_N(x) / N`` with Cauchy gap against ``N/2``.

    ``x`` is a single state ``(x0_1, ..., x0_d, x')``.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (system.base_dim + 1,):
        raise ValueError(f"state must have shape ({system.base_dim + 1},)")
    if N < 2:
        raise ValueError("N must be at least 2")
    half = N // 2
    if method == "endpoint" and system._fast:
        sh, sn = _skew_orbit(*system._kernel_args(), x, int(N), half)
        rho, rho_half = sn / N, sh / half
        return TranslationEstimate(float(rho), float(abs(rho - rho_half)), float(N), method)
    trace = core.accumulate_trace(system, x, N, "linear")
    return core.estimate_rho(trace, method)


def _sample_states(system, count, seed):
    rng = np.random.default_rng(seed)
    return rng.random((count, system.base_dim + 1))


def bmm_test(system: SkewProductSystem, rho, horizon, sample_count=16, seed=0,
             ratio=2.0) -> DeviationProfile:
    """Worst-case deviation profile ``max |tau_t - t rho|`` over random states."""
    if not np.isfinite(rho):
        raise ValueError("rho must be finite")
    pts = _sample_states(system, sample_count, seed)
    n = int(horizon)
    if system._fast:
        count = int(math.floor(math.log(n) / math.log(ratio))) + 1
        ks = np.unique(np.ceil(ratio ** np.arange(count)).astype(np.int64))
        ks = ks[ks <= n]
        if ks[-1] != n:
            ks = np.append(ks, n)
        dev = _skew_deviation_checkpoints(*system._kernel_args(), pts, float(rho), ks)
        times = np.concatenate([[0.0], ks.astype(float)])
        return core.profile_from_deviations(times, np.concatenate([[0.0], dev]), ratio)
    trace = core.accumulate_trace(system, pts, n, "linear")
    return core.deviation_profile(trace, rho, ratio)


def fiber_semiconjugacy(system: SkewProductSystem, rho, grid=(32, 32), horizon=10 ** 4,
                        T0=None, t=1, check_bmm=True) -> core.SemiconjugacyReport:
    """Semiconjugacy to ``(x0, x') -> (x0 + w, x' + rho)`` from a product grid.

    ``grid`` gives the number of nodes per base coordinate and on the fiber.
    The coboundary is estimated at the nodes and interpolated
    trigonometrically; the residual is measured at the nodes.
    """
    if check_bmm:
        prof = bmm_test(system, rho, min(horizon, 10 ** 4), 8)
        if prof.classification == "unbounded":
            raise ValueError("deviation profile is unbounded; no semiconjugacy to test")
    if len(grid) == 2 and system.base_dim > 1:
        grid = (grid[0],) * system.base_dim + (grid[1],)
    if len(grid) != system.base_dim + 1:
        raise ValueError("grid needs one entry per base coordinate plus the fiber")
    pts = uniform_grid(grid)
    gam = core.gamma_estimate(system, pts, rho, horizon, T0)
    gamma_fn = PeriodicInterpolant(np.reshape(gam.gamma_values, grid))
    return core.semiconjugacy_residual(system, rho, gamma_fn, pts, t, gamma_ref=gam)
