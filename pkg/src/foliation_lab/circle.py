"""Lifts of circle homeomorphisms and the Arnold family."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial
from typing import Callable

import numpy as np
from numba import njit

from . import core
from .core import FoliatedSystem, TranslationEstimate
from .errors import InvalidLiftError, NotApplicableError, TuningError
from .interp import LinearPeriodicInterpolant, PeriodicInterpolant

TWO_PI = 2.0 * math.pi
MONOTONE_GRID = 2 ** 12


def _rigid_displacement(x, rho0):
    return np.full(np.shape(x), float(rho0))


def _arnold_displacement(x, omega, K):
    return omega + K / TWO_PI * np.sin(TWO_PI * x)


def _invert_sine_shift(y, c, iters=40):
    # solve x + c sin(2 pi x) = y by Newton; needs 2 pi |c| < 1
    x = np.array(y, dtype=float)
    for _ in range(iters):
        dx = (x + c * np.sin(TWO_PI * x) - y) / (1.0 + TWO_PI * c * np.cos(TWO_PI * x))
        x = x - dx
        if np.all(np.abs(dx) <= 1e-15):
            break
    return x


def _conjugate_displacement(x, rho, c):
    return _invert_sine_shift(x + c * np.sin(TWO_PI * x) + rho, c) - x


def sine_coboundary(x, c):
    """Coboundary ``c sin(2 pi x) + |c|`` of :meth:`CircleLift.conjugate_rotation`.

    Normalised like the limsup estimator, i.e. with minimum zero.
    """
    return c * np.sin(TWO_PI * np.asarray(x, dtype=float)) + abs(c)


@dataclass(frozen=True, eq=False)
class CircleLift(FoliatedSystem):
    """A lift ``F(x) = x + displacement(x mod 1)`` of a circle map.

    As a foliated system the state space is the circle ``[0, 1)``, the leaf
    flow is rotation, the transversal action is trivial and the one-step
    translation is the displacement.
    """

    displacement: Callable
    family: str = "custom"
    params: tuple = ()

    @classmethod
    def rigid(cls, rho0):
        return cls(partial(_rigid_displacement, rho0=float(rho0)), "rigid", (float(rho0),))

    @classmethod
    def arnold(cls, omega, K):
        if not 0 <= K <= 1:
            raise InvalidLiftError(f"Arnold lift needs 0 <= K <= 1, got K={K}")
        return cls(partial(_arnold_displacement, omega=float(omega), K=float(K)),
                   "arnold", (float(omega), float(K)))

    @classmethod
    def conjugate_rotation(cls, rho, c):
        """``F = h^-1 o R_rho o h`` with ``h(x) = x + c sin(2 pi x)``.

        The exact coboundary is given by :func:`sine_coboundary`.
        """
        if not TWO_PI * abs(c) < 1:
            raise InvalidLiftError("need 2 pi |c| < 1 for h to be a homeomorphism")
        return cls(partial(_conjugate_displacement, rho=float(rho), c=float(c)),
                   "conjugate", (float(rho), float(c)))

    @classmethod
    def custom(cls, displacement, check=True):
        lift = cls(displacement, "custom", ())
        if check and not lift.is_monotone():
            raise InvalidLiftError("lift is not monotone on the check grid")
        return lift

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return x + self.displacement(x - np.floor(x))

    def iterate(self, x, n):
        """``F^n(x)`` on lift coordinates, vectorised over ``x``."""
        x = np.array(x, dtype=float)
        if self._fast and x.ndim == 0:
            return float(x) + _family_orbit(self._kind, *self._kernel_params, float(x), n, n)[1]
        for _ in range(n):
            x = self(x)
        return x

    def is_monotone(self, grid=MONOTONE_GRID) -> bool:
        xs = np.linspace(0.0, 1.0, grid + 1)
        return bool(np.all(np.diff(self(xs)) >= -1e-15))

    @property
    def _kind(self):
        return {"rigid": 0, "arnold": 1, "conjugate": 2}[self.family]

    @property
    def _fast(self):
        return self.family in ("rigid", "arnold", "conjugate")

    @property
    def _kernel_params(self):
        if self.family == "rigid":
            return self.params[0], 0.0
        return self.params

    def _fast_running_gamma(self, x, rho, k0, n, n_half):
        if not self._fast:
            return None
        flat = np.ascontiguousarray(np.ravel(x), dtype=float)
        g, gh, dev = _family_running_gamma(self._kind, *self._kernel_params, flat,
                                           float(rho), k0, n, n_half)
        shape = np.shape(x)
        return g.reshape(shape), gh.reshape(shape), dev.reshape(shape)

    # foliated-system interface
    def leaf_translate(self, x, s):
        return np.mod(np.asarray(x, dtype=float) + s, 1.0)

    def transversal(self, x, t):
        return np.asarray(x, dtype=float)

    def translation(self, x):
        x = np.asarray(x, dtype=float)
        return self.displacement(x - np.floor(x))

    def distance(self, x, y):
        d = np.mod(np.asarray(x, dtype=float) - np.asarray(y, dtype=float), 1.0)
        return np.minimum(d, 1.0 - d)


@njit(cache=True, nogil=True, inline="always")
def _displacement(kind, a, b, xf):
    if kind == 0:
        return a
    if kind == 1:
        return a + b / (2.0 * np.pi) * np.sin(2.0 * np.pi * xf)
    # conjugate rotation: a = rho, b = c
    y = xf + b * np.sin(2.0 * np.pi * xf) + a
    x = y
    for _ in range(40):
        dx = (x + b * np.sin(2.0 * np.pi * x) - y) / (1.0 + 2.0 * np.pi * b * np.cos(2.0 * np.pi * x))
        x -= dx
        if abs(dx) <= 1e-15:
            break
    return x - xf


# The kernels below keep the state as a fractional part in [0, 1) and sum
# the displacements with compensation, so precision does not degrade as the
# lift coordinate grows.

@njit(cache=True, nogil=True)
def _family_orbit(kind, a, b, x0, n, half):
    # returns (F^half(x0) - x0, F^n(x0) - x0)
    xf = x0 - np.floor(x0)
    s = 0.0
    c = 0.0
    sh = 0.0
    for i in range(1, n + 1):
        d = _displacement(kind, a, b, xf)
        y = d - c
        t = s + y
        c = (t - s) - y
        s = t
        xf = xf + d
        xf = xf - np.floor(xf)
        if i == half:
            sh = s
    return sh, s


@njit(cache=True, nogil=True)
def _family_weighted(kind, a, b, x0, n):
    xf = x0 - np.floor(x0)
    num = 0.0
    cn = 0.0
    den = 0.0
    cd = 0.0
    for i in range(n):
        d = _displacement(kind, a, b, xf)
        s = (i + 0.5) / n
        w = np.exp(-1.0 / (s * (1.0 - s)))
        y = w * d - cn
        t = num + y
        cn = (t - num) - y
        num = t
        y = w - cd
        t = den + y
        cd = (t - den) - y
        den = t
        xf = xf + d
        xf = xf - np.floor(xf)
    return num / den


@njit(cache=True, nogil=True)
def _family_max_deviation(kind, a, b, x0, n, rho):
    # running max of |sum_{i<k} (d_i - rho)|
    xf = x0 - np.floor(x0)
    dev = 0.0
    c = 0.0
    m = 0.0
    for i in range(1, n + 1):
        d = _displacement(kind, a, b, xf)
        y = (d - rho) - c
        t = dev + y
        c = (t - dev) - y
        dev = t
        xf = xf + d
        xf = xf - np.floor(xf)
        if abs(dev) > m:
            m = abs(dev)
    return m


@njit(cache=True, nogil=True)
def _family_running_gamma(kind, a, b, xs, rho, k0, n, n_half):
    # per start: max_{k0 <= k <= n} of the drift, same at n_half, and max |drift|
    m = xs.shape[0]
    g = np.empty(m)
    gh = np.empty(m)
    dev = np.zeros(m)
    for j in range(m):
        xf = xs[j] - np.floor(xs[j])
        d_acc = 0.0
        c = 0.0
        gj = 0.0 if k0 == 0 else -np.inf
        ghj = gj
        dj = 0.0
        for k in range(1, n + 1):
            d = _displacement(kind, a, b, xf)
            y = (d - rho) - c
            t = d_acc + y
            c = (t - d_acc) - y
            d_acc = t
            xf = xf + d
            xf = xf - np.floor(xf)
            if abs(d_acc) > dj:
                dj = abs(d_acc)
            if k >= k0 and d_acc > gj:
                gj = d_acc
            if k == n_half:
                ghj = gj
        g[j] = gj
        gh[j] = ghj
        dev[j] = dj
    return g, gh, dev


def _weighted_generic(lift, x0, n):
    x = float(x0)
    s = (np.arange(n) + 0.5) / n
    w = np.exp(-1.0 / (s * (1.0 - s)))
    d = np.empty(n)
    for i in range(n):
        d[i] = lift.translation(x)
        x += d[i]
    return float(np.sum(w * d) / np.sum(w))


def rotation_number(lift: CircleLift, x0=0.0, N=10 ** 6, method="endpoint",
                    check=True) -> TranslationEstimate:
    """Rotation number ``(F^N(x0) - x0) / N`` with a Cauchy gap against ``N/2``.

    ``method="weighted"`` replaces the endpoint ratio by a smooth-bump
    weighted Birkhoff average of the displacement, which converges far
    faster when the map is smoothly conjugate to a rotation.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    if check and not lift.is_monotone():
        raise InvalidLiftError("lift is not monotone; rotation number undefined")
    x0 = float(x0)
    half = max(N // 2, 1)
    fast = lift._fast
    if method == "endpoint":
        if fast:
            sh, sn = _family_orbit(lift._kind, *lift._kernel_params, x0, N, half)
            xh, xn = x0 + sh, x0 + sn
        else:
            x = x0
            xh = x0
            for i in range(1, N + 1):
                x = float(lift(x))
                if i == half:
                    xh = x
            xn = x
        rho, rho_half = (xn - x0) / N, (xh - x0) / half
        if fast:
            rho, rho_half = sn / N, sh / half
    elif method == "weighted":
        if fast:
            rho = _family_weighted(lift._kind, *lift._kernel_params, x0, N)
            rho_half = _family_weighted(lift._kind, *lift._kernel_params, x0, half)
        else:
            rho = _weighted_generic(lift, x0, N)
            rho_half = _weighted_generic(lift, x0, half)
    else:
        raise ValueError(f"unknown method {method!r}")
    return TranslationEstimate(float(rho), float(abs(rho - rho_half)), float(N), method)


def max_deviation(lift: CircleLift, x0, n, rho) -> float:
    """``max_{1 <= k <= n} |F^k(x0) - x0 - k rho|``."""
    if lift._fast:
        return float(_family_max_deviation(lift._kind, *lift._kernel_params,
                                           float(x0), int(n), float(rho)))
    x, m = float(x0), 0.0
    for k in range(1, n + 1):
        x = float(lift(x))
        m = max(m, abs(x - x0 - k * rho))
    return m


@dataclass(frozen=True)
class PeriodicOrbitWitness:
    p: int
    q: int
    point: float
    residual: float


def _bisect_root(g, a, b, ga, iters=200):
    # g(a) and g(b) bracket zero; returns the endpoint with the smaller |g|
    for _ in range(iters):
        m = 0.5 * (a + b)
        if m == a or m == b:
            break
        gm = g(m)
        if gm == 0.0:
            return m
        if (gm < 0) == (ga < 0):
            a, ga = m, gm
        else:
            b = m
    gb = g(b)
    return a if abs(ga) <= abs(gb) else b


def detect_periodic_orbit(lift: CircleLift, q_max, tol, grid=512):
    """Search for a periodic orbit of rotation type ``p/q`` with ``q <= q_max``.

    Candidates are visited in Farey order (by ``q``, then ``p``).  For each
    ``q`` the function ``G(x) = F^q(x) - x`` is sampled on a uniform grid;
    an integer ``p`` in its range brackets a zero of ``G - p``, which is
    refined by bisection.  Returns ``None`` if no witness with residual
    ``<= tol`` exists.
    """
    if q_max < 1 or not tol > 0:
        raise ValueError("need q_max >= 1 and tol > 0")
    xs = np.arange(grid + 1) / grid
    for q in range(1, q_max + 1):
        G = lift.iterate(xs, q) - xs
        for p in range(math.ceil(G.min()), math.floor(G.max()) + 1):
            if math.gcd(p, q) != 1:
                continue
            d = G - p
            hits = np.flatnonzero(d == 0)
            if len(hits):
                point = float(xs[hits[0]])
            else:
                flips = np.flatnonzero(np.sign(d[:-1]) != np.sign(d[1:]))
                if len(flips) == 0:
                    continue
                i = flips[0]

                def g(x, q=q, p=p):
                    return float(lift.iterate(x, q) - x - p)

                point = _bisect_root(g, xs[i], xs[i + 1], d[i])
            residual = abs(float(lift.iterate(point, q)) - point - p)
            if residual <= tol:
                return PeriodicOrbitWitness(p, q, point % 1.0, residual)
    return None


def tune_omega_to_rho(K, rho_target, tol, N=10 ** 5, method="weighted", max_iter=200):
    """Find ``Omega`` with ``|rho(arnold(Omega, K)) - rho_target| <= tol``.

    Bisection over ``[rho_target - K, rho_target + K]`` using monotonicity
    of the rotation number in ``Omega``.
    """
    if not 0 <= K < 1:
        raise ValueError("need 0 <= K < 1")
    if K == 0:
        return float(rho_target)
    lo, hi = rho_target - K, rho_target + K
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        rho = rotation_number(CircleLift.arnold(mid, K), 0.0, N, method, check=False).rho_hat
        if abs(rho - rho_target) <= tol:
            return mid
        if rho < rho_target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4 * np.finfo(float).eps * max(1.0, abs(mid)):
            break
    raise TuningError(f"no Omega with rotation number within {tol} of {rho_target} "
                      f"for K={K} (interval collapsed at {0.5 * (lo + hi)})")


def circle_semiconjugacy(lift: CircleLift, rho, grid_size, horizon, T0=None,
                         t=1, q_max=20, tol=1e-10,
                         interpolation="fourier") -> core.SemiconjugacyReport:
    """Approximate the semiconjugacy to ``R_rho`` from a uniform grid.

    The coboundary is estimated at ``grid_size`` equally spaced points and
    ``h(x) = x + gamma(x)`` is built from these values by trigonometric
    (``"fourier"``) or piecewise-linear (``"linear"``) interpolation; the
    residual of ``h o f`` against ``R_rho o h`` is taken on the grid in the
    circle metric.

    Raises ``NotApplicableError`` if a periodic orbit with period up to
    ``q_max`` exists, i.e. the rotation number is rational.
    """
    witness = detect_periodic_orbit(lift, q_max, tol)
    if witness is not None:
        raise NotApplicableError(
            f"periodic orbit of type {witness.p}/{witness.q} found; rotation number is rational")
    grid = np.arange(grid_size) / grid_size
    gam = core.gamma_estimate(lift, grid, rho, horizon, T0)
    if interpolation == "fourier":
        gamma_fn = PeriodicInterpolant(gam.gamma_values)
    elif interpolation == "linear":
        gamma_fn = LinearPeriodicInterpolant(gam.gamma_values)
    else:
        raise ValueError(f"unknown interpolation {interpolation!r}")
    return core.semiconjugacy_residual(lift, rho, gamma_fn, grid, t, gamma_ref=gam)
