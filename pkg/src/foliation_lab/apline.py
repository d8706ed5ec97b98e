"""Increasing line maps ``f(x) = x + phi(x)`` with almost periodic ``phi``.

Displacements are finite trigonometric sums in angular form,
``phi(x) = a0 + sum_k a_k cos(lambda_k x + theta_k)``.  The hull of ``phi``
is never built; everything runs on the real line, which is the dense
orbit of the translation flow on the hull.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

import numpy as np
from numba import njit

from . import core
from .core import DeviationProfile, FoliatedSystem, TranslationEstimate
from .errors import NotApplicableError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TrigPoly:
    """``a0 + sum a cos(lam x + theta)`` with distinct positive frequencies."""

    a0: float = 0.0
    terms: tuple = ()

    def __post_init__(self):
        terms = tuple((float(l), float(a), float(th)) for l, a, th in self.terms)
        lams = [t[0] for t in terms]
        if any(l <= 0 for l in lams):
            raise ValueError("frequencies must be positive")
        if len(set(lams)) != len(lams):
            raise ValueError("frequencies must be distinct")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "a0", float(self.a0))

    @classmethod
    def constant(cls, c):
        return cls(c, ())

    @classmethod
    def from_cycles(cls, a0, terms):
        """Terms given as ``(nu, a, theta)`` meaning ``a cos(2 pi nu x + theta)``."""
        return cls(a0, tuple((TWO_PI * nu, a, th) for nu, a, th in terms))

    @property
    def lams(self):
        return np.array([t[0] for t in self.terms])

    @property
    def amps(self):
        return np.array([t[1] for t in self.terms])

    @property
    def phases(self):
        return np.array([t[2] for t in self.terms])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, self.a0)
        for lam, a, th in self.terms:
            out = out + a * np.cos(lam * x + th)
        return out

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for lam, a, th in self.terms:
            out = out - a * lam * np.sin(lam * x + th)
        return out

    @property
    def lipschitz_bound(self) -> float:
        return float(np.sum(np.abs(self.amps) * self.lams))

    @property
    def lower_bound(self) -> float:
        """``a0 - sum |a_k|``, a certified lower bound of ``phi``."""
        return self.a0 - float(np.sum(np.abs(self.amps)))

    def mean_value(self) -> float:
        return self.a0

    def numeric_mean(self, N, points_per_unit=64) -> float:
        """``(1/2N) int_{-N}^{N} phi`` by the composite trapezoid rule."""
        n = int(2 * N * points_per_unit)
        x = np.linspace(-N, N, n + 1)
        y = self(x)
        return float((np.sum(y) - 0.5 * (y[0] + y[-1])) * (2 * N / n) / (2 * N))


def mean_value(q: TrigPoly) -> float:
    return q.mean_value()


# ---------------------------------------------------------------------------
# integer relations


@dataclass(frozen=True)
class FrequencyModule:
    """The Z-module generated by ``generators``."""

    generators: tuple
    screened: bool = True

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(float(g) for g in self.generators))
        if any(g <= 0 for g in self.generators):
            raise ValueError("generators must be positive")

    @property
    def rank(self):
        return len(self.generators)

    def element(self, coeffs) -> float:
        return float(np.dot(coeffs, self.generators))

    def coordinates(self, x, K=50, tol=1e-9):
        """Integer coordinates of ``x`` with entries bounded by ``K``, or None."""
        hit = _relation_search(float(x), self.generators, K, tol, k_values=[1])
        return None if hit is None else tuple(hit[1])

    def contains(self, x, K=50, tol=1e-9) -> bool:
        return self.coordinates(x, K, tol) is not None

    def scaled(self, s):
        return FrequencyModule(tuple(g * s for g in self.generators), self.screened)


@dataclass(frozen=True)
class IndependenceVerdict:
    """Result of a bounded integer-relation search.

    ``verdict`` is ``"independent"`` (no relation with coefficients up to
    ``search_bound``), ``"dependent"`` (``witness = (k, (j_1, ...))`` with
    ``|k x - sum j_v lam_v| = residual <= tol``) or ``"inconclusive"``
    (no hit, but a near miss within ``100 tol``).
    """

    verdict: str
    search_bound: int
    tol: float
    witness: tuple | None = None
    residual: float | None = None

    @property
    def independent(self):
        return self.verdict == "independent"


def _relation_search(x, gens, K, tol, k_values=None, near=1.0):
    """Smallest relation ``k x = sum j_v g_v`` with ``|residual| <= tol * near``.

    Relations are ordered by height ``max(|k|, |j_v|)``, then by ``k``, then
    lexicographically by ``j``, so the witness found with bound ``K`` is
    also the one found with any larger bound.  Returns
    ``(k, j, residual, height)`` or None.
    """
    gens = np.asarray(gens, dtype=float)
    m = len(gens)
    if k_values is None:
        k_values = range(1, K + 1)
    js = np.arange(-K, K + 1)
    if m:
        grids = np.meshgrid(*([js] * m), indexing="ij")
        J = np.stack([g.ravel() for g in grids], axis=-1)
        vals = J @ gens
        jh = np.max(np.abs(J), axis=1)
    else:
        J = np.zeros((1, 0), dtype=np.int64)
        vals = np.zeros(1)
        jh = np.zeros(1, dtype=np.int64)
    best = None
    for k in k_values:
        r = np.abs(k * x - vals)
        idx = np.flatnonzero(r <= tol * near)
        if len(idx) == 0:
            continue
        h = np.maximum(jh[idx], abs(k))
        # lexsort: last key is primary
        order = np.lexsort(tuple(J[idx][:, v] for v in range(m - 1, -1, -1)) + (h,))
        i = idx[order[0]]
        cand = (int(max(jh[i], abs(k))), k, tuple(int(v) for v in J[i]), float(r[i]))
        if best is None or (cand[0], cand[1], cand[2]) < (best[0], best[1], best[2]):
            best = cand
    if best is None:
        return None
    h, k, j, res = best
    return k, j, res, h


def integer_relation(x, gens, K, tol):
    """Smallest ``(k, j)`` with ``k != 0`` and ``|k x - sum j_v g_v| <= tol``, or None."""
    hit = _relation_search(float(x), gens, int(K), tol)
    return None if hit is None else hit[:3]


def rational_independence(x, module: FrequencyModule, K: int, tol: float) -> IndependenceVerdict:
    """Screen ``x`` for rational dependence on ``module`` up to height ``K``."""
    if K < 1 or not tol > 0:
        raise ValueError("need K >= 1 and tol > 0")
    gens = module.generators if isinstance(module, FrequencyModule) else tuple(module)
    hit = _relation_search(float(x), gens, int(K), tol)
    if hit is not None:
        k, j, res, _ = hit
        return IndependenceVerdict("dependent", int(K), tol, (k, j), res)
    if _relation_search(float(x), gens, int(K), tol, near=100.0) is not None:
        return IndependenceVerdict("inconclusive", int(K), tol)
    return IndependenceVerdict("independent", int(K), tol)


def _hermite_rows(M):
    # integer row reduction; returns the nonzero rows of an echelon form
    # spanning the same lattice
    A = [list(r) for r in M]
    rows, cols = len(A), len(A[0]) if A else 0
    r = 0
    for c in range(cols):
        while True:
            nz = [i for i in range(r, rows) if A[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(A[i][c]))
            A[r], A[p] = A[p], A[r]
            done = True
            for i in range(r + 1, rows):
                if A[i][c]:
                    q = A[i][c] // A[r][c]
                    A[i] = [a - q * b for a, b in zip(A[i], A[r])]
                    if A[i][c]:
                        done = False
            if done:
                break
        if any(A[i][c] for i in range(r, rows)):
            if A[r][c] < 0:
                A[r] = [-a for a in A[r]]
            r += 1
        if r == rows:
            break
    return [row for row in A[:r] if any(row)]


def frequency_module_of(phi: TrigPoly, K=20, tol=1e-9) -> FrequencyModule:
    """Basis of the module generated by the frequencies of ``phi``.

    Frequencies are visited in increasing order.  Each one is either
    screened independent of the current basis (and appended) or expressed
    rationally in it; the rational coordinates of all frequencies are then
    reduced to a lattice basis by integer row reduction.
    """
    basis = []
    coords = []  # rational coordinates of each frequency in `basis`
    for lam in sorted(phi.lams):
        hit = _relation_search(lam, basis, K, tol) if basis else None
        if hit is None:
            basis.append(float(lam))
            for c in coords:
                c.append(Fraction(0))
            coords.append([Fraction(0)] * (len(basis) - 1) + [Fraction(1)])
        else:
            k, j, _, _ = hit
            coords.append([Fraction(v, k) for v in j])
    if not basis:
        return FrequencyModule(())
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (c.denominator for row in coords for c in row), 1)
    M = [[int(c * den) for c in row] for row in coords]
    B = np.array(basis)
    gens = [float(np.dot(row, B) / den) for row in _hermite_rows(M)]
    gens = [abs(g) for g in gens]
    return FrequencyModule(tuple(gens))


# ---------------------------------------------------------------------------
# line maps


@dataclass(frozen=True, eq=False)
class LineMap(FoliatedSystem):
    """``f(x) = x + phi(x)`` as a foliated system on the real line."""

    phi: TrigPoly

    def leaf_translate(self, x, s):
        return np.asarray(x, dtype=float) + s

    def transversal(self, x, t):
        return np.asarray(x, dtype=float)

    def translation(self, x):
        return self.phi(x)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return x + self.phi(x)

    def _fast_running_gamma(self, x, rho, k0, n, n_half):
        pts = np.ascontiguousarray(np.ravel(x), dtype=float)
        g, gh, dev = _line_running_gamma(*_coeffs(self.phi), pts, float(rho), k0, n, n_half)
        s = np.shape(x)
        return g.reshape(s), gh.reshape(s), dev.reshape(s)


def _coeffs(phi):
    return (phi.a0, np.ascontiguousarray(phi.lams, dtype=float),
            np.ascontiguousarray(phi.amps, dtype=float),
            np.ascontiguousarray(phi.phases, dtype=float))


@njit(cache=True, nogil=True, inline="always")
def _phi(a0, lam, amp, th, x):
    s = a0
    for i in range(lam.shape[0]):
        s += amp[i] * np.cos(lam[i] * x + th[i])
    return s


@njit(cache=True, nogil=True)
def _line_birkhoff(a0, lam, amp, th, x0, n, weighted):
    # x is carried as hi + lo so the argument of cos keeps full precision
    hi = x0
    lo = 0.0
    num = 0.0
    cn = 0.0
    den = 0.0
    numh = 0.0
    cnh = 0.0
    denh = 0.0
    half = n // 2
    for i in range(n):
        d = _phi(a0, lam, amp, th, hi + lo)
        w = 1.0
        wh = 1.0
        if weighted:
            s = (i + 0.5) / n
            w = np.exp(-1.0 / (s * (1.0 - s)))
            if i < half:
                s = (i + 0.5) / half
                wh = np.exp(-1.0 / (s * (1.0 - s)))
        y = w * d - cn
        t = num + y
        cn = (t - num) - y
        num = t
        den += w
        if i < half:
            y = wh * d - cnh
            t = numh + y
            cnh = (t - numh) - y
            numh = t
            denh += wh
        t = hi + d
        lo += d - (t - hi)
        hi = t
    return num / den, numh / denh


@njit(cache=True, nogil=True)
def _line_running_gamma(a0, lam, amp, th, pts, rho, k0, n, n_half):
    m = pts.shape[0]
    g = np.empty(m)
    gh = np.empty(m)
    dev = np.zeros(m)
    for j in range(m):
        hi = pts[j]
        lo = 0.0
        acc = 0.0
        c = 0.0
        gj = 0.0 if k0 == 0 else -np.inf
        ghj = gj
        dj = 0.0
        for k in range(1, n + 1):
            d = _phi(a0, lam, amp, th, hi + lo)
            y = (d - rho) - c
            t = acc + y
            c = (t - acc) - y
            acc = t
            t = hi + d
            lo += d - (t - hi)
            hi = t
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
def _line_deviation_checkpoints(a0, lam, amp, th, pts, rho, ks):
    out = np.zeros(ks.shape[0])
    n = ks[-1]
    for j in range(pts.shape[0]):
        hi = pts[j]
        lo = 0.0
        acc = 0.0
        c = 0.0
        run = 0.0
        q = 0
        for k in range(1, n + 1):
            d = _phi(a0, lam, amp, th, hi + lo)
            y = (d - rho) - c
            t = acc + y
            c = (t - acc) - y
            acc = t
            t = hi + d
            lo += d - (t - hi)
            hi = t
            if abs(acc) > run:
                run = abs(acc)
            if k == ks[q]:
                if run > out[q]:
                    out[q] = run
                q += 1
    return out


def check_kwapisz_preconditions(phi: TrigPoly):
    """Raise ``NotApplicableError`` unless ``inf phi > 0`` and ``f`` is increasing."""
    if not phi.lower_bound > 0:
        raise NotApplicableError(
            f"phi not certified positive: a0 - sum|a_k| = {phi.lower_bound:.6g} <= 0")
    if not phi.lipschitz_bound < 1:
        raise NotApplicableError(
            f"f not certified increasing: sum |a_k| lambda_k = {phi.lipschitz_bound:.6g} >= 1")


def kwapisz_rho(phi: TrigPoly, x0=0.0, N=10 ** 6, method="endpoint", check=True) -> TranslationEstimate:
    """Translation number ``(1/N) sum_{i<N} phi(f^i(x0))``.

    ``method="weighted"`` uses smooth-bump weights.  With ``check=True``
    the certified preconditions (positivity and monotonicity) must hold.
    """
    if check:
        check_kwapisz_preconditions(phi)
    if N < 2:
        raise ValueError("N must be at least 2")
    if method not in ("endpoint", "weighted"):
        raise ValueError(f"unknown method {method!r}")
    rho, rho_half = _line_birkhoff(*_coeffs(phi), float(x0), int(N), method == "weighted")
    return TranslationEstimate(float(rho), float(abs(rho - rho_half)), float(N), method)


def line_deviation_profile(phi: TrigPoly, rho, starts, horizon, ratio=2.0) -> DeviationProfile:
    """Worst-case profile of ``|f^n(x) - x - n rho|`` over ``starts``."""
    n = int(horizon)
    count = int(math.floor(math.log(n) / math.log(ratio))) + 1
    ks = np.unique(np.ceil(ratio ** np.arange(count)).astype(np.int64))
    ks = ks[ks <= n]
    if ks[-1] != n:
        ks = np.append(ks, n)
    pts = np.ascontiguousarray(np.ravel(starts), dtype=float)
    dev = _line_deviation_checkpoints(*_coeffs(phi), pts, float(rho), ks)
    times = np.concatenate([[0.0], ks.astype(float)])
    return core.profile_from_deviations(times, np.concatenate([[0.0], dev]), ratio)


@dataclass(frozen=True)
class KwapiszReport:
    rho: TranslationEstimate
    deviation_profile: DeviationProfile
    independence_verdict: IndependenceVerdict
    module: FrequencyModule
    criterion_met: bool
    caveats: tuple = field(default=())


def kwapisz_semiconjugacy_criterion(phi: TrigPoly, N=10 ** 5, K=20, tol=1e-9, module=None,
                                    starts=None, seed=0, check=True) -> KwapiszReport:
    """Bounded deviation plus independence of ``1/rho`` from the module.

    Frequencies are converted to cycles (``lambda / 2 pi``) before the
    independence test, matching the normalisation in which a 1-periodic
    ``phi`` has module ``Z``.  A constant ``phi`` is treated as 1-periodic.
    ``module`` overrides the computed module (already in cycles).
    """
    rho = kwapisz_rho(phi, 0.0, N, "weighted", check=check)
    if starts is None:
        starts = np.random.default_rng(seed).uniform(0.0, 10.0, 8)
    profile = line_deviation_profile(phi, rho.rho_hat, starts, N)
    caveats = [f"finite horizon N={N}", f"finite search bound K={K}"]
    if module is None:
        module = frequency_module_of(phi).scaled(1.0 / TWO_PI)
        if module.rank == 0:
            module = FrequencyModule((1.0,))
            caveats.append("constant displacement treated as 1-periodic")
    verdict = rational_independence(1.0 / rho.rho_hat, module, K, tol)
    met = profile.classification == "bounded" and verdict.verdict == "independent"
    return KwapiszReport(rho, profile, verdict, module, met, tuple(caveats))
