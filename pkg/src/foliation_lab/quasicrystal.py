"""Substitution Delone sets on the line and their translation dynamics.

A two-letter substitution such as Fibonacci (``L -> LS``, ``S -> L``)
generates words; replacing letters by intervals gives a Delone set.  A
displacement that is strongly pattern-equivariant (its value at ``x``
depends only on the points of the set near ``x``) induces a line map
``f(t) = t + phi(t)``, which realises ``F(X - t) = X - f(t)`` on the
translation orbit of the set.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numba import njit

from . import core
from .core import FoliatedSystem, TranslationEstimate
from .errors import DisplacementSignError, InvalidSeedError, WindowExceededError

GOLDEN = (1 + math.sqrt(5)) / 2
PATCH_TOL = 1e-9


@dataclass(frozen=True)
class SubstitutionRule:
    images: dict
    tile_lengths: dict

    def __post_init__(self):
        letters = set(self.images)
        if set(self.tile_lengths) != letters:
            raise ValueError("tile_lengths must cover exactly the alphabet")
        for a, w in self.images.items():
            if not w or set(w) - letters:
                raise ValueError(f"image of {a!r} is empty or uses unknown letters")
        if any(not l > 0 for l in self.tile_lengths.values()):
            raise ValueError("tile lengths must be positive")
        if not self.is_primitive():
            raise ValueError("substitution is not primitive")
        if not self.lengths_self_similar():
            warnings.warn("tile lengths are not a left Perron eigenvector; "
                          "the tiling is not self-similar", stacklevel=2)

    @classmethod
    def fibonacci(cls):
        return cls({"L": "LS", "S": "L"}, {"L": GOLDEN, "S": 1.0})

    @property
    def alphabet(self):
        return tuple(sorted(self.images))

    def matrix(self):
        """``M[a, b]`` = number of letters ``a`` in the image of ``b``."""
        al = self.alphabet
        return np.array([[self.images[b].count(a) for b in al] for a in al], dtype=np.int64)

    def is_primitive(self) -> bool:
        M = self.matrix()
        n = len(M)
        P = np.eye(n, dtype=np.int64)
        # Wielandt bound on the exponent of a primitive matrix
        for _ in range((n - 1) ** 2 + 1):
            P = np.minimum(P @ M, 1)
            if np.all(P > 0):
                return True
        return False

    def perron(self):
        vals, vecs = np.linalg.eig(self.matrix().T.astype(float))
        i = int(np.argmax(vals.real))
        v = np.abs(vecs[:, i].real)
        return float(vals[i].real), v / v.max()

    def lengths_self_similar(self, tol=1e-9) -> bool:
        lam, v = self.perron()
        lengths = np.array([self.tile_lengths[a] for a in self.alphabet])
        return bool(np.allclose(lengths / lengths.max(), v, atol=tol))


def iterate_substitution(rule: SubstitutionRule, seed: str, n: int) -> str:
    if n < 0:
        raise ValueError("n must be nonnegative")
    bad = set(seed) - set(rule.images)
    if not seed or bad:
        raise InvalidSeedError(f"seed {seed!r} is empty or has unknown letters {sorted(bad)}")
    table = str.maketrans({a: w for a, w in rule.images.items()})
    word = seed
    for _ in range(n):
        word = word.translate(table)
    return word


@dataclass(frozen=True)
class DeloneSegment:
    """Finite window of a Delone set with finitely many gap lengths."""

    points: np.ndarray
    gap_alphabet: tuple

    def __post_init__(self):
        p = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "points", p)
        if len(p) < 2:
            raise ValueError("a segment needs at least two points")
        gaps = np.diff(p)
        if not np.all(gaps > 0):
            raise ValueError("points must be strictly increasing")

    @property
    def window(self):
        return float(self.points[0]), float(self.points[-1])

    def gaps(self):
        return np.diff(self.points)

    def check_invariants(self, tol=PATCH_TOL):
        """Return ``(min_gap, max_gap, distinct gap values)``; raise if a gap is foreign."""
        g = self.gaps()
        alpha = np.array(sorted(self.gap_alphabet))
        dist = np.min(np.abs(g[:, None] - alpha[None, :]), axis=1)
        if np.any(dist > tol):
            raise ValueError("gap outside the gap alphabet")
        used = tuple(float(a) for a in alpha if np.any(np.abs(g - a) <= tol))
        return float(g.min()), float(g.max()), used

    def require(self, lo, hi):
        a, b = self.window
        if lo < a - PATCH_TOL or hi > b + PATCH_TOL:
            raise WindowExceededError(
                f"[{lo:.6g}, {hi:.6g}] leaves the window [{a:.6g}, {b:.6g}]")

    def to_text(self) -> str:
        """Two-column text: index and coordinate."""
        return "".join(f"{i} {x:.17g}\n" for i, x in enumerate(self.points))


def word_to_delone(word: str, rule: SubstitutionRule, anchor=0.0) -> DeloneSegment:
    """Tile endpoints of ``word`` laid out from ``anchor``."""
    if not word:
        raise ValueError("word must be nonempty")
    lengths = np.array([rule.tile_lengths[c] for c in word])
    pts = anchor + np.concatenate([[0.0], np.cumsum(lengths)])
    return DeloneSegment(pts, tuple(sorted(set(rule.tile_lengths.values()))))


def bi_infinite_segment(rule: SubstitutionRule, n: int, left="L", right="L") -> DeloneSegment:
    """Window of the fixed point grown from ``left.right`` with the dot at 0.

    For Fibonacci ``L.L`` is a legal seed for the square of the
    substitution, so ``n`` must be even for the window to be a patch of the
    fixed point.
    """
    if n % 2:
        raise ValueError("n must be even")
    lw = iterate_substitution(rule, left, n)
    rw = iterate_substitution(rule, right, n)
    rpts = word_to_delone(rw, rule).points
    llen = np.array([rule.tile_lengths[c] for c in lw])
    lpts = -np.cumsum(llen[::-1])[::-1]
    return DeloneSegment(np.concatenate([lpts, rpts]),
                         tuple(sorted(set(rule.tile_lengths.values()))))


def fibonacci_segment(n=20) -> DeloneSegment:
    return bi_infinite_segment(SubstitutionRule.fibonacci(), n)


# ---------------------------------------------------------------------------
# patches


@dataclass(frozen=True)
class Patch:
    center: float
    radius: float
    relative_points: np.ndarray

    def __len__(self):
        return len(self.relative_points)


def patch_at(X: DeloneSegment, x, R) -> Patch:
    """``(X cap [x - R, x + R]) - x``."""
    if not R > 0:
        raise ValueError("radius must be positive")
    X.require(x - R, x + R)
    p = X.points
    lo = np.searchsorted(p, x - R - PATCH_TOL, side="left")
    hi = np.searchsorted(p, x + R + PATCH_TOL, side="right")
    rel = p[lo:hi] - x
    rel = rel[np.abs(rel) <= R + PATCH_TOL]
    return Patch(float(x), float(R), rel)


def patch_equivalent(P1: Patch, P2: Patch, tol=PATCH_TOL) -> bool:
    return (len(P1) == len(P2)
            and bool(np.all(np.abs(P1.relative_points - P2.relative_points) <= tol)))


def _patch_matches(X, P, lo, hi, tol):
    # boolean mask over X.points[lo:hi]: does the patch centered there match P?
    p = X.points
    R = P.radius
    centers = p[lo:hi]
    X.require(centers[0] - R, centers[-1] + R)
    a = np.searchsorted(p, centers - R - tol, side="left")
    b = np.searchsorted(p, centers + R + tol, side="right")
    ok = (b - a) == len(P)
    for j, off in enumerate(P.relative_points):
        idx = np.minimum(a + j, len(p) - 1)
        ok &= np.abs(p[idx] - centers - off) <= tol
    return ok


def occurrences(X: DeloneSegment, P: Patch, lo_x, hi_x, tol=PATCH_TOL):
    """Points ``y`` of ``X`` in ``[lo_x, hi_x]`` whose radius-R patch matches ``P``."""
    p = X.points
    lo = np.searchsorted(p, lo_x - tol, side="left")
    hi = np.searchsorted(p, hi_x + tol, side="right")
    if hi <= lo:
        return np.empty(0)
    return p[lo:hi][_patch_matches(X, P, lo, hi, tol)]


@dataclass(frozen=True)
class PatchFrequencyReport:
    patch: Patch
    window_N: float
    anchors: np.ndarray
    counts: np.ndarray
    frequency_estimate: float
    uniformity_spread: float
    frequencies: np.ndarray = field(repr=False, default=None)


def patch_frequency(X: DeloneSegment, P: Patch, N, anchors, tol=PATCH_TOL) -> PatchFrequencyReport:
    """Counts ``n(P, N, t)`` of patch centers in ``[t - N, t + N]``."""
    anchors = np.atleast_1d(np.asarray(anchors, dtype=float))
    for t in anchors:
        X.require(t - N - P.radius, t + N + P.radius)
    counts = np.array([len(occurrences(X, P, t - N, t + N, tol)) for t in anchors])
    freqs = counts / (2.0 * N)
    return PatchFrequencyReport(P, float(N), anchors, counts, float(np.mean(freqs)),
                                float(np.ptp(freqs)), freqs)


def patch_classes(X: DeloneSegment, R, lo_x, hi_x, tol=PATCH_TOL):
    """Distinct radius-``R`` patches centered at points in ``[lo_x, hi_x]`` with counts."""
    p = X.points
    lo = np.searchsorted(p, lo_x - tol, side="left")
    hi = np.searchsorted(p, hi_x + tol, side="right")
    classes = []
    for y in p[lo:hi]:
        P = patch_at(X, y, R)
        for c in classes:
            if patch_equivalent(c[0], P, tol):
                c[1] += 1
                break
        else:
            classes.append([P, 1])
    return [(c[0], c[1]) for c in classes]


def repetitivity_gap(X: DeloneSegment, P: Patch, lo_x, hi_x, tol=PATCH_TOL) -> float:
    """Largest gap between consecutive occurrences of ``P`` in ``[lo_x, hi_x]``.

    Every interval of that length (plus the patch diameter) inside the
    window contains an occurrence.  Returns ``inf`` if ``P`` occurs fewer
    than twice.
    """
    occ = occurrences(X, P, lo_x, hi_x, tol)
    if len(occ) < 2:
        return math.inf
    return float(np.max(np.diff(np.concatenate([[lo_x], occ, [hi_x]]))))


def letter_frequency(word: str, letter: str) -> float:
    return word.count(letter) / len(word)


# ---------------------------------------------------------------------------
# pattern-equivariant displacements


def tent_kernel(r, amplitude=1.0):
    """``g(s) = amplitude * max(0, 1 - |s| / r)``."""
    return _Tent(float(r), float(amplitude))


class _Tent:
    def __init__(self, r, amplitude):
        self.r, self.amplitude = r, amplitude

    def __call__(self, s):
        return self.amplitude * np.maximum(0.0, 1.0 - np.abs(s) / self.r)

    def __repr__(self):
        return f"tent_kernel(r={self.r}, amplitude={self.amplitude})"


@dataclass(frozen=True, eq=False)
class PEDisplacement:
    """``phi(x) = c + sum_{theta in X, |theta - x| <= r} g(theta - x)``.

    ``g`` must vanish outside ``[-r, r]`` and be continuous; ``phi`` then
    only depends on ``(X - x) cap [-r, r]``.
    """

    X: DeloneSegment
    kernel: Callable
    r: float
    c: float = 0.0

    @property
    def equivariance_radius(self):
        return self.r

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        flat = np.ravel(x)
        if flat.size:
            self.X.require(float(flat.min()) - self.r, float(flat.max()) + self.r)
        p = self.X.points
        a = np.searchsorted(p, flat - self.r, side="left")
        b = np.searchsorted(p, flat + self.r, side="right")
        out = np.full(flat.shape, self.c)
        for j in range(int(np.max(b - a, initial=0))):
            idx = a + j
            inside = idx < b
            theta = p[np.minimum(idx, len(p) - 1)]
            out = out + np.where(inside, self.kernel(theta - flat), 0.0)
        return out.reshape(x.shape)

    def lower_bound(self, samples=20001):
        """Certified bound ``c - m sup|g|`` and a dense-sample minimum over the window."""
        s = np.linspace(-self.r, self.r, 2001)
        gsup = float(np.max(np.abs(self.kernel(s))))
        m = int(math.floor(2 * self.r / min(self.X.gap_alphabet))) + 1
        lo, hi = self.X.window
        xs = np.linspace(lo + self.r, hi - self.r, samples)
        return self.c - m * gsup, float(np.min(self(xs)))


@dataclass(frozen=True, eq=False)
class DeloneLineMap(FoliatedSystem):
    """``f(t) = t + phi(t)``: the hull map on the translation orbit ``X - t``.

    Leaf flow is translation of the marker ``t``, the transversal action is
    trivial and the one-step translation is ``phi(t)``.
    """

    phi: PEDisplacement

    def leaf_translate(self, x, s):
        return np.asarray(x, dtype=float) + s

    def transversal(self, x, t):
        return np.asarray(x, dtype=float)

    def translation(self, x):
        return self.phi(x)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return t + self.phi(t)

    @property
    def _tent(self):
        return isinstance(self.phi.kernel, _Tent)

    def orbit_sums(self, t0, n):
        """Drift values ``f^k(t0) - t0`` for ``k = 1..n``."""
        if self._tent:
            k = self.phi.kernel
            out = _tent_orbit(self.phi.X.points, k.r, k.amplitude, self.phi.c, float(t0), int(n))
            if np.isnan(out[-1]):
                raise WindowExceededError("orbit left the Delone window")
            return out
        t = float(t0)
        out = np.empty(n)
        for i in range(n):
            t = float(self(t))
            out[i] = t - t0
        return out


@njit(cache=True, nogil=True)
def _tent_orbit(p, r, amp, c, t0, n):
    out = np.empty(n)
    t = t0
    j = np.searchsorted(p, t - r)
    m = p.shape[0]
    for k in range(n):
        if t - r < p[0] or t + r > p[m - 1]:
            out[k:] = np.nan
            return out
        while j > 0 and p[j - 1] >= t - r:
            j -= 1
        while j < m and p[j] < t - r:
            j += 1
        d = c
        i = j
        while i < m and p[i] <= t + r:
            d += amp * max(0.0, 1.0 - abs(p[i] - t) / r)
            i += 1
        t = t + d
        out[k] = t - t0
    return out


def induced_line_map(phi: PEDisplacement, X: DeloneSegment | None = None, check=True) -> DeloneLineMap:
    """The map ``f(t) = t + phi(t)`` as a foliated system.

    Raises ``DisplacementSignError`` unless ``phi > 0`` on the window.
    """
    if X is not None and X is not phi.X:
        phi = PEDisplacement(X, phi.kernel, phi.r, phi.c)
    if check:
        certified, sampled = phi.lower_bound()
        if not (certified > 0 or sampled > 0):
            raise DisplacementSignError(
                f"displacement not positive: certified bound {certified:.6g}, sampled min {sampled:.6g}")
    return DeloneLineMap(phi)


def _bump_mean(inc):
    w = core._weights(len(inc))
    return float(w @ inc / w.sum())


def delone_rho(fmap: DeloneLineMap, t0, n, method="endpoint") -> TranslationEstimate:
    """``(1/n) sum_{k<n} phi(f^k(t0))`` with Cauchy gap against ``n/2``.

    ``method="weighted"`` uses smooth-bump weights on the increments, which
    is typically two orders of magnitude closer for the same ``n``.
    """
    s = fmap.orbit_sums(t0, n)
    if method == "endpoint":
        rho = s[-1] / n
        rho_half = s[n // 2 - 1] / (n // 2)
    elif method == "weighted":
        inc = np.diff(np.concatenate([[0.0], s]))
        rho, rho_half = _bump_mean(inc), _bump_mean(inc[:n // 2])
    else:
        raise ValueError(f"unknown method {method!r}")
    return TranslationEstimate(float(rho), float(abs(rho - rho_half)), float(n), method)


@dataclass(frozen=True)
class DeloneCriterionReport:
    rho: TranslationEstimate
    deviation_profile: core.DeviationProfile
    criterion_caveats: tuple


def delone_deviation_profile(fmap: DeloneLineMap, rho, starts, n, ratio=2.0):
    ks = np.arange(1, n + 1)
    dev = np.zeros(n)
    for t0 in np.atleast_1d(starts):
        s = fmap.orbit_sums(float(t0), n)
        dev = np.maximum(dev, np.abs(s - ks * rho))
    return core.profile_from_deviations(np.concatenate([[0.0], ks.astype(float)]),
                                        np.concatenate([[0.0], dev]), ratio)


def delone_semiconjugacy_criterion(phi: PEDisplacement, X: DeloneSegment | None = None,
                                   N=10 ** 4, horizon=None, starts=(0.0,), rho=None):
    """Deviation classification of Birkhoff sums of ``phi`` along ``f``.

    ``rho`` defaults to the weighted Birkhoff estimate from the first start;
    the endpoint estimate is too coarse at window-limited horizons and its
    error alone produces spurious drift.

    Minimality of the translation flow on the hull is an assumption of the
    criterion and is reported, not checked.
    """
    fmap = induced_line_map(phi, X)
    horizon = N if horizon is None else horizon
    est = delone_rho(fmap, float(starts[0]), int(N), "weighted")
    r = est.rho_hat if rho is None else rho
    prof = delone_deviation_profile(fmap, r, starts, int(horizon))
    caveats = ("minimality of the translation flow on the hull assumed",
               f"finite window {fmap.phi.X.window}", f"finite horizon {horizon}")
    return DeloneCriterionReport(est, prof, caveats)
