"""Interpolation of functions sampled on uniform grids of the unit torus."""

from __future__ import annotations

import string

import numpy as np


def uniform_grid(shape):
    """Points of the uniform product grid on ``[0, 1)^D``, shape ``(prod, D)``."""
    axes = [np.arange(n) / n for n in shape]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


class PeriodicInterpolant:
    """Trigonometric interpolant of samples on a uniform grid of ``T^D``.

    ``values`` has shape ``(n_1, ..., n_D)`` with ``values[i_1, ..., i_D]``
    taken at ``(i_1/n_1, ..., i_D/n_D)``.  Evaluation at arbitrary points is
    exact at the grid nodes and spectrally accurate for smooth data.
    """

    def __init__(self, values):
        values = np.asarray(values, dtype=float)
        self.shape = values.shape
        self.coef = np.fft.fftn(values) / values.size
        self.freqs = [np.fft.fftfreq(n, 1.0 / n) for n in self.shape]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        D = len(self.shape)
        scalar_state = D == 1 and (x.ndim == 0 or x.shape[-1:] != (1,))
        pts = x.reshape(-1, 1) if scalar_state else x.reshape(-1, D)
        letters = string.ascii_lowercase[:D]
        exps = [np.exp(2j * np.pi * pts[:, d, None] * self.freqs[d][None, :]) for d in range(D)]
        spec = letters + "," + ",".join("z" + c for c in letters) + "->z"
        out = np.einsum(spec, self.coef, *exps).real
        return out.reshape(x.shape if scalar_state else x.shape[:-1])


class LinearPeriodicInterpolant:
    """Piecewise-linear periodic interpolant in one dimension."""

    def __init__(self, values):
        self.values = np.asarray(values, dtype=float)

    def __call__(self, x):
        n = len(self.values)
        xp = np.arange(n + 1) / n
        fp = np.append(self.values, self.values[0])
        return np.interp(np.mod(x, 1.0), xp, fp)
