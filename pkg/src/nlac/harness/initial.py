"""Initial conditions used by the experiments."""

from __future__ import annotations

import math

import numpy as np
import scipy.fft as sfft

from ..spectral import Grid

__all__ = ["initial_condition", "INITIAL_CONDITIONS"]


def _coords(grid: Grid):
    return grid.mesh()


def cosine_product(grid: Grid):
    """``prod_a cos(pi x_a)``."""
    out = np.ones(grid.shape)
    for x in _coords(grid):
        out = out * np.cos(math.pi * x)
    return out


def two_sines(grid: Grid, amplitude: float = 0.5):
    """``amplitude * (sin(pi x) + sin(2 pi x))`` in 1D."""
    if grid.dim != 1:
        raise ValueError("two_sines is a 1D initial condition")
    (x,) = _coords(grid)
    return amplitude * (np.sin(math.pi * x) + np.sin(2.0 * math.pi * x))


def sine_decay(grid: Grid):
    """``sin(pi x) exp(-|y|)`` in 2D."""
    if grid.dim != 2:
        raise ValueError("sine_decay is a 2D initial condition")
    x, y = _coords(grid)
    return np.sin(math.pi * x) * np.exp(-np.abs(y))


def sine_product(grid: Grid, amplitude: float = 0.2):
    """Cost-study data: ``0.1 (sin(pi x) + sin(2 pi x))`` in 1D, else
    ``amplitude * prod_a sin(pi x_a)``."""
    if grid.dim == 1:
        return two_sines(grid, 0.1)
    out = np.full(grid.shape, float(amplitude))
    for x in _coords(grid):
        out = out * np.sin(math.pi * x)
    return out


def bubbles(grid: Grid, epsilon: float = 0.1, radius: float = 0.6, offset: float = 0.35):
    """Two tanh balls centred at ``x = +-offset``."""
    c = _coords(grid)
    rest = sum(x * x for x in c[1:])
    w = math.sqrt(2.0) * epsilon
    out = np.zeros(grid.shape)
    for sign in (1.0, -1.0):
        r = np.sqrt((c[0] - sign * offset) ** 2 + rest)
        out += 0.5 * np.tanh((radius - r) / w)
    return out


def star(grid: Grid, epsilon: float = 0.1, eta_branch: str = "printed"):
    """Six-armed star ``tanh((0.7 + 0.2 cos(6 eta) - |x|) / (sqrt(2) eps))``.

    ``eta`` is the angle in the plane of the first and last axes. The
    ``printed`` branch uses ``atan(z/x)`` for ``x > 0.5`` and ``pi + atan(z/x)``
    otherwise; ``corrected`` switches at ``x > 0``. Since ``cos(6 eta)`` has
    period ``pi/3`` both give the same field.
    """
    if grid.dim < 2:
        raise ValueError("star needs at least two dimensions")
    c = _coords(grid)
    x, z = c[0], c[-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(x != 0, z / np.where(x != 0, x, 1.0), np.copysign(np.inf, z))
        ratio = np.where((x == 0) & (z == 0), 0.0, ratio)
    base = np.arctan(ratio)
    if eta_branch == "printed":
        cut = 0.5
    elif eta_branch == "corrected":
        cut = 0.0
    else:
        raise ValueError(f"eta_branch must be 'printed' or 'corrected', got {eta_branch!r}")
    eta = np.where(x > cut, base, math.pi + base)
    r = np.sqrt(sum(a * a for a in c))
    return np.tanh((0.7 + 0.2 * np.cos(6.0 * eta) - r) / (math.sqrt(2.0) * epsilon))


def box(grid: Grid, half_width: float = 0.9):
    """``-1`` on ``[-a, a]^n`` and ``+1`` elsewhere."""
    inside = np.ones(grid.shape, dtype=bool)
    for x in _coords(grid):
        inside &= np.abs(x) <= half_width
    return np.where(inside, -1.0, 1.0)


def constant(grid: Grid, value: float = 0.0):
    return np.full(grid.shape, float(value))


def uniform(grid: Grid, seed: int, low: float = -0.95, high: float = 0.95):
    rng = np.random.default_rng(seed)
    return rng.uniform(low, high, size=grid.shape)


def gaussian_field(grid: Grid, seed: int, length: float = 0.2, amplitude: float = 0.5):
    """Zero-mean Gaussian random field with a Gaussian covariance.

    White noise is filtered in Fourier space by ``exp(-|k|^2 length^2 / 4)``,
    centred, and scaled so that ``max|u| = amplitude``.
    """
    rng = np.random.default_rng(seed)
    axes = tuple(range(grid.dim))
    noise = rng.standard_normal(grid.shape)
    k2 = np.zeros(())
    freqs = grid.frequencies()
    freqs[-1] = np.arange(grid.counts[-1] // 2 + 1)
    for l, x in zip(freqs, grid.extents):
        k2 = np.add.outer(k2, (math.pi * l / x) ** 2)
    spec = sfft.rfftn(noise, axes=axes) * np.exp(-k2 * length**2 / 4.0)
    field = sfft.irfftn(spec, s=grid.shape, axes=axes)
    field -= field.mean()
    peak = np.max(np.abs(field))
    return field * (amplitude / peak) if peak > 0 else field


INITIAL_CONDITIONS = {
    "cosine_product": cosine_product,
    "two_sines": two_sines,
    "sine_decay": sine_decay,
    "sine_product": sine_product,
    "bubbles": bubbles,
    "star": star,
    "box": box,
    "constant": constant,
    "uniform": uniform,
    "gaussian_field": gaussian_field,
}

RANDOM = {"uniform", "gaussian_field"}


def initial_condition(name: str, grid: Grid, **params) -> np.ndarray:
    """Evaluate the named initial condition on ``grid``.

    Random selectors require a ``seed`` parameter.
    """
    try:
        func = INITIAL_CONDITIONS[name]
    except KeyError:
        raise ValueError(f"unknown initial condition {name!r}; choose from {sorted(INITIAL_CONDITIONS)}") from None
    if name in RANDOM and params.get("seed") is None:
        raise ValueError(f"initial condition {name!r} needs a seed")
    try:
        return func(grid, **params)
    except TypeError as exc:
        raise ValueError(f"bad parameters for {name!r}: {exc}") from None
