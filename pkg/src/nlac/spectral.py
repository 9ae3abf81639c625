"""Periodic collocation grids, the discrete Fourier pair and FFT convolution.

Fields are plain ``numpy`` arrays of shape ``grid.shape`` (C order, axis 0 is
``x``). Spectra are complex arrays in standard FFT order; the logical
frequency of FFT index ``k`` on an axis with ``N`` points is ``k`` for
``k <= N/2`` and ``k - N`` otherwise, so the Nyquist mode is ``+N/2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

__all__ = [
    "Grid",
    "GridMismatch",
    "SpectralContext",
    "dft_forward",
    "dft_inverse",
    "circular_convolve",
    "nonlocal_apply",
    "inner_h",
    "norm_h",
    "laplacian_symbol",
]

IMAG_TOL = 1e-12


class GridMismatch(ValueError):
    """Raised when arrays that must share a grid do not."""


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on ``prod_a [-X_a, X_a)``.

    Node ``i`` on axis ``a`` sits at ``-X_a + i*h_a`` with ``h_a = 2 X_a / N_a``;
    the right end point is not a node.
    """

    extents: tuple
    counts: tuple

    def __post_init__(self):
        extents = tuple(float(x) for x in np.atleast_1d(self.extents))
        counts = tuple(int(n) for n in np.atleast_1d(self.counts))
        if len(counts) == 1 and len(extents) > 1:
            counts = counts * len(extents)
        if len(extents) == 1 and len(counts) > 1:
            extents = extents * len(counts)
        if len(extents) != len(counts) or not 1 <= len(counts) <= 3:
            raise ValueError("grid needs 1 to 3 axes with matching extents and counts")
        for x, n in zip(extents, counts):
            if not x > 0:
                raise ValueError(f"extent must be positive, got {x}")
            if n < 4 or n % 2:
                raise ValueError(f"point counts must be even and >= 4, got {n}")
        object.__setattr__(self, "extents", extents)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def cube(cls, extent: float, n: int, dim: int) -> "Grid":
        return cls((extent,) * dim, (n,) * dim)

    @property
    def dim(self) -> int:
        return len(self.counts)

    @property
    def shape(self) -> tuple:
        return self.counts

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    @property
    def spacings(self) -> tuple:
        return tuple(2.0 * x / n for x, n in zip(self.extents, self.counts))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacings))

    @property
    def volume(self) -> float:
        return float(np.prod([2.0 * x for x in self.extents]))

    def axes(self) -> list:
        return [-x + np.arange(n) * h for x, n, h in zip(self.extents, self.counts, self.spacings)]

    def mesh(self) -> list:
        return np.meshgrid(*self.axes(), indexing="ij")

    def frequencies(self) -> list:
        """Logical integer frequencies per axis, in FFT order."""
        out = []
        for n in self.counts:
            k = np.arange(n)
            out.append(np.where(k <= n // 2, k, k - n))
        return out

    def check(self, u: np.ndarray) -> None:
        if np.shape(u) != self.shape:
            raise GridMismatch(f"array of shape {np.shape(u)} is not on grid {self.shape}")


def _phase(grid: Grid) -> np.ndarray:
    # Nodes start at -X, so the symmetric transform picks up exp(i*pi*l) = (-1)^l.
    signs = [np.where(l % 2 == 0, 1.0, -1.0) for l in grid.frequencies()]
    out = signs[0]
    for s in signs[1:]:
        out = np.multiply.outer(out, s)
    return out


def dft_forward(u: np.ndarray, grid: Grid) -> np.ndarray:
    """Unnormalised transform ``sum_i u_i exp(-i pi sum_a l_a x_a / X_a)``."""
    grid.check(u)
    return sfft.fftn(u) * _phase(grid)


def dft_inverse(s: np.ndarray, grid: Grid) -> np.ndarray:
    """Inverse of :func:`dft_forward`, returning a real field.

    Raises
    ------
    ValueError
        If the imaginary residue exceeds ``1e-12 * max|s|``, i.e. the input
        was not the spectrum of a real field.
    """
    grid.check(s)
    u = sfft.ifftn(s * _phase(grid))
    scale = float(np.max(np.abs(s))) if s.size else 0.0
    residue = float(np.max(np.abs(u.imag))) if u.size else 0.0
    if residue > IMAG_TOL * max(scale, np.finfo(float).tiny):
        raise ValueError(f"imaginary residue {residue:.3e} too large; spectrum is not Hermitian")
    return u.real.copy()


def laplacian_symbol(grid: Grid, half: bool = False) -> np.ndarray:
    """Symbol ``-sum_a (pi l_a / X_a)^2`` of the periodic Laplacian.

    With ``half=True`` the last axis is truncated to the ``rfftn`` layout.
    """
    freqs = grid.frequencies()
    if half:
        n = grid.counts[-1]
        freqs[-1] = np.arange(n // 2 + 1)
    out = np.zeros(())
    for l, x in zip(freqs, grid.extents):
        out = np.add.outer(out, -((np.pi * l / x) ** 2))
    return out


def inner_h(u: np.ndarray, v: np.ndarray, grid: Grid) -> float:
    """Discrete L2 inner product ``(prod h) * sum u v``."""
    grid.check(u)
    grid.check(v)
    return grid.cell_volume * float(np.vdot(u, v).real)


def norm_h(u: np.ndarray, grid: Grid) -> float:
    return float(np.sqrt(inner_h(u, u, grid)))


class SpectralContext:
    """Per-run convolution engine bound to one sampled kernel.

    Counts every kernel convolution it performs. A context is not meant to be
    shared between threads; several contexts may share one kernel.
    """

    def __init__(self, kernel):
        self.kernel = kernel
        self.grid = kernel.grid
        self.convolutions = 0
        self._axes = tuple(range(self.grid.dim))

    def convolve(self, u: np.ndarray) -> np.ndarray:
        if u.shape != self.grid.shape:
            raise GridMismatch(f"array of shape {u.shape} is not on grid {self.grid.shape}")
        self.convolutions += 1
        return sfft.irfftn(self.kernel.rhat * sfft.rfftn(u), s=self.grid.shape, axes=self._axes)

    def reset(self) -> int:
        n, self.convolutions = self.convolutions, 0
        return n


def circular_convolve(u: np.ndarray, kernel, ctx: SpectralContext | None = None) -> np.ndarray:
    """Periodic convolution ``h^n sum_p gamma_{i-p} u_p`` through the FFT."""
    ctx = ctx if ctx is not None else SpectralContext(kernel)
    if ctx.kernel is not kernel:
        raise GridMismatch("context is bound to a different kernel")
    return ctx.convolve(np.asarray(u, dtype=float))


def nonlocal_apply(u: np.ndarray, kernel, ctx: SpectralContext | None = None) -> np.ndarray:
    """Discrete nonlocal operator ``c_gamma_N u - gamma_N (*) u``."""
    return kernel.c_gamma_N * u - circular_convolve(u, kernel, ctx)
