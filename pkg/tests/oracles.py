"""Independent reference computations used by the tests.

Nothing here calls into the FFT or root-finding code under test.
"""

import itertools
import math

import numpy as np


def bisect(f, lo, hi, iters=200):
    """Root of an increasing scalar function on ``[lo, hi]`` by plain bisection."""
    flo = f(lo)
    if flo > 0:
        return lo
    if f(hi) < 0:
        return hi
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def cubic_root(c, v):
    """Root of ``c s^3 + s = v``; bracket ``|s| <= |v|``."""
    b = abs(v) + 1.0
    return bisect(lambda s: c * s**3 + s - v, -b, b)


def log_root(coef, v):
    """Root of ``coef * atanh(s) + s = v`` in ``(-1, 1)``.

    Uses the log form ``coef/2 (log1p(s) - log1p(-s))`` rather than ``arctanh``.
    """
    def g(s):
        if s <= -1.0:
            return -math.inf
        if s >= 1.0:
            return math.inf
        return 0.5 * coef * (math.log1p(s) - math.log1p(-s)) + s - v

    return bisect(g, -1.0, 1.0)


def direct_convolve(u, values, cell_volume):
    """``h^n sum_p gamma[(i - p) mod N] u[p]`` by explicit loops over nodes."""
    shape = u.shape
    out = np.zeros(shape)
    nodes = list(itertools.product(*[range(n) for n in shape]))
    flat_u = [(p, u[p]) for p in nodes]
    for i in nodes:
        acc = 0.0
        for p, up in flat_u:
            d = tuple((a - b) % n for a, b, n in zip(i, p, shape))
            acc += values[d] * up
        out[i] = cell_volume * acc
    return out


def direct_dft(u, extents):
    """``sum_j u_j exp(-i pi l . x_j / X)`` over nodes ``x_j = -X + j h``.

    Frequencies follow the standard FFT layout with ``+N/2`` at index ``N/2``.
    """
    shape = u.shape
    coords = [(-x + np.arange(n) * 2.0 * x / n) for x, n in zip(extents, shape)]
    freqs = []
    for n in shape:
        l = np.arange(n)
        l[l > n // 2] -= n
        freqs.append(l)
    out = np.zeros(shape, dtype=complex)
    for idx in itertools.product(*[range(n) for n in shape]):
        phase = np.zeros(shape)
        for axis, (c, x) in enumerate(zip(coords, extents)):
            k = freqs[axis][idx[axis]]
            s = [1] * len(shape)
            s[axis] = shape[axis]
            phase = phase + (math.pi * k / x) * c.reshape(s)
        out[idx] = np.sum(u * np.exp(-1j * phase))
    return out


def bisect_array(f, lo, hi, iters=200):
    """Elementwise bisection for an increasing function, vectorised over arrays.

    ``lo`` and ``hi`` must bracket every root.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        neg = f(mid) < 0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    return 0.5 * (lo + hi)


def direct_convolve_fast(u, values, cell_volume):
    """Same sum as :func:`direct_convolve`, gathering one node at a time."""
    shape = u.shape
    idx = [np.arange(n) for n in shape]
    out = np.zeros(shape)
    for i in itertools.product(*[range(n) for n in shape]):
        rows = np.ix_(*[(a - ix) % n for a, ix, n in zip(i, idx, shape)])
        out[i] = cell_volume * np.sum(values[rows] * u)
    return out
