import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlac.kernel import KernelSpec, sample_periodic
from nlac.spectral import (
    Grid,
    GridMismatch,
    SpectralContext,
    circular_convolve,
    dft_forward,
    dft_inverse,
    inner_h,
    laplacian_symbol,
    nonlocal_apply,
    norm_h,
)
from oracles import direct_convolve, direct_dft


def _kernel(grid, eps=0.1, delta=0.1):
    return sample_periodic(KernelSpec(eps, delta, grid.dim), grid)


class TestGrid:
    @pytest.mark.parametrize("counts", [(7,), (2,), (8, 5), ()])
    def test_rejects_bad_counts(self, counts):
        with pytest.raises(ValueError):
            Grid(tuple([1.0] * len(counts)), counts)

    def test_rejects_mismatched_lengths(self):
        with pytest.raises(ValueError):
            Grid((1.0, 2.0), (8, 8, 8))

    def test_broadcasts_single_extent(self):
        assert Grid((1.0,), (8, 8)).extents == (1.0, 1.0)

    def test_nodes_exclude_right_end(self):
        g = Grid((2.0,), (8,))
        (x,) = g.axes()
        assert x[0] == -2.0
        assert x[-1] == pytest.approx(2.0 - 0.5)

    def test_sizes(self):
        g = Grid((1.0, 2.0), (8, 4))
        assert g.shape == (8, 4)
        assert g.size == 32
        assert g.spacings == (0.25, 1.0)
        assert g.volume == 8.0
        assert g.cell_volume == 0.25

    def test_check(self):
        with pytest.raises(GridMismatch):
            Grid.cube(1.0, 8, 2).check(np.zeros((8, 4)))


class TestTransform:
    def test_constant(self):
        g = Grid((1.0,), (8,))
        s = dft_forward(np.ones(8), g)
        assert s[0] == pytest.approx(8.0)
        assert np.max(np.abs(s[1:])) < 1e-13

    def test_cosine_mode(self):
        g = Grid((1.0,), (16,))
        (x,) = g.axes()
        s = dft_forward(np.cos(math.pi * x), g)
        assert s[1] == pytest.approx(8.0, abs=1e-12)
        assert s[-1] == pytest.approx(8.0, abs=1e-12)
        mask = np.ones(16, bool)
        mask[[1, -1]] = False
        assert np.max(np.abs(s[mask])) < 1e-12

    @pytest.mark.parametrize("shape", [(8,), (6, 4), (4, 4, 6)])
    def test_matches_direct_sum(self, shape):
        g = Grid(tuple(1.0 + 0.5 * i for i in range(len(shape))), shape)
        u = np.random.default_rng(1).standard_normal(shape)
        s = dft_forward(u, g)
        ref = direct_dft(u, g.extents)
        assert np.max(np.abs(s - ref)) < 1e-12 * np.sum(np.abs(u))

    @given(st.integers(0, 2**32 - 1), st.sampled_from([(8,), (16, 8), (4, 6, 8)]))
    def test_round_trip(self, seed, shape):
        g = Grid(tuple([1.0] * len(shape)), shape)
        u = np.random.default_rng(seed).standard_normal(shape)
        back = dft_inverse(dft_forward(u, g), g)
        assert np.max(np.abs(back - u)) <= 1e-13 * np.max(np.abs(u))

    def test_hermitian(self):
        g = Grid.cube(1.0, 8, 2)
        s = dft_forward(np.random.default_rng(2).standard_normal(g.shape), g)
        neg = np.roll(np.flip(s, (0, 1)), 1, (0, 1))
        assert np.max(np.abs(s - np.conj(neg))) < 1e-12

    def test_inverse_rejects_non_hermitian(self):
        g = Grid((1.0,), (8,))
        s = np.zeros(8, complex)
        s[1] = 1.0
        with pytest.raises(ValueError):
            dft_inverse(s, g)


class TestNorms:
    def test_constant_one(self):
        g = Grid.cube(1.0, 16, 2)
        assert norm_h(np.ones(g.shape), g) ** 2 == pytest.approx(4.0, rel=1e-15)
        assert norm_h(np.zeros(g.shape), g) == 0.0

    def test_parseval(self):
        g = Grid((1.0, 0.5), (16, 8))
        u = np.random.default_rng(3).standard_normal(g.shape)
        s = dft_forward(u, g)
        rhs = g.cell_volume / g.size * np.sum(np.abs(s) ** 2)
        assert norm_h(u, g) ** 2 == pytest.approx(rhs, rel=1e-12)

    def test_inner_symmetric(self):
        g = Grid.cube(1.0, 8, 1)
        a, b = np.random.default_rng(4).standard_normal((2, 8))
        assert inner_h(a, b, g) == inner_h(b, a, g)


class TestLaplacian:
    def test_values(self):
        g = Grid((1.0,), (16,))
        lam = laplacian_symbol(g)
        assert lam[0] == 0.0
        assert lam[1] == pytest.approx(-math.pi**2)
        assert np.all(lam <= 0)

    def test_eigenfunction(self):
        g = Grid.cube(1.0, 32, 2)
        x, y = g.mesh()
        u = np.cos(math.pi * x)
        lap = dft_inverse(laplacian_symbol(g) * dft_forward(u, g), g)
        assert np.max(np.abs(lap + math.pi**2 * u)) < 1e-12

    def test_half_matches_full(self):
        g = Grid((1.0, 2.0), (8, 6))
        assert np.array_equal(laplacian_symbol(g, half=True), laplacian_symbol(g)[:, :4])


class TestConvolution:
    def test_constants(self):
        g = Grid.cube(1.0, 32, 2)
        k = _kernel(g)
        out = circular_convolve(np.full(g.shape, 2.5), k)
        assert np.max(np.abs(out - 2.5 * k.c_gamma_N)) < 1e-12

    @pytest.mark.parametrize("shape", [(4,), (32,), (16, 16), (8, 6), (4, 4, 4), (6, 4, 8)])
    def test_direct_sum(self, shape):
        g = Grid(tuple([1.0] * len(shape)), shape)
        k = _kernel(g, 0.1, 0.3)
        u = np.random.default_rng(5).uniform(-1, 1, shape)
        ref = direct_convolve(u, k.values, g.cell_volume)
        assert np.max(np.abs(circular_convolve(u, k) - ref)) <= 1e-12 * max(1.0, np.max(np.abs(u)))

    def test_counter(self):
        g = Grid.cube(1.0, 8, 1)
        ctx = SpectralContext(_kernel(g))
        u = np.zeros(8)
        ctx.convolve(u)
        ctx.convolve(u)
        assert ctx.reset() == 2 and ctx.convolutions == 0

    def test_context_kernel_mismatch(self):
        g = Grid.cube(1.0, 8, 1)
        ctx = SpectralContext(_kernel(g))
        with pytest.raises(GridMismatch):
            circular_convolve(np.zeros(8), _kernel(g), ctx)

    def test_shape_mismatch(self):
        k = _kernel(Grid.cube(1.0, 8, 1))
        with pytest.raises(GridMismatch):
            circular_convolve(np.zeros(16), k)

    def test_input_untouched(self):
        g = Grid.cube(1.0, 16, 2)
        u = np.random.default_rng(6).standard_normal(g.shape)
        keep = u.copy()
        out = circular_convolve(u, _kernel(g))
        assert np.array_equal(u, keep) and out is not u

    @settings(max_examples=30)
    @given(st.integers(0, 2**32 - 1))
    def test_symmetric_operator(self, seed):
        g = Grid.cube(1.0, 16, 2)
        k = _kernel(g)
        u, v = np.random.default_rng(seed).standard_normal((2, 16, 16))
        a = inner_h(circular_convolve(u, k), v, g)
        b = inner_h(u, circular_convolve(v, k), g)
        assert abs(a - b) <= 1e-12 * max(1.0, abs(a))

    @settings(max_examples=30)
    @given(st.integers(0, 2**32 - 1))
    def test_young_bound(self, seed):
        g = Grid.cube(1.0, 32, 2)
        k = _kernel(g)
        u = np.random.default_rng(seed).standard_normal(g.shape)
        assert norm_h(circular_convolve(u, k), g) <= k.c_gamma_N * norm_h(u, g) * (1 + 1e-10)


class TestNonlocal:
    def test_constant_null(self):
        g = Grid.cube(1.0, 16, 2)
        out = nonlocal_apply(np.full(g.shape, -0.7), _kernel(g))
        assert np.max(np.abs(out)) < 1e-12

    @settings(max_examples=30)
    @given(st.integers(0, 2**32 - 1), st.floats(-3, 3), st.floats(-3, 3))
    def test_linear(self, seed, a, b):
        g = Grid.cube(1.0, 16, 2)
        k = _kernel(g)
        u, v = np.random.default_rng(seed).standard_normal((2, 16, 16))
        lhs = nonlocal_apply(a * u + b * v, k)
        rhs = a * nonlocal_apply(u, k) + b * nonlocal_apply(v, k)
        assert np.max(np.abs(lhs - rhs)) < 1e-12 * max(1.0, np.max(np.abs(lhs)))

    @settings(max_examples=30)
    @given(st.integers(0, 2**32 - 1))
    def test_positive_semidefinite(self, seed):
        g = Grid.cube(1.0, 16, 2)
        k = _kernel(g)
        u = np.random.default_rng(seed).standard_normal(g.shape)
        assert inner_h(nonlocal_apply(u, k), u, g) >= -1e-12
