"""Nonlocal Allen-Cahn solver with proximal-map time stepping.

The package provides double-well potentials and their proximal maps, the
periodised Gaussian interaction kernel, FFT collocation on periodic grids,
first and second order energy-stable time steppers, and a coupled
phase-field/heat solver.
"""

__version__ = "0.1.0"

from .coupled import CoupledConfig, CoupledRun, CoupledState, coupling_m, run_coupled, step_coupled
from .kernel import CoarseGridWarning, KernelGrid, KernelSpec, kernel_value, sample_periodic
from .potentials import (
    PotentialKind,
    PotentialSpec,
    ProxWeight,
    cardano_root,
    log_prox_root,
    potential_energy_density,
    prox,
    psi_prime,
    psi_value,
)
from .spectral import (
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
from .stepper import (
    ConvergenceWarning,
    EnergyRecord,
    EnergyTrace,
    RunResult,
    Scheme,
    SchemeConfig,
    Snapshot,
    StabilityWarning,
    StepState,
    energy_discrete,
    run,
    step_first_order,
    step_second_order_explicit,
    step_second_order_implicit,
)
