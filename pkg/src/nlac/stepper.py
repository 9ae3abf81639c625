"""Energy-stable time steppers for the nonlocal Allen-Cahn equation.

Three schemes are provided, all evaluating the new iterate pointwise through
the proximal map of the convex part of the potential:

* ``FIRST_ORDER``: semi-implicit Euler, one convolution per step;
* ``SECOND_ORDER_IMPLICIT``: Crank-Nicolson-type scheme solved by the
  contractive fixed-point sweep, one convolution per sweep;
* ``SECOND_ORDER_EXPLICIT``: exactly two sweeps of that fixed-point map.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .kernel import KernelGrid
from .potentials import (
    LOG_EDGE,
    PotentialKind,
    PotentialSpec,
    ProxWeight,
    prox,
    psi_prime,
    psi_value,
)
from .spectral import SpectralContext, norm_h

__all__ = [
    "Scheme",
    "SchemeConfig",
    "StepState",
    "EnergyRecord",
    "EnergyTrace",
    "Snapshot",
    "RunResult",
    "StabilityWarning",
    "ConvergenceWarning",
    "lambda_first",
    "step_first_order",
    "step_second_order_implicit",
    "step_second_order_explicit",
    "energy_discrete",
    "run",
]


class StabilityWarning(UserWarning):
    """A configuration violates a sufficient condition of a stability result."""


class ConvergenceWarning(UserWarning):
    """The fixed-point sweep hit its iteration cap before the tolerance."""


class Scheme(str, enum.Enum):
    FIRST_ORDER = "first"
    SECOND_ORDER_IMPLICIT = "implicit"
    SECOND_ORDER_EXPLICIT = "explicit"


DEFAULT_MAX_ITER = 100


def default_tolerance(potential: PotentialSpec) -> float:
    return 1e-10 if potential.kind is PotentialKind.LOGARITHMIC else 1e-15


@dataclass
class SchemeConfig:
    """Time-stepping setup.

    ``fp_tol`` and ``fp_max_iter`` only matter for the implicit second-order
    scheme. Leaving ``fp_tol`` unset picks 1e-10 for the logarithmic potential
    and 1e-15 otherwise.
    """

    scheme: Scheme
    tau: float
    steps: int
    potential: PotentialSpec
    fp_tol: Optional[float] = None
    fp_max_iter: int = DEFAULT_MAX_ITER

    def __post_init__(self):
        self.scheme = Scheme(self.scheme)
        if self.fp_tol is None:
            self.fp_tol = default_tolerance(self.potential)
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if int(self.steps) != self.steps or self.steps < 0:
            raise ValueError(f"steps must be a nonnegative integer, got {self.steps}")
        self.steps = int(self.steps)
        if not self.fp_tol > 0:
            raise ValueError(f"fp_tol must be positive, got {self.fp_tol}")
        if self.fp_max_iter < 2:
            raise ValueError(f"fp_max_iter must be at least 2, got {self.fp_max_iter}")

    def diagnostics(self, xi_N: float, curvature: Optional[float] = None) -> list:
        """Human-readable notes on violated sufficient conditions.

        ``curvature`` is a bound ``C`` on ``|psi''|`` used for the regular and
        logarithmic second-order energy estimate.
        """
        notes = []
        c_F = self.potential.c_F
        if xi_N < 0:
            notes.append(f"xi_N = {xi_N:.4g} < 0: no energy-stability guarantee")
        if self.scheme is Scheme.FIRST_ORDER:
            return notes
        if self.scheme is Scheme.SECOND_ORDER_IMPLICIT and self.tau >= 2.0 / c_F:
            notes.append(f"tau >= 2/c_F = {2.0 / c_F:.4g}: fixed-point contraction not guaranteed")
        bound = self.second_order_tau_bound(xi_N, curvature)
        if bound is not None and self.tau >= bound:
            notes.append(f"tau >= {bound:.4g}: second-order energy estimate does not apply")
        return notes

    def second_order_tau_bound(self, xi_N: float, curvature: Optional[float] = None):
        """Largest step for which the second-order energy estimate holds.

        ``None`` when no bound can be stated (missing ``C`` for a smooth
        potential); ``inf`` when the estimate imposes no restriction.
        """
        if self.potential.kind is PotentialKind.OBSTACLE:
            return math.inf if xi_N <= 0 else 2.0 / xi_N
        if curvature is None:
            return None
        rate = xi_N + 0.5 * curvature
        return math.inf if rate <= 0 else 2.0 / rate


@dataclass
class StepState:
    u: np.ndarray
    k: int
    time: float


@dataclass
class EnergyRecord:
    step: int
    time: float
    energy: float
    fp_iters: int
    convolutions: int


@dataclass
class EnergyTrace:
    """Per-step energies; ``initial_energy`` belongs to step 0."""

    initial_energy: Optional[float] = None
    records: list = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    def energies(self) -> np.ndarray:
        return np.array([r.energy for r in self.records])

    def all_energies(self) -> np.ndarray:
        head = [] if self.initial_energy is None else [self.initial_energy]
        return np.array(head + [r.energy for r in self.records])

    def max_increase(self) -> float:
        """Largest ``(E_k - E_{k-1}) / (1 + |E_{k-1}|)`` along the trace."""
        e = self.all_energies()
        if e.size < 2:
            return -math.inf
        return float(np.max((e[1:] - e[:-1]) / (1.0 + np.abs(e[:-1]))))

    def is_nonincreasing(self, rtol: float = 1e-10) -> bool:
        return self.max_increase() <= rtol


@dataclass
class Snapshot:
    requested: float
    step: int
    time: float
    u: np.ndarray


@dataclass
class RunResult:
    state: StepState
    trace: EnergyTrace
    snapshots: list
    convolutions: int
    energy_convolutions: int = 0
    max_abs: float = 0.0


def lambda_first(xi_N: float, tau: float) -> float:
    """Prox weight ``xi_N + 1/tau`` of the first-order scheme."""
    lam = xi_N + 1.0 / tau
    if not lam > 0:
        raise ValueError(f"prox weight xi_N + 1/tau = {lam} must be positive")
    return lam


def _context(kernel: KernelGrid, ctx: Optional[SpectralContext]) -> SpectralContext:
    if ctx is None:
        return SpectralContext(kernel)
    if ctx.kernel is not kernel:
        raise ValueError("spectral context belongs to a different kernel")
    return ctx


def step_first_order(
    u_prev: np.ndarray,
    kernel: KernelGrid,
    cfg: SchemeConfig,
    ctx: Optional[SpectralContext] = None,
) -> np.ndarray:
    """One semi-implicit Euler step, ``prox((gamma*u + u/tau) / lam)``."""
    ctx = _context(kernel, ctx)
    pot = cfg.potential
    lam = lambda_first(kernel.xi_N(pot.c_F), cfg.tau)
    rhs = (1.0 / cfg.tau) * u_prev + ctx.convolve(u_prev)
    return prox(pot, ProxWeight(lam, 1), rhs / lam)


def _second_order_sweeps(u_prev, kernel, cfg, ctx, max_sweeps, tol, history=None):
    pot = cfg.potential
    tau = cfg.tau
    grid = kernel.grid
    xi = kernel.xi_N(pot.c_F)
    lam = 1.0 / tau + 0.5 * xi
    if not lam > 0:
        raise ValueError(f"prox weight 1/tau + xi_N/2 = {lam} must be positive")
    weight = ProxWeight(lam, 2)

    conv_prev = ctx.convolve(u_prev)
    base = (1.0 / tau - 0.5 * xi) * u_prev
    if pot.kind is not PotentialKind.OBSTACLE:
        base = base - 0.5 * psi_prime(pot, u_prev)

    u_old = u_prev
    conv_old = conv_prev
    u_new = u_prev
    for m in range(1, max_sweeps + 1):
        if m > 1:
            conv_old = ctx.convolve(u_old)
        q = base + 0.5 * (conv_prev + conv_old)
        u_new = prox(pot, weight, q / lam)
        if history is not None:
            history.append(u_new)
        if tol is not None and norm_h(u_new - u_old, grid) < tol:
            return u_new, m, True
        u_old = u_new
    return u_new, max_sweeps, tol is None


def step_second_order_implicit(
    u_prev: np.ndarray,
    kernel: KernelGrid,
    cfg: SchemeConfig,
    ctx: Optional[SpectralContext] = None,
    history: Optional[list] = None,
):
    """Second-order implicit step via the fixed-point sweep.

    Returns ``(u_next, iterations)``. Sweep ``m`` evaluates
    ``q_m = (1/tau - xi/2) u_prev + gamma*(u_prev + u_{m-1})/2 - psi'(u_prev)/2``
    and sets ``u_m = prox_{psi/(2 lam)}(q_m / lam)`` with
    ``lam = 1/tau + xi/2``; ``psi'`` is dropped for the obstacle potential.
    The sweep stops once ``||u_m - u_{m-1}||_h < fp_tol`` or after
    ``fp_max_iter`` sweeps (with a :class:`ConvergenceWarning`). If
    ``history`` is given, every sweep's iterate is appended to it.
    """
    ctx = _context(kernel, ctx)
    u, iters, converged = _second_order_sweeps(
        u_prev, kernel, cfg, ctx, cfg.fp_max_iter, cfg.fp_tol, history
    )
    if not converged:
        warnings.warn(
            f"fixed-point sweep stopped after {iters} iterations without reaching {cfg.fp_tol:g}",
            ConvergenceWarning,
            stacklevel=2,
        )
    return u, iters


def step_second_order_explicit(
    u_prev: np.ndarray,
    kernel: KernelGrid,
    cfg: SchemeConfig,
    ctx: Optional[SpectralContext] = None,
) -> np.ndarray:
    """Two fixed-point sweeps without a stopping test (two convolutions)."""
    ctx = _context(kernel, ctx)
    u, _, _ = _second_order_sweeps(u_prev, kernel, cfg, ctx, 2, None)
    return u


def energy_discrete(
    u: np.ndarray,
    kernel: KernelGrid,
    potential: PotentialSpec,
    conv: Optional[np.ndarray] = None,
    ctx: Optional[SpectralContext] = None,
) -> float:
    """Discrete Ginzburg-Landau energy.

    ``xi_N/2 ||u||^2 - (gamma*u, u)/2 + c_F |Omega| / 2 + h^n sum psi(u)``;
    ``+inf`` if any node is infeasible. Pass ``conv = gamma*u`` to skip the
    convolution.
    """
    grid = kernel.grid
    psi = np.asarray(psi_value(potential, u))
    if not np.all(np.isfinite(psi)):
        return math.inf
    if conv is None:
        conv = _context(kernel, ctx).convolve(u)
    xi = kernel.xi_N(potential.c_F)
    local = 0.5 * xi * np.vdot(u, u) - 0.5 * np.vdot(conv, u) + np.sum(psi)
    return float(grid.cell_volume * local + 0.5 * potential.c_F * grid.volume)


def admissible(u: np.ndarray, potential: PotentialSpec) -> bool:
    return not potential.bounded or bool(np.max(np.abs(u), initial=0.0) <= 1.0)


def prepare_initial(u0: np.ndarray, potential: PotentialSpec) -> np.ndarray:
    """Copy ``u0`` as float, checking admissibility.

    For the logarithmic potential pure-phase nodes are pulled to
    ``+-LOG_EDGE`` so that ``psi'`` is finite.
    """
    u = np.array(u0, dtype=float)
    if not admissible(u, potential):
        raise ValueError("initial state has nodes outside [-1, 1]")
    if potential.kind is PotentialKind.LOGARITHMIC:
        np.clip(u, -LOG_EDGE, LOG_EDGE, out=u)
    return u


def snapshot_steps(times: Sequence[float], tau: float, steps: int) -> list:
    """Nearest step index for each requested time, clamped to ``[0, steps]``."""
    return [min(max(int(round(t / tau)), 0), steps) for t in times]


def run(
    u0: np.ndarray,
    kernel: KernelGrid,
    cfg: SchemeConfig,
    snapshot_times: Sequence[float] = (),
    record_energy: bool = True,
    curvature: Optional[float] = None,
    ctx: Optional[SpectralContext] = None,
) -> RunResult:
    """Advance ``u0`` by ``cfg.steps`` steps of the selected scheme.

    Energies are evaluated with their own convolutions, counted apart from
    the scheme's. Snapshots are taken at the step nearest each requested
    time. Stability diagnostics are issued as :class:`StabilityWarning`.
    """
    kernel.grid.check(u0)
    ctx = _context(kernel, ctx)
    pot = cfg.potential
    for note in cfg.diagnostics(kernel.xi_N(pot.c_F), curvature):
        warnings.warn(note, StabilityWarning, stacklevel=2)

    u = prepare_initial(u0, pot)
    energy_ctx = SpectralContext(kernel)
    trace = EnergyTrace()
    if record_energy:
        trace.initial_energy = energy_discrete(u, kernel, pot, ctx=energy_ctx)

    wanted = snapshot_steps(snapshot_times, cfg.tau, cfg.steps)
    snapshots = [Snapshot(t, 0, 0.0, u.copy()) for t, s in zip(snapshot_times, wanted) if s == 0]
    max_abs = float(np.max(np.abs(u)))
    for k in range(1, cfg.steps + 1):
        before = ctx.convolutions
        if cfg.scheme is Scheme.FIRST_ORDER:
            u = step_first_order(u, kernel, cfg, ctx)
            iters = 0
        elif cfg.scheme is Scheme.SECOND_ORDER_EXPLICIT:
            u = step_second_order_explicit(u, kernel, cfg, ctx)
            iters = 2
        else:
            u, iters = step_second_order_implicit(u, kernel, cfg, ctx)
        max_abs = max(max_abs, float(np.max(np.abs(u))))
        time = k * cfg.tau
        if record_energy:
            energy = energy_discrete(u, kernel, pot, ctx=energy_ctx)
            trace.records.append(EnergyRecord(k, time, energy, iters, ctx.convolutions - before))
        for t, s in zip(snapshot_times, wanted):
            if s == k:
                snapshots.append(Snapshot(t, k, time, u.copy()))

    state = StepState(u, cfg.steps, cfg.steps * cfg.tau)
    return RunResult(state, trace, snapshots, ctx.convolutions, energy_ctx.convolutions, max_abs)
