"""Experiment drivers: evolution, time-step ladders and the coupled run."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..coupled import CoupledState, run_coupled
from ..kernel import KernelGrid, sample_periodic
from ..potentials import PotentialSpec
from ..spectral import norm_h
from ..stepper import RunResult, Scheme, SchemeConfig, run
from .config import ExperimentConfig
from .initial import initial_condition

__all__ = [
    "LadderRow",
    "ErrorTable",
    "RunReport",
    "fit_order",
    "reference_solution",
    "time_ladder",
    "convergence_study",
    "cost_study",
    "evolve",
    "coupled_experiment",
]


@dataclass
class LadderRow:
    tau: float
    steps: int
    error: float
    order: Optional[float]
    convolutions: int
    fp_iters: int
    max_energy_increase: float
    max_abs: float


@dataclass
class ErrorTable:
    scheme: Scheme
    rows: list
    slope: float
    fit_taus: list

    @property
    def taus(self) -> np.ndarray:
        return np.array([r.tau for r in self.rows])

    @property
    def errors(self) -> np.ndarray:
        return np.array([r.error for r in self.rows])


@dataclass
class RunReport:
    kind: str
    tables: dict = field(default_factory=dict)
    result: Optional[RunResult] = None
    coupled: object = None
    convolutions: int = 0
    wall_time: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def trace(self):
        return None if self.result is None else self.result.trace


def fit_order(taus, errors, rungs: int = 4, floor: float = 0.0):
    """Least-squares slope of ``log(error)`` against ``log(tau)``.

    Uses the last ``rungs`` rows, dropping those with ``error < floor``.
    Returns ``(slope, taus_used)``; the slope is ``nan`` with fewer than two
    usable rows.
    """
    taus = np.asarray(taus, dtype=float)[-rungs:]
    errors = np.asarray(errors, dtype=float)[-rungs:]
    keep = (errors >= floor) & (errors > 0)
    if keep.sum() < 2:
        return math.nan, list(taus[keep])
    slope = np.polyfit(np.log(taus[keep]), np.log(errors[keep]), 1)[0]
    return float(slope), list(taus[keep])


def successive_orders(errors) -> list:
    e = np.asarray(errors, dtype=float)
    out = [None]
    for a, b in zip(e[:-1], e[1:]):
        out.append(float(np.log2(a / b)) if a > 0 and b > 0 else None)
    return out


def reference_solution(
    u0: np.ndarray,
    kernel: KernelGrid,
    potential: PotentialSpec,
    tau: float,
    final_time: float,
    fp_tol: Optional[float] = None,
    fp_max_iter: int = 100,
) -> np.ndarray:
    """Benchmark solution from the implicit second-order scheme."""
    cfg = SchemeConfig(Scheme.SECOND_ORDER_IMPLICIT, tau, int(round(final_time / tau)), potential, fp_tol, fp_max_iter)
    return run(u0, kernel, cfg, record_energy=False).state.u


def time_ladder(
    u0: np.ndarray,
    kernel: KernelGrid,
    potential: PotentialSpec,
    scheme: Scheme,
    taus,
    final_time: float,
    reference: np.ndarray,
    fit_rungs: int = 4,
    error_floor: float = 0.0,
    fp_tol: Optional[float] = None,
    fp_max_iter: int = 100,
    record_energy: bool = True,
) -> ErrorTable:
    """Run one scheme at each step size and compare with ``reference``."""
    rows = []
    for tau in taus:
        steps = int(round(final_time / tau))
        cfg = SchemeConfig(scheme, tau, steps, potential, fp_tol, fp_max_iter)
        res = run(u0, kernel, cfg, record_energy=record_energy)
        err = norm_h(res.state.u - reference, kernel.grid)
        iters = sum(r.fp_iters for r in res.trace.records)
        rows.append(LadderRow(tau, steps, err, None, res.convolutions, iters, res.trace.max_increase(), res.max_abs))
    for row, order in zip(rows, successive_orders([r.error for r in rows])):
        row.order = order
    slope, used = fit_order([r.tau for r in rows], [r.error for r in rows], fit_rungs, error_floor)
    return ErrorTable(Scheme(scheme), rows, slope, used)


def _setup(cfg: ExperimentConfig):
    kernel = sample_periodic(cfg.kernel, cfg.grid)
    u0 = initial_condition(cfg.initial, cfg.grid, **cfg.ic_params())
    return kernel, u0


def _ladder_study(cfg: ExperimentConfig, tau0: float, ref_tau: float, kind: str) -> RunReport:
    start = time.perf_counter()
    kernel, u0 = _setup(cfg)
    reference = reference_solution(u0, kernel, cfg.potential, ref_tau, cfg.final_time, cfg.fp_tol, cfg.fp_max_iter)
    taus = [tau0 * 2.0**-k for k in range(cfg.levels)]
    report = RunReport(kind)
    for scheme in cfg.schemes:
        table = time_ladder(
            u0, kernel, cfg.potential, scheme, taus, cfg.final_time, reference,
            cfg.fit_rungs, cfg.error_floor, cfg.fp_tol, cfg.fp_max_iter,
        )
        report.tables[scheme.value] = table
        report.convolutions += sum(r.convolutions for r in table.rows)
    report.wall_time = time.perf_counter() - start
    report.meta = {"reference_tau": ref_tau, "c_gamma_N": kernel.c_gamma_N, "xi_N": kernel.xi_N(cfg.potential.c_F)}
    return report


def convergence_study(cfg: ExperimentConfig) -> RunReport:
    """Errors at ``final_time`` for ``tau = cfg.tau * 2^-k`` against a benchmark
    computed by the implicit scheme at ``cfg.tau * 2^-ref_exponent``."""
    return _ladder_study(cfg, cfg.tau, cfg.tau * 2.0**-cfg.ref_exponent, "converge")


def cost_study(cfg: ExperimentConfig) -> RunReport:
    """Error against convolution count, ``tau = (T/4) 2^-k``.

    The benchmark uses ``(T/4) 2^-ref_exponent``.
    """
    tau0 = cfg.final_time / 4.0
    return _ladder_study(cfg, tau0, tau0 * 2.0**-cfg.ref_exponent, "cost")


def evolve(cfg: ExperimentConfig) -> RunReport:
    start = time.perf_counter()
    kernel, u0 = _setup(cfg)
    scfg = SchemeConfig(cfg.scheme, cfg.tau, cfg.steps, cfg.potential, cfg.fp_tol, cfg.fp_max_iter)
    res = run(u0, kernel, scfg, cfg.snapshot_times, curvature=cfg.curvature)
    report = RunReport("evolve", result=res, convolutions=res.convolutions)
    report.wall_time = time.perf_counter() - start
    report.meta = {"c_gamma_N": kernel.c_gamma_N, "xi_N": kernel.xi_N(cfg.potential.c_F)}
    return report


def coupled_experiment(cfg: ExperimentConfig) -> RunReport:
    if cfg.coupled is None:
        raise ValueError("coupled experiment needs a [coupled] section")
    start = time.perf_counter()
    kernel, u0 = _setup(cfg)
    state = CoupledState(u0, np.full(cfg.grid.shape, cfg.theta0))
    out = run_coupled(state, kernel, cfg.coupled, cfg.snapshot_times)
    report = RunReport("coupled", coupled=out, convolutions=out.convolutions)
    report.wall_time = time.perf_counter() - start
    report.meta = {"c_gamma_N": kernel.c_gamma_N, "xi_N": kernel.xi_N(cfg.coupled.c_F)}
    return report
