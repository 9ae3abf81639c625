"""Command line entry point: ``nlac {evolve,converge,cost,coupled,selftest}``."""

from __future__ import annotations

import argparse
import math
import sys
import warnings

import numpy as np

from ..kernel import KernelSpec, sample_periodic
from ..potentials import PotentialSpec, ProxWeight, prox
from ..spectral import Grid, SpectralContext
from ..stepper import Scheme, SchemeConfig, run
from .config import load_config
from .output import write_outputs
from .studies import convergence_study, coupled_experiment, cost_study, evolve

__all__ = ["main", "selftest"]

RUNNERS = {
    "evolve": evolve,
    "converge": convergence_study,
    "cost": cost_study,
    "coupled": coupled_experiment,
}


def _check(name: str, ok: bool, detail: str, out) -> bool:
    print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}", file=out)
    return ok


def selftest(out=sys.stdout) -> bool:
    """Fast consistency checks on small grids. Returns True if all pass."""
    results = []

    v = np.linspace(-3, 3, 61)
    s = prox(PotentialSpec.obstacle(), ProxWeight(2.0), v)
    results.append(_check("obstacle prox", np.array_equal(s, np.clip(v, -1, 1)), "projection onto [-1, 1]", out))

    c = 0.7
    s = prox(PotentialSpec.regular(c * 2.0), ProxWeight(2.0), v)
    res = float(np.max(np.abs(c * s**3 + s - v)))
    results.append(_check("regular prox", res < 1e-12, f"cubic residual {res:.1e}", out))

    s = prox(PotentialSpec.logarithmic(0.5), ProxWeight(1.0), v)
    inside = bool(np.all(np.abs(s) < 1))
    results.append(_check("log prox", inside, "roots inside (-1, 1)", out))

    grid = Grid.cube(1.0, 16, 2)
    kernel = sample_periodic(KernelSpec(0.1, 0.1, 2), grid)
    rng = np.random.default_rng(0)
    u = rng.uniform(-1, 1, grid.shape)
    idx = np.arange(16)
    direct = np.zeros(grid.shape)
    for i in range(16):
        for j in range(16):
            g = kernel.values[np.ix_((i - idx) % 16, (j - idx) % 16)]
            direct[i, j] = grid.cell_volume * np.sum(g * u)
    fast = SpectralContext(kernel).convolve(u)
    err = float(np.max(np.abs(fast - direct)))
    results.append(_check("convolution", err < 1e-12 * max(1.0, np.max(np.abs(direct))), f"FFT vs direct sum {err:.1e}", out))

    rel = abs(kernel.c_gamma_N - 4.0) / 4.0
    results.append(_check("kernel mass", rel < 1e-2, f"c_gamma_N = {kernel.c_gamma_N:.6f}", out))

    u0 = np.cos(math.pi * grid.mesh()[0]) * np.cos(math.pi * grid.mesh()[1])
    ok = True
    for scheme in Scheme:
        cfg = SchemeConfig(scheme, 0.01, 10, PotentialSpec.obstacle())
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            res = run(u0, kernel, cfg)
        ok &= res.trace.is_nonincreasing() and res.max_abs <= 1.0
    results.append(_check("energy decay", ok, "obstacle, all schemes, 10 steps", out))
    return all(results)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nlac", description="Nonlocal Allen-Cahn solver and experiment harness.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in RUNNERS:
        p = sub.add_parser(name, help=f"run a {name} experiment")
        p.add_argument("--config", help="INI-style experiment file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int, help="RNG seed for random initial data")
        p.add_argument("--override", action="append", default=[], metavar="SECTION.KEY=VALUE")
    sub.add_parser("selftest", help="quick consistency checks")
    return parser


def _summary(report) -> None:
    print(f"{report.kind}: {report.convolutions} convolutions in {report.wall_time:.2f} s")
    for name, table in report.tables.items():
        print(f"[{name}] slope over fit rows: {table.slope:.3f}")
        print("  tau            error          order")
        for r in table.rows:
            order = "" if r.order is None else f"{r.order:.3f}"
            print(f"  {r.tau:<14.6g} {r.error:<14.6e} {order}")
    if report.result is not None:
        e = report.trace.all_energies()
        if e.size:
            print(f"energy {e[0]:.10g} -> {e[-1]:.10g}, max |u| {report.result.max_abs:.6g}")
    if report.coupled is not None:
        lf = report.coupled.liquid_fraction
        print(f"liquid fraction {lf[0]:.4f} -> {lf[-1]:.4f}, max |m| {report.coupled.max_coupling:.4f}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "selftest":
        return 0 if selftest() else 1
    override = list(args.override)
    override.append(f"experiment.kind={args.command}")
    try:
        cfg = load_config(args.config, override, args.seed, args.out)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = RUNNERS[args.command](cfg)
    _summary(report)
    if cfg.output:
        paths = write_outputs(report, cfg.output, cfg)
        print(f"wrote {len(paths)} files to {cfg.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
