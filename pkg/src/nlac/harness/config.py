"""Experiment configuration: INI-style files with sections plus overrides.

Example::

    [experiment]
    kind = converge
    seed = 0

    [grid]
    extent = 1.0
    points = 128
    dim = 2

    [kernel]
    epsilon = 0.1
    delta = 0.1

    [potential]
    kind = obstacle
    c_F = 1.0

    [scheme]
    scheme = first
    tau = 0.005
    final_time = 0.2

    [initial]
    name = cosine_product

Overrides use ``section.key=value``.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..coupled import CoupledConfig
from ..kernel import KernelSpec
from ..potentials import PotentialKind, PotentialSpec
from ..spectral import Grid
from ..stepper import Scheme

__all__ = ["ExperimentConfig", "load_config", "parse_config", "apply_overrides"]

KINDS = ("evolve", "converge", "cost", "coupled")


def _floats(text: str) -> list:
    return [float(t) for t in text.replace(",", " ").split()]


def _ints(text: str) -> list:
    return [int(t) for t in text.replace(",", " ").split()]


def _literal(text: str):
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    return text


@dataclass
class ExperimentConfig:
    kind: str
    grid: Grid
    kernel: KernelSpec
    potential: PotentialSpec
    scheme: Scheme = Scheme.FIRST_ORDER
    tau: float = 0.005
    final_time: float = 0.2
    fp_tol: Optional[float] = None
    fp_max_iter: int = 100
    curvature: Optional[float] = None
    initial: str = "cosine_product"
    initial_params: dict = field(default_factory=dict)
    seed: Optional[int] = None
    snapshot_times: list = field(default_factory=list)
    output: Optional[str] = None
    # ladder studies
    schemes: list = field(default_factory=lambda: [s for s in Scheme])
    levels: int = 7
    ref_exponent: int = 10
    fit_rungs: int = 4
    error_floor: float = 0.0
    # non-isothermal run
    coupled: Optional[CoupledConfig] = None
    theta0: float = 0.0
    raw: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"experiment kind must be one of {KINDS}, got {self.kind!r}")
        if self.initial in ("uniform", "gaussian_field") and self.seed is None:
            raise ValueError("a random initial condition requires a seed")

    @property
    def steps(self) -> int:
        return int(round(self.final_time / self.tau))

    def ic_params(self) -> dict:
        params = dict(self.initial_params)
        if self.initial in ("uniform", "gaussian_field"):
            params.setdefault("seed", self.seed)
        if self.initial in ("bubbles", "star"):
            params.setdefault("epsilon", self.kernel.epsilon)
        return params

    def to_dict(self) -> dict:
        """Flat description for manifests."""
        return {
            "kind": self.kind,
            "grid": {"extents": list(self.grid.extents), "counts": list(self.grid.counts)},
            "kernel": {"epsilon": self.kernel.epsilon, "delta": self.kernel.delta, "dim": self.kernel.dim},
            "potential": {
                "kind": self.potential.kind.value,
                "c_F": self.potential.c_F,
                "theta_c": self.potential.theta_c,
            },
            "scheme": {
                "scheme": self.scheme.value,
                "tau": self.tau,
                "final_time": self.final_time,
                "fp_tol": self.fp_tol,
                "fp_max_iter": self.fp_max_iter,
            },
            "initial": {"name": self.initial, **{k: v for k, v in self.initial_params.items()}},
            "seed": self.seed,
        }


def apply_overrides(sections: dict, overrides) -> dict:
    out = {name: dict(values) for name, values in sections.items()}
    for item in overrides or ():
        key, sep, value = item.partition("=")
        section, dot, option = key.strip().partition(".")
        if not sep or not dot:
            raise ValueError(f"override {item!r} must look like section.key=value")
        out.setdefault(section, {})[option.strip()] = value.strip()
    return out


def parse_config(sections: dict) -> ExperimentConfig:
    """Build an :class:`ExperimentConfig` from ``{section: {key: text}}``."""
    exp = sections.get("experiment", {})
    g = sections.get("grid", {})
    dim = int(g.get("dim", 2))
    extents = _floats(g.get("extent", "1.0"))
    counts = _ints(g.get("points", "128"))
    grid = Grid(tuple(extents * dim if len(extents) == 1 else extents), tuple(counts * dim if len(counts) == 1 else counts))

    k = sections.get("kernel", {})
    kernel = KernelSpec(float(k.get("epsilon", 0.1)), float(k.get("delta", 0.1)), grid.dim)

    p = sections.get("potential", {})
    theta = p.get("theta_c")
    potential = PotentialSpec(
        PotentialKind(p.get("kind", "obstacle")),
        float(p.get("c_F", 1.0)),
        float(theta) if theta not in (None, "") else None,
    )

    s = sections.get("scheme", {})
    tau = float(s.get("tau", 0.005))
    if "final_time" in s:
        final_time = float(s["final_time"])
    elif "steps" in s:
        final_time = int(s["steps"]) * tau
    else:
        final_time = 0.2
    fp_tol = s.get("fp_tol")
    curvature = s.get("curvature")

    ini = dict(sections.get("initial", {}))
    ic_name = ini.pop("name", "cosine_product")
    ic_params = {key: _literal(val) for key, val in ini.items()}

    study = sections.get("study", {})
    schemes = [Scheme(x.strip()) for x in study.get("schemes", "first,explicit,implicit").split(",") if x.strip()]

    kind = exp.get("kind", "evolve")
    coupled = None
    theta0 = 0.0
    if kind == "coupled" or "coupled" in sections:
        c = sections.get("coupled", {})
        coupled = CoupledConfig(
            tau=tau,
            steps=int(round(final_time / tau)),
            c_F=potential.c_F,
            D=float(c.get("D", 1.0)),
            mu=float(c.get("mu", 3e-4)),
            latent=float(c.get("latent", 0.5)),
            alpha=float(c.get("alpha", 0.9)),
            rho=float(c.get("rho", 10.0)),
            theta_e=float(c.get("theta_e", 1.0)),
        )
        theta0 = float(c.get("theta0", 0.0))

    seed = exp.get("seed")
    snaps = exp.get("snapshot_times", "")
    return ExperimentConfig(
        kind=kind,
        grid=grid,
        kernel=kernel,
        potential=potential,
        scheme=Scheme(s.get("scheme", "first")),
        tau=tau,
        final_time=final_time,
        fp_tol=float(fp_tol) if fp_tol not in (None, "") else None,
        fp_max_iter=int(s.get("fp_max_iter", 100)),
        curvature=float(curvature) if curvature not in (None, "") else None,
        initial=ic_name,
        initial_params=ic_params,
        seed=int(seed) if seed not in (None, "") else None,
        snapshot_times=_floats(snaps) if snaps else [],
        output=exp.get("output"),
        schemes=schemes,
        levels=int(study.get("levels", 7)),
        ref_exponent=int(study.get("ref_exponent", 10)),
        fit_rungs=int(study.get("fit_rungs", 4)),
        error_floor=float(study.get("error_floor", 0.0)),
        coupled=coupled,
        theta0=theta0,
        raw=sections,
    )


def read_sections(path) -> dict:
    parser = configparser.ConfigParser()
    parser.optionxform = str
    with open(path) as fh:
        parser.read_file(fh)
    return {name: dict(parser[name]) for name in parser.sections()}


def load_config(path=None, overrides=(), seed: Optional[int] = None, output=None) -> ExperimentConfig:
    """Read a config file (optional), apply overrides and CLI seed/output."""
    sections = read_sections(Path(path)) if path else {}
    sections = apply_overrides(sections, overrides)
    if seed is not None:
        sections.setdefault("experiment", {})["seed"] = str(seed)
    if output is not None:
        sections.setdefault("experiment", {})["output"] = str(output)
    return parse_config(sections)
