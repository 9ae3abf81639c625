"""Double-well potentials and their pointwise proximal operators.

Every potential is split as ``F(u) = f0(u) + psi(u)`` with the concave part
``f0(u) = c_F/2 (1 - u^2)`` and a convex part ``psi`` that is one of

* obstacle: the indicator of ``[-1, 1]``,
* logarithmic (Flory-Huggins): ``theta_c/2 ((1+u) ln(1+u) + (1-u) ln(1-u))``,
* regular: ``c_F/4 (u^4 - 1)``.

All functions here are vectorised over numpy arrays and accept scalars.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = [
    "PotentialKind",
    "PotentialSpec",
    "ProxWeight",
    "psi_value",
    "psi_prime",
    "prox",
    "potential_energy_density",
    "cardano_root",
    "log_prox_root",
]

# Safeguarded Newton settings for the logarithmic proximal map.
LOG_GUESS_MARGIN = 1e-3
LOG_EDGE = 1.0 - 1e-15
NEWTON_MAX_STEPS = 50
RESIDUAL_TOL = 1e-13
STEP_TOL = 1e-15
BISECTION_MAX_STEPS = 200


class PotentialKind(str, enum.Enum):
    OBSTACLE = "obstacle"
    REGULAR = "regular"
    LOGARITHMIC = "logarithmic"


@dataclass(frozen=True)
class PotentialSpec:
    """Which double-well potential to use, plus its constants.

    ``theta_c`` is only meaningful (and required) for the logarithmic
    potential, where ``0 < theta_c < c_F`` must hold.
    """

    kind: PotentialKind
    c_F: float = 1.0
    theta_c: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", PotentialKind(self.kind))
        if not self.c_F > 0:
            raise ValueError(f"c_F must be positive, got {self.c_F}")
        if self.kind is PotentialKind.LOGARITHMIC:
            if self.theta_c is None:
                raise ValueError("logarithmic potential requires theta_c")
            if not 0 < self.theta_c < self.c_F:
                raise ValueError(
                    f"need 0 < theta_c < c_F, got theta_c={self.theta_c}, c_F={self.c_F}"
                )

    @classmethod
    def obstacle(cls, c_F: float = 1.0) -> "PotentialSpec":
        return cls(PotentialKind.OBSTACLE, c_F)

    @classmethod
    def regular(cls, c_F: float = 1.0) -> "PotentialSpec":
        return cls(PotentialKind.REGULAR, c_F)

    @classmethod
    def logarithmic(cls, theta_c: float, c_F: float = 1.0) -> "PotentialSpec":
        return cls(PotentialKind.LOGARITHMIC, c_F, theta_c)

    @property
    def bounded(self) -> bool:
        """True if admissible values are restricted to ``[-1, 1]``."""
        return self.kind is not PotentialKind.REGULAR


@dataclass(frozen=True)
class ProxWeight:
    """Weight of ``prox_{psi/(a*lam)}``.

    ``stage_divisor`` is ``a``: 1 for the first-order scheme and 2 for the
    second-order fixed-point sweeps.
    """

    lam: float
    stage_divisor: int = 1

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"prox weight lambda must be positive, got {self.lam}")
        if self.stage_divisor not in (1, 2):
            raise ValueError(f"stage_divisor must be 1 or 2, got {self.stage_divisor}")

    @property
    def scale(self) -> float:
        """The factor ``1/(a*lam)`` multiplying ``psi``."""
        return 1.0 / (self.stage_divisor * self.lam)


def _out(x):
    # Return python floats for scalar input.
    return x.item() if isinstance(x, np.ndarray) and x.ndim == 0 else x


def psi_value(spec: PotentialSpec, u):
    """Convex part ``psi(u)``, ``+inf`` where infeasible."""
    u = np.asarray(u, dtype=float)
    kind = spec.kind
    if kind is PotentialKind.REGULAR:
        u2 = u * u
        return _out(0.25 * spec.c_F * (u2 * u2 - 1.0))
    inside = np.abs(u) <= 1.0
    if kind is PotentialKind.OBSTACLE:
        return _out(np.where(inside, 0.0, np.inf))
    # x ln x -> 0 as x -> 0, so the endpoints take the one-sided limit.
    a = np.clip(1.0 + u, 0.0, 2.0)
    b = np.clip(1.0 - u, 0.0, 2.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ta = np.where(a > 0, a * np.log(np.where(a > 0, a, 1.0)), 0.0)
        tb = np.where(b > 0, b * np.log(np.where(b > 0, b, 1.0)), 0.0)
    return _out(np.where(inside, 0.5 * spec.theta_c * (ta + tb), np.inf))


def psi_prime(spec: PotentialSpec, u):
    """Derivative of ``psi`` for the regular and logarithmic potentials.

    Raises
    ------
    ValueError
        For the obstacle potential (its subdifferential is set-valued) or for
        logarithmic arguments with ``|u| >= 1``.
    """
    u = np.asarray(u, dtype=float)
    if spec.kind is PotentialKind.OBSTACLE:
        raise ValueError("psi' is set-valued for the obstacle potential")
    if spec.kind is PotentialKind.REGULAR:
        return _out(spec.c_F * (u * u * u))
    if np.any(np.abs(u) >= 1.0):
        raise ValueError("logarithmic psi' is only defined on (-1, 1)")
    # theta_c/2 (ln(1+u) - ln(1-u)) == theta_c * artanh(u)
    return _out(spec.theta_c * np.arctanh(u))


def potential_energy_density(spec: PotentialSpec, u):
    """Full double-well density ``F(u) = c_F/2 (1 - u^2) + psi(u)``."""
    u = np.asarray(u, dtype=float)
    return _out(0.5 * spec.c_F * (1.0 - u**2) + np.asarray(psi_value(spec, u)))


def cardano_root(c, v):
    """Real root of ``c*s**3 + s = v`` for ``c > 0`` via Cardano's formula.

    With ``zeta = v/(2c)`` and ``r = 1/(3c)`` the root is ``A + B`` where
    ``A, B = cbrt(zeta +- sqrt(zeta^2 + r^3))``. The discriminant is positive,
    so only real cube roots appear. ``A`` is taken with the sign of ``zeta``
    (no cancellation), ``B = -r/A`` from ``A*B = -r``, and the sum is formed
    as ``(A^3 + B^3) / (A^2 - A*B + B^2) = 2*zeta / (A^2 + r + B^2)``, which
    avoids the cancellation of ``A + B`` when ``r`` dominates.
    """
    v = np.asarray(v, dtype=float)
    zeta = v / (2.0 * c)
    r = 1.0 / (3.0 * c)
    disc = np.sqrt(zeta * zeta + r**3)
    a = np.cbrt(np.abs(zeta) + disc)
    b = r / a
    s = (2.0 * zeta) / (a * a + r + b * b)
    return _out(s)


def _log_residual(coef, s, v):
    return coef * np.arctanh(s) + s - v


def log_prox_root(coef, v):
    """Solve ``coef * artanh(s) + s = v`` for ``s`` in ``(-1, 1)``.

    ``coef`` is ``theta_c / (a*lam)``. Newton's method starts from ``v``
    pulled slightly inside the interval; any point whose Newton iterate
    leaves the open interval, or that is not converged after
    ``NEWTON_MAX_STEPS`` steps, is finished by bisection on
    ``[-LOG_EDGE, LOG_EDGE]``.
    """
    v = np.asarray(v, dtype=float)
    scalar = v.ndim == 0
    v = np.atleast_1d(v)
    s = np.clip(v, -1.0 + LOG_GUESS_MARGIN, 1.0 - LOG_GUESS_MARGIN)
    # Points leave the iteration by converging (|g| or the step is tiny)
    # or by escaping the interval, which sends them to bisection.
    active = np.ones(v.shape, dtype=bool)
    escaped = np.zeros(v.shape, dtype=bool)
    for _ in range(NEWTON_MAX_STEPS):
        g = _log_residual(coef, s, v)
        active &= np.abs(g) > RESIDUAL_TOL
        if not active.any():
            break
        step = g / (coef / ((1.0 - s) * (1.0 + s)) + 1.0)
        s_new = s - step
        out = active & (np.abs(s_new) >= LOG_EDGE)
        escaped |= out
        active &= ~out
        np.copyto(s, s_new, where=active)
        active &= np.abs(step) > STEP_TOL
    fallback = escaped | active
    if fallback.any():
        s[fallback] = _log_bisect(coef, v[fallback])
    return s[0].item() if scalar else s


def _log_bisect(coef, v):
    lo = np.full(v.shape, -LOG_EDGE)
    hi = np.full(v.shape, LOG_EDGE)
    # Roots beyond the bracket are pinned to its ends.
    g_lo = _log_residual(coef, lo, v)
    g_hi = _log_residual(coef, hi, v)
    mid = 0.5 * (lo + hi)
    for _ in range(BISECTION_MAX_STEPS):
        mid = 0.5 * (lo + hi)
        g = _log_residual(coef, mid, v)
        hit = np.abs(g) <= RESIDUAL_TOL
        lo = np.where(g < 0, mid, lo)
        hi = np.where(g > 0, mid, hi)
        if np.all(hit | (hi - lo <= STEP_TOL)):
            break
    mid = np.where(np.abs(g) <= RESIDUAL_TOL, mid, 0.5 * (lo + hi))
    mid = np.where(g_lo >= 0, -LOG_EDGE, mid)
    return np.where(g_hi <= 0, LOG_EDGE, mid)


def prox(spec: PotentialSpec, weight: ProxWeight, v):
    """Pointwise proximal map of ``psi/(a*lam)``.

    Returns the minimiser ``s`` of ``psi(s)/(a*lam) + (s - v)^2/2``:

    * obstacle: projection of ``v`` onto ``[-1, 1]``,
    * regular: root of ``c_F/(a*lam) s^3 + s = v`` (Cardano),
    * logarithmic: root of ``theta_c/(a*lam) artanh(s) + s = v``.
    """
    kind = spec.kind
    if kind is PotentialKind.OBSTACLE:
        return _out(np.clip(np.asarray(v, dtype=float), -1.0, 1.0))
    if kind is PotentialKind.REGULAR:
        return cardano_root(spec.c_F * weight.scale, v)
    return log_prox_root(spec.theta_c * weight.scale, v)


def max_curvature(spec: PotentialSpec, rho: float) -> float:
    """Bound on ``|psi''|`` over ``[-rho, rho]`` (diagnostic use only)."""
    if spec.kind is PotentialKind.OBSTACLE:
        return 0.0
    if spec.kind is PotentialKind.REGULAR:
        return 3.0 * spec.c_F * rho * rho
    if rho >= 1.0:
        return math.inf
    return spec.theta_c / (1.0 - rho * rho)
