"""Mean-field phase diagram of the driven-damped two-mode condensate model.

Parameters are expressed in recoil units (omega_r = 1).  The model is the
transversally pumped condensate in a lossy cavity reduced to one photon mode
and one atomic side mode:

* ``delta_c``  cavity detuning (must be negative for a threshold to exist),
* ``kappa``    photon loss rate (half width), zero for the closed system,
* ``u``        dispersive shift per atom times atom number,
* ``y``        pump strength.

The stationary mean field satisfies

    [i (delta_c - u beta0^2) - kappa] alpha0 = -y beta0 sqrt(1 - beta0^2)
    (omega_r + u |alpha0|^2) beta0 = -y Im(alpha0) (1 - 2 beta0^2) / sqrt(1 - beta0^2)

with the chemical potential mu = -(omega_r + u |alpha0|^2) / (2 (1 - 2 beta0^2)).
Below the critical pump the normal solution alpha0 = beta0 = 0 is the stable
one; above it the condensate acquires a density modulation beta0 > 0 and the
cavity a coherent amplitude.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .basis import OMEGA_R
from .errors import DegenerateBranch, NoThreshold, NumericalFailure

# Residuals of the stationarity conditions must close to this level.
RESIDUAL_TOL = 1e-12


class Phase(enum.Enum):
    NORMAL = "normal"
    SUPERRADIANT = "superradiant"


@dataclass(frozen=True)
class ModelParams:
    """Model parameters in recoil units."""

    delta_c: float
    kappa: float
    u: float
    y: float

    def __post_init__(self):
        for name in ("delta_c", "kappa", "u", "y"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.kappa < 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa!r}")
        if self.y < 0:
            raise ValueError(f"y must be >= 0, got {self.y!r}")

    def with_pump(self, y: float) -> "ModelParams":
        return replace(self, y=float(y))


@dataclass(frozen=True)
class MeanField:
    """Stationary mean-field solution at one parameter point."""

    alpha0: complex
    beta0: float
    mu: float
    phase: Phase

    @property
    def photon_density(self) -> float:
        return abs(self.alpha0) ** 2

    @property
    def order_parameter(self) -> float:
        return self.beta0 ** 2


def critical_pump(params: ModelParams) -> float:
    """Pump strength at which the normal phase loses stability.

    y_c = sqrt(-omega_r (delta_c^2 + kappa^2) / delta_c), defined only for
    delta_c < 0; otherwise the pumped mode is never softened and there is no
    transition.  The pump value stored in ``params`` plays no role.
    """
    if not (params.delta_c < 0.0):
        raise NoThreshold(
            f"no critical pump for delta_c = {params.delta_c!r}; need delta_c < 0")
    return math.sqrt(-OMEGA_R * (params.delta_c ** 2 + params.kappa ** 2)
                     / params.delta_c)


def mean_field_residuals(params: ModelParams, alpha0: complex,
                         beta0: float) -> tuple[complex, float]:
    """Residuals of the two stationarity conditions (zero at a solution)."""
    root = math.sqrt(max(0.0, 1.0 - beta0 ** 2))
    res_a = ((1j * (params.delta_c - params.u * beta0 ** 2) - params.kappa)
             * alpha0 + params.y * beta0 * root)
    if root == 0.0:
        raise DegenerateBranch("beta0 = 1 is outside the two-mode expansion")
    res_b = ((OMEGA_R + params.u * abs(alpha0) ** 2) * beta0
             + params.y * alpha0.imag * (1.0 - 2.0 * beta0 ** 2) / root)
    return res_a, res_b


def _order_parameter_squared(params: ModelParams, y_c: float) -> float:
    """beta0^2 on the superradiant branch."""
    if params.u == 0.0:
        return (params.y ** 2 - y_c ** 2) / (2.0 * params.y ** 2)
    ratio = (params.u / params.delta_c
             * (params.y ** 2 - y_c ** 2) / (params.y ** 2 + params.u * OMEGA_R))
    radicand = 1.0 - ratio
    if radicand < 0.0:
        raise NumericalFailure(
            f"superradiant branch undefined: radicand {radicand!r} < 0")
    return params.delta_c / params.u * (1.0 - math.sqrt(radicand))


def solve_mean_field(params: ModelParams) -> MeanField:
    """Stationary mean field on the physical (stable) branch.

    Below and at the critical pump this is the normal phase; above it the
    superradiant branch with beta0 > 0.  The returned solution is verified
    against both stationarity conditions to RESIDUAL_TOL.
    """
    y_c = critical_pump(params)
    if params.y <= y_c:
        mu = -0.5 * OMEGA_R
        return MeanField(alpha0=0.0 + 0.0j, beta0=0.0, mu=mu, phase=Phase.NORMAL)

    beta0_sq = _order_parameter_squared(params, y_c)
    if not (0.0 < beta0_sq < 1.0):
        raise NumericalFailure(
            f"beta0^2 = {beta0_sq!r} outside (0, 1) for y = {params.y!r}")
    beta0 = math.sqrt(beta0_sq)
    denom = 1j * (params.delta_c - params.u * beta0_sq) - params.kappa
    alpha0 = -params.y * beta0 * math.sqrt(1.0 - beta0_sq) / denom

    if abs(1.0 - 2.0 * beta0_sq) < 1e-12:
        raise DegenerateBranch(
            f"1 - 2 beta0^2 = {1.0 - 2.0 * beta0_sq!r}; chemical potential singular")
    mu = -0.5 * (OMEGA_R + params.u * abs(alpha0) ** 2) / (1.0 - 2.0 * beta0_sq)

    res_a, res_b = mean_field_residuals(params, alpha0, beta0)
    if abs(res_a) > RESIDUAL_TOL or abs(res_b) > RESIDUAL_TOL:
        raise NumericalFailure(
            f"mean-field residuals ({abs(res_a):.3e}, {abs(res_b):.3e}) "
            f"exceed {RESIDUAL_TOL:g}")
    return MeanField(alpha0=alpha0, beta0=beta0, mu=mu, phase=Phase.SUPERRADIANT)


def mean_field_curve(params: ModelParams, y_grid) -> np.ndarray:
    """Mean-field amplitudes along a pump grid at fixed (delta_c, kappa, u).

    Returns a structured array with fields y, y_over_yc, alpha0_sq, beta0_sq.
    The pump value stored in ``params`` is ignored.
    """
    y_grid = np.asarray(y_grid, dtype=float)
    y_c = critical_pump(params)
    out = np.zeros(y_grid.size, dtype=[("y", float), ("y_over_yc", float),
                                       ("alpha0_sq", float), ("beta0_sq", float)])
    for i, y in enumerate(y_grid):
        mf = solve_mean_field(params.with_pump(y))
        out[i] = (y, y / y_c, mf.photon_density, mf.order_parameter)
    return out
