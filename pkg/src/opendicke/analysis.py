"""Parameter scans, critical-exponent fits, and figure-table assembly.

The exponent protocol fixes a log-spaced grid of relative distances
eps = |1 - y/y_c| and fits a straight line to (ln eps, ln delta_n).  The
observable comes from the steady state when kappa > 0 and from the ground
state when kappa = 0; the analytic critical pump is used for centering.

Scan tables carry one row per grid point with a status column; points where
the model raises (divergence at the critical point, defective matrices,
instability) are reported, never dropped.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .entanglement import log_negativity, quad_covariance
from .errors import (DefectiveMatrix, DegenerateBranch, DivergentSteadyState,
                     DynamicalInstability, InvalidCurve, NumericalFailure,
                     UnstableState)
from .fluctuations import SecondMoments, observables, spectrum_scan, \
    steady_state_moments
from .groundstate import ground_state_moments
from .model import ModelParams, critical_pump, solve_mean_field

DEFAULT_WINDOW = (math.exp(-14.0), math.exp(-5.0))
DEFAULT_POINTS_PER_SIDE = 40
GOOD_FIT_R_SQUARED = 0.999


class Side(enum.Enum):
    BELOW = "below"
    ABOVE = "above"


class ScanKind(enum.Enum):
    MEAN_AND_FLUCT = "mean_and_fluct"
    EXPONENT = "exponent"
    ENTANGLEMENT = "entanglement"
    SPECTRUM = "spectrum"


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares power-law fit on a log-log curve."""

    slope: float
    intercept: float
    r_squared: float
    window: tuple[float, float]
    side: Side
    n_points: int

    @property
    def poor_fit(self) -> bool:
        return self.r_squared < GOOD_FIT_R_SQUARED


@dataclass(frozen=True)
class Table:
    """Scan result: fixed columns, one tuple per row, extras in meta."""

    kind: ScanKind
    columns: tuple[str, ...]
    rows: list[tuple]
    meta: dict = field(default_factory=dict)


def exponent_grid(window: tuple[float, float] = DEFAULT_WINDOW,
                  n: int = DEFAULT_POINTS_PER_SIDE) -> np.ndarray:
    """Log-spaced grid of relative distances spanning the fit window."""
    lo, hi = window
    if not (0.0 < lo < hi):
        raise ValueError(f"invalid window {window!r}; need 0 < min < max")
    return np.exp(np.linspace(math.log(lo), math.log(hi), n))


def exponent_fit(curve, window: tuple[float, float] = DEFAULT_WINDOW,
                 side: Side = Side.BELOW) -> ExponentFit:
    """Fit ln(value) = slope * ln(eps) + intercept inside the window.

    ``curve`` is a sequence of (eps, value) pairs with eps = |1 - y/y_c|.
    Values must be positive inside the window and at least 8 points must
    survive the window cut.
    """
    arr = np.asarray(list(curve), dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InvalidCurve(f"curve must be pairs (eps, value), got shape {arr.shape}")
    lo, hi = window
    mask = (arr[:, 0] >= lo) & (arr[:, 0] <= hi)
    pts = arr[mask]
    if pts.shape[0] < 8:
        raise InvalidCurve(
            f"only {pts.shape[0]} points inside window {window!r}; need >= 8")
    if np.any(pts[:, 1] <= 0.0):
        raise InvalidCurve("non-positive values inside the fit window")

    lx = np.log(pts[:, 0])
    ly = np.log(pts[:, 1])
    design = np.column_stack([lx, np.ones_like(lx)])
    coef, _, _, _ = np.linalg.lstsq(design, ly, rcond=None)
    slope, intercept = float(coef[0]), float(coef[1])
    residual = ly - design @ coef
    total = ly - np.mean(ly)
    ss_tot = float(total @ total)
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - float(residual @ residual) / ss_tot
    return ExponentFit(slope=slope, intercept=intercept, r_squared=r_squared,
                       window=(lo, hi), side=side, n_points=pts.shape[0])


def _point_moments(params: ModelParams) -> SecondMoments:
    """Fluctuation moments with the kappa = 0 / kappa > 0 dispatch."""
    if params.kappa == 0.0:
        return ground_state_moments(params)
    return steady_state_moments(params)


def depletion_curve(params: ModelParams, side: Side,
                    window: tuple[float, float] = DEFAULT_WINDOW,
                    n: int = DEFAULT_POINTS_PER_SIDE,
                    threads: int = 1) -> np.ndarray:
    """(eps, delta_n, n_photon) rows approaching y_c from one side."""
    y_c = critical_pump(params)
    eps = exponent_grid(window, n)
    sign = -1.0 if side is Side.BELOW else 1.0
    ys = y_c * (1.0 + sign * eps)

    def point(y: float) -> tuple[float, float]:
        return observables(_point_moments(params.with_pump(y)))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(point, ys))
    else:
        values = [point(y) for y in ys]
    out = np.empty((n, 3))
    out[:, 0] = eps
    out[:, 1] = [v[0] for v in values]
    out[:, 2] = [v[1] for v in values]
    return out


def critical_exponent(params: ModelParams, side: Side,
                      window: tuple[float, float] = DEFAULT_WINDOW,
                      n: int = DEFAULT_POINTS_PER_SIDE,
                      threads: int = 1) -> ExponentFit:
    """Power-law exponent of the depletion divergence on one side of y_c."""
    curve = depletion_curve(params, side, window, n, threads)
    return exponent_fit(curve[:, :2], window, side)


_STATUS_BY_ERROR = (
    (DivergentSteadyState, "divergent"),
    (DefectiveMatrix, "defective"),
    (UnstableState, "unstable"),
    (DynamicalInstability, "unstable"),
    (DegenerateBranch, "degenerate"),
    (NumericalFailure, "failed"),
)

# Errors that scans absorb into a row status instead of aborting.
SCAN_ERRORS = tuple(cls for cls, _ in _STATUS_BY_ERROR)


def status_of(err: Exception) -> str:
    """Status-column label for a scan-protected error."""
    for cls, label in _STATUS_BY_ERROR:
        if isinstance(err, cls):
            return label
    raise err


def _map_points(func, ys, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(func, ys))
    return [func(y) for y in ys]


def _excitation_table(params: ModelParams, y_grid, threads: int) -> Table:
    y_c = critical_pump(params)

    def point(y: float) -> tuple:
        p = params.with_pump(y)
        try:
            mf = solve_mean_field(p)
        except SCAN_ERRORS as err:
            return (y, y / y_c, math.nan, math.nan, math.nan,
                    math.nan, math.nan, status_of(err))
        try:
            delta_n, n_photon = observables(_point_moments(p))
            status = "ok"
        except SCAN_ERRORS as err:
            delta_n = n_photon = math.nan
            status = status_of(err)
        return (y, y / y_c, mf.alpha0.real, mf.alpha0.imag, mf.beta0 ** 2,
                delta_n, n_photon, status)

    rows = _map_points(point, np.asarray(y_grid, dtype=float), threads)
    return Table(kind=ScanKind.MEAN_AND_FLUCT,
                 columns=("y", "y_over_yc", "alpha0_re", "alpha0_im",
                          "beta0_sq", "delta_N", "n_photon", "status"),
                 rows=rows)


def _entanglement_table(params: ModelParams, y_grid, threads: int) -> Table:
    y_c = critical_pump(params)

    def point(y: float) -> tuple:
        p = params.with_pump(y)
        try:
            cov = quad_covariance(_point_moments(p))
            row = (log_negativity(cov), cov.nu_min, "ok")
        except SCAN_ERRORS as err:
            row = (math.nan, math.nan, status_of(err))
        return (y, y / y_c) + row

    rows = _map_points(point, np.asarray(y_grid, dtype=float), threads)
    return Table(kind=ScanKind.ENTANGLEMENT,
                 columns=("y", "y_over_yc", "log_negativity", "nu_min",
                          "status"),
                 rows=rows)


def _spectrum_table(params: ModelParams, y_grid, threads: int) -> Table:
    scan = spectrum_scan(params, y_grid, threads=threads)
    y_c = critical_pump(params)
    rows = []
    for i, y in enumerate(scan.y):
        lams = scan.branches[i]
        rows.append((float(y), float(y) / y_c)
                    + tuple(float(v) for lam in lams for v in (lam.real, lam.imag))
                    + (scan.status[i],))
    columns = ("y", "y_over_yc")
    for k in range(1, 5):
        columns += (f"lambda{k}_re", f"lambda{k}_im")
    columns += ("status",)
    return Table(kind=ScanKind.SPECTRUM, columns=columns, rows=rows,
                 meta={"real_intervals": scan.real_intervals})


def _exponent_table(params: ModelParams, window: tuple[float, float],
                    n: int, sides, threads: int) -> Table:
    rows = []
    curves = {}
    for side in sides:
        curve = depletion_curve(params, side, window, n, threads)
        fit = exponent_fit(curve[:, :2], window, side)
        curves[side.value] = curve
        rows.append((side.value, fit.slope, fit.intercept, fit.r_squared,
                     fit.n_points, window[0], window[1],
                     "poor_fit" if fit.poor_fit else "ok"))
    return Table(kind=ScanKind.EXPONENT,
                 columns=("side", "slope", "intercept", "r_squared",
                          "n_points", "window_min", "window_max", "status"),
                 rows=rows, meta={"curves": curves})


def figure_scan(kind: ScanKind, params: ModelParams, y_grid=None,
                window: tuple[float, float] = DEFAULT_WINDOW,
                points_per_side: int = DEFAULT_POINTS_PER_SIDE,
                sides: tuple[Side, ...] = (Side.BELOW, Side.ABOVE),
                threads: int = 1) -> Table:
    """Assemble the scan table behind one of the figure kinds.

    MEAN_AND_FLUCT, ENTANGLEMENT and SPECTRUM iterate over ``y_grid``;
    EXPONENT builds its own log-centered grid from ``window`` and
    ``points_per_side`` on the requested ``sides``.
    """
    if kind is ScanKind.EXPONENT:
        return _exponent_table(params, window, points_per_side, sides, threads)
    if y_grid is None:
        raise ValueError(f"{kind.value} scan requires a y grid")
    if kind is ScanKind.MEAN_AND_FLUCT:
        return _excitation_table(params, y_grid, threads)
    if kind is ScanKind.ENTANGLEMENT:
        return _entanglement_table(params, y_grid, threads)
    if kind is ScanKind.SPECTRUM:
        return _spectrum_table(params, y_grid, threads)
    raise ValueError(f"unknown scan kind {kind!r}")
