"""Gaussian entanglement between the cavity field and the atomic side mode.

The symmetrized quadrature covariance C over u = (dx, dy, dX, dY), with
dx = (da + da+)/sqrt(2) etc., fixes the Gaussian state of the fluctuations.
The logarithmic negativity follows from the smallest symplectic eigenvalue
of the partial transpose,

    nu_minus = sqrt((Sigma - sqrt(Sigma^2 - 4 det C)) / 2)
    Sigma    = det P + det A - 2 det X
    E_N      = max(0, -ln(2 nu_minus))

with P, A, X the photon, atom, and cross 2x2 blocks.  The natural logarithm
is used throughout; the state is separable (E_N = 0) iff nu_minus >= 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import OMEGA_SYMPL, QUAD_MAP
from .errors import NumericalFailure
from .fluctuations import SecondMoments

PHYSICALITY_TOL = 1e-8


def symplectic_eigenvalues(c: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of a covariance matrix (|eig(i Omega C)|, paired)."""
    freqs = np.abs(np.linalg.eigvals(1j * OMEGA_SYMPL @ c))
    return np.sort(freqs)[::2]


@dataclass(frozen=True)
class QuadCovariance:
    """Symmetrized quadrature covariance with its symplectic floor."""

    c: np.ndarray
    nu_min: float

    @property
    def photon_block(self) -> np.ndarray:
        return self.c[:2, :2]

    @property
    def atom_block(self) -> np.ndarray:
        return self.c[2:, 2:]

    @property
    def cross_block(self) -> np.ndarray:
        return self.c[:2, 2:]


def quad_covariance(s: SecondMoments | np.ndarray) -> QuadCovariance:
    """Quadrature covariance from ladder-operator second moments."""
    mat = s.s if isinstance(s, SecondMoments) else s
    raw = QUAD_MAP @ mat @ QUAD_MAP.T
    sym = 0.5 * (raw + raw.T)
    scale = max(1.0, float(np.max(np.abs(sym))))
    imag_resid = float(np.max(np.abs(sym.imag)))
    if imag_resid > 1e-10 * scale:
        raise NumericalFailure(
            f"covariance imaginary residue {imag_resid:.3e} exceeds tolerance")
    c = sym.real
    nu_min = float(np.min(symplectic_eigenvalues(c)))
    if nu_min < 0.5 - PHYSICALITY_TOL * scale:
        raise NumericalFailure(
            f"unphysical covariance: min symplectic eigenvalue {nu_min!r} < 1/2")
    return QuadCovariance(c=c, nu_min=nu_min)


def pt_symplectic_min(cov: QuadCovariance | np.ndarray) -> float:
    """Smallest symplectic eigenvalue of the partial transpose.

    Brute-force route (momentum-sign flip on the atom mode followed by an
    eigen-solve); serves as the cross-check of the invariant formula.
    """
    c = cov.c if isinstance(cov, QuadCovariance) else cov
    flip = np.diag([1.0, 1.0, 1.0, -1.0])
    return float(np.min(symplectic_eigenvalues(flip @ c @ flip)))


def pt_nu_minus(cov: QuadCovariance | np.ndarray) -> float:
    """nu_minus via the symplectic invariants of the partial transpose."""
    c = cov.c if isinstance(cov, QuadCovariance) else cov
    p = c[:2, :2]
    a = c[2:, 2:]
    x = c[:2, 2:]
    sigma = float(np.linalg.det(p) + np.linalg.det(a) - 2.0 * np.linalg.det(x))
    det_c = float(np.linalg.det(c))
    scale = max(1.0, sigma ** 2)
    disc = sigma ** 2 - 4.0 * det_c
    if disc < -1e-10 * scale:
        raise NumericalFailure(
            f"negative discriminant {disc:.3e} in symplectic invariants")
    arg = 0.5 * (sigma - math.sqrt(max(disc, 0.0)))
    if arg < -1e-10 * scale:
        raise NumericalFailure(f"negative nu_minus^2 = {arg:.3e}")
    return math.sqrt(max(arg, 0.0))


def log_negativity(cov: QuadCovariance | np.ndarray) -> float:
    """Logarithmic negativity E_N = max(0, -ln(2 nu_minus))."""
    nu = pt_nu_minus(cov)
    if nu <= 0.0:
        raise NumericalFailure("nu_minus = 0; covariance is singular")
    return max(0.0, -math.log(2.0 * nu))


def two_mode_squeezed_covariance(r: float) -> np.ndarray:
    """Covariance of the two-mode squeezed vacuum with squeezing r.

    Closed form used by the verification suite: nu_minus = exp(-2r)/2, so
    E_N = 2r.
    """
    ch = 0.5 * math.cosh(2.0 * r)
    sh = 0.5 * math.sinh(2.0 * r)
    return np.array([
        [ch, 0.0, sh, 0.0],
        [0.0, ch, 0.0, -sh],
        [sh, 0.0, ch, 0.0],
        [0.0, -sh, 0.0, ch],
    ])
