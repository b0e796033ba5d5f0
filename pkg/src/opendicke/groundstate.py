"""Closed-system (kappa = 0) ground-state fluctuations.

Without photon loss the linearized dynamics is generated by a quadratic
Hamiltonian: M = -i eta H with eta = diag(1, -1, 1, -1) and H Hermitian.
H is recovered as H = i eta M from the shared stability-matrix builder, so
the open and closed treatments cannot drift apart.  The Bogoliubov modes are
the eigenmodes of M with symplectic normalization; the ground state is their
joint vacuum, and its second moments are

    <R_i R_j> = sum_k N_k V[i, k] V[j, pair(k)]

summed over the annihilation-side modes k (Im lambda_k < 0), where N_k is
the commutator norm of the mode pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import ETA, J_COMM, T_CONJ
from .errors import DynamicalInstability, NumericalFailure
from .fluctuations import SecondMoments, build_stability_matrix, \
    hermitize_moments
from .model import MeanField, ModelParams, critical_pump, solve_mean_field

HERMITICITY_TOL = 1e-12
FREQUENCY_TOL = 1e-10


@dataclass(frozen=True)
class BogoliubovModes:
    """Normal modes of the closed-system quadratic Hamiltonian.

    ``frequencies`` are the two positive mode frequencies in increasing
    order.  ``transform`` maps R = (da, da+, db, db+) to the normal-mode
    ladder vector (c1, c1+, c2, c2+) and is symplectic with respect to
    eta = diag(1, -1, 1, -1).
    """

    frequencies: np.ndarray
    transform: np.ndarray


def _hamiltonian_matrix(m: np.ndarray) -> np.ndarray:
    h = 1j * ETA @ m
    defect = float(np.max(np.abs(h - h.conj().T)))
    if defect > HERMITICITY_TOL * max(1.0, float(np.max(np.abs(h)))):
        raise NumericalFailure(
            f"coefficient matrix not Hermitian (defect {defect:.3e}); "
            "is kappa nonzero?")
    return h


def _eigenmodes(params: ModelParams, mf: MeanField | None):
    """Eigen-decomposition of M(kappa=0) with stability checks.

    Returns eigenvalues, right eigenvectors (columns), left eigenvectors
    (rows), and the annihilation-mode indices with their conjugate partners.
    """
    if params.kappa != 0.0:
        raise ValueError("ground state is defined for kappa = 0 only")
    stability = build_stability_matrix(params, mf)
    _hamiltonian_matrix(stability.m)

    lam, vecs = np.linalg.eig(stability.m)
    scale = max(1.0, float(np.max(np.abs(lam))))
    if np.max(np.abs(lam.real)) > FREQUENCY_TOL * scale:
        raise DynamicalInstability(
            f"spectrum not purely oscillatory, Re lambda up to "
            f"{np.max(np.abs(lam.real)):.3e}; no stable ground state")
    if np.min(np.abs(lam)) <= FREQUENCY_TOL * scale:
        raise DynamicalInstability(
            "zero-frequency mode: the system sits at the critical point")

    order = np.argsort(lam.imag)
    lam, vecs = lam[order], vecs[:, order]
    lefts = np.linalg.inv(vecs)

    pairs = []
    for k in range(4):
        if lam[k].imag >= 0.0:
            continue
        dist = np.abs(lam - np.conj(lam[k]))
        partner = int(np.argmin(dist))
        if dist[partner] > 1e-8 * scale:
            raise NumericalFailure(
                f"eigenvalue {lam[k]!r} has no conjugate partner")
        pairs.append((k, partner))
    if len(pairs) != 2:
        raise DynamicalInstability(
            f"expected two oscillatory mode pairs, found {len(pairs)}")
    return lam, vecs, lefts, pairs


def _mode_norms(lefts: np.ndarray, pairs) -> list[float]:
    """Commutator norms [rho_k, rho_kbar]; positive for physical modes."""
    comms = lefts @ J_COMM @ lefts.T
    norms = []
    for k, kbar in pairs:
        norm = comms[k, kbar]
        if abs(norm.imag) > max(1e-10, 1e-8 * abs(norm)) or norm.real <= 0.0:
            raise DynamicalInstability(
                f"mode pair ({k}, {kbar}) has non-positive symplectic norm "
                f"{norm!r}; Hamiltonian not positive definite")
        norms.append(float(norm.real))
    return norms


def bogoliubov_modes(params: ModelParams,
                     mf: MeanField | None = None) -> BogoliubovModes:
    """Symplectically normalized normal modes of the closed system."""
    lam, _, lefts, pairs = _eigenmodes(params, mf)
    norms = _mode_norms(lefts, pairs)

    frequencies = np.array(sorted(-lam[k].imag for k, _ in pairs))
    rows = []
    for (k, _), norm in zip(pairs, norms):
        lowering = lefts[k] / math.sqrt(norm)
        raising = np.conj(lowering) @ T_CONJ
        rows.extend([lowering, raising])
    # Order mode pairs by increasing frequency.
    if -lam[pairs[0][0]].imag > -lam[pairs[1][0]].imag:
        rows = rows[2:] + rows[:2]
    transform = np.array(rows)

    defect = float(np.max(np.abs(transform @ ETA @ transform.conj().T - ETA)))
    if defect > 1e-10:
        raise NumericalFailure(
            f"Bogoliubov transform not symplectic (defect {defect:.3e})")
    return BogoliubovModes(frequencies=frequencies, transform=transform)


def ground_state_moments(params: ModelParams,
                         mf: MeanField | None = None) -> SecondMoments:
    """Second moments of the Bogoliubov vacuum in the lab basis."""
    lam, vecs, lefts, pairs = _eigenmodes(params, mf)
    norms = _mode_norms(lefts, pairs)
    s = np.zeros((4, 4), dtype=complex)
    for (k, kbar), norm in zip(pairs, norms):
        s += norm * np.outer(vecs[:, k], vecs[:, kbar])
    tol = max(1e-8, 1e-12 * float(np.max(np.abs(s))))
    for a, b in ((0, 1), (2, 3)):
        comm = complex(s[a, b] - s[b, a])
        if abs(comm - 1.0) > tol:
            raise NumericalFailure(
                f"commutator [R_{a}, R_{b}] = {comm!r} deviates from 1")
    return SecondMoments(s=hermitize_moments(s))


@dataclass(frozen=True)
class GroundPoint:
    y: float
    y_over_yc: float
    delta_n: float
    n_photon: float
    moments: SecondMoments


def ground_state_curve(params: ModelParams, y_grid) -> list[GroundPoint]:
    """Ground-state observables along a pump grid (kappa = 0)."""
    y_c = critical_pump(params)
    points = []
    for y in np.asarray(y_grid, dtype=float):
        p = params.with_pump(y)
        moments = ground_state_moments(p, solve_mean_field(p))
        points.append(GroundPoint(y=y, y_over_yc=y / y_c,
                                  delta_n=moments.delta_n,
                                  n_photon=moments.n_photon,
                                  moments=moments))
    return points
