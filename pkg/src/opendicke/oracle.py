"""Independent brute-force verifiers for the analytic routes.

Two oracles, deliberately sharing no code with the formulas they check:

* ``lyapunov_moments`` solves M S + S M^T + D = 0 as a dense 16-unknown
  linear system; for a stable M this is the unique steady state of the
  linear Langevin dynamics and must equal the eigenmode-formula result.
* ``fock_ground_state`` diagonalizes the quadratic fluctuation Hamiltonian
  on a truncated two-mode Fock space and must reproduce the Bogoliubov
  ground-state occupations once the cutoff has converged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .basis import ETA
from .errors import (CutoffTooSmall, DivergentSteadyState, NumericalFailure,
                     UnstableState)
from .fluctuations import NoiseSpec, SecondMoments, StabilityMatrix, \
    build_stability_matrix, hermitize_moments
from .model import MeanField, ModelParams

STABILITY_TOL = 1e-12
RESIDUAL_TOL = 1e-10

# Position of the adjoint of each slot of R = (da, da+, db, db+).
_DAG = (1, 0, 3, 2)


def lyapunov_moments(stability: StabilityMatrix,
                     noise: NoiseSpec | None = None) -> SecondMoments:
    """Steady second moments from the Lyapunov equation M S + S M^T + D = 0.

    Solved by row-major vectorization, (M (x) I + I (x) M) vec(S) = -vec(D).
    A singular but consistent system (undamped noise-free modes) falls back
    to the minimum-norm solution; an inconsistent one diverges physically.
    """
    if noise is None:
        noise = NoiseSpec(kappa=stability.params.kappa)
    m = stability.m
    lam = np.linalg.eigvals(m)
    scale = max(1.0, float(np.max(np.abs(lam))))
    if np.any(lam.real > STABILITY_TOL * scale):
        raise UnstableState(
            f"unstable stability matrix, max Re lambda = {np.max(lam.real):.3e}")
    if np.max(np.abs(lam.real)) <= STABILITY_TOL * scale:
        raise DivergentSteadyState("no damped mode at all; no steady state")

    d = noise.matrix()
    a = np.kron(m, np.eye(4)) + np.kron(np.eye(4), m)
    rhs = -d.reshape(16).astype(complex)
    sums = lam[:, None] + lam[None, :]
    resid_tol = max(RESIDUAL_TOL, RESIDUAL_TOL * 2.0 * noise.kappa)
    if np.min(np.abs(sums)) <= STABILITY_TOL * scale:
        s = np.linalg.lstsq(a, rhs, rcond=None)[0].reshape(4, 4)
        residual = float(np.max(np.abs(m @ s + s @ m.T + d)))
        if residual > 1e-8 * max(1.0, 2.0 * noise.kappa):
            raise DivergentSteadyState(
                f"singular Lyapunov system with inconsistent noise "
                f"(residual {residual:.3e}); moments diverge")
        return SecondMoments(s=hermitize_moments(s))

    s = np.linalg.solve(a, rhs).reshape(4, 4)
    residual = float(np.max(np.abs(m @ s + s @ m.T + d)))
    if residual > resid_tol:
        raise NumericalFailure(
            f"Lyapunov residual {residual:.3e} exceeds {resid_tol:g}")
    return SecondMoments(s=hermitize_moments(s))


@dataclass(frozen=True)
class FockGroundState:
    """Ground-state data from truncated-Fock diagonalization."""

    delta_n: float
    n_photon: float
    energy: float
    convergence: float
    cutoffs: tuple[int, int]


def _ladder(cutoff: int) -> sp.csr_matrix:
    n = cutoff + 1
    return sp.diags(np.sqrt(np.arange(1, n)), 1, format="csr")


def _fock_occupations(h: np.ndarray, cutoffs: tuple[int, int]):
    """Ground-state (delta_n, n_photon, energy) at the given cutoffs."""
    na, nb = cutoffs
    a1 = _ladder(na)
    b1 = _ladder(nb)
    ia = sp.identity(na + 1, format="csr")
    ib = sp.identity(nb + 1, format="csr")
    a = sp.kron(a1, ib, format="csr")
    b = sp.kron(ia, b1, format="csr")
    ops = (a, a.conj().T, b, b.conj().T)

    dim = (na + 1) * (nb + 1)
    ham = sp.csr_matrix((dim, dim), dtype=complex)
    for i in range(4):
        for j in range(4):
            if h[i, j] != 0.0:
                ham = ham + 0.5 * h[i, j] * (ops[_DAG[i]] @ ops[j])
    herm_defect = abs(ham - ham.conj().T).max()
    if herm_defect > 1e-12 * max(1.0, abs(ham).max()):
        raise NumericalFailure(
            f"truncated Hamiltonian not Hermitian (defect {herm_defect:.3e})")

    # Deterministic start vector; eigsh would otherwise seed randomly.
    v0 = np.ones(dim) / np.sqrt(dim)
    energy, vec = spla.eigsh(ham, k=1, which="SA", v0=v0)
    psi = vec[:, 0]
    number_a = (a.conj().T @ a) @ psi
    number_b = (b.conj().T @ b) @ psi
    return (float(np.real(np.vdot(psi, number_b))),
            float(np.real(np.vdot(psi, number_a))),
            float(energy[0]))


def fock_ground_state(params: ModelParams, mf: MeanField | None = None,
                      cutoffs: tuple[int, int] = (60, 60)) -> FockGroundState:
    """Ground-state occupations on a truncated two-mode Fock space.

    The Hamiltonian is H = 1/2 sum_ij h[i,j] R_i^dag R_j with h = i eta M,
    truncated at photon/atom occupations ``cutoffs``.  The run is repeated
    at doubled cutoffs; the relative change of both occupations must stay
    below 1e-3, otherwise CutoffTooSmall is raised.  The doubled-cutoff
    values are returned.
    """
    if params.kappa != 0.0:
        raise ValueError("Fock oracle applies to the closed system (kappa = 0)")
    if min(cutoffs) < 20:
        raise ValueError(f"cutoffs {cutoffs!r} too small; need >= 20")

    m = build_stability_matrix(params, mf).m
    h = 1j * ETA @ m
    defect = float(np.max(np.abs(h - h.conj().T)))
    if defect > 1e-12 * max(1.0, float(np.max(np.abs(h)))):
        raise NumericalFailure(
            f"coefficient matrix not Hermitian (defect {defect:.3e})")

    coarse = _fock_occupations(h, cutoffs)
    doubled = (2 * cutoffs[0], 2 * cutoffs[1])
    fine = _fock_occupations(h, doubled)
    convergence = max(
        abs(fine[0] - coarse[0]) / max(abs(fine[0]), 1e-9),
        abs(fine[1] - coarse[1]) / max(abs(fine[1]), 1e-9))
    if convergence > 1e-3:
        raise CutoffTooSmall(
            f"occupations changed by {convergence:.3e} relative when doubling "
            f"cutoffs {cutoffs!r}")
    return FockGroundState(delta_n=fine[0], n_photon=fine[1], energy=fine[2],
                           convergence=convergence, cutoffs=doubled)
