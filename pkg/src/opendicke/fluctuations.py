"""Linearized fluctuations around the mean field and their steady state.

The fluctuation vector is R = (da, da+, db, db+), where da is the cavity
field fluctuation and db the condensate side-mode orthogonal to the
macroscopically occupied wave function (the zero mode decouples and is
dropped).  The equations of motion are dR/dt = M R + xi with a non-normal
4x4 matrix M and cavity noise entering only the photon slots,
<xi(t) xi+(t')> = 2 kappa delta(t - t').

Steady-state second moments follow from the biorthogonal decomposition of M:
with right eigenvectors r^(k) (columns of V), left eigenvectors l^(k) (rows
of inv(V)) and quasi-normal modes rho_k = (l^(k), R),

    <rho_k rho_l> = -2 kappa L[k, 0] L[l, 1] / (lambda_k + lambda_l)
    <R_i R_j>     = sum_kl <rho_k rho_l> V[i, k] V[j, l]

which is the unique solution of the Lyapunov equation M S + S M^T + D = 0
whenever all modes are damped.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .basis import J_COMM, OMEGA_R, T_CONJ
from .errors import (DefectiveMatrix, DegenerateBranch, DivergentSteadyState,
                     NumericalFailure, UnstableState)
from .model import MeanField, ModelParams, critical_pump, solve_mean_field

# Eigenvector-matrix condition number and eigenvalue-cluster thresholds above
# which a matrix is treated as defective.  At an exactly defective point a
# backward-stable eigensolver still returns four eigenvalues, but they are
# only accurate to about sqrt(eps)*||M|| ~ 6e-8 and the eigenvector matrix
# condition number saturates near 1e8, so tighter thresholds can never fire.
DEFECT_COND_LIMIT = 1e7
DEFECT_GAP_LIMIT = 1e-7
DEFECT_OVERLAP_LIMIT = 1.0 - 1e-6

BIORTHO_TOL = 1e-10
PAIRING_TOL = 1e-8
STABILITY_TOL = 1e-12
DIVERGENT_TOL = 1e-12
REAL_AXIS_TOL = 1e-8


@dataclass(frozen=True)
class NoiseSpec:
    """Vacuum input noise of the lossy cavity at T = 0."""

    kappa: float

    def matrix(self) -> np.ndarray:
        """Diffusion matrix D with <xi_i(t) xi_j(t')> = D_ij delta(t-t')."""
        d = np.zeros((4, 4))
        d[0, 1] = 2.0 * self.kappa
        return d


@dataclass(frozen=True)
class StabilityMatrix:
    """Linear stability matrix with the inputs that produced it."""

    m: np.ndarray
    params: ModelParams
    mean_field: MeanField


@dataclass(frozen=True)
class QuasiNormalSystem:
    """Biorthogonal eigensystem of a stability matrix.

    ``rights`` holds the right eigenvectors as columns, ``lefts`` the left
    eigenvectors as rows (the inverse of ``rights``), so that
    lefts @ rights = identity.  ``pairing[k]`` is the index of the mode with
    the conjugate eigenvalue (a real eigenvalue pairs with itself).
    """

    lambdas: np.ndarray
    rights: np.ndarray
    lefts: np.ndarray
    pairing: np.ndarray
    cond: float
    matrix: StabilityMatrix


@dataclass(frozen=True)
class SecondMoments:
    """Equal-time second moments s[i, j] = <R_i R_j>."""

    s: np.ndarray

    @property
    def delta_n(self) -> float:
        return observables(self)[0]

    @property
    def n_photon(self) -> float:
        return observables(self)[1]


def build_stability_matrix(params: ModelParams,
                           mf: MeanField | None = None) -> StabilityMatrix:
    """Stability matrix of the linearized equations of motion.

    Row 0 is the cavity equation, row 2 the side-mode equation; rows 1 and 3
    are their elementwise conjugates with columns swapped, M = T conj(M) T.
    """
    if mf is None:
        mf = solve_mean_field(params)
    beta0 = mf.beta0
    alpha0 = mf.alpha0
    bsq = beta0 ** 2
    if abs(1.0 - 2.0 * bsq) < 1e-12:
        raise DegenerateBranch(
            f"1 - 2 beta0^2 = {1.0 - 2.0 * bsq!r}; linearization singular")
    root = math.sqrt(1.0 - bsq)
    half_y = 0.5 * params.y * (1.0 - 2.0 * bsq)

    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = 1j * (params.delta_c - params.u * bsq) - params.kappa
    coupling = half_y - 1j * params.u * alpha0 * beta0 * root
    m[0, 2] = coupling
    m[0, 3] = coupling
    m[2, 2] = -1j * (OMEGA_R + params.u * abs(alpha0) ** 2) / (1.0 - 2.0 * bsq)
    m[2, 0] = -half_y - 1j * params.u * beta0 * root * alpha0.conjugate()
    m[2, 1] = half_y - 1j * params.u * beta0 * root * alpha0
    # Conjugate equations for da+ and db+.
    m[1] = np.conj(m[0])[[1, 0, 3, 2]]
    m[3] = np.conj(m[2])[[1, 0, 3, 2]]
    return StabilityMatrix(m=m, params=params, mean_field=mf)


def conjugation_defect(m: np.ndarray) -> float:
    """Max-norm violation of M = T conj(M) T (zero for a valid matrix)."""
    return float(np.max(np.abs(m - T_CONJ @ np.conj(m) @ T_CONJ)))


def defect_diagnostics(m: np.ndarray) -> tuple[float, float, float]:
    """(condition number of V, smallest eigenvalue gap, overlap of that pair).

    The overlap is the cosine of the angle between the right eigenvectors of
    the closest eigenvalue pair; near a defective point it approaches 1.
    """
    lam, vecs = np.linalg.eig(m)
    cond = float(np.linalg.cond(vecs))
    gap = math.inf
    overlap = 0.0
    for i, j in itertools.combinations(range(4), 2):
        g = abs(lam[i] - lam[j])
        if g < gap:
            gap = g
            vi = vecs[:, i] / np.linalg.norm(vecs[:, i])
            vj = vecs[:, j] / np.linalg.norm(vecs[:, j])
            overlap = float(abs(np.vdot(vi, vj)))
    return cond, gap, overlap


def _is_defective(lam: np.ndarray, vecs: np.ndarray,
                  cond: float) -> tuple[bool, float, float]:
    scale = max(1.0, float(np.max(np.abs(lam))))
    worst_gap = math.inf
    worst_overlap = 0.0
    defective = cond > DEFECT_COND_LIMIT
    for i, j in itertools.combinations(range(4), 2):
        gap = abs(lam[i] - lam[j])
        if gap < DEFECT_GAP_LIMIT * scale:
            vi = vecs[:, i] / np.linalg.norm(vecs[:, i])
            vj = vecs[:, j] / np.linalg.norm(vecs[:, j])
            overlap = float(abs(np.vdot(vi, vj)))
            if overlap > DEFECT_OVERLAP_LIMIT:
                defective = True
            if gap < worst_gap:
                worst_gap, worst_overlap = gap, overlap
    return defective, worst_gap, worst_overlap


def decompose(stability: StabilityMatrix) -> QuasiNormalSystem:
    """Biorthogonal quasi-normal decomposition of the stability matrix.

    Left eigenvectors are rows of the inverse of the right-eigenvector
    matrix, which makes biorthonormality and completeness hold by
    construction up to roundoff; both are still verified.  Eigenvalues are
    sorted by (real part, imaginary part) for reproducibility.
    """
    lam, vecs = np.linalg.eig(stability.m)
    order = np.lexsort((lam.imag, lam.real))
    lam = lam[order]
    vecs = vecs[:, order]

    cond = float(np.linalg.cond(vecs))
    defective, gap, overlap = _is_defective(lam, vecs, cond)
    if defective:
        raise DefectiveMatrix(
            f"(near-)defective stability matrix: cond(V) = {cond:.3e}, "
            f"closest eigenvalue gap {gap:.3e} with overlap {overlap:.10f}",
            cond=cond, gap=gap, overlap=overlap)

    lefts = np.linalg.inv(vecs)
    resid = max(float(np.max(np.abs(lefts @ vecs - np.eye(4)))),
                float(np.max(np.abs(vecs @ lefts - np.eye(4)))))
    if resid > BIORTHO_TOL:
        raise DefectiveMatrix(
            f"biorthonormalization residual {resid:.3e} exceeds "
            f"{BIORTHO_TOL:g}; matrix too close to defective",
            cond=cond, gap=gap, overlap=overlap)

    pairing = np.empty(4, dtype=int)
    scale = max(1.0, float(np.max(np.abs(lam))))
    for k in range(4):
        dist = np.abs(lam - np.conj(lam[k]))
        partner = int(np.argmin(dist))
        if dist[partner] > PAIRING_TOL * scale:
            raise NumericalFailure(
                f"eigenvalue {lam[k]!r} has no conjugate partner "
                f"(closest miss {dist[partner]:.3e})")
        pairing[k] = partner
    if not np.array_equal(pairing[pairing], np.arange(4)):
        raise NumericalFailure(f"conjugate pairing {pairing!r} is not an involution")

    return QuasiNormalSystem(lambdas=lam, rights=vecs, lefts=lefts,
                             pairing=pairing, cond=cond, matrix=stability)


def mode_correlations(q: QuasiNormalSystem,
                      noise: NoiseSpec | None = None) -> np.ndarray:
    """Steady-state quasi-normal-mode correlations <rho_k rho_l>.

    Damped entries follow -2 kappa L[k,0] L[l,1] / (lambda_k + lambda_l).
    An entry whose mode pair is undamped (lambda_k + lambda_l ~ 0) diverges
    if the noise couples to it; if it does not, the pair is a conservative
    normal mode left in its vacuum, for which <rho rho+> equals the
    commutator [rho_k, rho_l] and <rho+ rho> = 0.
    """
    if noise is None:
        noise = NoiseSpec(kappa=q.matrix.params.kappa)
    lam = q.lambdas
    lefts = q.lefts
    scale = max(1.0, float(np.max(np.abs(lam))))
    growing = lam.real > STABILITY_TOL * scale
    if np.any(growing):
        raise UnstableState(
            f"growing quasi-normal modes, Re lambda = {lam[growing].real!r}")

    mode_comms = lefts @ J_COMM @ lefts.T
    num_tol = DIVERGENT_TOL * max(1.0, 2.0 * noise.kappa)
    g = np.zeros((4, 4), dtype=complex)
    divergent = []
    for k in range(4):
        for l in range(4):
            denom = lam[k] + lam[l]
            numer = -2.0 * noise.kappa * lefts[k, 0] * lefts[l, 1]
            if abs(denom) > DIVERGENT_TOL * scale:
                g[k, l] = numer / denom
            elif abs(numer) > num_tol:
                divergent.append((k, l))
            elif (abs(lam[k].real) <= STABILITY_TOL * scale
                  and abs(lam[l] - np.conj(lam[k])) <= PAIRING_TOL * scale
                  and lam[l].imag > 0.0 > lam[k].imag):
                g[k, l] = mode_comms[k, l]
    if divergent:
        raise DivergentSteadyState(
            f"undamped noise-driven mode pairs {divergent!r}: "
            "steady-state moments diverge")
    return g


def hermitize_moments(s: np.ndarray) -> np.ndarray:
    """Project onto the exact adjoint symmetry s = T conj(s)^T T.

    The symmetry holds because <R_i R_j>* = <R_jbar R_ibar>; projecting
    removes the numerical residue and makes the occupations exactly real.
    The raw violation must already be small, which the caller checks.
    """
    return 0.5 * (s + T_CONJ @ np.conj(s).T @ T_CONJ)


def _check_moment_structure(s: np.ndarray) -> None:
    """Raw adjoint-symmetry and commutator checks before projection.

    Near the critical point the diverging entries carry a relative error of
    order eps_machine * ||M|| / |lambda_k + lambda_l|, so the tolerance
    scales with the magnitude of the moments.
    """
    scale = float(np.max(np.abs(s)))
    sym_tol = max(1e-8, 1e-6 * scale)
    defect = float(np.max(np.abs(s - T_CONJ @ np.conj(s).T @ T_CONJ)))
    if defect > sym_tol:
        raise NumericalFailure(
            f"moment matrix violates adjoint symmetry by {defect:.3e} "
            f"(tolerance {sym_tol:g})")
    comm_tol = max(1e-8, 1e-12 * scale)
    for a, b in ((0, 1), (2, 3)):
        comm = complex(s[a, b] - s[b, a])
        if abs(comm - 1.0) > comm_tol:
            raise NumericalFailure(
                f"commutator [R_{a}, R_{b}] = {comm!r} deviates from 1 "
                f"beyond {comm_tol:g}")


def system_moments(q: QuasiNormalSystem, mode_corrs: np.ndarray) -> SecondMoments:
    """Reassemble <R_i R_j> from mode correlations, enforcing commutators."""
    s = q.rights @ mode_corrs @ q.rights.T
    _check_moment_structure(s)
    return SecondMoments(s=hermitize_moments(s))


def steady_state_moments(params: ModelParams,
                         mf: MeanField | None = None) -> SecondMoments:
    """Convenience chain: mean field, stability matrix, modes, moments."""
    stability = build_stability_matrix(params, mf)
    q = decompose(stability)
    return system_moments(q, mode_correlations(q))


def observables(s: SecondMoments | np.ndarray) -> tuple[float, float]:
    """(condensate depletion <db+ db>, incoherent photon number <da+ da>)."""
    mat = s.s if isinstance(s, SecondMoments) else s
    out = []
    for i, j in ((3, 2), (1, 0)):
        value = complex(mat[i, j])
        tol = 1e-10 * max(1.0, abs(value))
        if abs(value.imag) > tol:
            raise NumericalFailure(
                f"<R_{i} R_{j}> = {value!r} has imaginary residue beyond {tol:g}")
        if value.real < -tol:
            raise NumericalFailure(f"<R_{i} R_{j}> = {value!r} is negative")
        out.append(float(value.real))
    return out[0], out[1]


@dataclass(frozen=True)
class EndpointReport:
    """Refined boundary of an interval where a mode pair sits on the real axis."""

    y: float
    refined: bool
    defective: bool
    cond: float
    gap: float
    overlap: float


@dataclass(frozen=True)
class RealInterval:
    lower: EndpointReport
    upper: EndpointReport

    @property
    def width(self) -> float:
        return self.upper.y - self.lower.y


@dataclass(frozen=True)
class SpectrumScan:
    """Eigenvalue branches tracked along a pump grid.

    ``branches[i, k]`` is the eigenvalue of branch k at ``y[i]``; branches are
    matched between neighboring grid points by total eigenvalue displacement
    with an eigenvector-overlap tie-break.  ``real_intervals`` lists maximal
    runs where at least two eigenvalues are real, with bisection-refined,
    defectiveness-classified endpoints.
    """

    y: np.ndarray
    branches: np.ndarray
    status: list[str]
    cond: np.ndarray
    real_intervals: list[RealInterval] = field(default_factory=list)

    @property
    def real_interval(self) -> RealInterval | None:
        if not self.real_intervals:
            return None
        return max(self.real_intervals, key=lambda r: r.width)


def _eig_point(params: ModelParams, y: float):
    stability = build_stability_matrix(params.with_pump(y))
    lam, vecs = np.linalg.eig(stability.m)
    vecs = vecs / np.linalg.norm(vecs, axis=0)
    cond = float(np.linalg.cond(vecs))
    defective, _, _ = _is_defective(lam, vecs, cond)
    return lam, vecs, cond, defective


def _has_real_pair(params: ModelParams, y: float) -> bool:
    lam = np.linalg.eigvals(build_stability_matrix(params.with_pump(y)).m)
    return int(np.sum(np.abs(lam.imag) <= REAL_AXIS_TOL)) >= 2


_PERMS = list(itertools.permutations(range(4)))


def _match_branches(prev_lam, prev_vecs, lam, vecs) -> tuple[tuple[int, ...], bool]:
    """Permutation aligning the new eigenvalues with the previous ones."""
    costs = [sum(abs(lam[p[i]] - prev_lam[i]) for i in range(4)) for p in _PERMS]
    best = min(costs)
    tied = [p for p, c in zip(_PERMS, costs) if c - best <= 1e-12]
    if len(tied) == 1:
        return tied[0], False
    overlaps = [sum(abs(np.vdot(prev_vecs[:, i], vecs[:, p[i]])) for i in range(4))
                for p in tied]
    top = max(overlaps)
    winners = [p for p, o in zip(tied, overlaps) if top - o <= 1e-12]
    return winners[0], len(winners) > 1


def _refine_endpoint(params: ModelParams, y_in: float, y_out: float) -> EndpointReport:
    """Bisect the edge of the real-axis region between an inside and an
    outside pump value, then classify the matrix there."""
    for _ in range(200):
        mid = 0.5 * (y_in + y_out)
        if mid == y_in or mid == y_out:
            break
        if _has_real_pair(params, mid):
            y_in = mid
        else:
            y_out = mid
    y_star = y_in
    stability = build_stability_matrix(params.with_pump(y_star))
    cond, gap, overlap = defect_diagnostics(stability.m)
    lam = np.linalg.eigvals(stability.m)
    defective, _, _ = _is_defective(lam, np.linalg.eig(stability.m)[1], cond)
    return EndpointReport(y=y_star, refined=True, defective=defective,
                          cond=cond, gap=gap, overlap=overlap)


def spectrum_scan(params: ModelParams, y_grid, threads: int = 1) -> SpectrumScan:
    """Track the quasi-normal spectrum along a sorted pump grid.

    Grid points where the matrix is (near-)defective are kept, flagged with
    status 'defective'; points where branch matching stays ambiguous after
    the eigenvector tie-break are flagged 'ambiguous'.
    """
    y_grid = np.asarray(y_grid, dtype=float)
    if y_grid.ndim != 1 or y_grid.size < 2:
        raise ValueError("y grid must be a 1-d array with at least 2 points")
    if np.any(np.diff(y_grid) <= 0):
        raise ValueError("y grid must be strictly increasing")

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            points = list(pool.map(lambda y: _eig_point(params, y), y_grid))
    else:
        points = [_eig_point(params, y) for y in y_grid]

    branches = np.zeros((y_grid.size, 4), dtype=complex)
    cond = np.zeros(y_grid.size)
    status: list[str] = []
    prev_lam = prev_vecs = None
    for i, (lam, vecs, c, defective) in enumerate(points):
        if prev_lam is None:
            order = np.lexsort((lam.imag, lam.real))
            lam, vecs = lam[order], vecs[:, order]
            ambiguous = False
        else:
            perm, ambiguous = _match_branches(prev_lam, prev_vecs, lam, vecs)
            lam, vecs = lam[list(perm)], vecs[:, list(perm)]
        branches[i] = lam
        cond[i] = c
        status.append("defective" if defective else
                      "ambiguous" if ambiguous else "ok")
        prev_lam, prev_vecs = lam, vecs

    real_flags = np.sum(np.abs(branches.imag) <= REAL_AXIS_TOL, axis=1) >= 2
    intervals = []
    i = 0
    n = y_grid.size
    while i < n:
        if not real_flags[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and real_flags[j + 1]:
            j += 1
        if i > 0:
            lower = _refine_endpoint(params, y_grid[i], y_grid[i - 1])
        else:
            lower = EndpointReport(y=y_grid[0], refined=False, defective=False,
                                   cond=cond[0], gap=math.nan, overlap=math.nan)
        if j + 1 < n:
            upper = _refine_endpoint(params, y_grid[j], y_grid[j + 1])
        else:
            upper = EndpointReport(y=y_grid[-1], refined=False, defective=False,
                                   cond=cond[-1], gap=math.nan, overlap=math.nan)
        intervals.append(RealInterval(lower=lower, upper=upper))
        i = j + 1

    return SpectrumScan(y=y_grid, branches=branches, status=status,
                        cond=cond, real_intervals=intervals)
