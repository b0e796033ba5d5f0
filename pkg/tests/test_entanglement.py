"""Quadrature covariance and logarithmic negativity between cavity and atoms."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import at_ratio
from opendicke.entanglement import (log_negativity, pt_nu_minus,
                                    pt_symplectic_min, quad_covariance,
                                    symplectic_eigenvalues,
                                    two_mode_squeezed_covariance)
from opendicke.errors import NumericalFailure
from opendicke.fluctuations import steady_state_moments
from opendicke.groundstate import ground_state_moments
from opendicke.model import solve_mean_field


def _vacuum_moments() -> np.ndarray:
    s = np.zeros((4, 4), dtype=complex)
    s[0, 1] = 1.0
    s[2, 3] = 1.0
    return s


def test_vacuum_covariance_and_separability():
    cov = quad_covariance(_vacuum_moments())
    np.testing.assert_allclose(cov.c, 0.5 * np.eye(4), atol=1e-14)
    assert log_negativity(cov) <= 1e-12
    np.testing.assert_allclose(symplectic_eigenvalues(cov.c), [0.5, 0.5],
                               atol=1e-12)


def test_covariance_blocks_symmetric(open_params):
    p = at_ratio(open_params, 0.9)
    cov = quad_covariance(steady_state_moments(p, solve_mean_field(p)))
    np.testing.assert_allclose(cov.c, cov.c.T, atol=1e-12)
    assert cov.photon_block.shape == (2, 2)
    assert cov.atom_block.shape == (2, 2)
    assert cov.cross_block.shape == (2, 2)


def test_covariance_rejects_imaginary_residue():
    s = _vacuum_moments()
    s[0, 2] = 0.5j
    with pytest.raises(NumericalFailure):
        quad_covariance(s)


def test_tmsv_closed_form():
    for r in (0.3, 0.7, 1.0):
        cov = two_mode_squeezed_covariance(r)
        assert pt_nu_minus(cov) == pytest.approx(np.exp(-2.0 * r) / 2.0,
                                                 abs=1e-10)
        assert log_negativity(cov) == pytest.approx(2.0 * r, abs=1e-8)
        # pure state: both symplectic eigenvalues are 1/2
        np.testing.assert_allclose(symplectic_eigenvalues(cov), [0.5, 0.5],
                                   atol=1e-10)


def test_tmsv_zero_squeezing_is_vacuum():
    cov = two_mode_squeezed_covariance(0.0)
    np.testing.assert_allclose(cov, 0.5 * np.eye(4), atol=1e-14)
    assert log_negativity(cov) <= 1e-12


def test_pt_cross_check(open_params, closed_params):
    cases = [
        steady_state_moments(at_ratio(open_params, 0.9),
                             solve_mean_field(at_ratio(open_params, 0.9))),
        steady_state_moments(at_ratio(open_params, 1.5),
                             solve_mean_field(at_ratio(open_params, 1.5))),
        ground_state_moments(at_ratio(closed_params, 0.5)),
    ]
    for s in cases:
        cov = quad_covariance(s)
        assert pt_nu_minus(cov) == pytest.approx(pt_symplectic_min(cov),
                                                 abs=1e-10)


def test_physicality_of_steady_states(open_params):
    for ratio in (0.0, 0.5, 0.9, 1.3, 1.9):
        p = at_ratio(open_params, ratio)
        cov = quad_covariance(steady_state_moments(p, solve_mean_field(p)))
        assert float(np.min(symplectic_eigenvalues(cov.c))) >= 0.5 - 1e-8


def test_frozen_values(open_params, closed_params):
    p = at_ratio(open_params, 0.9)
    cov = quad_covariance(steady_state_moments(p, solve_mean_field(p)))
    assert log_negativity(cov) == pytest.approx(0.15243520574019814, abs=1e-10)
    cov = quad_covariance(ground_state_moments(at_ratio(closed_params, 0.5)))
    assert log_negativity(cov) == pytest.approx(0.2582920088921177, abs=1e-10)


def test_separable_thermal_photon_state():
    # independent thermal photon occupation cannot entangle the modes
    s = _vacuum_moments()
    s[1, 0] = 0.8
    s[0, 1] = 1.8
    cov = quad_covariance(s)
    assert pt_nu_minus(cov) >= 0.5 - 1e-12
    assert log_negativity(cov) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(phi=st.floats(0.0, 2.0 * np.pi), chi=st.floats(0.0, 2.0 * np.pi))
def test_local_rotation_invariance(phi, chi):
    def rot(theta):
        return np.array([[np.cos(theta), np.sin(theta)],
                         [-np.sin(theta), np.cos(theta)]])

    cov = two_mode_squeezed_covariance(0.6)
    local = np.zeros((4, 4))
    local[:2, :2] = rot(phi)
    local[2:, 2:] = rot(chi)
    rotated = local @ cov @ local.T
    assert abs(log_negativity(rotated) - 1.2) <= 1e-10


def test_ground_state_entanglement_grows_toward_threshold(closed_params):
    values = []
    for ratio in (0.5, 0.9, 0.99):
        cov = quad_covariance(ground_state_moments(at_ratio(closed_params, ratio)))
        values.append(log_negativity(cov))
    assert values[0] < values[1] < values[2]
