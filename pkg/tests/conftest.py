"""Shared fixtures: canonical parameter points used across the test modules."""

import pytest

from opendicke.model import ModelParams, critical_pump


@pytest.fixture
def open_params() -> ModelParams:
    """Lossy-cavity reference point (y left at 0; set via with_pump)."""
    return ModelParams(delta_c=-2.0, kappa=2.0, u=0.0, y=0.0)


@pytest.fixture
def closed_params() -> ModelParams:
    """Closed-system reference point."""
    return ModelParams(delta_c=-2.0, kappa=0.0, u=0.0, y=0.0)


def at_ratio(params: ModelParams, ratio: float) -> ModelParams:
    """Params with the pump set to ratio * y_c."""
    return params.with_pump(ratio * critical_pump(params))
