from __future__ import annotations

import pytest

from specsep import JointSpectrum, ModelConfig


@pytest.fixture(scope="session")
def mp_config() -> ModelConfig:
    """Pure-noise point mass (u=0, t=1) at y = 0.25."""
    return ModelConfig(JointSpectrum.from_atoms([(0.0, 1.0, 1.0)]), 0.25)


@pytest.fixture(scope="session")
def two_atom_spectrum() -> JointSpectrum:
    """Half mass signal-free, half with signal eigenvalue 8."""
    return JointSpectrum.from_atoms([(0.0, 1.0, 0.5), (8.0, 1.0, 0.5)])


@pytest.fixture(scope="session")
def two_atom_config(two_atom_spectrum) -> ModelConfig:
    return ModelConfig(two_atom_spectrum, 0.1)
