import pytest

from quarkspec.model import QuarkoniumParams


@pytest.fixture
def charmonium():
    """Charmonium-like singlet configuration used throughout."""
    return QuarkoniumParams(alpha_s=0.5, b=0.15, sigma=1.0, m_q=1.5, m_qbar=1.5, s=0)


@pytest.fixture
def unit_context():
    """mu = 1, hbar = 1 kinematics for model-free potentials."""
    return QuarkoniumParams.for_reduced_mass(1.0)
