import numpy as np
import pytest

from rydgate import AtomCavityParams, EnsembleModel, mhz_to_rad_per_us


@pytest.fixture
def params():
    """Reference operating point: moderate-finesse cavity with a dense
    Rydberg-EIT cloud."""
    return AtomCavityParams(
        kappa=mhz_to_rad_per_us(10.0),
        gamma_e=mhz_to_rad_per_us(3.0),
        omega_drive=mhz_to_rad_per_us(36.0),
        coop_single=0.025,
        n_atoms=800,
    )


@pytest.fixture
def ensemble():
    return EnsembleModel(density=0.25, c6=mhz_to_rad_per_us(8.31e6))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
