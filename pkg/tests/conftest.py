import numpy as np
import pytest

import movingwave as mw
from movingwave import presets


@pytest.fixture(scope="session")
def g1():
    """Reference geometry: speeds 0.1 / 0.3, initial length 1."""
    return mw.make_geometry(0.1, 0.3, 1.0)


@pytest.fixture(scope="session")
def sine_data(g1):
    return presets.sine_bump(g1, amplitude=1.0, power=6,
                             velocity_amplitude=0.3)


@pytest.fixture(scope="session")
def sine_coeffs(g1, sine_data):
    e = mw.extend(g1, sine_data)
    return mw.compute_coefficients(g1, e, 64)


@pytest.fixture(scope="session")
def random_mode_coeffs(g1):
    rng = np.random.default_rng(11)
    modes = {}
    for n in range(1, 4):
        v = rng.standard_normal() + 1j * rng.standard_normal()
        modes[n] = v
        modes[-n] = np.conj(v)
    return mw.SpectralCoefficients.from_modes(g1, modes)
