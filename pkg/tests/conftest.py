import json
import pathlib

import numpy as np
import pytest

import difkit as dk

DATA = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def quantum_dot_spec():
    """Super-ohmic Gaussian-cutoff density from the quantum-dot benchmark."""
    return dk.PowerLawExpCutoff(A=0.027, s=3.0, omega_c=2.2, q=2.0)


@pytest.fixture(scope="session")
def context_77K():
    return dk.PhysicalContext.from_temperature(77.0)


@pytest.fixture(scope="session")
def debye_spec():
    """Single Lorentz-Drude peak, lam = gamma = 1."""
    return dk.MultiLorentzDrude(terms=(dk.LorentzianTerm(lam=1.0, gamma=1.0),))


@pytest.fixture(scope="session")
def context_unit():
    return dk.PhysicalContext(beta_hbar=1.0)


@pytest.fixture(scope="session")
def quantum_dot_alpha(quantum_dot_spec, context_77K):
    """Quadrature alpha grid on [0, 2] ps, 401 points (fit benchmark input)."""
    times = np.linspace(0.0, 2.0, 401)
    return dk.alpha_quadrature_grid(quantum_dot_spec, context_77K, times)


@pytest.fixture(scope="session")
def quantum_dot_fit_k4(quantum_dot_alpha):
    return dk.fit_exponential_bath(quantum_dot_alpha, 4)


@pytest.fixture(scope="session")
def quantum_dot_alpha_short(quantum_dot_spec, context_77K):
    """Quadrature alpha grid on [0, 1.2] ps matching the eta-sweep support."""
    times = np.linspace(0.0, 1.2, 481)
    return dk.alpha_quadrature_grid(quantum_dot_spec, context_77K, times)


def load_config(name):
    with open(DATA / name) as fh:
        return json.load(fh)
