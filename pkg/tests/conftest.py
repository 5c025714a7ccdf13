import numpy as np
import pytest

from plasmonsim import couplings as cpl
from plasmonsim import materials as mat
from plasmonsim import network as net


@pytest.fixture(scope="session")
def gold():
    return mat.drude_gold()


@pytest.fixture(scope="session")
def vacuum():
    return mat.Environment(1.0)


@pytest.fixture(scope="session")
def sphere10(gold):
    return mat.Nanoparticle(mat.Sphere(10.0), gold)


@pytest.fixture(scope="session")
def ellipsoid(gold):
    return mat.Nanoparticle(mat.Ellipsoid(33.0, 5.5, 5.5), gold)


@pytest.fixture(scope="session")
def omega1(gold, vacuum):
    return mat.sphere_mode_frequency(gold, vacuum, 1)


# quoted parameter set of the resonant sphere + emitter system
PAPER_SET = {
    "g1": -2.9e-3,
    "G": -7.2e-3,
    "J": -144e-6,
    "gamma_s": 3e-6,
    "gamma_m": 83e-6,
    "gamma_1r": 2.45e-3,
    "gamma_o": 0.2,
}


@pytest.fixture(scope="session")
def paper_three_mode(omega1):
    """Resonant three-mode system with the quoted coupling set, Q = 1e5."""
    p = PAPER_SET
    plasmon = net.plasmon_descriptor(0.0, p["gamma_1r"], p["gamma_o"])
    cavity = net.cavity_descriptor(0.0, omega1 / 1e5)
    emitter = net.emitter_descriptor(p["gamma_s"], p["gamma_m"])
    couplings = cpl.CouplingSet(p["g1"], p["G"], p["J"])
    return net.build_three_mode(couplings, plasmon, cavity, emitter)


@pytest.fixture(scope="session")
def paper_three_mode_bare(omega1):
    """Same system with the cavity decoupled (g1 = J = 0)."""
    p = PAPER_SET
    plasmon = net.plasmon_descriptor(0.0, p["gamma_1r"], p["gamma_o"])
    cavity = net.cavity_descriptor(0.0, omega1 / 1e5)
    emitter = net.emitter_descriptor(p["gamma_s"], p["gamma_m"])
    return net.build_three_mode(cpl.CouplingSet(0.0, p["G"], 0.0), plasmon, cavity, emitter)


def random_system(rng, n_modes=None):
    """Random damped mode network with real couplings, for property tests."""
    n = n_modes or int(rng.integers(2, 4))
    detunings = rng.uniform(-1.0, 1.0, n)
    widths = rng.uniform(1e-6, 0.3, n)
    h = np.diag(detunings - 0.5j * widths).astype(complex)
    for i in range(n):
        for j in range(i + 1, n):
            h[i, j] = h[j, i] = rng.uniform(-0.05, 0.05)
    return h, widths
