import numpy as np
import pytest

from jcscatter import SystemParams


@pytest.fixture
def strong():
    """Resonant strong-coupling parameter set (g above the channel decay)."""
    return SystemParams(omega_c=10.0, omega_tls=10.0, g=5.0, v_tilde=1.0)


@pytest.fixture
def weak():
    """Resonant weak-coupling parameter set."""
    return SystemParams(omega_c=10.0, omega_tls=10.0, g=0.5, v_tilde=1.0)


@pytest.fixture
def detuned():
    return SystemParams(omega_c=10.3, omega_tls=9.7, g=3.1, v_tilde=1.2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_params(rng, n):
    """Random parameter draws that stay away from the exceptional point."""
    out = []
    while len(out) < n:
        p = SystemParams(
            omega_c=float(rng.uniform(5.0, 15.0)),
            omega_tls=float(rng.uniform(5.0, 15.0)),
            g=float(rng.uniform(0.0, 6.0)),
            v_tilde=float(rng.uniform(0.2, 2.0)),
        )
        disc = complex(p.omega_tls - p.omega_c + 0.5j * p.v_tilde**2) ** 2 + 4 * p.g**2
        if abs(disc) > 1e-2:
            out.append(p)
    return out
