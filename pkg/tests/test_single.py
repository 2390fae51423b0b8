"""One-photon scattering amplitudes and their conservation laws."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jcscatter import DomainError, SystemParams, one_photon, reflection_spectrum
from conftest import random_params


class TestOnePhoton:
    def test_resonant_transparency(self, strong):
        amp = one_photon(strong, 10.0)
        assert abs(amp.r_bar) < 1e-10
        assert abs(amp.t_bar - 1.0) < 1e-10

    def test_near_unit_reflection_at_dressed_energy(self, strong):
        amp = one_photon(strong, 14.993746088859545)
        assert amp.reflectance > 0.999

    def test_far_detuned_transparency(self, strong):
        amp = one_photon(strong, 1e5)
        assert abs(amp.r_bar) < 1e-4
        assert abs(amp.t_bar - 1.0) < 1e-4

    def test_flux_conservation_bulk(self, rng):
        params = random_params(rng, 100)
        for p in params:
            ks = rng.uniform(0.5, 30.0, size=20)
            for k in ks:
                amp = one_photon(p, float(k))
                assert abs(amp.reflectance + amp.transmittance - 1.0) < 1e-12

    def test_unimodular_even_channel(self, detuned, rng):
        for k in rng.uniform(0.5, 25.0, size=50):
            amp = one_photon(detuned, float(k))
            assert abs(abs(amp.t_even) - 1.0) < 1e-12
            # r/t decomposition is exact by construction
            assert amp.t_bar - amp.r_bar == 1.0

    def test_phase_consistency(self, detuned):
        # t_even must equal exp(-2i delta) for the reported phase shift
        amp = one_photon(detuned, 9.4)
        assert amp.t_even == pytest.approx(np.exp(-2j * amp.delta_k), abs=1e-12)

    def test_empty_cavity_reduction(self):
        # g = 0: bare side-coupled resonator reflection
        p = SystemParams(10.0, 12.0, 0.0, 1.0)
        for k in (8.0, 9.9, 10.0, 10.1, 13.0):
            amp = one_photon(p, k)
            expected = -0.5j * p.v_tilde**2 / (k - p.omega_c + 0.5j * p.v_tilde**2)
            assert amp.r_bar == pytest.approx(expected, abs=1e-10)

    def test_rejects_nonpositive_momentum(self, strong):
        with pytest.raises(DomainError):
            one_photon(strong, 0.0)
        with pytest.raises(DomainError):
            one_photon(strong, -3.0)


class TestReflectionSpectrum:
    def test_map_semantics(self, strong):
        grid = [4.0, 10.0, 16.0]
        amps = reflection_spectrum(strong, grid)
        assert [a.k for a in amps] == grid
        for a, k in zip(amps, grid):
            direct = one_photon(strong, k)
            assert a.t_even == direct.t_even

    def test_two_reflection_maxima(self, strong):
        grid = np.linspace(4.0, 16.0, 4801)
        refl = np.array([a.reflectance for a in reflection_spectrum(strong, grid)])
        interior = (refl[1:-1] > refl[:-2]) & (refl[1:-1] > refl[2:])
        peaks = grid[1:-1][interior]
        assert len(peaks) == 2
        assert peaks[0] == pytest.approx(5.006, abs=0.01)
        assert peaks[1] == pytest.approx(14.994, abs=0.01)

    def test_empty_cavity_single_peak(self):
        p = SystemParams(10.0, 12.0, 0.0, 1.0)
        grid = np.linspace(8.0, 12.0, 2001)
        refl = np.array([a.reflectance for a in reflection_spectrum(p, grid)])
        interior = (refl[1:-1] > refl[:-2]) & (refl[1:-1] > refl[2:])
        peaks = grid[1:-1][interior]
        assert len(peaks) == 1
        assert peaks[0] == pytest.approx(10.0, abs=0.005)

    def test_grid_validation(self, strong):
        with pytest.raises(DomainError):
            reflection_spectrum(strong, [1.0, 0.5, 2.0])
        with pytest.raises(DomainError, match="index 1"):
            reflection_spectrum(strong, [1.0, 1.0])
        with pytest.raises(DomainError, match=r"\[0\]"):
            reflection_spectrum(strong, [-1.0, 1.0])


@settings(max_examples=60, deadline=None)
@given(
    omega_c=st.floats(6.0, 14.0),
    detune=st.floats(-3.0, 3.0),
    g=st.floats(0.0, 6.0),
    v_tilde=st.floats(0.3, 2.0),
    k=st.floats(0.1, 40.0),
)
def test_flux_conservation_property(omega_c, detune, g, v_tilde, k):
    p = SystemParams(omega_c, omega_c + detune, g, v_tilde)
    try:
        amp = one_photon(p, k)
    except Exception:
        return  # exceptional-point draws are rejected elsewhere
    assert abs(amp.reflectance + amp.transmittance - 1.0) < 1e-12


def test_transparency_holds_for_any_g(rng):
    # the pole product at k = omega_tls is exactly -g^2 (real), so r = 0
    for g in (0.3, 1.0, 2.5, 7.0):
        p = SystemParams(10.0, 10.0, g, 1.0)
        assert abs(one_photon(p, 10.0).r_bar) < 1e-12
