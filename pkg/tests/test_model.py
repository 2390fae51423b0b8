"""Spectrum module: eigenvalues, bi-orthogonal states, limits."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jcscatter import (
    DegenerateSpectrum,
    DomainError,
    SystemParams,
    biorth_states,
    cavity_pole,
    dressed_pair,
    excitation_block,
    gamma_min,
)
from conftest import random_params


class TestCavityPole:
    def test_strong_coupling_value(self, strong):
        assert cavity_pole(strong) == pytest.approx(10.0 - 0.5j)

    def test_decoupled_waveguide(self):
        p = SystemParams(10.0, 10.0, 5.0, 0.0)
        assert cavity_pole(p) == 10.0 + 0.0j

    def test_direct_substitution(self):
        p = SystemParams(5.0, 10.0, 1.0, 2.0)
        assert cavity_pole(p) == pytest.approx(5.0 - 2.0j)


class TestDressedPair:
    def test_against_direct_diagonalization(self, strong):
        # independent oracle: numpy eig of the explicitly constructed block
        pair = dressed_pair(strong, 1)
        evals = np.linalg.eigvals(excitation_block(strong, 1))
        evals = sorted(evals, key=lambda z: z.real)
        assert pair.lambda_minus == pytest.approx(evals[0], rel=1e-10)
        assert pair.lambda_plus == pytest.approx(evals[1], rel=1e-10)
        assert pair.lambda_plus == pytest.approx(14.993746088859545 - 0.25j, rel=1e-9)
        assert pair.lambda_minus == pytest.approx(5.006253911140456 - 0.25j, rel=1e-9)

    def test_bare_pair_n2(self, strong):
        # oracle: Hermitian Jaynes-Cummings block at zero waveguide coupling
        block = np.array(
            [[10.0 + 10.0, np.sqrt(2) * 5.0], [np.sqrt(2) * 5.0, 2 * 10.0]]
        )
        expected = np.linalg.eigvalsh(block)
        pair = dressed_pair(strong, 2)
        assert pair.bare_minus == pytest.approx(expected[0], rel=1e-12)
        assert pair.bare_plus == pytest.approx(expected[1], rel=1e-12)
        assert pair.bare_plus == pytest.approx(27.071067811865476, rel=1e-10)
        assert pair.bare_minus == pytest.approx(12.928932188134524, rel=1e-10)

    def test_fully_decoupled(self):
        p = SystemParams(10.0, 12.0, 0.0, 0.0)
        pair = dressed_pair(p, 1)
        assert pair.lambda_plus == pytest.approx(12.0)
        assert pair.lambda_minus == pytest.approx(10.0)

    def test_trace_and_determinant(self, rng):
        for p in random_params(rng, 40):
            alpha = cavity_pole(p)
            for n in (1, 2):
                try:
                    pair = dressed_pair(p, n)
                except DegenerateSpectrum:
                    continue
                trace = p.omega_tls + (2 * n - 1) * alpha
                det = (p.omega_tls + (n - 1) * alpha) * n * alpha - n * p.g**2
                s = pair.lambda_plus + pair.lambda_minus
                pr = pair.lambda_plus * pair.lambda_minus
                assert abs(s - trace) <= 1e-12 * abs(trace)
                assert abs(pr - det) <= 1e-12 * max(abs(det), 1.0)

    def test_labeling_by_real_part(self, rng):
        for p in random_params(rng, 25):
            pair = dressed_pair(p, 1)
            assert pair.lambda_plus.real >= pair.lambda_minus.real

    def test_continuity_along_sweep(self):
        # straight-line sweep in g at fixed detuning, away from the EP
        lams = []
        for g in np.linspace(1.0, 6.0, 400):
            pair = dressed_pair(SystemParams(10.0, 9.0, g, 1.0), 1)
            lams.append([pair.lambda_plus, pair.lambda_minus])
        lams = np.array(lams)
        steps = np.abs(np.diff(lams, axis=0)).max()
        assert steps < 0.05  # no branch swap: increments stay small

    def test_weak_coupling_limit_of_waveguide(self, rng):
        # complex pair approaches the bare pair linearly in v_tilde^2
        base = SystemParams(10.0, 9.0, 2.0, 0.0)
        deviations = []
        for vt in (0.4, 0.2, 0.1):
            pair = dressed_pair(
                SystemParams(10.0, 9.0, 2.0, vt), 1
            )
            dev = max(
                abs(pair.lambda_plus - pair.bare_plus),
                abs(pair.lambda_minus - pair.bare_minus),
            )
            deviations.append(dev / vt**2)
        assert np.ptp(deviations) < 0.2 * deviations[0]

    def test_resonant_rabi_structure(self, strong):
        pair = dressed_pair(strong, 1)
        assert pair.lambda_plus.real == pytest.approx(10.0 + 5.0, abs=0.01)
        assert pair.lambda_minus.real == pytest.approx(10.0 - 5.0, abs=0.01)
        assert pair.lambda_plus.imag == pytest.approx(-0.25, abs=1e-12)
        assert pair.lambda_minus.imag == pytest.approx(-0.25, abs=1e-12)

    def test_decay_for_positive_coupling(self, rng):
        for p in random_params(rng, 25):
            if p.v_tilde == 0 or p.g == 0:
                continue
            for n in (1, 2):
                pair = dressed_pair(p, n)
                assert pair.lambda_plus.imag < 0
                assert pair.lambda_minus.imag < 0

    def test_exceptional_point_raises(self):
        # resonant case degenerates exactly at g = v_tilde^2 / 4
        p = SystemParams(10.0, 10.0, 0.25, 1.0)
        with pytest.raises(DegenerateSpectrum):
            dressed_pair(p, 1)

    def test_invalid_excitation_number(self, strong):
        with pytest.raises(DomainError):
            excitation_block(strong, 0)


class TestBiorthStates:
    @pytest.mark.parametrize("n", [1, 2])
    def test_right_eigenvector_property(self, strong, n):
        pair = dressed_pair(strong, n)
        block = excitation_block(strong, n)
        for state, lam in zip(
            biorth_states(strong, n), (pair.lambda_plus, pair.lambda_minus)
        ):
            vec = np.array([state.comp_e, state.comp_g])
            resid = block @ vec - lam * vec
            assert np.max(np.abs(resid)) < 1e-12 * abs(lam)

    @pytest.mark.parametrize("n", [1, 2])
    def test_biorthonormal_pairing(self, strong, n):
        sp_, sm_ = biorth_states(strong, n)
        vp = np.array([sp_.comp_e, sp_.comp_g])
        vm = np.array([sm_.comp_e, sm_.comp_g])
        assert abs(vp @ vp - 1.0) < 1e-12
        assert abs(vm @ vm - 1.0) < 1e-12
        assert abs(vp @ vm) < 1e-12

    def test_decoupled_sectors(self):
        p = SystemParams(10.0, 12.0, 0.0, 1.0)
        plus, minus = biorth_states(p, 1)
        # one branch is the pure photon state, the other pure TLS
        comps = sorted([(s.comp_e, s.comp_g) for s in (plus, minus)], key=lambda c: abs(c[0]))
        assert comps[0] == (0j, 1 + 0j)
        assert comps[1] == (1 + 0j, 0j)

    def test_sign_convention(self, rng):
        for p in random_params(rng, 20):
            if p.g == 0:
                continue
            for state in biorth_states(p, 1):
                cg = state.comp_g
                assert cg.real > 0 or (cg.real == 0 and cg.imag >= 0)


@settings(max_examples=40, deadline=None)
@given(
    omega_c=st.floats(6.0, 14.0),
    detune=st.floats(-2.0, 2.0),
    g=st.floats(0.8, 6.0),
    v_tilde=st.floats(0.3, 1.8),
    n=st.integers(1, 3),
)
def test_trace_identity_property(omega_c, detune, g, v_tilde, n):
    p = SystemParams(omega_c, omega_c + detune, g, v_tilde)
    try:
        pair = dressed_pair(p, n)
    except DegenerateSpectrum:
        return
    alpha = cavity_pole(p)
    trace = p.omega_tls + (2 * n - 1) * alpha
    assert abs(pair.lambda_plus + pair.lambda_minus - trace) <= 1e-12 * abs(trace)


def test_gamma_min_resonant(strong):
    assert gamma_min(strong) == pytest.approx(0.25, rel=1e-12)


def test_invalid_params():
    with pytest.raises(DomainError):
        SystemParams(-1.0, 10.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        SystemParams(10.0, 0.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        SystemParams(10.0, 10.0, -0.5, 1.0)
    with pytest.raises(DomainError):
        SystemParams(10.0, 10.0, 1.0, -0.1)
