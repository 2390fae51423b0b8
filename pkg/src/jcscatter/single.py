"""Single-photon scattering amplitudes of the side-coupled cavity-TLS.

Only the even (bonding) waveguide channel couples to the cavity, so the
one-photon S-matrix is a pure phase t_k on that channel and the identity on
the odd channel.  Physical reflection/transmission follow from recombining
the two channels: r_bar = (t_k - 1)/2, t_bar = (t_k + 1)/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .model import SystemParams, dressed_pair


@dataclass(frozen=True)
class OnePhotonAmplitudes:
    """All one-photon amplitudes at a single momentum k (energy = k, v = 1).

    Invariants: |t_even| = 1, t_bar - r_bar = 1, |r_bar|^2 + |t_bar|^2 = 1.
    """

    k: float
    delta_k: float
    t_even: complex
    r_bar: complex
    t_bar: complex

    @property
    def reflectance(self) -> float:
        return abs(self.r_bar) ** 2

    @property
    def transmittance(self) -> float:
        return abs(self.t_bar) ** 2


def _phase_and_arg(params: SystemParams, k: np.ndarray):
    """Even-channel phase factor and argument of the dressed pole product.

    The S-matrix eigenvalue is conj(P)/P with P = (k - l+)(k - l-), which is
    exactly unimodular and independent of any branch convention.  A factor
    with a purely real eigenvalue (decoupled, undamped branch, e.g. the bare
    TLS at g = 0) cancels identically between conj(P) and P and is treated
    as exactly 1, which also removes the 0/0 at k equal to that eigenvalue.
    """
    pair = dressed_pair(params, 1)
    k = np.asarray(k, dtype=float)
    t_even = np.ones(k.shape, dtype=complex)
    prod = np.ones(k.shape, dtype=complex)
    for lam in (pair.lambda_plus, pair.lambda_minus):
        factor = k - lam
        if lam.imag == 0:
            prod = prod * np.where(factor == 0, 1.0, factor)
        else:
            t_even = t_even * np.conj(factor) / factor
            prod = prod * factor
    return t_even, np.angle(prod)


def even_phase(params: SystemParams, k: np.ndarray) -> np.ndarray:
    """Even-channel S-matrix eigenvalue t_k, exp(-2i x phase shift)."""
    return _phase_and_arg(params, k)[0]


def one_photon(params: SystemParams, k: float) -> OnePhotonAmplitudes:
    """Scattering amplitudes for one incident right-moving photon.

    Args:
        params: system constants.
        k: incident momentum; must be > 0 (the linearized theory describes
            positive-energy excitations, negative inputs are rejected rather
            than silently folded).

    Raises:
        DomainError: on k <= 0.
        DegenerateSpectrum: propagated from the spectrum module.
    """
    if not k > 0:
        raise DomainError(f"incident momentum must be > 0, got {k}")
    t_arr, arg_arr = _phase_and_arg(params, np.float64(k))
    t_even = complex(t_arr)
    return OnePhotonAmplitudes(
        k=float(k),
        delta_k=float(arg_arr),
        t_even=t_even,
        r_bar=(t_even - 1.0) / 2.0,
        t_bar=(t_even + 1.0) / 2.0,
    )


def reflection_spectrum(
    params: SystemParams, k_grid: Sequence[float]
) -> list[OnePhotonAmplitudes]:
    """Elementwise one_photon over a strictly increasing positive grid."""
    ks = np.asarray(k_grid, dtype=float)
    if ks.ndim != 1 or ks.size == 0:
        raise DomainError("k_grid must be a non-empty 1-D sequence")
    if np.any(ks <= 0):
        bad = int(np.argmax(ks <= 0))
        raise DomainError(f"k_grid[{bad}] = {ks[bad]} is not > 0")
    if np.any(np.diff(ks) <= 0):
        bad = int(np.argmax(np.diff(ks) <= 0)) + 1
        raise DomainError(f"k_grid not strictly increasing at index {bad}")
    return [one_photon(params, float(k)) for k in ks]
