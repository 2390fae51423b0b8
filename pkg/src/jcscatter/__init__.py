"""Exact photon-pair scattering for a waveguide side-coupled to a cavity-TLS.

Closed-form one- and two-photon amplitudes, bound-state correlations and
second-order coherence, validated by two independent numerical oracles
(a spectral correlator integrator and a discretized-waveguide wavepacket
simulator).
"""

from .coherence import G2Curve, correlation_numerator, g2, g2_zero_sweep
from .errors import (
    ConfigError,
    ConvergenceFailure,
    DegenerateSpectrum,
    DomainError,
    JcScatterError,
    NonFiniteResult,
    SchemaMismatch,
    VanishingBackground,
)
from .model import (
    BiorthState,
    DressedPair,
    SystemParams,
    biorth_states,
    cavity_pole,
    dressed_pair,
    excitation_block,
    gamma_min,
)
from .single import OnePhotonAmplitudes, one_photon, reflection_spectrum
from .sweep import SweepGrid
from .twophoton import (
    ChannelWavefunction,
    TwoPhotonAmplitude,
    TwoPhotonIn,
    bound_state_term,
    fluorescence_map,
    outgoing_wavefunction,
    sample_channel,
    two_photon_t_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "BiorthState",
    "ChannelWavefunction",
    "ConfigError",
    "ConvergenceFailure",
    "DegenerateSpectrum",
    "DomainError",
    "DressedPair",
    "G2Curve",
    "JcScatterError",
    "NonFiniteResult",
    "OnePhotonAmplitudes",
    "SchemaMismatch",
    "SweepGrid",
    "SystemParams",
    "TwoPhotonAmplitude",
    "TwoPhotonIn",
    "VanishingBackground",
    "biorth_states",
    "bound_state_term",
    "cavity_pole",
    "correlation_numerator",
    "dressed_pair",
    "excitation_block",
    "fluorescence_map",
    "g2",
    "g2_zero_sweep",
    "gamma_min",
    "one_photon",
    "outgoing_wavefunction",
    "reflection_spectrum",
    "sample_channel",
    "two_photon_t_matrix",
    "__version__",
]
