"""Independent verification paths for the closed-form amplitudes."""

from .compare import ComparisonEntry, ComparisonReport, compare_report
from .lattice import LatticeConfig, OutputRecord, PacketSpec, lattice_evolve
from .spectral import spectral_t_matrix

__all__ = [
    "ComparisonEntry",
    "ComparisonReport",
    "compare_report",
    "LatticeConfig",
    "OutputRecord",
    "PacketSpec",
    "lattice_evolve",
    "spectral_t_matrix",
]
