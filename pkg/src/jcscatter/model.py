"""Physical parameters and the non-Hermitian dressed-state spectrum.

The cavity + two-level-system block conserves excitation number, so within
the n-excitation subspace the effective Hamiltonian (waveguide traced out,
cavity frequency shifted to the complex pole) reduces to a 2x2 complex
symmetric matrix.  Everything downstream (scattering amplitudes, bound-state
correlations, coherence functions) pulls its eigenvalues and bi-orthogonal
eigenvectors from here.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateSpectrum, DomainError

#: Default eigenvalue-splitting tolerance below which the pair is treated as
#: degenerate (exceptional point), in the user's frequency units.
DEG_TOL = 1e-9


@dataclass(frozen=True)
class SystemParams:
    """Physical constants of the side-coupled cavity-TLS system.

    Units: the waveguide group velocity is 1 and frequencies are in a common
    user-chosen scale.

    Attributes:
        omega_c: Cavity mode frequency (> 0).
        omega_tls: Two-level-system level spacing (> 0).
        g: TLS-cavity coupling (>= 0).
        v_tilde: Even-channel waveguide-cavity coupling, sqrt(2) times the
            raw coupling of the two-directional waveguide (>= 0; zero means
            a decoupled waveguide and is used internally for bare spectra).
    """

    omega_c: float
    omega_tls: float
    g: float
    v_tilde: float

    def __post_init__(self) -> None:
        if not (self.omega_c > 0):
            raise DomainError(f"omega_c must be > 0, got {self.omega_c}")
        if not (self.omega_tls > 0):
            raise DomainError(f"omega_tls must be > 0, got {self.omega_tls}")
        if not (self.g >= 0):
            raise DomainError(f"g must be >= 0, got {self.g}")
        if not (self.v_tilde >= 0):
            raise DomainError(f"v_tilde must be >= 0, got {self.v_tilde}")


@dataclass(frozen=True)
class DressedPair:
    """Complex dressed eigenvalue pair of one excitation sector.

    ``bare_plus``/``bare_minus`` are the same eigenvalues with the waveguide
    coupling switched off (real Jaynes-Cummings values); figure-style peak
    positions live there.
    """

    n: int
    lambda_plus: complex
    lambda_minus: complex
    bare_plus: float
    bare_minus: float

    @property
    def splitting(self) -> complex:
        return self.lambda_plus - self.lambda_minus


@dataclass(frozen=True)
class BiorthState:
    """Right eigenvector of one dressed branch in the bi-orthogonal basis.

    Components refer to the basis (|n-1> photons, TLS excited) and
    (|n> photons, TLS ground).  Normalization is bilinear (no complex
    conjugation): comp_e**2 + comp_g**2 = 1, which makes the left partner of
    a branch simply the transpose of its right vector.
    """

    n: int
    branch: str
    comp_e: complex
    comp_g: complex
    norm_const: complex


def cavity_pole(params: SystemParams) -> complex:
    """Complex cavity frequency after eliminating the waveguide continuum.

    The real part is the bare cavity frequency; minus the imaginary part is
    the amplitude decay rate into the even waveguide channel.
    """
    return complex(params.omega_c, -0.5 * params.v_tilde**2)


def excitation_block(params: SystemParams, n: int) -> np.ndarray:
    """2x2 block of the effective Hamiltonian in the n-excitation sector.

    Basis order: (|n-1>_c |e>, |n>_c |g>).  The block is complex symmetric.
    """
    if n < 1:
        raise DomainError(f"excitation number must be >= 1, got {n}")
    alpha = cavity_pole(params)
    off = np.sqrt(n) * params.g
    return np.array(
        [
            [params.omega_tls + (n - 1) * alpha, off],
            [off, n * alpha],
        ],
        dtype=complex,
    )


def _eig_pair(params: SystemParams, n: int) -> tuple[complex, complex]:
    """Closed-form eigenvalues of the n-th block, labeled by real part.

    The square root is taken on the principal branch and "+" is assigned to
    the root with the larger real part (larger imaginary part on ties), which
    matches the bare-limit ordering and keeps resonant sweeps continuous.
    """
    alpha = cavity_pole(params)
    center = 0.5 * (params.omega_tls + (2 * n - 1) * alpha)
    s = 0.5 * np.sqrt(complex((params.omega_tls - alpha) ** 2 + 4 * n * params.g**2))
    lo, hi = center - s, center + s
    if hi.real > lo.real or (hi.real == lo.real and hi.imag >= lo.imag):
        return hi, lo
    return lo, hi


def dressed_pair(params: SystemParams, n: int, deg_tol: float = DEG_TOL) -> DressedPair:
    """Dressed eigenvalue pair for the n-excitation sector.

    Raises:
        DegenerateSpectrum: if the splitting is below ``deg_tol`` (exceptional
            point); downstream formulas divide by the splitting.
    """
    lam_p, lam_m = _eig_pair(params, n)
    if abs(lam_p - lam_m) < deg_tol:
        raise DegenerateSpectrum(
            f"dressed pair n={n} degenerate: |lambda_+ - lambda_-| = "
            f"{abs(lam_p - lam_m):.3e} < deg_tol = {deg_tol:.3e}"
        )
    bare_p, bare_m = _eig_pair(replace(params, v_tilde=0.0), n)
    return DressedPair(
        n=n,
        lambda_plus=lam_p,
        lambda_minus=lam_m,
        bare_plus=bare_p.real,
        bare_minus=bare_m.real,
    )


def biorth_states(
    params: SystemParams, n: int, deg_tol: float = DEG_TOL
) -> tuple[BiorthState, BiorthState]:
    """Both right eigenstates of the n-th block, bilinearly normalized.

    The bilinear normalization fixes each vector up to an overall sign; the
    sign is chosen so the photon-branch component comp_g has positive real
    part (positive imaginary part on ties).

    Returns:
        (plus-branch state, minus-branch state).
    """
    pair = dressed_pair(params, n, deg_tol=deg_tol)
    alpha = cavity_pole(params)
    if params.g == 0:
        # Decoupled sectors: one branch is the pure n-photon state, the other
        # the pure TLS excitation; the generic eigenvector formula degenerates.
        out = []
        for branch, lam in (("+", pair.lambda_plus), ("-", pair.lambda_minus)):
            photon_like = abs(lam - n * alpha) <= abs(
                lam - (params.omega_tls + (n - 1) * alpha)
            )
            out.append(
                BiorthState(
                    n=n,
                    branch=branch,
                    comp_e=0j if photon_like else 1 + 0j,
                    comp_g=1 + 0j if photon_like else 0j,
                    norm_const=1 + 0j,
                )
            )
        return out[0], out[1]
    out = []
    for branch, lam in (("+", pair.lambda_plus), ("-", pair.lambda_minus)):
        comp_e = -np.sqrt(n) * params.g
        comp_g = params.omega_tls + (n - 1) * alpha - lam
        quad = comp_e**2 + comp_g**2
        if abs(quad) < deg_tol**2:
            raise DegenerateSpectrum(
                f"bi-orthogonal normalization breaks down for n={n}, "
                f"branch {branch}: self-pairing {abs(quad):.3e}"
            )
        norm = 1.0 / np.sqrt(quad)
        if (norm * comp_g).real < 0 or (
            (norm * comp_g).real == 0 and (norm * comp_g).imag < 0
        ):
            norm = -norm
        out.append(
            BiorthState(
                n=n,
                branch=branch,
                comp_e=norm * comp_e,
                comp_g=norm * comp_g,
                norm_const=norm,
            )
        )
    return out[0], out[1]


def gamma_min(params: SystemParams) -> float:
    """Slowest amplitude decay rate of the one-excitation dressed pair.

    This sets the spatial decay of the two-photon bound-state correlation and
    every derived length/time scale (coordinate grids, wavepacket widths).
    """
    pair = dressed_pair(params, 1)
    return min(-pair.lambda_plus.imag, -pair.lambda_minus.imag)
