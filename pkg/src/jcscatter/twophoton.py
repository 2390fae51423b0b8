"""Exact two-photon scattering: T-matrix, bound term, outgoing wavefunctions.

All closed forms are evaluated as products of factored pole terms, never as
expanded polynomials, so cancellation near resonances stays benign.  Momenta
are canonicalized (k1 >= k2, and the larger outgoing momentum first) before
evaluation, which makes the bosonic exchange symmetries exact by
construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import DegenerateSpectrum, DomainError, NonFiniteResult
from .model import SystemParams, cavity_pole, dressed_pair, gamma_min
from .single import even_phase
from .sweep import SweepGrid

Channel = Literal["RR", "LL", "LR"]

#: Coordinate-grid defaults: span +-12/gamma_min covers the bound-term decay
#: to below 1e-5 of its peak.
GRID_SPAN_DECAY_LENGTHS = 12.0
GRID_POINTS = 2048


@dataclass(frozen=True)
class TwoPhotonIn:
    """Incoming photon pair, canonicalized so k1 >= k2.

    Derived quantities: total energy E = k1 + k2 (conserved) and relative
    momentum delta_k = k1 - k2 >= 0.
    """

    k1: float
    k2: float

    def __post_init__(self) -> None:
        if not (self.k1 > 0 and self.k2 > 0):
            raise DomainError(
                f"incident momenta must be > 0, got ({self.k1}, {self.k2})"
            )
        if self.k1 < self.k2:
            hi, lo = self.k2, self.k1
            object.__setattr__(self, "k1", hi)
            object.__setattr__(self, "k2", lo)

    @property
    def energy(self) -> float:
        return self.k1 + self.k2

    @property
    def delta_k(self) -> float:
        return self.k1 - self.k2


@dataclass(frozen=True)
class TwoPhotonAmplitude:
    """Complex two-photon amplitude on the energy shell."""

    value: complex
    on_shell_energy: float
    kind: str


@dataclass(frozen=True)
class ChannelWavefunction:
    """Sampled outgoing two-photon wavefunction for one channel.

    For RR/LL the grid is the relative coordinate x1 - x2 at zero center of
    mass; for LR it is the center-of-mass coordinate at zero separation
    (the correlation structure of the mixed channel lives there).
    """

    channel: Channel
    grid: np.ndarray
    values: np.ndarray
    incoming: TwoPhotonIn
    metadata: dict = field(default_factory=dict)


def _spectrum(params: SystemParams):
    p1 = dressed_pair(params, 1)
    p2 = dressed_pair(params, 2)
    return (p1.lambda_plus, p1.lambda_minus), (p2.lambda_plus, p2.lambda_minus)


def _check_decaying(params: SystemParams, lam1, lam2) -> None:
    # Real momenta can only hit a pole if some eigenvalue is exactly real,
    # which cannot happen for g > 0 and v_tilde > 0.
    if params.v_tilde > 0 and params.g > 0:
        if not all(l.imag < 0 for l in (*lam1, *lam2)):
            raise NonFiniteResult(
                "expected strictly decaying dressed eigenvalues, got "
                f"{lam1}, {lam2}"
            )


def _pole_quad(momenta: np.ndarray, lam: tuple[complex, complex]) -> np.ndarray:
    """prod_s prod_i (momenta_i - lambda_s), broadcasting over grids."""
    out = 1.0
    for m in momenta:
        out = out * (m - lam[0]) * (m - lam[1])
    return out


def _t_matrix_values(
    params: SystemParams, k1, k2, p1, p2
) -> np.ndarray:
    """Smooth on-shell amplitude multiplying the energy delta inside i*T.

    Broadcasts over array-valued momenta; the energy shell p1 + p2 = k1 + k2
    is the caller's responsibility.
    """
    if params.g == 0:
        return np.zeros(np.broadcast(k1, k2, p1, p2).shape, dtype=complex)
    lam1, lam2 = _spectrum(params)
    _check_decaying(params, lam1, lam2)
    alpha = cavity_pole(params)
    omega = params.omega_tls
    e_tot = np.asarray(k1) + np.asarray(k2)
    num = (
        1j
        * params.v_tilde**4
        * params.g**4
        * (e_tot - alpha - omega)
        * ((e_tot - 2 * omega) * (e_tot - 2 * alpha) - 4 * params.g**2)
    )
    den = (
        np.pi
        * (e_tot - lam2[0])
        * (e_tot - lam2[1])
        * _pole_quad((np.asarray(k1), np.asarray(k2)), lam1)
        * _pole_quad((np.asarray(p1), np.asarray(p2)), lam1)
    )
    value = num / den
    if np.any(~np.isfinite(value)):
        raise NonFiniteResult("two-photon T-matrix evaluation not finite")
    return value


def two_photon_t_matrix(
    params: SystemParams, incoming: TwoPhotonIn, p1: float
) -> TwoPhotonAmplitude:
    """Connected two-photon T-matrix element on the energy shell.

    The energy-conserving delta is factored out: the returned value is the
    smooth amplitude multiplying it inside i*T, with p2 = E - p1 implied.
    Background fluorescence is its square norm.
    """
    e_tot = incoming.energy
    p_hi = max(float(p1), e_tot - float(p1))
    value = _t_matrix_values(params, incoming.k1, incoming.k2, p_hi, e_tot - p_hi)
    return TwoPhotonAmplitude(
        value=complex(value), on_shell_energy=e_tot, kind="t_matrix"
    )


def bound_state_term(params: SystemParams, incoming: TwoPhotonIn, x) -> np.ndarray:
    """TLS-induced bound-state correlation F at relative coordinate x.

    Even in x; decays exponentially as |x| grows with the slowest dressed
    decay rate.  Vanishes identically for g = 0.  Broadcasts over x.

    Raises:
        DegenerateSpectrum: the formula divides by the dressed splitting.
    """
    x = np.asarray(x, dtype=float)
    if params.g == 0:
        return np.zeros(x.shape, dtype=complex)
    lam1, lam2 = _spectrum(params)
    _check_decaying(params, lam1, lam2)
    e_tot = incoming.energy
    ax = np.abs(x)
    num = (e_tot - 2 * lam1[0]) * np.exp(1j * (e_tot / 2 - lam1[1]) * ax) - (
        e_tot - 2 * lam1[1]
    ) * np.exp(1j * (e_tot / 2 - lam1[0]) * ax)
    den = (
        4.0
        * (lam1[0] - lam1[1])
        * (e_tot - lam2[0])
        * (e_tot - lam2[1])
        * _pole_quad((incoming.k1, incoming.k2), lam1)
    )
    return params.v_tilde**4 * params.g**4 * num / den


def outgoing_wavefunction(
    params: SystemParams,
    incoming: TwoPhotonIn,
    channel: Channel,
    x1,
    x2,
) -> np.ndarray:
    """Outgoing two-photon wavefunction at coordinates (x1, x2).

    Channels: RR both transmitted, LL both reflected, LR one photon each
    way.  Broadcasts over coordinate arrays.
    """
    if channel not in ("RR", "LL", "LR"):
        raise DomainError(f"unknown channel {channel!r}")
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    x = x1 - x2
    x_c = 0.5 * (x1 + x2)
    e_tot = incoming.energy
    dk = incoming.delta_k
    t = even_phase(params, np.array([incoming.k1, incoming.k2]))
    tbar = (t + 1.0) / 2.0
    rbar = (t - 1.0) / 2.0
    pref = 1.0 / (2.0 * np.pi)
    if channel == "RR":
        return pref * np.exp(1j * e_tot * x_c) * (
            tbar[0] * tbar[1] * np.cos(dk * x)
            - bound_state_term(params, incoming, x)
        )
    if channel == "LL":
        return pref * np.exp(1j * e_tot * x_c) * (
            rbar[0] * rbar[1] * np.cos(dk * x)
            - bound_state_term(params, incoming, x)
        )
    return pref * np.exp(1j * (e_tot / 2) * x) * (
        tbar[0] * rbar[1] * np.exp(2j * dk * x_c)
        + tbar[1] * rbar[0] * np.exp(-2j * dk * x_c)
        - 2.0 * bound_state_term(params, incoming, 2.0 * x_c)
    )


def default_grid(params: SystemParams, num: int = GRID_POINTS) -> np.ndarray:
    span = GRID_SPAN_DECAY_LENGTHS / gamma_min(params)
    return np.linspace(-span, span, num)


def sample_channel(
    params: SystemParams,
    incoming: TwoPhotonIn,
    channel: Channel,
    grid: np.ndarray | None = None,
) -> ChannelWavefunction:
    """Sample one outgoing channel over a uniform coordinate grid.

    RR/LL are sampled against the relative coordinate (center of mass at 0);
    LR against the center-of-mass coordinate (separation 0).
    """
    if grid is None:
        grid = default_grid(params)
    grid = np.asarray(grid, dtype=float)
    if channel == "LR":
        x1, x2 = grid, grid
    else:
        x1, x2 = grid / 2.0, -grid / 2.0
    values = outgoing_wavefunction(params, incoming, channel, x1, x2)
    return ChannelWavefunction(
        channel=channel,
        grid=grid,
        values=values,
        incoming=incoming,
        metadata={"coordinate": "center_of_mass" if channel == "LR" else "relative"},
    )


def fluorescence_map(
    params: SystemParams,
    e_total: float,
    dk_grid: np.ndarray,
    dp_grid: np.ndarray,
) -> SweepGrid:
    """Background fluorescence |T|^2 over relative momenta at fixed energy.

    Incoming momenta k_i = (E +- delta_k)/2 and outgoing p_i = (E +- delta_p)/2
    must stay positive; the grids must be symmetric about zero.

    The amplitude factorizes into a delta_k part and a delta_p part, so the
    map is evaluated as an outer product (deterministic regardless of any
    evaluation order).
    """
    dk_grid = np.asarray(dk_grid, dtype=float)
    dp_grid = np.asarray(dp_grid, dtype=float)
    for name, grid in (("dk_grid", dk_grid), ("dp_grid", dp_grid)):
        if grid.ndim != 1 or grid.size < 1:
            raise DomainError(f"{name} must be a 1-D grid")
        if not np.allclose(grid + grid[::-1], 0.0, atol=1e-12 * max(1.0, abs(grid[-1]))):
            raise DomainError(f"{name} must be symmetric about 0")
        if np.any(np.abs(grid) >= e_total):
            raise DomainError(
                f"{name} implies a non-positive momentum at E = {e_total}"
            )
    if params.g == 0:
        t2 = np.zeros((dk_grid.size, dp_grid.size))
    else:
        lam1, lam2 = _spectrum(params)
        _check_decaying(params, lam1, lam2)
        alpha = cavity_pole(params)
        omega = params.omega_tls
        scale = (
            params.v_tilde**4
            * params.g**4
            * (e_total - alpha - omega)
            * ((e_total - 2 * omega) * (e_total - 2 * alpha) - 4 * params.g**2)
            / (np.pi * (e_total - lam2[0]) * (e_total - lam2[1]))
        )
        k_part = _pole_quad(
            ((e_total + dk_grid) / 2.0, (e_total - dk_grid) / 2.0), lam1
        )
        p_part = _pole_quad(
            ((e_total + dp_grid) / 2.0, (e_total - dp_grid) / 2.0), lam1
        )
        amp = scale / np.outer(k_part, p_part)
        if np.any(~np.isfinite(amp)):
            raise NonFiniteResult("fluorescence map evaluation not finite")
        t2 = np.abs(amp) ** 2
    return SweepGrid(
        axes={"delta_k": dk_grid, "delta_p": dp_grid},
        values=t2,
        value_name="T2",
        metadata={
            "total_energy": e_total,
            "params": vars(params).copy(),
            "units": "v=1",
        },
    )
