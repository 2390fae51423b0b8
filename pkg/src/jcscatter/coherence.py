"""Second-order coherence of the transmitted and reflected photon pairs.

The correlation numerator C(tau) is the squared modulus of the two-photon
wavefunction at separation tau (independent of the absolute position).  The
normalization D is where a choice is unavoidable:

* asymptotic mode divides by the uncorrelated plane-wave background, so
  g2 -> 1 at large separation whenever that background exists;
* box mode divides by the mean density of the actual wavefunction in a
  finite quantization box of length ``l_reg``, which is the only meaningful
  normalization where the background vanishes identically (reflection at the
  transparency energy, transmission at the bare dressed energies).  Box
  values scale linearly with ``l_reg``; the length is echoed in the output
  so no arbitrary absolute scale masquerades as physics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, VanishingBackground
from .model import SystemParams, dressed_pair, gamma_min
from .single import one_photon
from .sweep import SweepGrid
from .twophoton import TwoPhotonIn, bound_state_term, outgoing_wavefunction

#: Background detection threshold, relative to the peak of C(tau).
BG_TOL = 1e-10

#: Default box length, in units of the slowest decay length.
BOX_LENGTH_DECAY_UNITS = 1e3


@dataclass(frozen=True)
class G2Curve:
    """Normalized second-order coherence over a separation grid."""

    channel: str
    tau_grid: np.ndarray
    values: np.ndarray
    normalization: str
    incoming: TwoPhotonIn
    metadata: dict = field(default_factory=dict)


def _pair_background(params: SystemParams, incoming: TwoPhotonIn, channel: str) -> complex:
    a1 = one_photon(params, incoming.k1)
    a2 = one_photon(params, incoming.k2)
    if channel == "RR":
        return a1.t_bar * a2.t_bar
    return a1.r_bar * a2.r_bar


def correlation_numerator(
    params: SystemParams, incoming: TwoPhotonIn, channel: str, tau
) -> np.ndarray:
    """C(tau) = |psi(x, x + tau)|^2 for the chosen outgoing channel.

    Position-independent, so it is evaluated at x = 0; even in tau.
    Broadcasts over tau arrays.
    """
    if channel not in ("RR", "LL"):
        raise DomainError(f"correlation channel must be RR or LL, got {channel!r}")
    tau = np.asarray(tau, dtype=float)
    psi = outgoing_wavefunction(params, incoming, channel, np.zeros_like(tau), tau)
    return np.abs(psi) ** 2


def _box_correction_integral(
    params: SystemParams, incoming: TwoPhotonIn, channel: str, d_background: float
) -> float:
    """integral of [C(u) - D] du over the correlation core.

    C - D decays exponentially at the slowest dressed rate, so a window of
    many decay lengths captures the integral to well below double precision
    of the retained digits.
    """
    rate = gamma_min(params)
    pair = dressed_pair(params, 1)
    half_e = incoming.energy / 2.0
    w_max = max(
        abs(half_e - pair.lambda_plus.real), abs(half_e - pair.lambda_minus.real), 1.0
    )
    span = 30.0 / rate
    du = min(0.25 / w_max, 0.05 / rate)
    u = np.arange(0.0, span, du)
    c_vals = correlation_numerator(params, incoming, channel, u)
    # even integrand: integrate one side and double
    return float(2.0 * np.trapezoid(c_vals - d_background, u))


def g2(
    params: SystemParams,
    incoming: TwoPhotonIn,
    channel: str,
    tau_grid,
    normalization: str = "asymptotic",
    l_reg: float | None = None,
    bg_tol: float = BG_TOL,
) -> G2Curve:
    """Normalized g2(tau) for one outgoing channel.

    Only equal incoming momenta are accepted (monochromatic pair); the
    asymptotic normalization is additionally only defined when the
    plane-wave background is nonzero.

    Raises:
        VanishingBackground: asymptotic mode with numerically zero
            background; switch to ``normalization="box"``.
    """
    if channel not in ("RR", "LL"):
        raise DomainError(f"g2 channel must be RR or LL, got {channel!r}")
    if incoming.delta_k != 0.0:
        raise DomainError(
            "g2 requires equal incoming momenta (delta_k = 0), got "
            f"delta_k = {incoming.delta_k}"
        )
    if normalization not in ("asymptotic", "box"):
        raise DomainError(f"unknown normalization {normalization!r}")
    tau = np.asarray(tau_grid, dtype=float)
    if np.any(tau < 0):
        raise DomainError("tau_grid entries must be >= 0")
    c_vals = correlation_numerator(params, incoming, channel, tau)
    background = _pair_background(params, incoming, channel)
    d_asym = abs(background) ** 2 / (2.0 * np.pi) ** 2
    c_peak = max(
        float(np.max(c_vals, initial=0.0)),
        float(correlation_numerator(params, incoming, channel, 0.0)),
    )
    meta: dict = {"background_density": d_asym, "units": "v=1"}
    if normalization == "asymptotic":
        if d_asym < bg_tol * c_peak:
            raise VanishingBackground(
                f"{channel} background density {d_asym:.3e} below "
                f"{bg_tol:.1e} x peak correlation {c_peak:.3e}; use box mode"
            )
        values = c_vals / d_asym
        label = "asymptotic"
    else:
        if l_reg is None:
            l_reg = BOX_LENGTH_DECAY_UNITS / gamma_min(params)
        if l_reg <= 0:
            raise DomainError(f"l_reg must be > 0, got {l_reg}")
        correction = _box_correction_integral(params, incoming, channel, d_asym)
        denom = d_asym + correction / l_reg
        if denom <= 0:
            raise VanishingBackground(
                "box normalization produced a non-positive mean density"
            )
        values = c_vals / denom
        label = f"box(L_reg={l_reg:g})"
        meta["l_reg"] = float(l_reg)
        meta["core_integral"] = correction
    return G2Curve(
        channel=channel,
        tau_grid=tau,
        values=values,
        normalization=label,
        incoming=incoming,
        metadata=meta,
    )


def g2_zero_sweep(
    params: SystemParams,
    e_grid,
    channel: str,
    l_reg: float | None = None,
) -> SweepGrid:
    """g2(0) against the energy per photon E/2, for equal-momentum pairs.

    Points where the background vanishes are evaluated in box mode (default
    box length 1e3 decay lengths) and flagged rather than aborting the sweep.
    """
    e_half = np.asarray(e_grid, dtype=float)
    if np.any(e_half <= 0):
        raise DomainError("all E/2 grid points must be > 0")
    values = np.empty(e_half.shape)
    flags = np.empty(e_half.shape, dtype=object)
    for i, eh in enumerate(e_half):
        incoming = TwoPhotonIn(float(eh), float(eh))
        try:
            curve = g2(params, incoming, channel, [0.0])
            flags[i] = ""
        except VanishingBackground:
            curve = g2(
                params, incoming, channel, [0.0], normalization="box", l_reg=l_reg
            )
            flags[i] = curve.normalization
        values[i] = curve.values[0]
    return SweepGrid(
        axes={"e_half": e_half},
        values=values,
        value_name=f"g2_zero_{channel}",
        flags=flags,
        metadata={
            "channel": channel,
            "params": vars(params).copy(),
            "units": "v=1",
            "normalization": "asymptotic with per-point box fallback",
        },
    )
