"""Two-photon T-matrix recomputed from time-ordered cavity correlators.

This path never touches the closed-form rational expression: it expands the
four-point function of the cavity field in the bi-orthogonal eigenbasis of
the effective Hamiltonian, performs every time integral analytically (each
time-ordered sector is a product of simple poles), and assembles the
connected on-shell amplitude.  Agreement with the closed form is therefore a
genuine cross-derivation check.

Structure of the calculation: with two creation and two annihilation times
there are eight contributing orderings.  Four route through the
two-excitation sector (create, create, annihilate, annihilate) and give
triple-pole sums; four alternate (create, annihilate, create, annihilate)
and give products of single-excitation propagators whose undamped middle
integral splits into a delta part plus a principal-value part.  The delta
parts reproduce the disconnected product of single-photon processes exactly
and drop out of the connected amplitude; the principal-value parts are
regular on the energy shell once written as divided differences.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConvergenceFailure
from ..model import SystemParams, biorth_states, dressed_pair
from ..twophoton import TwoPhotonIn

#: Pole-sum conditioning threshold: largest term over final magnitude.
CONDITION_LIMIT = 1e13


def _divided_difference(c, lam, x, y):
    """[C(x) - C(y)]/(x - y) for C(z) = sum_s c_s / (z - lam_s), exact form."""
    return -sum(cs / ((x - ls) * (y - ls)) for cs, ls in zip(c, lam))


def spectral_t_matrix(params: SystemParams, incoming: TwoPhotonIn, p1: float) -> complex:
    """Connected on-shell two-photon amplitude from the spectral expansion.

    Returns the smooth amplitude multiplying the energy-conserving delta
    inside i*T, in the same factoring convention as the closed-form module.

    Raises:
        DegenerateSpectrum: propagated from the eigenbasis.
        ConvergenceFailure: if the pole-sum cancellation leaves fewer than a
            few significant digits (only meaningful for g > 0; at g = 0 the
            exact result is zero and the numerical residue is returned).
    """
    k1, k2 = incoming.k1, incoming.k2
    e_tot = incoming.energy
    p1 = float(p1)
    p2 = e_tot - p1

    d1 = dressed_pair(params, 1)
    d2 = dressed_pair(params, 2)
    lam1 = (d1.lambda_plus, d1.lambda_minus)
    lam2 = (d2.lambda_plus, d2.lambda_minus)
    st1 = biorth_states(params, 1)
    st2 = biorth_states(params, 2)
    cg1 = [s.comp_g for s in st1]
    ce1 = [s.comp_e for s in st1]
    cg2 = [s.comp_g for s in st2]
    ce2 = [s.comp_e for s in st2]

    def lower(i, j):
        # <lam1_i*| a |lam2_j> in the bilinear pairing; the raising element
        # <lam2_j*| a+ |lam1_i> has the identical value (both blocks share
        # the same photon matrix elements and the pairing is unconjugated).
        return ce1[i] * ce2[j] + np.sqrt(2.0) * cg1[i] * cg2[j]

    terms: list[complex] = []

    # Orderings through the two-excitation sector: poles (k_a - lam1_s1),
    # (E - lam2_s2), (p_d - lam1_s3) for every in/out slot assignment.
    for k_a in (k1, k2):
        for p_d in (p1, p2):
            for i1 in range(2):
                for i2 in range(2):
                    for i3 in range(2):
                        weight = cg1[i3] * lower(i3, i2) * lower(i1, i2) * cg1[i1]
                        terms.append(
                            weight
                            / (
                                (k_a - lam1[i1])
                                * (e_tot - lam2[i2])
                                * (p_d - lam1[i3])
                            )
                        )

    # Alternating orderings: principal-value remainder after the delta parts
    # cancel against the disconnected single-photon products.  The pairwise
    # pole at coinciding in/out momenta is removable; the divided-difference
    # form below is its exact regularization on the energy shell.
    c = [cg1[0] ** 2, cg1[1] ** 2]

    def single_pole_sum(z):
        return sum(cs / (z - ls) for cs, ls in zip(c, lam1))

    terms.append(single_pole_sum(p1) * _divided_difference(c, lam1, k1, p2))
    terms.append(single_pole_sum(p2) * _divided_difference(c, lam1, p1, k2))
    terms.append(single_pole_sum(p2) * _divided_difference(c, lam1, k1, p1))
    terms.append(single_pole_sum(p1) * _divided_difference(c, lam1, p2, k2))

    total = sum(terms)
    if params.g > 0:
        largest = max(abs(t) for t in terms)
        if largest > CONDITION_LIMIT * max(abs(total), 1e-300):
            raise ConvergenceFailure(
                "spectral pole sum lost all significant digits: largest term "
                f"{largest:.3e} vs total {abs(total):.3e}"
            )
    return params.v_tilde**4 * (1j**3) / (2.0 * np.pi) * total
