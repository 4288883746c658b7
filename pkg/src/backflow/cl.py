"""Closed-form Caldeira-Leggett reduced-density-matrix evolution.

Friction and bath temperature act through the diffusion coefficient
D = 2*m*gamma*kT.  The density matrix of an evolved cross pair keeps a
Gaussian form whose exponent coefficients (a0, a1) are known in closed
form; all observables below are built from those coefficients at zero
off-diagonal separation, so no partial differential equation is ever
solved on a grid.

Only t >= 0 is admitted: for negative times the thermal term drives the
squared width negative.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .ck import _prob_left_from_widths, ck_state
from .params import Environment, GaussianSuperposition, PhysicalConstants
from .special import thermal_width_factor, uptau

__all__ = [
    "ClCrossTerm",
    "cl_width",
    "cl_cross_coeffs",
    "rho_pair_diag",
    "rho_diag_cl",
    "prob_left_cl",
    "current_origin_cl",
]

_PAIRS = ("aa", "ab", "ba", "bb")
_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class ClCrossTerm:
    """Exponent data of one evolved density-matrix pair at r = 0.

    ``a0_r0``/``a1_r0`` are the coefficients themselves, ``da0_dr``/
    ``da1_dr`` their analytic derivatives along the off-diagonal
    direction, all evaluated on the diagonal.
    """

    a0_r0: complex
    da0_dr: complex
    a1_r0: complex
    da1_dr: complex


def _require_nonnegative_time(t: float) -> None:
    if t < 0.0:
        raise ValueError(f"t must be >= 0 here (imaginary width otherwise), got {t!r}")


def cl_width(
    constants: PhysicalConstants,
    env: Environment,
    state: GaussianSuperposition,
    t: float,
) -> float:
    """Width of the probability density under friction and temperature.

    Exceeds the friction-only width whenever D > 0 and grows strictly
    with time; collapses to it exactly at D = 0.
    """
    _require_nonnegative_time(t)
    hbar = constants.hbar_eff
    m = constants.m
    sp = state.sigma_p
    ut = uptau(env.gamma, t)
    d_coeff = env.diffusion(m)
    return (
        math.sqrt(
            hbar * hbar
            + 4.0 * sp**4 * ut * ut / (m * m)
            + sp * sp * d_coeff * thermal_width_factor(env.gamma, t) / (m * m)
        )
        / (2.0 * sp)
    )


def _pair_momenta(state: GaussianSuperposition, which: str) -> tuple[float, float]:
    if which not in _PAIRS:
        raise ValueError(f"which must be one of {_PAIRS}, got {which!r}")
    p = {"a": state.p0a, "b": state.p0b}
    return p[which[0]], p[which[1]]


def cl_cross_coeffs(
    constants: PhysicalConstants,
    env: Environment,
    state: GaussianSuperposition,
    which: str,
    t: float,
) -> ClCrossTerm:
    """Exponent coefficients of the evolved pair (aa, ab, ba or bb).

    The diagonal pairs are the degenerate case of the cross formulas
    with equal momenta; a constant force adds a drift term to the phase
    derivative and shifts the centers to the forced trajectories.
    """
    _require_nonnegative_time(t)
    hbar = constants.hbar_eff
    m = constants.m
    sp = state.sigma_p
    p_k, p_l = _pair_momenta(state, which)
    st = ck_state(constants, env, state, t)
    centers = {"a": st.center_a, "b": st.center_b}

    ut = uptau(env.gamma, t)
    e2 = math.exp(-2.0 * env.gamma * t)
    d_coeff = env.diffusion(m)

    da0 = 1j * (e2 * (p_k + p_l) / (2.0 * hbar) + m * env.g * ut / hbar)
    a0 = complex(-((p_k - p_l) ** 2) / (8.0 * sp * sp), 0.0)
    a1 = complex(
        0.5 * (centers[which[0]] + centers[which[1]]),
        hbar * (p_k - p_l) / (4.0 * sp * sp),
    )
    da1 = 1j * (sp * sp * e2 * ut / (m * hbar) + d_coeff * ut * ut / (m * hbar))
    return ClCrossTerm(a0_r0=a0, da0_dr=da0, a1_r0=a1, da1_dr=da1)


def rho_pair_diag(
    constants: PhysicalConstants,
    env: Environment,
    state: GaussianSuperposition,
    which: str,
    x: float,
    t: float,
) -> complex:
    """Diagonal-restricted pair density exp(a0 - (x-a1)^2/(2 w^2)) / (sqrt(2 pi) w)."""
    w = cl_width(constants, env, state, t)
    c = cl_cross_coeffs(constants, env, state, which, t)
    return cmath.exp(c.a0_r0 - (x - c.a1_r0) ** 2 / (2.0 * w * w)) / (_SQRT_2PI * w)


def _pair_weights(state: GaussianSuperposition) -> dict[str, complex]:
    phase = cmath.exp(1j * state.theta)
    return {
        "aa": 1.0 + 0.0j,
        "ab": state.alpha / phase,
        "ba": state.alpha * phase,
        "bb": complex(state.alpha**2),
    }


def rho_diag_cl(
    constants: PhysicalConstants,
    env: Environment,
    state: GaussianSuperposition,
    x: float,
    t: float,
) -> float:
    """Probability density at (x, t): weighted four-pair sum, real and >= 0."""
    weights = _pair_weights(state)
    total = 0.0 + 0.0j
    for which in _PAIRS:
        total += weights[which] * rho_pair_diag(constants, env, state, which, x, t)
    total /= state.norm_sq_inverse
    if abs(total.imag) > 1e-12 * max(1.0, abs(total.real)):
        raise ArithmeticError(
            f"density at x={x!r}, t={t!r} has a non-real residue {total.imag!r}"
        )
    return total.real


def prob_left_cl(
    constants: PhysicalConstants,
    env: Environment,
    state: GaussianSuperposition,
    t: float,
) -> float:
    """Probability of remaining in x < 0 with the thermal width.

    Same closed form as the friction-only case, with the thermal width
    in place of the coherent one and forced centers when g != 0.
    """
    w = cl_width(constants, env, state, t)
    st = ck_state(constants, env, state, t)
    d2 = cl_cross_coeffs(constants, env, state, "ab", t).a1_r0
    return _prob_left_from_widths(state, st.center_a, st.center_b, d2, w)


def current_origin_cl(
    constants: PhysicalConstants,
    env: Environment,
    state: GaussianSuperposition,
    t: float,
) -> float:
    """Probability current density at the origin.

    Each pair contributes [da0/dr + a1/(2 w^2) * (1 - 2 da1/dr)] * rho;
    the imaginary part is taken after the weighted sum (the complex
    weights do not commute with Im), which keeps the total current real:
    the ab and ba contributions are exact conjugates.
    """
    _require_nonnegative_time(t)
    w = cl_width(constants, env, state, t)
    w2 = 2.0 * w * w
    weights = _pair_weights(state)
    total = 0.0 + 0.0j
    for which in _PAIRS:
        c = cl_cross_coeffs(constants, env, state, which, t)
        rho = cmath.exp(c.a0_r0 - (0.0 - c.a1_r0) ** 2 / w2) / (_SQRT_2PI * w)
        total += weights[which] * (c.da0_dr + c.a1_r0 / w2 * (1.0 - 2.0 * c.da1_dr)) * rho
    total /= state.norm_sq_inverse
    return constants.hbar_eff / constants.m * total.imag
