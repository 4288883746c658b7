"""Closed-form Caldirola-Kanai evolution of Gaussian superpositions.

Friction enters the effective Hamiltonian through e^{+-2*gamma*t}
factors; the wave packet keeps its Gaussian shape with a complex width,
a classically moving center and a classical action.  Everything below
is an explicit function of time, no grid propagation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import ProbabilityRangeError
from .params import Environment, GaussianSuperposition, PhysicalConstants
from .special import erfc_complex, uptau

__all__ = [
    "CkState",
    "CrossTermCoeffs",
    "ck_state",
    "cross_term_coeffs",
    "prob_negative_momentum",
    "prob_left_ck",
    "psi_ck",
    "current_origin_ck",
]

_SQRT2 = math.sqrt(2.0)
_PROB_TOL = 1e-9
_FD_STEP = 1e-5


@dataclass(frozen=True)
class CkState:
    """Width, centers and actions of the evolved two-Gaussian state.

    ``s_t`` is the complex width; ``sigma_t = |s_t|`` is the width of
    the probability density.  With a constant force the centers are the
    forced trajectories; the action fields always carry the free-motion
    expression (the forced phase is never needed: forced observables go
    through the probability-left closed form).
    """

    s_t: complex
    sigma_t: float
    center_a: float
    center_b: float
    action_a: float
    action_b: float


@dataclass(frozen=True)
class CrossTermCoeffs:
    """Interference coefficients of the two-Gaussian probability density.

    ``d1`` collects the constant phase/overlap exponent, ``d2`` the
    complex center of the cross Gaussian.
    """

    d1: complex
    d2: complex


def force_displacement(gamma: float, g: float, t: float) -> float:
    """Forced part of the trajectory: g*(2*gamma*t - 1 + e^{-2*gamma*t})/(4*gamma^2).

    Reduces to g*t^2/2 as gamma -> 0; a series branch below
    |2*gamma*t| = 1e-3 avoids the cancellation of the direct form.
    """
    u = 2.0 * gamma * t
    if abs(u) < 1e-3:
        # g*t^2 * (1/2 - u/6 + u^2/24 - u^3/120 + u^4/720 - u^5/5040)
        series = 0.5 + u * (
            -1.0 / 6.0
            + u * (1.0 / 24.0 + u * (-1.0 / 120.0 + u * (1.0 / 720.0 - u / 5040.0)))
        )
        return g * t * t * series
    return g * (u + math.expm1(-u)) / (4.0 * gamma**2)


def ck_state(
    constants: PhysicalConstants,
    env: Environment,
    state: GaussianSuperposition,
    t: float,
) -> CkState:
    """Evolved width, centers and actions at time t.

    Negative times are allowed only for free motion (g = 0); with
    friction the damped-time map stays defined there, which is exactly
    what the frictionless negative-time analysis needs, but physical
    validity is restricted to t >= 0 once gamma > 0.
    """
    if env.g != 0.0 and t < 0.0:
        raise ValueError("negative times are not defined under a constant force")
    hbar = constants.hbar_eff
    m = constants.m
    sp = state.sigma_p
    ut = uptau(env.gamma, t)
    s_t = complex(hbar, 2.0 * sp * sp * ut / m) / (2.0 * sp)
    disp = force_displacement(env.gamma, env.g, t) if env.g != 0.0 else 0.0
    return CkState(
        s_t=s_t,
        sigma_t=abs(s_t),
        center_a=state.p0a * ut / m + disp,
        center_b=state.p0b * ut / m + disp,
        action_a=state.p0a**2 * ut / (2.0 * m),
        action_b=state.p0b**2 * ut / (2.0 * m),
    )


def cross_term_coeffs(
    constants: PhysicalConstants,
    env: Environment,
    state: GaussianSuperposition,
    t: float,
) -> CrossTermCoeffs:
    """d1 and d2 of the interference part of |psi|^2 at time t."""
    st = ck_state(constants, env, state, t)
    dp = state.p0a - state.p0b
    d1 = complex(-dp * dp / (8.0 * state.sigma_p**2), -state.theta)
    d2 = complex(
        0.5 * (st.center_a + st.center_b),
        constants.hbar_eff * dp / (4.0 * state.sigma_p**2),
    )
    return CrossTermCoeffs(d1=d1, d2=d2)


def prob_negative_momentum(state: GaussianSuperposition) -> float:
    """Probability of measuring a negative momentum in the initial state.

    Pure momentum-space quantity; independent of mass and Planck
    constant.
    """
    sp = state.sigma_p
    n2 = 1.0 / state.norm_sq_inverse
    cross = (
        2.0
        * state.alpha
        * state.overlap
        * math.cos(state.theta)
        * math.erfc((state.p0a + state.p0b) / (2.0 * _SQRT2 * sp))
    )
    p = 0.5 * n2 * (
        math.erfc(state.p0a / (_SQRT2 * sp))
        + state.alpha**2 * math.erfc(state.p0b / (_SQRT2 * sp))
        + cross
    )
    _check_probability(p)
    return p


def _prob_left_from_widths(
    state: GaussianSuperposition,
    center_a: float,
    center_b: float,
    d2: complex,
    width: float,
) -> float:
    """Shared probability-left kernel for the CK and CL widths."""
    n2 = 1.0 / state.norm_sq_inverse
    denom = _SQRT2 * width
    cross_erfc = erfc_complex(d2 / denom)
    cross = (
        2.0
        * state.alpha
        * state.overlap
        * (
            math.cos(state.theta) * cross_erfc.real
            + math.sin(state.theta) * cross_erfc.imag
        )
    )
    p = 0.5 * n2 * (
        math.erfc(center_a / denom)
        + state.alpha**2 * math.erfc(center_b / denom)
        + cross
    )
    _check_probability(p)
    return p


def _check_probability(p: float) -> None:
    if not (-_PROB_TOL <= p <= 1.0 + _PROB_TOL):
        raise ProbabilityRangeError(
            f"probability {p!r} departs [0, 1] by more than {_PROB_TOL:g}"
        )


def prob_left_ck(
    constants: PhysicalConstants,
    env: Environment,
    state: GaussianSuperposition,
    t: float,
) -> float:
    """Probability of remaining in x < 0 at time t.

    Complementary-error-function closed form; the interference term uses
    the complex erfc of the cross center.  Under a constant force the
    centers are simply replaced by the forced trajectories.
    """
    st = ck_state(constants, env, state, t)
    d2 = cross_term_coeffs(constants, env, state, t).d2
    return _prob_left_from_widths(state, st.center_a, st.center_b, d2, st.sigma_t)


def _psi_component(
    x: float,
    p0: float,
    center: float,
    action: float,
    s_t: complex,
    sigma_p: float,
    hbar: float,
) -> complex:
    pref = (2.0 * math.pi * s_t * s_t) ** -0.25
    arg = (
        -sigma_p * (x - center) ** 2 / (2.0 * hbar * s_t)
        + 1j * p0 * (x - center) / hbar
        + 1j * action / hbar
    )
    return pref * cmath.exp(arg)


def psi_ck(
    constants: PhysicalConstants,
    env: Environment,
    state: GaussianSuperposition,
    x: float,
    t: float,
) -> complex:
    """Position-space wave function at (x, t) for free damped motion.

    Only defined for g = 0: the forced relative phase between the
    components has no closed form here, so forced observables are
    derived from the probability-left expression instead.
    """
    if env.g != 0.0:
        raise ValueError("psi_ck is defined for free motion only (g = 0)")
    st = ck_state(constants, env, state, t)
    hbar = constants.hbar_eff
    psi_a = _psi_component(
        x, state.p0a, st.center_a, st.action_a, st.s_t, state.sigma_p, hbar
    )
    psi_b = _psi_component(
        x, state.p0b, st.center_b, st.action_b, st.s_t, state.sigma_p, hbar
    )
    return state.norm_constant * (
        psi_a + state.alpha * cmath.exp(1j * state.theta) * psi_b
    )


def current_origin_ck(
    constants: PhysicalConstants,
    env: Environment,
    state: GaussianSuperposition,
    t: float,
) -> float:
    """Probability current density at the origin.

    Free motion: analytic x-derivative of the two-Gaussian wave
    function, damped by e^{-2*gamma*t}.  With a constant force the
    current is the numerically differentiated probability-left closed
    form (second-order stencil), consistent with the continuity
    equation by construction.
    """
    if env.g != 0.0:
        h = _FD_STEP
        if t >= h:
            p_plus = prob_left_ck(constants, env, state, t + h)
            p_minus = prob_left_ck(constants, env, state, t - h)
            return -(p_plus - p_minus) / (2.0 * h)
        p0 = prob_left_ck(constants, env, state, t)
        p1 = prob_left_ck(constants, env, state, t + h)
        p2 = prob_left_ck(constants, env, state, t + 2.0 * h)
        return -(-3.0 * p0 + 4.0 * p1 - p2) / (2.0 * h)

    st = ck_state(constants, env, state, t)
    hbar = constants.hbar_eff
    sp = state.sigma_p
    psi_a = _psi_component(0.0, state.p0a, st.center_a, st.action_a, st.s_t, sp, hbar)
    psi_b = _psi_component(0.0, state.p0b, st.center_b, st.action_b, st.s_t, sp, hbar)
    dpsi_a = (sp * st.center_a / (hbar * st.s_t) + 1j * state.p0a / hbar) * psi_a
    dpsi_b = (sp * st.center_b / (hbar * st.s_t) + 1j * state.p0b / hbar) * psi_b
    phase = state.alpha * cmath.exp(1j * state.theta)
    n = state.norm_constant
    psi = n * (psi_a + phase * psi_b)
    dpsi = n * (dpsi_a + phase * dpsi_b)
    return (
        hbar
        / constants.m
        * (psi.conjugate() * dpsi).imag
        * math.exp(-2.0 * env.gamma * t)
    )
