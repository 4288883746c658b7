"""Scalar special functions underpinning the damped wave-packet formulas.

Two families live here:

* the complex error function, evaluated through the Faddeeva function
  ``w(z) = exp(-z^2) * erfc(-i z)`` with a region-split scheme (power
  series near the origin, Weideman rational approximation elsewhere,
  reflection into the upper half-plane);
* exponential-difference factors of the damped dynamics, ``uptau`` and
  ``thermal_width_factor``, whose direct forms cancel catastrophically
  as ``gamma * t -> 0`` and therefore switch to truncated series below a
  fixed threshold.

All functions are pure and accept/return Python scalars.
"""

from __future__ import annotations

import cmath
import math
import warnings

import numpy as np

from .errors import SaturationWarning

__all__ = ["faddeeva", "erfc_complex", "uptau", "thermal_width_factor"]

# Series/rational split radius for w(z).  Inside the disk the Maclaurin
# form loses at most ~e^{r^2} of precision, which keeps the relative
# error below ~2e-13 for r = 2.
_SERIES_RADIUS = 2.0
_WEIDEMAN_TERMS = 48

# Series branch threshold for uptau: switch when |2*gamma*t| < 1e-3.
# A six-term series keeps both sides of the switch below 1e-13 relative
# error with margin (the direct branch is a bare expm1).
_BRANCH_THRESHOLD = 1e-3

# thermal_width_factor cancels twice (u -> u^2 -> u^3), so its direct
# branch loses ~eps/u^2; the switch sits at 0.04 with a seven-term
# series, which puts both branches near 1e-13 relative error.
_TWF_THRESHOLD = 0.04

# exp overflows just above 709.78; clamp magnitudes at a finite sentinel
# and warn instead of returning inf.
_EXP_ARG_MAX = 700.0
_SATURATION_MAGNITUDE = 1e300


def _weideman_fit(n_terms: int) -> tuple[float, np.ndarray]:
    """Chebyshev-like rational fit of w(z) on the upper half-plane.

    Returns the scale L and polynomial coefficients (highest degree
    first) of Weideman's construction; built once at import.
    """
    m = 2 * n_terms
    m2 = 2 * m
    k = np.arange(-m + 1, m)
    scale = math.sqrt(n_terms / math.sqrt(2.0))
    t = scale * np.tan(k * np.pi / m2)
    f = np.zeros(t.size + 1)
    f[1:] = np.exp(-t * t) * (scale * scale + t * t)
    coef = np.real(np.fft.fft(np.fft.fftshift(f))) / m2
    return scale, np.flipud(coef[1 : n_terms + 1])


_WEIDEMAN_L, _WEIDEMAN_COEF = _weideman_fit(_WEIDEMAN_TERMS)


def _exp_saturated(a: complex) -> complex:
    """exp(a) with the magnitude clamped at 1e300 (phase preserved).

    The clamp is announced through SaturationWarning so callers never
    receive a silent inf.
    """
    if a.real > _EXP_ARG_MAX:
        warnings.warn(
            f"exp argument {a.real:.6g} overflows; magnitude clamped to "
            f"{_SATURATION_MAGNITUDE:.0e}",
            SaturationWarning,
            stacklevel=3,
        )
        return cmath.rect(_SATURATION_MAGNITUDE, a.imag)
    return cmath.exp(a)


def _w_series(z: complex) -> complex:
    # w(z) = exp(-z^2) + i z * sum_k (-z^2)^k / Gamma(k + 3/2); the even
    # part is summed exactly as exp(-z^2), only the odd part is iterated.
    mz2 = -z * z
    term = 2.0 / math.sqrt(math.pi)  # 1 / Gamma(3/2)
    total = term
    for k in range(1, 128):
        term *= mz2 / (k + 0.5)
        total += term
        if abs(term) <= 1e-18 * abs(total):
            break
    return cmath.exp(mz2) + 1j * z * total


def _w_rational(z: complex) -> complex:
    # Weideman's rational approximation; accurate to ~1e-15 absolute on
    # the upper half-plane, hence <=1e-12 relative out to |z| ~ 30.
    zz = (_WEIDEMAN_L + 1j * z) / (_WEIDEMAN_L - 1j * z)
    p = 0.0 + 0.0j
    for c in _WEIDEMAN_COEF:
        p = p * zz + c
    return 2.0 * p / (_WEIDEMAN_L - 1j * z) ** 2 + (
        1.0 / math.sqrt(math.pi)
    ) / (_WEIDEMAN_L - 1j * z)


def _w_upper(z: complex) -> complex:
    if abs(z) <= _SERIES_RADIUS:
        return _w_series(z)
    return _w_rational(z)


def faddeeva(z: complex) -> complex:
    """Faddeeva function w(z) = exp(-z^2) erfc(-iz).

    The upper half-plane is evaluated directly (relative error below
    1e-12 for |z| <= 30); the lower half-plane uses the reflection
    identity ``w(z) = 2 exp(-z^2) - w(-z)``.  Where ``exp(-z^2)``
    overflows, the result saturates at magnitude 1e300 and a
    SaturationWarning is issued.

    Parameters
    ----------
    z : complex
        Finite argument.

    Returns
    -------
    complex
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"faddeeva requires a finite argument, got {z!r}")
    if z.imag >= 0.0:
        return _w_upper(z)
    return 2.0 * _exp_saturated(-z * z) - _w_upper(-z)


def erfc_complex(z: complex) -> complex:
    """Complementary error function of a complex argument.

    Uses ``erfc(z) = exp(-z^2) w(iz)`` for Re z >= 0; the left
    half-plane goes through ``erfc(z) = 2 - erfc(-z)``, which keeps the
    Faddeeva argument in the upper half-plane and makes the reflection
    sum ``erfc(z) + erfc(-z) = 2`` exact by construction.  Real input
    yields an exactly real result.

    Parameters
    ----------
    z : complex
        Finite argument.

    Returns
    -------
    complex
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"erfc_complex requires a finite argument, got {z!r}")
    if z.real < 0.0:
        return 2.0 - erfc_complex(-z)
    return _exp_saturated(-z * z) * _w_upper(1j * z)


def uptau(gamma: float, t: float) -> float:
    """Damped elapsed time (1 - exp(-2*gamma*t)) / (2*gamma).

    Monotone in t, equal to t at gamma = 0 and saturating at
    1/(2*gamma) as t grows.  Negative t is legal (needed by the
    frictionless negative-time analysis).  Below |2*gamma*t| = 1e-3 a
    six-term series removes the 0/0 cancellation; the two branches agree
    to better than 1e-13 at the switch.

    Parameters
    ----------
    gamma : float
        Friction coefficient, >= 0.
    t : float
        Time, any real value.

    Returns
    -------
    float
    """
    if not (gamma >= 0.0 and math.isfinite(gamma)):
        raise ValueError(f"gamma must be finite and >= 0, got {gamma!r}")
    if not math.isfinite(t):
        raise ValueError(f"t must be finite, got {t!r}")
    u = 2.0 * gamma * t
    if abs(u) < _BRANCH_THRESHOLD:
        # t * (1 - u/2 + u^2/6 - u^3/24 + u^4/120 - u^5/720)
        return t * (
            1.0
            + u
            * (-0.5 + u * (1.0 / 6.0 + u * (-1.0 / 24.0 + u * (1.0 / 120.0 - u / 720.0))))
        )
    return -math.expm1(-u) / (2.0 * gamma)


def thermal_width_factor(gamma: float, t: float) -> float:
    """Thermal spreading factor (4*g*t + 4*e^{-2gt} - 3 - e^{-4gt}) / (2*g^3).

    Multiplies the diffusion coefficient inside the thermal width; grows
    like 8*t^3/3 for gamma*t -> 0 and like 2*t/gamma^2 at late times.
    Only t >= 0 is meaningful (the factor turns negative for t < 0,
    which would produce an imaginary width).

    The direct branch is evaluated through expm1 in the algebraic
    rearrangement ``2*(u + expm1(-u)) - expm1(-u)^2`` with u = 2*gamma*t;
    two cancellation stages still cost ~eps/u^2, so for |u| < 0.04 a
    seven-term series takes over, keeping both branches near 1e-13
    relative error.

    Parameters
    ----------
    gamma : float
        Friction coefficient, >= 0.
    t : float
        Time, >= 0.

    Returns
    -------
    float
        Nonnegative factor with dimension time^3.
    """
    if not (gamma >= 0.0 and math.isfinite(gamma)):
        raise ValueError(f"gamma must be finite and >= 0, got {gamma!r}")
    if not (t >= 0.0 and math.isfinite(t)):
        raise ValueError(f"t must be finite and >= 0, got {t!r}")
    u = 2.0 * gamma * t
    if abs(u) < _TWF_THRESHOLD:
        # 4*t^3 * (2/3 - u/2 + 7u^2/30 - u^3/12 + 31u^4/1260 - u^5/160
        #          + 127u^6/90720)
        series = 2.0 / 3.0 + u * (
            -0.5
            + u
            * (
                7.0 / 30.0
                + u
                * (-1.0 / 12.0 + u * (31.0 / 1260.0 + u * (-1.0 / 160.0 + u * (127.0 / 90720.0))))
            )
        )
        return 4.0 * t * t * t * series
    em = math.expm1(-u)
    return (2.0 * (u + em) - em * em) / (2.0 * gamma**3)
