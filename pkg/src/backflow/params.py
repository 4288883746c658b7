"""Immutable parameter records shared by the CK and CL dynamics."""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "PhysicalConstants",
    "Environment",
    "GaussianComponent",
    "GaussianSuperposition",
]


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class PhysicalConstants:
    """Particle mass, Planck constant and the classicality parameter.

    ``epsilon`` interpolates between the quantum regime (1) and the
    classical limit (0); every formula in the package uses the effective
    Planck constant ``hbar * sqrt(epsilon)``, so a run at (hbar=1,
    epsilon=0.25) is bit-for-bit identical to one at (hbar=0.5,
    epsilon=1).
    """

    m: float = 1.0
    hbar: float = 1.0
    epsilon: float = 1.0

    def __post_init__(self) -> None:
        _require_finite("m", self.m)
        _require_finite("hbar", self.hbar)
        _require_finite("epsilon", self.epsilon)
        if self.m <= 0.0:
            raise ValueError(f"m must be > 0, got {self.m!r}")
        if self.hbar <= 0.0:
            raise ValueError(f"hbar must be > 0, got {self.hbar!r}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon!r}")

    @property
    def hbar_eff(self) -> float:
        """Effective Planck constant hbar * sqrt(epsilon)."""
        return self.hbar * math.sqrt(self.epsilon)


@dataclass(frozen=True)
class Environment:
    """Friction, bath temperature and constant-force strength.

    ``g`` is the acceleration of the linear potential (force = m*g).
    The damping constant 2*m*gamma and the diffusion coefficient
    2*m*gamma*kT are derived, never stored.
    """

    gamma: float = 0.0
    kT: float = 0.0
    g: float = 0.0

    def __post_init__(self) -> None:
        _require_finite("gamma", self.gamma)
        _require_finite("kT", self.kT)
        _require_finite("g", self.g)
        if self.gamma < 0.0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma!r}")
        if self.kT < 0.0:
            raise ValueError(f"kT must be >= 0, got {self.kT!r}")

    def diffusion(self, mass: float) -> float:
        """Diffusion coefficient 2 * m * gamma * kT."""
        return 2.0 * mass * self.gamma * self.kT

    def damping(self, mass: float) -> float:
        """Damping constant 2 * m * gamma."""
        return 2.0 * mass * self.gamma


@dataclass(frozen=True)
class GaussianComponent:
    """One Gaussian in momentum space: width sigma_p, center p0."""

    sigma_p: float
    p0: float

    def __post_init__(self) -> None:
        _require_finite("sigma_p", self.sigma_p)
        _require_finite("p0", self.p0)
        if self.sigma_p <= 0.0:
            raise ValueError(f"sigma_p must be > 0, got {self.sigma_p!r}")


@dataclass(frozen=True)
class GaussianSuperposition:
    """Two-component Gaussian superposition with shared momentum width.

    The state is N * (comp_a + alpha * e^{i theta} * comp_b) in momentum
    space.  A zero-norm combination (overlap, alpha and theta conspiring
    to annihilate the state) is rejected at construction.
    """

    comp_a: GaussianComponent
    comp_b: GaussianComponent
    alpha: float = 0.0
    theta: float = 0.0

    def __post_init__(self) -> None:
        _require_finite("alpha", self.alpha)
        _require_finite("theta", self.theta)
        if self.alpha < 0.0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha!r}")
        if self.comp_a.sigma_p != self.comp_b.sigma_p:
            raise ValueError(
                "components must share one momentum width, got "
                f"{self.comp_a.sigma_p!r} and {self.comp_b.sigma_p!r}"
            )
        if self.norm_sq_inverse <= 0.0:
            raise ValueError(
                "degenerate superposition: the chosen alpha/theta/overlap "
                "give a zero-norm state"
            )

    @classmethod
    def from_momenta(
        cls,
        sigma_p: float,
        p0a: float,
        p0b: float,
        alpha: float = 0.0,
        theta: float = 0.0,
    ) -> "GaussianSuperposition":
        return cls(
            GaussianComponent(sigma_p, p0a),
            GaussianComponent(sigma_p, p0b),
            alpha,
            theta,
        )

    @classmethod
    def single(cls, sigma_p: float, p0: float) -> "GaussianSuperposition":
        """Single Gaussian (alpha = 0)."""
        return cls.from_momenta(sigma_p, p0, p0, 0.0, 0.0)

    @property
    def sigma_p(self) -> float:
        return self.comp_a.sigma_p

    @property
    def p0a(self) -> float:
        return self.comp_a.p0

    @property
    def p0b(self) -> float:
        return self.comp_b.p0

    @property
    def overlap(self) -> float:
        """Momentum-space overlap exp(-(p0a-p0b)^2 / (8 sigma_p^2))."""
        dp = self.p0a - self.p0b
        return math.exp(-dp * dp / (8.0 * self.sigma_p**2))

    @property
    def norm_sq_inverse(self) -> float:
        """1/N^2 = 1 + alpha^2 + 2 alpha overlap cos(theta)."""
        return (
            1.0
            + self.alpha**2
            + 2.0 * self.alpha * self.overlap * math.cos(self.theta)
        )

    @property
    def norm_constant(self) -> float:
        """Normalization N; equals 1 for a single Gaussian."""
        return 1.0 / math.sqrt(self.norm_sq_inverse)
