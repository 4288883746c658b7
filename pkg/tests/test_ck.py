import cmath
import math

import numpy as np
import pytest
from scipy.integrate import quad

from backflow import (
    Environment,
    GaussianSuperposition,
    PhysicalConstants,
    ProbabilityRangeError,
    ck_state,
    cross_term_coeffs,
    current_origin_ck,
    prob_left_ck,
    prob_negative_momentum,
    psi_ck,
)
from conftest import ALPHA, P0A, P0B, SIGMA_P, THETA


# ---------------------------------------------------------------------------
# independent oracles

def density_four_term(constants, env, state, x, t):
    """|psi|^2 written directly as the four-Gaussian interference form."""
    st = ck_state(constants, env, state, t)
    sp = state.sigma_p
    dp = state.p0a - state.p0b
    d1 = complex(-dp * dp / (8.0 * sp * sp), -state.theta)
    d2 = complex(
        0.5 * (st.center_a + st.center_b), constants.hbar_eff * dp / (4.0 * sp * sp)
    )
    w = st.sigma_t
    n2 = state.norm_constant**2
    core = (
        np.exp(-((x - st.center_a) ** 2) / (2 * w * w))
        + state.alpha * np.exp(d1 - (x - d2) ** 2 / (2 * w * w))
        + state.alpha * np.exp(d1.conjugate() - (x - d2.conjugate()) ** 2 / (2 * w * w))
        + state.alpha**2 * np.exp(-((x - st.center_b) ** 2) / (2 * w * w))
    )
    return (n2 / (math.sqrt(2 * math.pi) * w) * core).real


def damped_newton_rk4(gamma, g, p0, t_end, steps=200_000):
    """Runge-Kutta trajectory of x'' = -2 gamma x' + g from (0, p0)."""
    h = t_end / steps
    x, v = 0.0, p0

    def acc(v):
        return -2.0 * gamma * v + g

    for _ in range(steps):
        k1x, k1v = v, acc(v)
        k2x, k2v = v + 0.5 * h * k1v, acc(v + 0.5 * h * k1v)
        k3x, k3v = v + 0.5 * h * k2v, acc(v + 0.5 * h * k2v)
        k4x, k4v = v + h * k3v, acc(v + h * k3v)
        x += h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
        v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
    return x


# ---------------------------------------------------------------------------
# state

def test_initial_width(constants, free_env, superposition):
    st = ck_state(constants, free_env, superposition, 0.0)
    assert st.s_t == pytest.approx(10.0 + 0.0j, abs=0)
    assert st.sigma_t == 10.0
    assert st.center_a == 0.0 and st.center_b == 0.0


def test_width_floor(constants, superposition):
    floor = constants.hbar_eff / (2 * superposition.sigma_p)
    for gamma in (0.0, 0.2):
        env = Environment(gamma=gamma)
        for t in (0.0, 0.5, 3.0, 20.0):
            st = ck_state(constants, env, superposition, t)
            assert st.sigma_t >= floor
    assert ck_state(constants, Environment(), superposition, 0.0).sigma_t == floor


def test_frictionless_center_is_ballistic(constants, free_env, superposition):
    for t in (-3.0, 0.7, 12.0):
        st = ck_state(constants, free_env, superposition, t)
        assert st.center_a == pytest.approx(P0A * t, rel=1e-15)
        assert st.center_b == pytest.approx(P0B * t, rel=1e-15)


def test_frictionless_spreading_law(constants, free_env, superposition):
    hbar, sp, m = 1.0, SIGMA_P, 1.0
    for t in (0.0, 1.0, 7.5, 42.0):
        st = ck_state(constants, free_env, superposition, t)
        expected_sq = (hbar / (2 * sp)) ** 2 * (1 + (2 * sp * sp * t / (m * hbar)) ** 2)
        assert st.sigma_t**2 == pytest.approx(expected_sq, rel=1e-12)


def test_forced_center_matches_newton_oracle(constants, superposition):
    env = Environment(gamma=0.1, g=0.2)
    st = ck_state(constants, env, superposition, 5.0)
    ref = damped_newton_rk4(0.1, 0.2, P0A, 5.0)
    assert st.center_a == pytest.approx(ref, abs=1e-9)


def test_forced_center_frictionless_limit(constants, superposition):
    env = Environment(gamma=0.0, g=0.3)
    st = ck_state(constants, env, superposition, 2.0)
    assert st.center_a == pytest.approx(P0A * 2.0 + 0.3 * 2.0**2 / 2, rel=1e-14)


def test_forced_rejects_negative_time(constants, superposition):
    env = Environment(gamma=0.1, g=0.2)
    with pytest.raises(ValueError):
        ck_state(constants, env, superposition, -0.5)
    with pytest.raises(ValueError):
        psi_ck(constants, env, superposition, 0.0, 1.0)  # forced wave function


# ---------------------------------------------------------------------------
# momentum-space probability

def test_prob_negative_momentum_reference_value(superposition):
    assert prob_negative_momentum(superposition) == pytest.approx(7.72e-10, rel=0.02)


def test_prob_negative_momentum_zero_center():
    state = GaussianSuperposition.single(SIGMA_P, 0.0)
    assert prob_negative_momentum(state) == pytest.approx(0.5, rel=1e-14)


def test_degenerate_superposition_rejected():
    with pytest.raises(ValueError, match="degenerate"):
        GaussianSuperposition.from_momenta(SIGMA_P, 0.7, 0.7, 1.0, math.pi)


def test_single_gaussian_normalization_constant(single_gaussian):
    assert single_gaussian.norm_constant == 1.0


# ---------------------------------------------------------------------------
# probability of remaining left

def test_prob_left_initial_half(constants, free_env):
    state = GaussianSuperposition.single(SIGMA_P, 2.3)
    assert prob_left_ck(constants, free_env, state, 0.0) == pytest.approx(0.5, abs=1e-14)


def test_prob_left_single_gaussian_decreases(constants, single_gaussian):
    env = Environment(gamma=0.1)
    ts = np.arange(0.0, 50.0, 0.25)
    ps = [prob_left_ck(constants, env, single_gaussian, t) for t in ts]
    assert all(b <= a + 1e-15 for a, b in zip(ps, ps[1:]))
    assert ps[0] == pytest.approx(0.5, abs=1e-14)


def test_prob_left_matches_density_quadrature(constants, free_env, superposition):
    # the complex-erfc closed form against direct quadrature of the density
    for t in (0.0, 1.3, 5.0, 11.0):
        ref, err = quad(
            lambda x: density_four_term(constants, free_env, superposition, x, t),
            -150.0,
            0.0,
            epsabs=1e-12,
            epsrel=1e-12,
            limit=300,
        )
        got = prob_left_ck(constants, free_env, superposition, t)
        assert got == pytest.approx(ref, abs=max(5e-11, 10 * err))


def test_prob_left_forced_uses_shifted_centers(constants, superposition):
    # with a force the whole curve is the free one with displaced centers,
    # so at fixed t the probability must drop as g grows (g pushes right)
    env0 = Environment(gamma=0.1, g=0.0)
    vals = []
    for g in (0.0, 0.1, 0.2, 0.3):
        env = Environment(gamma=0.1, g=g)
        vals.append(prob_left_ck(constants, env, superposition, 6.0))
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[0] == prob_left_ck(constants, env0, superposition, 6.0)


# ---------------------------------------------------------------------------
# wave function

def test_psi_peak_density(constants, free_env):
    state = GaussianSuperposition.single(SIGMA_P, 1.1)
    peak = abs(psi_ck(constants, free_env, state, 0.0, 0.0)) ** 2
    assert peak == pytest.approx(math.sqrt(2 / math.pi) * SIGMA_P, rel=1e-13)


def test_psi_normalized(constants, free_env, superposition):
    for t in (0.0, 5.0, 20.0):
        norm, err = quad(
            lambda x: abs(psi_ck(constants, free_env, superposition, x, t)) ** 2,
            -150.0,
            150.0,
            epsabs=1e-11,
            epsrel=1e-11,
            limit=400,
        )
        assert norm == pytest.approx(1.0, abs=1e-8)


def test_psi_squared_matches_four_term_form(constants, free_env, superposition):
    rng = np.random.default_rng(11)
    for _ in range(50):
        x = rng.uniform(-30.0, 60.0)
        t = rng.uniform(0.0, 30.0)
        ours = abs(psi_ck(constants, free_env, superposition, x, t)) ** 2
        ref = density_four_term(constants, free_env, superposition, x, t)
        assert ours == pytest.approx(ref, rel=1e-10, abs=1e-280)


# ---------------------------------------------------------------------------
# current at the origin

def test_current_initial_single_gaussian(constants, free_env):
    state = GaussianSuperposition.single(SIGMA_P, 1.1)
    j0 = current_origin_ck(constants, free_env, state, 0.0)
    dens0 = abs(psi_ck(constants, free_env, state, 0.0, 0.0)) ** 2
    assert j0 > 0.0
    assert j0 == pytest.approx(1.1 * dens0, rel=1e-13)


def test_current_has_negative_excursions(constants, free_env, superposition):
    ts = np.arange(0.0, 20.0, 0.01)
    js = np.array([current_origin_ck(constants, free_env, superposition, t) for t in ts])
    assert js.min() < -1e-4 and js.max() > 0.0


def test_current_zero_crossings_match_probability_extrema(
    constants, free_env, superposition
):
    ts = np.arange(0.0, 20.0, 0.01)
    js = np.array([current_origin_ck(constants, free_env, superposition, t) for t in ts])
    ps = np.array([prob_left_ck(constants, free_env, superposition, t) for t in ts])
    sign_flips = set(np.nonzero(np.diff(np.sign(js)))[0])
    dps = np.diff(ps)
    extrema = set(np.nonzero(np.diff(np.sign(dps)))[0])
    # every interior probability extremum sits within one grid cell of a
    # current zero crossing
    for idx in extrema:
        assert any(abs(idx - flip) <= 1 for flip in sign_flips)


@pytest.mark.parametrize("gamma", [0.0, 0.1, 0.2, 0.4])
@pytest.mark.parametrize("g", [0.0, 0.1])
def test_continuity_equation(constants, superposition, gamma, g):
    env = Environment(gamma=gamma, g=g)
    h = 1e-4
    worst = 0.0
    for t in np.arange(0.05, 50.0, 0.37):
        dp = (
            prob_left_ck(constants, env, superposition, t + h)
            - prob_left_ck(constants, env, superposition, t - h)
        ) / (2 * h)
        j = current_origin_ck(constants, env, superposition, t)
        worst = max(worst, abs(j + dp))
    assert worst <= 1e-6


def test_scaled_hbar_is_exactly_a_rescaled_run(superposition):
    scaled = PhysicalConstants(m=1.0, hbar=1.0, epsilon=0.25)
    direct = PhysicalConstants(m=1.0, hbar=0.5, epsilon=1.0)
    env = Environment(gamma=0.1)
    for t in (0.0, 0.5, 3.0, 17.0):
        a = prob_left_ck(scaled, env, superposition, t)
        b = prob_left_ck(direct, env, superposition, t)
        assert a == b  # bit-for-bit
        ja = current_origin_ck(scaled, env, superposition, t)
        jb = current_origin_ck(direct, env, superposition, t)
        assert ja == jb


def test_probability_range_guard(constants, free_env, superposition):
    # well-formed inputs stay in range; the guard is the contract
    p = prob_left_ck(constants, free_env, superposition, 3.0)
    assert -1e-9 <= p <= 1 + 1e-9


def test_cross_term_coeffs_structure(constants, free_env, superposition):
    c = cross_term_coeffs(constants, free_env, superposition, 2.0)
    dp = P0A - P0B
    assert c.d1.real == pytest.approx(-dp * dp / (8 * SIGMA_P**2), rel=1e-15)
    assert c.d1.imag == pytest.approx(-THETA, rel=1e-15)
    assert c.d2.imag == pytest.approx(dp / (4 * SIGMA_P**2), rel=1e-15)
    assert c.d1.real <= 0.0
