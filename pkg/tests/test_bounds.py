import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schwarz_ball.bounds import (
    Inequality,
    arcsin_check,
    arcsin_terms,
    ball_dh_upper,
    bloch_seminorm_estimate,
    deriv_at_zero_check,
    disk_hyperbolic_distance,
    distance_contraction_check,
    scaled_check,
    scaled_terms,
    schwarz_pick_check,
    schwarz_pick_terms,
)
from schwarz_ball.errors import HypothesisViolation, InputError
from schwarz_ball.extremal import f_t
from schwarz_ball.holomap import Affine, Const, Mobius, gen_ball_map, scaled, sup_norm_estimate
from schwarz_ball.linalg import norm, sample_ball
from schwarz_ball.mobius import MobiusAuto
from schwarz_ball.oracles import radial_length

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(1, 4)
IDENTITY_1 = Affine([[1.0]])


@pytest.mark.parametrize("t", [0.2, np.pi / 4, 1.3])
def test_f_t_at_origin_is_equality(t):
    cert = schwarz_pick_check(f_t(t), [0, 0])
    assert cert.lhs == pytest.approx(np.sin(t), abs=1e-15)
    assert abs(cert.slack) <= 1e-15
    assert cert.inequality is Inequality.SCHWARZ_PICK
    assert abs(deriv_at_zero_check(f_t(t)).slack) <= 1e-15


def test_constant_map_passes():
    cert = schwarz_pick_check(Const([0.3, 0.1j], 2), [0.5, 0.2])
    assert cert.lhs == 0 and cert.rhs > 0 and cert.passed()


def test_disk_automorphism_is_equality():
    f = Mobius([0.5])
    phi = MobiusAuto([0.5])
    cert = schwarz_pick_check(f, [0.3])
    assert cert.lhs == pytest.approx(abs(phi.jacobian([0.3])[0, 0]), rel=1e-15)
    assert cert.rhs == pytest.approx((1 - abs(phi([0.3])[0]) ** 2) / (1 - 0.09), rel=1e-14)
    assert abs(cert.slack) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(seeds, st.complex_numbers(max_magnitude=0.99), st.complex_numbers(max_magnitude=0.99))
def test_disk_automorphisms_extremal(seed, c, z):
    lhs, rhs = schwarz_pick_terms(Mobius([c]), [z])
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, rhs)


def test_origin_fixed_derivative_bound():
    cert = deriv_at_zero_check(gen_ball_map(3, 2, np.random.default_rng(1), normalize=True))
    assert cert.rhs == pytest.approx(1.0, abs=1e-15) and cert.lhs <= 1.0


def test_rejects_boundary_points():
    with pytest.raises(InputError):
        schwarz_pick_check(f_t(0.3), [0.6, 0.8])
    with pytest.raises(InputError):
        schwarz_pick_check(f_t(0.3), [1.0, 0.0])


@settings(max_examples=60, deadline=None)
@given(seeds, dims, dims)
def test_schwarz_pick_property(seed, n, m):
    rng = np.random.default_rng(seed)
    cert = gen_ball_map(n, m, rng)
    lhs, rhs = schwarz_pick_terms(cert, sample_ball(n, rng, size=20))
    assert np.min(rhs - lhs) >= -1e-9


def test_deriv_at_zero_sweep():
    rng = np.random.default_rng(7)
    worst = min(deriv_at_zero_check(gen_ball_map(1 + k % 4, 1 + k // 4 % 4, rng)).slack for k in range(1000))
    assert worst >= -1e-9


def test_scaled_f_t_is_equality():
    t, R = 0.9, 3.0
    cert = scaled_check(scaled(f_t(t), R), [0, 0], R)
    assert cert.lhs == pytest.approx(3 * np.sin(t), rel=1e-15)
    assert cert.rhs == pytest.approx(np.sqrt(9 - 9 * np.cos(t) ** 2), rel=1e-14)
    assert abs(cert.slack) <= 1e-14


def test_scaled_constant():
    assert scaled_check(Const([1.5], 1), [0.2], 2.0).lhs == 0


def test_scaled_rejects_underestimated_sup():
    f = scaled(f_t(0.5), 2.0)
    with pytest.raises(InputError):
        scaled_check(f, [0.5, 0], 2.0, observed_sup=2.1)
    with pytest.raises(InputError):
        scaled_check(f, [0.5, 0], 1.0)
    with pytest.raises(InputError):
        scaled_check(f, [0.5, 0], 0.0)


@settings(max_examples=40, deadline=None)
@given(seeds, dims, dims, st.sampled_from([0.5, 2.0, 10.0]))
def test_scaled_property(seed, n, m, R):
    rng = np.random.default_rng(seed)
    f = scaled(gen_ball_map(n, m, rng).expr, R)
    lhs, rhs = scaled_terms(f, sample_ball(n, rng, size=25), R)
    assert np.min(rhs - lhs) >= -1e-9


def test_arcsin_examples():
    assert arcsin_check(IDENTITY_1, [0.0]).slack == 0
    cert = arcsin_check(IDENTITY_1, [0.5])
    assert cert.lhs == pytest.approx(0.5235987755982989, abs=1e-15)
    assert cert.rhs == pytest.approx(0.5493061443340549, abs=1e-15)


def test_arcsin_asymptotically_tight_near_origin():
    ratios = [arcsin_check(IDENTITY_1, [r]).lhs / arcsin_check(IDENTITY_1, [r]).rhs for r in (1e-1, 1e-3, 1e-5)]
    assert ratios[0] < ratios[1] < ratios[2] <= 1.0
    assert 1.0 - ratios[2] <= 1e-9


def test_arcsin_requires_origin_fixed():
    # a constant map breaks the printed inequality at z = 0: arcsin(0.5) > 0
    with pytest.raises(HypothesisViolation):
        arcsin_check(Const([0.5], 1), [0.0])


@settings(max_examples=40, deadline=None)
@given(seeds, dims, dims)
def test_arcsin_property(seed, n, m):
    rng = np.random.default_rng(seed)
    cert = gen_ball_map(n, m, rng, normalize=True)
    lhs, rhs = arcsin_terms(cert, sample_ball(n, rng, size=50))
    assert np.min(rhs - lhs) >= -1e-9


def test_disk_distance_examples():
    assert disk_hyperbolic_distance(0.3j, 0.3j) == 0
    for r in (0.1, 0.5, 0.9, 0.999):
        d = disk_hyperbolic_distance(0, r)
        assert d == pytest.approx(2 * np.arctanh(r), rel=1e-15)
        assert d == pytest.approx(radial_length(r), rel=1e-12)
    with pytest.raises(InputError):
        disk_hyperbolic_distance(0, 1.0)


@settings(max_examples=100, deadline=None)
@given(
    st.complex_numbers(max_magnitude=0.95),
    st.complex_numbers(max_magnitude=0.95),
    st.complex_numbers(max_magnitude=0.95),
)
def test_disk_distance_mobius_invariant(c, w1, w2):
    phi = MobiusAuto([c])
    d1 = disk_hyperbolic_distance(phi([w1])[0], phi([w2])[0])
    assert d1 == pytest.approx(disk_hyperbolic_distance(w1, w2), rel=1e-10, abs=1e-12)


def test_ball_upper_examples():
    z = np.array([0.3j, 0.1])
    assert ball_dh_upper(z, z) == 0.0
    for r in (0.2, 0.7, 0.95):
        assert abs(ball_dh_upper([0, 0], [r, 0]) - 2 * np.arctanh(r)) <= 1e-6


def test_ball_upper_is_upper_and_converges():
    rng = np.random.default_rng(4)
    for _ in range(20):
        z, w = sample_ball(2, rng), sample_ball(2, rng)
        coarse, fine = ball_dh_upper(z, w, 5_000), ball_dh_upper(z, w, 10_000)
        assert fine <= coarse + 1e-15
        assert coarse - fine <= 1e-6


def test_ball_upper_in_disk_matches_distance():
    rng = np.random.default_rng(5)
    for _ in range(20):
        z, w = sample_ball(1, rng), sample_ball(1, rng)
        exact = disk_hyperbolic_distance(z[0], w[0])
        assert exact <= ball_dh_upper(z, w) <= exact + 1e-6


def test_distance_contraction_examples():
    z, w = np.array([0.2, 0.1j]), np.array([-0.5, 0.3])
    assert distance_contraction_check(Const([0.4], 2), z, w).lhs == 0
    cert = distance_contraction_check(IDENTITY_1, [0.3], [-0.6j])
    assert abs(cert.slack) <= 1e-6 and cert.passed(1e-6)
    with pytest.raises(InputError):
        distance_contraction_check(f_t(0.2), z, w)


def test_distance_contraction_sweep():
    rng = np.random.default_rng(9)
    worst = np.inf
    for k in range(100):
        n = 1 + k % 3
        cert = gen_ball_map(n, 1, rng)
        worst = min(worst, distance_contraction_check(cert, sample_ball(n, rng), sample_ball(n, rng), 2_000).slack)
    assert worst >= -1e-6


def test_bloch_examples():
    f0 = Affine([[1.0, 0.0], [0.0, 0.0]])
    assert bloch_seminorm_estimate(f0, 100, np.random.default_rng(0)) == 1.0
    assert bloch_seminorm_estimate(Const([0.2, 0.3], 2), 100, np.random.default_rng(0)) == 0.0
    with pytest.raises(InputError):
        bloch_seminorm_estimate(f0, 0, np.random.default_rng(0))


def test_bloch_below_sup():
    rng = np.random.default_rng(3)
    for k in range(30):
        cert = gen_ball_map(1 + k % 3, 2 + k % 2, rng)
        assert bloch_seminorm_estimate(cert, 200, rng) <= sup_norm_estimate(cert, 1000, rng) + 1e-9


def test_certificate_fingerprint_tracks_map():
    a = schwarz_pick_check(f_t(0.3), [0.1, 0.2])
    b = schwarz_pick_check(f_t(0.3), [0.1, 0.2])
    c = schwarz_pick_check(f_t(0.4), [0.1, 0.2])
    assert a.fingerprint == b.fingerprint != c.fingerprint
    assert norm(a.points[0] - [0.1, 0.2]) == 0


def _poincare_distance(z, w):
    # real hyperbolic distance of the ball of R^(2n); a test oracle only
    num = 2 * norm(z - w) ** 2
    return float(np.arccosh(1 + num / ((1 - norm(z) ** 2) * (1 - norm(w) ** 2))))


@settings(max_examples=60, deadline=None)
@given(seeds, dims)
def test_ball_upper_brackets_poincare_distance(seed, n):
    rng = np.random.default_rng(seed)
    z, w = sample_ball(n, rng), sample_ball(n, rng)
    exact = _poincare_distance(z, w)
    assert exact - 1e-9 <= ball_dh_upper(z, w) <= exact + 1e-6


def test_holomorphic_pseudo_distance_differs_for_n2():
    # 2 artanh |phi_z(w)| is not the distance of this density once n >= 2,
    # which is why the checker only uses path lengths
    z, w = np.array([0.5, 0.0]), np.array([0.0, 0.5])
    pseudo = 2 * np.arctanh(norm(MobiusAuto(z)(w)))
    assert abs(pseudo - ball_dh_upper(z, w)) > 1e-3
