from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schwarz_ball.errors import InputError, SingularityError
from schwarz_ball.linalg import norm, opnorm, sample_ball, sample_sphere
from schwarz_ball.mobius import (
    MobiusAuto,
    m_norm_closed,
    m_operator,
    mobius_apply,
    mobius_gap,
    mobius_jacobian,
    n_norm_closed,
    n_operator,
    proj_orth,
    proj_par,
    projector_matrices,
)
from schwarz_ball.oracles import fd_jacobian, jacobian_rel_error

EPS = np.finfo(np.float64).eps
seeds = st.integers(0, 2**32 - 1)
dims = st.integers(1, 5)


def _center_and_point(seed, n):
    rng = np.random.default_rng(seed)
    return sample_ball(n, rng), sample_ball(n, rng)


def test_proj_par_at_zero_center():
    assert np.array_equal(proj_par([0, 0], [1 + 2j, 3]), [0, 0])


def test_proj_par_fixes_axis():
    a = np.array([0.3 + 0.1j, -0.2])
    assert np.allclose(proj_par(a, a), a, atol=1e-16)


def test_proj_par_hand_value():
    assert np.allclose(proj_par([1, 0], [3 + 1j, 5]), [3 + 1j, 0], atol=0)


def test_proj_orth_cases():
    z = np.array([3 + 1j, 5])
    assert np.array_equal(proj_orth([0, 0], z), z)
    a = np.array([0.3j, 0.4])
    assert norm(proj_orth(a, a)) <= 1e-16
    assert abs(proj_orth([0.5j], [0.7 - 0.2j])[0]) <= 1e-16


def test_projectors_in_dimension_one():
    P, Q = projector_matrices([0.6])
    assert P[0, 0] == pytest.approx(1.0) and Q[0, 0] == pytest.approx(0.0, abs=1e-15)


def test_fixed_points_examples():
    a = np.array([0.2 - 0.1j, 0.5j])
    phi = MobiusAuto(a)
    assert norm(phi(np.zeros(2)) - a) <= 1e-16
    assert norm(phi(a)) <= 1e-16


def test_center_zero_is_negation():
    z = np.array([0.3 + 0.4j, -0.2])
    assert np.array_equal(MobiusAuto([0, 0])(z), -z)


def test_hand_evaluated_point():
    w = MobiusAuto([0.5, 0])([0, 0.5])
    assert np.allclose(w, [0.5, -np.sqrt(3) / 4], atol=1e-16)
    assert w[1].real == pytest.approx(-0.4330127018922193, abs=1e-16)


def test_center_outside_ball_rejected():
    with pytest.raises(InputError):
        MobiusAuto([0.8, 0.6])
    with pytest.raises(InputError):
        MobiusAuto([1.2])


def test_singular_denominator():
    # <z, a> = 1 at z = a / |a|^2, outside the ball but still a valid input
    a = np.array([0.5, 0.0])
    with pytest.raises(SingularityError):
        mobius_apply(MobiusAuto(a), a / 0.25)


@settings(max_examples=100, deadline=None)
@given(seeds, dims)
def test_involution(seed, n):
    a, z = _center_and_point(seed, n)
    phi = MobiusAuto(a)
    # one rounding of phi(z) is amplified by up to ||N_a|| = 1/(1-|a|^2)
    budget = max(1e-12, 16 * EPS / phi.s2)
    assert norm(phi(phi(z)) - z) <= budget


@settings(max_examples=100, deadline=None)
@given(seeds, dims)
def test_sphere_maps_to_sphere(seed, n):
    rng = np.random.default_rng(seed)
    phi = MobiusAuto(sample_ball(n, rng))
    assert abs(norm(phi(sample_sphere(n, rng))) - 1.0) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(seeds, dims)
def test_ball_maps_into_ball(seed, n):
    a, z = _center_and_point(seed, n)
    assert norm(MobiusAuto(a)(z)) < 1.0


def test_batch_agrees_with_single():
    rng = np.random.default_rng(9)
    phi = MobiusAuto(sample_ball(3, rng))
    Z = sample_ball(3, rng, size=7)
    assert np.allclose(phi(Z), np.stack([phi(z) for z in Z]), atol=1e-16, rtol=0)
    assert np.allclose(phi.jacobian(Z), np.stack([phi.jacobian(z) for z in Z]), atol=1e-15, rtol=0)


def test_jacobian_at_origin_and_center_examples():
    a = np.array([0.6, 0.0])
    phi = MobiusAuto(a)
    assert np.allclose(mobius_jacobian(phi, [0, 0]), np.diag([-0.64, -0.8]), atol=1e-15)
    assert np.allclose(mobius_jacobian(phi, a), np.diag([-1 / 0.64, -1 / 0.8]), atol=1e-14)


@settings(max_examples=100, deadline=None)
@given(seeds, dims)
def test_jacobian_special_points(seed, n):
    a, _ = _center_and_point(seed, n)
    phi = MobiusAuto(a)
    M, N = m_operator(a), n_operator(a)
    assert np.linalg.norm(mobius_jacobian(phi, np.zeros(n)) - M) <= 1e-13 * np.linalg.norm(M)
    assert np.linalg.norm(mobius_jacobian(phi, a) - N) <= 1e-13 * np.linalg.norm(N)


@settings(max_examples=50, deadline=None)
@given(seeds, dims)
def test_jacobian_vs_finite_differences(seed, n):
    a, z = _center_and_point(seed, n)
    phi = MobiusAuto(a)
    assert jacobian_rel_error(mobius_jacobian(phi, z), fd_jacobian(phi, z)) <= 1e-6


def test_operator_examples():
    assert np.allclose(m_operator([0, 0]), -np.eye(2)) and np.allclose(n_operator([0, 0]), -np.eye(2))
    assert np.allclose(m_operator([0.6, 0]), np.diag([-0.64, -0.8]), atol=1e-15)
    assert np.allclose(n_operator([0.6, 0]), np.diag([-1 / 0.64, -1 / 0.8]), atol=1e-14)
    assert np.allclose(m_operator([0.6]), [[-0.64]], atol=1e-15)
    assert np.allclose(n_operator([0.6]), [[-1 / 0.64]], atol=1e-14)


def test_closed_norm_examples():
    assert m_norm_closed([0.6, 0]) == pytest.approx(0.8, abs=1e-15)
    assert n_norm_closed([0.6, 0]) == pytest.approx(1.5625, abs=1e-15)
    assert m_norm_closed([0.6]) == pytest.approx(0.64, abs=1e-15)
    assert m_norm_closed([0]) == 1.0 and n_norm_closed([0, 0]) == 1.0
    assert opnorm(m_operator([0.6, 0])) == pytest.approx(0.8, abs=1e-14)
    assert opnorm(n_operator([0.6, 0])) == pytest.approx(1.5625, abs=1e-14)


@settings(max_examples=100, deadline=None)
@given(seeds, dims)
def test_closed_norms_match_opnorm(seed, n):
    a, _ = _center_and_point(seed, n)
    assert abs(opnorm(m_operator(a)) - m_norm_closed(a)) <= 1e-10
    assert abs(opnorm(n_operator(a)) - n_norm_closed(a)) <= 1e-10


def test_chain_rule_through_involution():
    rng = np.random.default_rng(11)
    phi = MobiusAuto(sample_ball(3, rng))
    z = sample_ball(3, rng)
    J = mobius_jacobian(phi, phi(z)) @ mobius_jacobian(phi, z)
    assert np.allclose(J, np.eye(3), atol=1e-12)


def _exact_gap(a, z):
    """``1 - |phi_a(z)|^2`` in rational arithmetic: only ``s^2 = 1 - |a|^2`` enters."""
    A = [(Fraction(v.real), Fraction(v.imag)) for v in a]
    Z = [(Fraction(v.real), Fraction(v.imag)) for v in z]
    aa = sum(x * x + y * y for x, y in A)
    W = [(ax - zx, ay - zy) for (ax, ay), (zx, zy) in zip(A, Z)]
    # <w, a> and <z, a>
    wa = (sum(wx * ax + wy * ay for (wx, wy), (ax, ay) in zip(W, A)),
          sum(wy * ax - wx * ay for (wx, wy), (ax, ay) in zip(W, A)))
    za = (sum(zx * ax + zy * ay for (zx, zy), (ax, ay) in zip(Z, A)),
          sum(zy * ax - zx * ay for (zx, zy), (ax, ay) in zip(Z, A)))
    ww = sum(x * x + y * y for x, y in W)
    par = (wa[0] ** 2 + wa[1] ** 2) / aa
    num = par + (1 - aa) * (ww - par)
    den = (1 - za[0]) ** 2 + za[1] ** 2
    return 1 - num / den


@pytest.mark.parametrize("n", [1, 2, 3])
def test_gap_identity_vs_exact_arithmetic(n):
    rng = np.random.default_rng(77 + n)
    worst = 0.0
    for _ in range(200):
        # centers and points near the sphere, where the naive gap degrades
        a = sample_sphere(n, rng) * (1 - 10 ** rng.uniform(-7, -1))
        z = sample_sphere(n, rng) * (1 - 10 ** rng.uniform(-7, -1))
        exact = _exact_gap(a, z)
        got = mobius_gap(MobiusAuto(a), z)
        worst = max(worst, abs(Fraction(float(got)) - exact) / exact)
    assert worst <= 1e-13


def _exact_disk_phi(a, z):
    ar, ai, zr, zi = (Fraction(v) for v in (a.real, a.imag, z.real, z.imag))
    nr, ni = ar - zr, ai - zi
    dr, di = 1 - (zr * ar + zi * ai), -(zi * ar - zr * ai)
    den = dr * dr + di * di
    return (nr * dr + ni * di) / den, (ni * dr - nr * di) / den


def test_involution_limit_is_conditioning():
    # near the sphere even an exact second application of phi_a to the
    # rounded phi_a(z) misses z by about eps / (1 - |a|^2)
    a = np.array([0.99995 + 0.0001j])
    z = np.array([0.01 - 0.02j])
    phi = MobiusAuto(a)
    w = phi(z)
    br, bi = _exact_disk_phi(a[0], w[0])
    exact_miss = float(abs(complex(float(br - Fraction(z[0].real)), float(bi - Fraction(z[0].imag)))))
    assert exact_miss > 1e-12
    # and the float64 result is as good as that
    assert norm(phi(w) - z) <= exact_miss + 4 * EPS / phi.s2
