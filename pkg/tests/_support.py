"""Shared generators for the test suite."""

import numpy as np

from schwarz_ball.holomap import Affine, Compose, Mobius, Polynomial
from schwarz_ball.linalg import complex_gaussian_matrix, opnorm, sample_ball


def _leaf(m, n, rng):
    kind = rng.integers(3) if m == n else rng.integers(2)
    if kind == 0:
        A = complex_gaussian_matrix(m, n, rng)
        A *= 0.8 / opnorm(A)
        c = 0.1 * (rng.standard_normal(m) + 1j * rng.standard_normal(m))
        return Affine(A, c)
    if kind == 1:
        # a generic linear part keeps f' away from zero, where a relative
        # finite-difference comparison is dominated by rounding
        terms = {tuple(int(j == k) for j in range(n)): 0.4 * (rng.standard_normal(m) + 1j * rng.standard_normal(m))
                 for k in range(n)}
        for _ in range(3):
            alpha = tuple(int(k) for k in rng.integers(0, 3, size=n))
            terms[alpha] = 0.2 * (rng.standard_normal(m) + 1j * rng.standard_normal(m))
        return Polynomial(terms, n)
    return Mobius(0.5 * sample_ball(n, rng))


def random_tree(n, m, depth, rng):
    """Random expression tree ``C^n -> C^m`` with at most ``depth`` levels."""
    if depth <= 1:
        return _leaf(m, n, rng)
    k = int(rng.integers(1, 5))
    return Compose(_leaf(m, k, rng), random_tree(n, k, depth - 1, rng))
