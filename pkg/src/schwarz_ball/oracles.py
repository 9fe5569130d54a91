"""Independent numerical oracles used to cross-check the exact routines.

None of these share code paths with the quantities they check: the
Jacobian oracle only evaluates maps, and the norm oracle only multiplies
a matrix by sampled unit vectors.
"""

from __future__ import annotations

import numpy as np
from scipy import integrate

from .linalg import as_cmatrix, norm, sample_sphere

FD_STEP = 1e-6


def fd_jacobian(func, z, step=FD_STEP):
    """Central differences along each complex coordinate (real step).

    For a holomorphic map the derivative is complex-linear, so the real
    partials ``d/dx_k`` already fill column ``k`` of the Jacobian.
    """
    z = np.asarray(z, dtype=np.complex128)
    cols = []
    for k in range(z.shape[0]):
        e = np.zeros_like(z)
        e[k] = step
        cols.append((np.asarray(func(z + e)) - np.asarray(func(z - e))) / (2 * step))
    return np.stack(cols, axis=-1)


def fd_real_gradient(func, z, step=FD_STEP):
    """Real gradient ``(f_x1, f_y1, ..., f_xn, f_yn)`` of a real function on C^n."""
    z = np.asarray(z, dtype=np.complex128)
    out = []
    for k in range(z.shape[0]):
        for direction in (1.0, 1j):
            e = np.zeros_like(z)
            e[k] = step * direction
            out.append((float(func(z + e)) - float(func(z - e))) / (2 * step))
    return np.array(out)


def jacobian_rel_error(J, Jref, floor=1e-9):
    """``|J - Jref| / max(|Jref|, floor)`` in the Frobenius norm."""
    J = np.asarray(J)
    Jref = np.asarray(Jref)
    return float(np.linalg.norm(J - Jref) / max(np.linalg.norm(Jref), floor))


def sphere_opnorm(A, samples, rng):
    """Max of ``|Az|`` over ``samples`` uniform unit vectors: a lower bound on ``||A||``."""
    A = as_cmatrix(A)
    Z = sample_sphere(A.shape[1], rng, size=samples)
    return float(np.max(norm(Z @ A.T)))


def radial_length(r):
    """``int_0^r 2 / (1 - t^2) dt`` by adaptive quadrature."""
    val, _ = integrate.quad(lambda t: 2.0 / (1.0 - t * t), 0.0, r, epsabs=0.0, epsrel=1e-13, limit=200)
    return val
