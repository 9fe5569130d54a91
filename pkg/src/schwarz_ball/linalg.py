"""Complex vectors and matrices on the unit ball.

Vectors and matrices are plain ``numpy`` arrays of dtype ``complex128``.
Every routine here accepts a single object or a stack of them along the
leading axes, so sweeps can evaluate many points in one call.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError, NumericalError

# Fixed stream for the opnorm restarts keeps opnorm a pure function.
_RESTART_SEED = 20_240_601


def as_cvector(z, n=None, name="z"):
    """Coerce ``z`` to a complex array whose last axis has length ``n``."""
    arr = np.asarray(z, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if n is not None and arr.shape[-1] != n:
        raise InputError(f"{name} has dimension {arr.shape[-1]}, expected {n}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} has non-finite entries")
    return arr


def as_cmatrix(A, name="A"):
    arr = np.asarray(A, dtype=np.complex128)
    if arr.ndim < 2:
        raise InputError(f"{name} must be at least 2-dimensional, got shape {arr.shape}")
    if arr.shape[-1] == 0 or arr.shape[-2] == 0:
        raise InputError(f"{name} has an empty axis: shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} has non-finite entries")
    return arr


def inner(z, a):
    """Hermitian pairing ``<z, a> = sum_k z_k * conj(a_k)``.

    Linear in ``z``, conjugate-linear in ``a``. Broadcasts over leading axes.
    """
    z = np.asarray(z, dtype=np.complex128)
    a = np.asarray(a, dtype=np.complex128)
    if z.shape[-1:] != a.shape[-1:]:
        raise InputError(f"dimension mismatch: {z.shape[-1:]} vs {a.shape[-1:]}")
    return np.sum(z * np.conj(a), axis=-1)


def norm(z):
    """Euclidean norm along the last axis."""
    z = np.asarray(z, dtype=np.complex128)
    return np.sqrt(np.sum(z.real**2 + z.imag**2, axis=-1))


def norm_sq(z):
    z = np.asarray(z, dtype=np.complex128)
    return np.sum(z.real**2 + z.imag**2, axis=-1)


_SPLITTER = 134217729.0  # 2**27 + 1


def _split(x):
    c = _SPLITTER * x
    hi = c - (c - x)
    return hi, x - hi


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def one_minus_norm_sq(z):
    """``1 - |z|^2`` along the last axis, compensated.

    Squares and the running difference use error-free transformations, so
    the result is accurate relative to itself even when ``|z|`` is close
    to 1, where the naive subtraction loses most of its digits.
    """
    z = np.asarray(z, dtype=np.complex128)
    total = np.ones(z.shape[:-1])
    comp = np.zeros(z.shape[:-1])
    for part in (z.real, z.imag):
        for k in range(z.shape[-1]):
            x = part[..., k]
            p = x * x
            hi, lo = _split(x)
            err = ((hi * hi - p) + 2.0 * hi * lo) + lo * lo
            total, e = _two_sum(total, -p)
            comp = comp + e - err
    return total + comp


def _power_sigma(G, x, rtol, maxiter):
    """Dominant singular value for each Gram matrix ``G[i]`` from start ``x[i]``.

    Each step applies the current power ``B = G^(2^k)`` and then squares
    it, so after ``k`` steps the iterate is ``G^(2^k - 1) x``; clustered top
    singular values cannot stall it. Stops once the eigen-residual
    ``|Gx - rho x|`` is below ``rtol * |G|``.
    """
    gscale = np.max(np.abs(G), axis=(-2, -1))
    gscale[gscale == 0] = 1.0
    B = G / gscale[:, None, None]
    x = x / norm(x)[:, None]
    for it in range(1, maxiter + 1):
        y = np.einsum("bij,bj->bi", B, x)
        ny = norm(y)
        dead = ny == 0
        x = np.where(dead[:, None], x, y / np.where(dead, 1.0, ny)[:, None])
        Gx = np.einsum("bij,bj->bi", G, x)
        rho = np.einsum("bi,bi->b", np.conj(x), Gx).real
        resid = norm(Gx - rho[:, None] * x)
        if np.all((resid <= rtol * gscale) | dead):
            return np.sqrt(np.maximum(rho, 0.0))
        B = B @ B
        bs = np.max(np.abs(B), axis=(-2, -1), keepdims=True)
        B = B / np.where(bs == 0, 1.0, bs)
    raise NumericalError(
        f"power iteration did not converge after {maxiter} iterations", iterations=maxiter
    )


def opnorm(A, *, rtol=1e-13, maxiter=10_000, restarts=3):
    """Operator norm ``sup_{|z|=1} |Az|`` (largest singular value).

    Power iteration on the Gram matrix, started from the normalized
    all-ones vector and from ``restarts`` further random vectors drawn
    from a fixed seed; the result is the largest value reached.

    Accepts a single ``(m, n)`` matrix, returning a float, or a stack
    ``(..., m, n)``, returning an array of the leading shape.
    """
    A = as_cmatrix(A)
    lead = A.shape[:-2]
    m, n = A.shape[-2:]
    flat = A.reshape((-1, m, n))
    if m == 1 or n == 1:
        # rank one: the norm is the Euclidean length of the single row/column
        out = np.sqrt(np.sum(flat.real**2 + flat.imag**2, axis=(-2, -1)))
    else:
        AH = np.conj(np.swapaxes(flat, -1, -2))
        G = AH @ flat if n <= m else flat @ AH
        k = G.shape[-1]
        b = G.shape[0]
        rng = np.random.default_rng(_RESTART_SEED)
        starts = [np.ones(k, dtype=np.complex128)]
        for _ in range(restarts):
            starts.append(rng.standard_normal(k) + 1j * rng.standard_normal(k))
        # every (start, matrix) pair is one row of a single batched iteration
        X = np.repeat(np.array(starts), b, axis=0)
        GG = np.tile(G, (len(starts), 1, 1))
        out = _power_sigma(GG, X, rtol, maxiter).reshape(len(starts), b).max(axis=0)
    if lead == ():
        return float(out[0])
    return out.reshape(lead)


def _gaussian(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def sample_sphere(n, rng, size=None):
    """Uniform point(s) on the unit sphere of C^n (= S^(2n-1) in R^(2n)).

    A standard Gaussian in R^(2n) is normalized. ``size`` adds a leading
    batch axis.
    """
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    shape = (n,) if size is None else (size, n)
    g = _gaussian(rng, shape)
    r = norm(g)
    # a zero draw has probability zero, but never divide by it
    r = np.where(r == 0, 1.0, r)
    return g / np.expand_dims(r, -1)


def sample_ball(n, rng, size=None):
    """Uniform point(s) in the open unit ball of C^n (Lebesgue measure on R^(2n)).

    Direction uniform on the sphere, radius ``U**(1/(2n))`` with ``U`` in [0, 1),
    so every output satisfies ``|z| < 1``.
    """
    direction = sample_sphere(n, rng, size)
    u = rng.random(() if size is None else (size,))
    radius = u ** (1.0 / (2 * n))
    return direction * np.expand_dims(radius, -1)


def complex_gaussian_matrix(m, n, rng):
    return _gaussian(rng, (m, n))
