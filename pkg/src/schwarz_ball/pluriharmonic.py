"""Pluriharmonic functions B_n -> (-1, 1) and their gradient bound.

A holomorphic ``b: B_n -> B_1`` is pushed through the conformal map
``g(w) = (2i/pi) log((1+w)/(1-w))`` of the disk onto the strip
``|Re| < 1``; ``f = Re(g o b)`` is pluriharmonic with values in (-1, 1),
and every such ``f`` arises this way.
"""

from __future__ import annotations

import numpy as np

from .bounds import Inequality, _cert, _interior
from .errors import InputError, SingularityError
from .holomap import Affine, BallMapCertificate, MapExpr, sup_norm_estimate
from .linalg import norm, one_minus_norm_sq

STRIP_GUARD = 1e-12
GRAD_CONST = 4.0 / np.pi


def strip_map(w):
    """Disk onto the strip ``-1 < Re < 1`` (principal logarithm)."""
    w = np.asarray(w, dtype=np.complex128)
    if np.any(np.abs(w) >= 1.0 - STRIP_GUARD):
        raise SingularityError("strip map needs |w| < 1 - 1e-12")
    out = (2j / np.pi) * np.log((1.0 + w) / (1.0 - w))
    return complex(out) if out.ndim == 0 else out


def strip_map_inverse(v):
    """Inverse of :func:`strip_map`: ``-i tan(pi v / 4)``."""
    v = np.asarray(v, dtype=np.complex128)
    if np.any(np.abs(v.real) >= 1.0):
        raise InputError("strip inverse needs -1 < Re(v) < 1")
    out = -1j * np.tan(np.pi * v / 4.0)
    return complex(out) if out.ndim == 0 else out


def strip_real_part(w):
    """``Re strip_map(w) = -(2/pi) arg((1+w)/(1-w))``, computed without the log."""
    w = np.asarray(w, dtype=np.complex128)
    if np.any(np.abs(w) >= 1.0 - STRIP_GUARD):
        raise SingularityError("strip map needs |w| < 1 - 1e-12")
    # (1+w)(1-conj w) = 1 - |w|^2 + 2i Im w
    return -(2.0 / np.pi) * np.arctan2(2.0 * w.imag, one_minus_norm_sq(w[..., None]))


class PluriharmonicFn:
    """``f = Re(strip_map o b)`` for a holomorphic ``b: B_n -> B_1``."""

    def __init__(self, b):
        if isinstance(b, BallMapCertificate):
            b = b.expr
        if not isinstance(b, MapExpr) or b.m != 1:
            raise InputError("pluriharmonic functions are built from maps into C^1")
        self.b = b
        self.n = b.n

    @classmethod
    def certified(cls, b, samples, rng):
        """Build after checking that ``b`` maps the closed ball into the closed disk."""
        expr = b.expr if isinstance(b, BallMapCertificate) else b
        sup = sup_norm_estimate(expr, samples, rng)
        if sup > 1.0 + 1e-12 or abs(expr.eval(np.zeros(expr.n))[0]) >= 1.0:
            raise InputError(f"b does not map the ball into the disk (sampled sup {sup!r})")
        return cls(expr)

    def __call__(self, z):
        return eval_f(self, z)

    def to_dict(self):
        return {"kind": "pluriharmonic", "b": self.b.to_dict()}

    def fingerprint(self):
        return self.b.fingerprint()


def eval_f(F, z):
    w = F.b.eval(z)[..., 0]
    out = strip_real_part(w)
    return float(out) if out.ndim == 0 else out


def grad_norm(F, z):
    """``|grad f(z)| = (4/pi) |grad b(z)| / |1 - b(z)^2|`` (real gradient in R^(2n))."""
    B, J = F.b.value_and_jacobian(z)
    w = B[..., 0]
    out = GRAD_CONST * norm(J[..., 0, :]) / np.abs(1.0 - w * w)
    return float(out) if np.ndim(out) == 0 else out


def pluriharmonic_terms(F, Z):
    """``(|grad f|, (4/pi)(1 - f^2)/(1 - |z|^2))`` on a batch."""
    Z, gap = _interior(Z, F.n)
    B, J = F.b.value_and_jacobian(Z)
    w = B[..., 0]
    fz = strip_real_part(w)
    lhs = GRAD_CONST * norm(J[..., 0, :]) / np.abs(1.0 - w * w)
    rhs = GRAD_CONST * (1.0 - fz) * (1.0 + fz) / gap
    return lhs, rhs


def pluriharmonic_check(F, z):
    lhs, rhs = pluriharmonic_terms(F, z)
    return _cert(Inequality.PLURIHARMONIC, F, [z], lhs, rhs)


def bound_ratio(F, Z):
    """``|grad f| (1-|z|^2) / (1 - f^2)``; never exceeds ``4/pi``."""
    lhs, rhs = pluriharmonic_terms(F, Z)
    return GRAD_CONST * lhs / rhs


def arctan_example(n=1):
    """The extremal ``f(z) = (2/pi) arctan(2 y_1 / (1 - x_1^2 - y_1^2))``.

    Built from ``b(z) = -z_1``; with ``b = z_1`` the sign of the formula flips.
    """
    A = np.zeros((1, n), dtype=np.complex128)
    A[0, 0] = -1.0
    return PluriharmonicFn(Affine(A))


def example_closed_form(z):
    z1 = np.asarray(z, dtype=np.complex128)[..., 0]
    return (2.0 / np.pi) * np.arctan2(2.0 * z1.imag, one_minus_norm_sq(z1[..., None]))


def proof_scalar_check(t):
    """``|cos t| / (1 - 4 t^2 / pi^2)`` on ``|t| < pi/2``; at most 1."""
    t = np.asarray(t, dtype=np.float64)
    if np.any(np.abs(t) >= np.pi / 2):
        raise InputError("need |t| < pi/2")
    x = 2.0 * t / np.pi
    out = np.abs(np.cos(t)) / ((1.0 - x) * (1.0 + x))
    return float(out) if out.ndim == 0 else out


def omega_identities(r, t):
    """Residuals of the two identities for ``b = (omega-1)/(omega+1)``, ``omega = r e^{it}``.

    Returns ``(1-|b|^2 - 4 r cos t / D, |1-b^2| - 4 r / D)`` with
    ``D = r^2 + 2 r cos t + 1``.
    """
    r = np.asarray(r, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    omega = r * np.exp(1j * t)
    b = (omega - 1.0) / (omega + 1.0)
    D = r * r + 2.0 * r * np.cos(t) + 1.0
    return 1.0 - np.abs(b) ** 2 - 4.0 * r * np.cos(t) / D, np.abs(1.0 - b * b) - 4.0 * r / D
