"""Involutive automorphisms of the unit ball of C^n.

For a center ``a`` with ``|a| < 1`` and ``s = sqrt(1 - |a|^2)`` the map is

    phi_a(z) = (a - P_a z - s Q_a z) / (1 - <z, a>)

where ``P_a`` projects onto the complex line through ``a`` and
``Q_a = I - P_a``. It swaps ``0`` and ``a``, is its own inverse and maps
the closed ball onto itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, SingularityError
from .linalg import as_cvector, inner, norm_sq, one_minus_norm_sq

SINGULAR_TOL = 1e-14


def _center(a):
    a = as_cvector(a, name="a")
    if a.ndim != 1:
        raise InputError(f"center must be a single vector, got shape {a.shape}")
    if norm_sq(a) >= 1.0:
        raise InputError(f"center must lie in the open unit ball, |a|^2 = {norm_sq(a)!r}")
    return a


def _unit(a):
    """``a / |a|``, or ``None`` for ``a = 0``; avoids underflow in ``|a|^2``."""
    r = float(np.linalg.norm(a))
    return None if r == 0 else a / r


def proj_par(a, z):
    """``P_a z = <z,a> a / <a,a>``; ``P_0 = 0``. Broadcasts over ``z``."""
    a = as_cvector(a, name="a")
    z = as_cvector(z, a.shape[-1])
    e = _unit(a)
    if e is None:
        return np.zeros_like(z)
    return np.expand_dims(inner(z, e), -1) * e


def proj_orth(a, z):
    """``Q_a z = z - P_a z``."""
    z = as_cvector(z)
    return z - proj_par(a, z)


def projector_matrices(a):
    """Matrices of ``P_a`` and ``Q_a``."""
    a = as_cvector(a, name="a")
    n = a.shape[-1]
    e = _unit(a)
    P = np.zeros((n, n), dtype=np.complex128) if e is None else np.outer(e, np.conj(e))
    return P, np.eye(n, dtype=np.complex128) - P


@dataclass(frozen=True, eq=False)
class MobiusAuto:
    """The automorphism ``phi_a`` with its cached ``s = sqrt(1 - |a|^2)``."""

    a: np.ndarray
    s: float = field(init=False)
    s2: float = field(init=False, repr=False)

    def __post_init__(self):
        a = _center(self.a).copy()
        a.flags.writeable = False
        object.__setattr__(self, "a", a)
        s2 = float(one_minus_norm_sq(a))
        object.__setattr__(self, "s2", s2)
        object.__setattr__(self, "s", float(np.sqrt(s2)))

    @property
    def n(self):
        return self.a.shape[0]

    def __call__(self, z):
        return mobius_apply(self, z)

    def jacobian(self, z):
        return mobius_jacobian(self, z)

    def __repr__(self):
        return f"MobiusAuto(a={self.a.tolist()!r})"


def _denominator(phi, z):
    # 1 - <z,a> = s^2 + <a - z, a>: exact at z = a, accurate near it
    d = phi.s2 + inner(phi.a - z, phi.a)
    bad = np.abs(d) < SINGULAR_TOL
    if np.any(bad):
        raise SingularityError(
            f"1 - <z,a> vanishes (|1 - <z,a>| < {SINGULAR_TOL:g}) for a = {phi.a.tolist()}"
        )
    return d


def mobius_apply(phi, z):
    """Evaluate ``phi_a`` at ``z`` (shape ``(n,)`` or ``(N, n)``).

    Since ``P a = a`` and ``Q a = 0`` the numerator is ``(P + sQ)(a - z)``,
    which vanishes exactly at ``z = a``.
    """
    z = as_cvector(z, phi.n)
    d = _denominator(phi, z)
    w = phi.a - z
    pw = proj_par(phi.a, w)
    num = pw + phi.s * (w - pw)
    return num / np.expand_dims(d, -1)


def mobius_gap(phi, z, gap=None):
    """``1 - |phi_a(z)|^2`` as ``(1-|a|^2)(1-|z|^2) / |1 - <z,a>|^2``.

    Computing it from the rounded value of ``phi_a(z)`` loses about
    ``eps / (1 - |phi_a(z)|^2)`` relative accuracy near the sphere; the
    identity does not. ``gap`` may supply an accurate ``1 - |z|^2``.
    """
    z = as_cvector(z, phi.n)
    d = _denominator(phi, z)
    if gap is None:
        gap = one_minus_norm_sq(z)
    return phi.s2 * gap / (d.real * d.real + d.imag * d.imag)


def mobius_jacobian(phi, z):
    """Complex Jacobian of ``phi_a`` at ``z``.

    Quotient rule on numerator ``(P + sQ)(a - z)`` and denominator
    ``D = 1 - <z,a>``, simplified with ``P a = a`` and ``Q a = 0``::

        phi'(z) = -(s^2 P + s D Q + s (Q z) a^*) / D^2

    No term cancels, so the result keeps full relative accuracy at
    ``z = 0`` and ``z = a`` even when ``|a|`` is close to 1.
    """
    z = as_cvector(z, phi.n)
    d = _denominator(phi, z)
    P, Q = projector_matrices(phi.a)
    qz = z @ Q.T
    dd = np.expand_dims(d, (-1, -2))
    rank_one = np.expand_dims(qz, -1) * np.conj(phi.a)
    return -(phi.s2 * P + phi.s * dd * Q + phi.s * rank_one) / (dd * dd)


def m_operator(a):
    """``M_a = -s^2 P_a - s Q_a``, the derivative of ``phi_a`` at the origin."""
    a = _center(a)
    s2 = float(one_minus_norm_sq(a))
    P, Q = projector_matrices(a)
    return -s2 * P - np.sqrt(s2) * Q


def n_operator(a):
    """``N_a = -P_a / s^2 - Q_a / s``, the derivative of ``phi_a`` at ``a``."""
    a = _center(a)
    s2 = float(one_minus_norm_sq(a))
    P, Q = projector_matrices(a)
    return -P / s2 - Q / np.sqrt(s2)


def m_norm_closed(a):
    """``||M_a||``: ``sqrt(1-|a|^2)`` when ``n >= 2``, ``1-|a|^2`` when ``n = 1``."""
    a = _center(a)
    s2 = float(one_minus_norm_sq(a))
    return float(s2 if a.shape[0] == 1 else np.sqrt(s2))


def n_norm_closed(a):
    """``||N_a|| = 1 / (1 - |a|^2)`` in every dimension."""
    a = _center(a)
    return float(1.0 / one_minus_norm_sq(a))
