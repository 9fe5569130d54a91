"""Checkers for the Schwarz-Pick type inequalities and their corollaries.

Each checker evaluates both sides of one inequality at one point and
returns a :class:`BoundCertificate`. The ``*_terms`` helpers do the same
for a batch of points and are what the sweeps use.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import HypothesisViolation, InputError
from .holomap import BallMapCertificate, MapExpr
from .linalg import as_cvector, inner, norm, norm_sq, one_minus_norm_sq, opnorm, sample_ball
from .mobius import MobiusAuto, mobius_apply

DEFAULT_TOL = 1e-9
NUMERIC_TOL = 1e-6
ORIGIN_TOL = 1e-12


class Inequality(str, enum.Enum):
    SCHWARZ_PICK = "schwarz_pick"
    DERIV_AT_ZERO = "deriv_at_zero"
    SCALED = "scaled"
    ARCSIN = "arcsin"
    DISTANCE_CONTRACTION = "distance_contraction"
    PLURIHARMONIC = "pluriharmonic"


@dataclass(frozen=True)
class BoundCertificate:
    """One evaluated inequality ``lhs <= rhs``; ``slack = rhs - lhs``."""

    inequality: Inequality
    points: tuple
    lhs: float
    rhs: float
    fingerprint: str
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def slack(self):
        return self.rhs - self.lhs

    def passed(self, tol=DEFAULT_TOL):
        return self.slack >= -tol


def _expr(f):
    return f.expr if isinstance(f, BallMapCertificate) else f


def _fingerprint(f):
    return f.fingerprint() if isinstance(f, MapExpr) else f.b.fingerprint()


def _interior(z, n, name="z"):
    z = as_cvector(z, n, name=name)
    gap = one_minus_norm_sq(z)
    if np.any(gap <= 0.0):
        raise InputError(f"{name} must lie in the open unit ball, |{name}|^2 = {np.max(norm_sq(z))!r}")
    return z, gap


def _cert(ineq, f, points, lhs, rhs, **meta):
    pts = tuple(np.array(p, dtype=np.complex128) for p in points)
    return BoundCertificate(ineq, pts, float(lhs), float(rhs), _fingerprint(f), meta)


def schwarz_pick_terms(f, Z):
    """``(||f'(z)||, bound(z))`` for a batch ``Z`` of interior points.

    The bound is ``sqrt(1-|f|^2)/(1-|z|^2)`` for ``m >= 2`` and
    ``(1-|f|^2)/(1-|z|^2)`` for ``m = 1``.
    """
    f = _expr(f)
    Z, gap = _interior(Z, f.n)
    lhs = opnorm(f.jacobian(Z))
    room = np.maximum(f.value_gap(Z), 0.0)
    rhs = (room if f.m == 1 else np.sqrt(room)) / gap
    return lhs, rhs


def schwarz_pick_check(f, z):
    lhs, rhs = schwarz_pick_terms(f, z)
    return _cert(Inequality.SCHWARZ_PICK, _expr(f), [z], lhs, rhs, m=_expr(f).m)


def deriv_at_zero_check(f):
    e = _expr(f)
    z = np.zeros(e.n, dtype=np.complex128)
    lhs, rhs = schwarz_pick_terms(e, z)
    return _cert(Inequality.DERIV_AT_ZERO, e, [z], lhs, rhs, m=e.m)


def scaled_terms(f, Z, supnorm):
    """Both sides of the bound for bounded maps with ``sup |f| <= supnorm``."""
    f = _expr(f)
    if not supnorm > 0:
        raise InputError(f"supnorm must be positive, got {supnorm}")
    Z, gap = _interior(Z, f.n)
    F, J = f.value_and_jacobian(Z)
    fz2 = norm_sq(F)
    if np.any(fz2 > supnorm**2 * (1 + 1e-12)):
        raise InputError(f"supnorm {supnorm!r} is below |f(z)| = {np.sqrt(np.max(fz2))!r}")
    lhs = opnorm(J)
    room = np.maximum(supnorm**2 - fz2, 0.0)
    if f.m == 1:
        rhs = room / (supnorm * gap)
    else:
        rhs = np.sqrt(room) / gap
    return lhs, rhs


def scaled_check(f, z, supnorm, *, observed_sup=None):
    """Bound for a bounded map into C^m given an upper bound ``supnorm`` on ``sup |f|``.

    ``observed_sup`` (e.g. from :func:`~schwarz_ball.holomap.sup_norm_estimate`)
    is validated against ``supnorm``; an underestimate of the sup would
    make the ``m >= 2`` bound unsound.
    """
    if observed_sup is not None and observed_sup > supnorm:
        raise InputError(f"supnorm {supnorm!r} is below the observed sample sup {observed_sup!r}")
    lhs, rhs = scaled_terms(f, z, supnorm)
    return _cert(Inequality.SCALED, _expr(f), [z], lhs, rhs, supnorm=float(supnorm))


def _require_origin_fixed(f):
    f0 = norm(f.eval(np.zeros(f.n)))
    if f0 > ORIGIN_TOL:
        raise HypothesisViolation(f"arcsin bound needs f(0) = 0, got |f(0)| = {f0!r}")


def arcsin_terms(f, Z):
    """``(arcsin|f(z)|, artanh|z|)``; requires ``f(0) = 0``."""
    f = _expr(f)
    _require_origin_fixed(f)
    Z, gap = _interior(Z, f.n)
    lhs = np.arcsin(np.minimum(norm(f.eval(Z)), 1.0))
    rhs = np.arctanh(norm(Z))
    return lhs, rhs


def arcsin_check(f, z):
    lhs, rhs = arcsin_terms(f, z)
    return _cert(Inequality.ARCSIN, _expr(f), [z], lhs, rhs)


def disk_hyperbolic_distance(w1, w2):
    """Distance of ``2|dw|/(1-|w|^2)`` on the unit disk."""
    w1 = np.asarray(w1, dtype=np.complex128)
    w2 = np.asarray(w2, dtype=np.complex128)
    if np.any(np.abs(w1) >= 1) or np.any(np.abs(w2) >= 1):
        raise InputError("disk distance needs points strictly inside the unit disk")
    ratio = np.abs(w1 - w2) / np.abs(1.0 - w1 * np.conj(w2))
    out = 2.0 * np.arctanh(np.minimum(ratio, 1.0))
    return float(out) if out.ndim == 0 else out


def _segment_lengths(path):
    """Exact lengths of the chords of a polygon under ``2|dx|/(1-|x|^2)``.

    On the chord ``p + s d``, ``s in [0, 1]``, the density is ``2/q(s)``
    with ``q(s) = A - 2Bs - Cs^2``, ``A = 1-|p|^2``, ``B = Re<p,d>``,
    ``C = |d|^2``. Integrating by partial fractions gives

        length = (|d| / D) log1p(2DC / ((D+B)(D-B-C))),  D = sqrt(B^2 + AC)

    and both factors in the denominator are rewritten to avoid
    cancellation.
    """
    p = path[:-1]
    d = np.diff(path, axis=0)
    C = norm_sq(d)
    B = np.real(inner(p, d))
    A = one_minus_norm_sq(p)
    q1 = one_minus_norm_sq(path[1:])
    D = np.sqrt(B * B + A * C)
    with np.errstate(divide="ignore", invalid="ignore"):
        plus = np.where(B < 0, A * C / (D - B), D + B)
        minus = np.where(B + C > 0, C * q1 / (D + B + C), D - B - C)
        out = np.sqrt(C) / D * np.log1p(2.0 * D * C / (plus * minus))
    return np.where(C > 0, out, 0.0)


def _polygon_length(path):
    return float(np.sum(_segment_lengths(path)))


def _rdot(x, y):
    return np.real(np.sum(x * np.conj(y), axis=-1))


def _real_mobius(a, x):
    """Isometry of the density ``2|dx|/(1-|x|^2)`` on the ball of ``R^(2n)`` sending ``a`` to 0.

    Its inverse is ``_real_mobius(-a, .)``.
    """
    d = x - a
    aa = _rdot(a, a)
    num = (1.0 - aa) * d - _rdot(d, d)[..., None] * a
    den = 1.0 - 2.0 * _rdot(x, a) + _rdot(x, x) * aa
    return num / den[..., None]


def ball_dh_upper(z, w, resolution=10_000):
    """Upper bound on the ball distance of ``2|dz|/(1-|z|^2)`` between ``z`` and ``w``.

    The result is the length of the shortest of three polygons with
    ``resolution`` chords, each inscribed in a path from ``z`` to ``w``:

    * the straight segment;
    * ``t -> phi_z(t * phi_z(w))`` with the holomorphic automorphism;
    * the same construction with the real Moebius isometry of the ball of
      ``R^(2n)``, under which the density is the Poincare metric.

    Chord lengths are integrated exactly. The last path has constant
    speed in the density, so its polygon is nearly as short as the path;
    the other two are fallbacks. No closed form for the distance is
    used, so the value is an upper bound whichever path wins.
    """
    z = as_cvector(z, name="z")
    w = as_cvector(w, z.shape[0], name="w")
    _interior(z, z.shape[0], "z")
    _interior(w, z.shape[0], "w")
    if resolution < 1:
        raise InputError(f"resolution must be >= 1, got {resolution}")
    if np.array_equal(z, w):
        return 0.0
    phi = MobiusAuto(z)
    target = mobius_apply(phi, w)

    def straight(t):
        return z + t[:, None] * (w - z)

    def bent(t):
        path = mobius_apply(phi, t[:, None] * target)
        path[0], path[-1] = z, w
        return path

    y = _real_mobius(z, w)
    r = float(norm(y))
    t = np.linspace(0.0, 1.0, resolution + 1)
    scale = np.tanh(t * np.arctanh(r)) / r if r > 0 else t
    geodesic = _real_mobius(-z, scale[:, None] * y)
    geodesic[0], geodesic[-1] = z, w
    return min(_polygon_length(geodesic), _polygon_length(straight(t)), _polygon_length(bent(t)))


def distance_contraction_check(f, z, w, resolution=10_000):
    """``d_disk(f(z), f(w)) <= ball_dh_upper(z, w)`` for maps into the disk."""
    e = _expr(f)
    if e.m != 1:
        raise InputError(f"distance contraction needs m = 1, got m = {e.m}")
    z, _ = _interior(z, e.n)
    w, _ = _interior(w, e.n, "w")
    lhs = disk_hyperbolic_distance(e.eval(z)[0], e.eval(w)[0])
    rhs = ball_dh_upper(z, w, resolution)
    return _cert(Inequality.DISTANCE_CONTRACTION, e, [z, w], lhs, rhs, resolution=resolution)


def bloch_terms(f, Z):
    """``(1 - |z|^2) ||f'(z)||`` for a batch of interior points."""
    f = _expr(f)
    Z, gap = _interior(Z, f.n)
    return gap * opnorm(f.jacobian(Z))


def bloch_seminorm_estimate(f, samples, rng):
    """Lower bound on ``sup (1-|z|^2) ||f'(z)||`` from the origin plus uniform ball samples."""
    f = _expr(f)
    if samples < 1:
        raise InputError(f"samples must be >= 1, got {samples}")
    Z = np.vstack([np.zeros((1, f.n)), sample_ball(f.n, rng, size=samples)])
    return float(np.max(bloch_terms(f, Z)))
