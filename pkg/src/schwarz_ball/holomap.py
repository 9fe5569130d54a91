"""Holomorphic maps B_n -> C^m as immutable expression trees.

Every node evaluates exactly and returns its exact complex Jacobian;
``Compose`` applies the chain rule. Points may be a single vector
``(n,)`` or a batch ``(N, n)``; values come back as ``(m,)``/``(N, m)``
and Jacobians as ``(m, n)``/``(N, m, n)``.
"""

from __future__ import annotations

import enum
import hashlib
import itertools
import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import InputError
from .linalg import (
    as_cmatrix,
    as_cvector,
    complex_gaussian_matrix,
    norm,
    one_minus_norm_sq,
    opnorm,
    sample_ball,
    sample_sphere,
)
from .mobius import MobiusAuto, mobius_apply, mobius_gap, mobius_jacobian

FORMAT_VERSION = 1


def _frozen(arr):
    arr = np.array(arr, dtype=np.complex128)
    arr.flags.writeable = False
    return arr


def encode_complex(x):
    """Complex scalar/array to nested ``[re, im]`` lists."""
    arr = np.asarray(x, dtype=np.complex128)
    if arr.ndim == 0:
        return [float(arr.real), float(arr.imag)]
    return [encode_complex(v) for v in arr]


class MapExpr:
    """Base node. Subclasses set ``n`` (input dim) and ``m`` (output dim)."""

    n: int
    m: int

    def _vj(self, Z):
        """Values ``(N, m)`` and Jacobians ``(N, m, n)`` at a batch ``Z``."""
        raise NotImplementedError

    def _v(self, Z):
        return self._vj(Z)[0]

    def _gap(self, Z, gap):
        """``1 - |f(Z)|^2`` given the inputs ``Z`` and their gaps ``1 - |Z|^2``."""
        return one_minus_norm_sq(self._v(Z))

    def _batch(self, z):
        z = as_cvector(z, self.n)
        if z.ndim == 1:
            return z[None, :], True
        if z.ndim != 2:
            raise InputError(f"points must have shape (n,) or (N, n), got {z.shape}")
        return z, False

    def eval(self, z):
        Z, single = self._batch(z)
        out = self._v(Z)
        return out[0] if single else out

    __call__ = eval

    def jacobian(self, z):
        Z, single = self._batch(z)
        J = self._vj(Z)[1]
        return J[0] if single else J

    def value_and_jacobian(self, z):
        Z, single = self._batch(z)
        F, J = self._vj(Z)
        return (F[0], J[0]) if single else (F, J)

    def value_gap(self, z):
        """``1 - |f(z)|^2``, exact through automorphism nodes (see :func:`mobius_gap`)."""
        Z, single = self._batch(z)
        out = self._gap(Z, one_minus_norm_sq(Z))
        return out[0] if single else out

    def to_dict(self) -> dict[str, Any]:
        raise NotImplementedError

    def fingerprint(self):
        """Short stable hash of the serialized tree."""
        text = json.dumps(self.to_dict(), separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]

    def depth(self):
        return 1


class Const(MapExpr):
    def __init__(self, c, n):
        self.c = _frozen(as_cvector(c, name="c"))
        if self.c.ndim != 1:
            raise InputError("constant value must be a vector")
        if n < 1:
            raise InputError(f"input dimension must be >= 1, got {n}")
        self.n = int(n)
        self.m = self.c.shape[0]

    def _vj(self, Z):
        N = Z.shape[0]
        return (
            np.broadcast_to(self.c, (N, self.m)).copy(),
            np.zeros((N, self.m, self.n), dtype=np.complex128),
        )

    def to_dict(self):
        return {"kind": "const", "n": self.n, "c": encode_complex(self.c)}


class Affine(MapExpr):
    """``z -> A z + c``."""

    def __init__(self, A, c=None):
        self.A = _frozen(as_cmatrix(A))
        if self.A.ndim != 2:
            raise InputError("affine matrix must be 2-dimensional")
        self.m, self.n = self.A.shape
        c = np.zeros(self.m) if c is None else c
        self.c = _frozen(as_cvector(c, self.m, name="c"))

    def _vj(self, Z):
        F = Z @ self.A.T + self.c
        return F, np.broadcast_to(self.A, (Z.shape[0], self.m, self.n)).copy()

    def to_dict(self):
        return {"kind": "affine", "A": encode_complex(self.A), "c": encode_complex(self.c)}


class Polynomial(MapExpr):
    """``z -> sum_alpha c_alpha z^alpha`` over multi-indices ``alpha``."""

    def __init__(self, terms, n):
        if n < 1:
            raise InputError(f"input dimension must be >= 1, got {n}")
        if not terms:
            raise InputError("polynomial needs at least one term")
        self.n = int(n)
        exps, coeffs = [], []
        for alpha, c in sorted((tuple(int(k) for k in al), c) for al, c in terms.items()):
            if len(alpha) != self.n or min(alpha) < 0:
                raise InputError(f"bad multi-index {alpha} for n = {self.n}")
            exps.append(alpha)
            coeffs.append(as_cvector(c, name=f"coefficient {alpha}"))
        m = {c.shape[0] for c in coeffs}
        if len(m) != 1:
            raise InputError("polynomial coefficients have inconsistent dimensions")
        self.m = m.pop()
        self.exponents = np.array(exps, dtype=np.int64)
        self.exponents.flags.writeable = False
        self.coeffs = _frozen(np.array(coeffs))

    @property
    def degree(self):
        return int(self.exponents.sum(axis=1).max())

    @property
    def terms(self):
        return {tuple(int(k) for k in e): c for e, c in zip(self.exponents, self.coeffs)}

    def _vj(self, Z):
        E = self.exponents
        powers = Z[:, None, :] ** E[None, :, :]  # (N, T, n)
        mono = np.prod(powers, axis=2)  # (N, T)
        F = mono @ self.coeffs
        J = np.empty((Z.shape[0], self.m, self.n), dtype=np.complex128)
        for k in range(self.n):
            ek = E[:, k]
            dk = powers.copy()
            dk[:, :, k] = np.where(ek > 0, Z[:, None, k] ** np.maximum(ek - 1, 0), 0.0) * ek
            J[:, :, k] = np.prod(dk, axis=2) @ self.coeffs
        return F, J

    def to_dict(self):
        return {
            "kind": "polynomial",
            "n": self.n,
            "m": self.m,
            "terms": [
                {"alpha": [int(k) for k in e], "coeff": encode_complex(c)}
                for e, c in zip(self.exponents, self.coeffs)
            ],
        }


class Mobius(MapExpr):
    def __init__(self, phi):
        self.phi = phi if isinstance(phi, MobiusAuto) else MobiusAuto(phi)
        self.n = self.m = self.phi.n

    def _vj(self, Z):
        return mobius_apply(self.phi, Z), mobius_jacobian(self.phi, Z)

    def _v(self, Z):
        return mobius_apply(self.phi, Z)

    def _gap(self, Z, gap):
        return mobius_gap(self.phi, Z, gap)

    def to_dict(self):
        return {"kind": "mobius", "a": encode_complex(self.phi.a)}


class Compose(MapExpr):
    """``outer o inner``."""

    def __init__(self, outer, inner):
        if inner.m != outer.n:
            raise InputError(
                f"cannot compose: inner maps into C^{inner.m}, outer expects C^{outer.n}"
            )
        self.outer, self.inner = outer, inner
        self.n, self.m = inner.n, outer.m

    def _vj(self, Z):
        W, Ji = self.inner._vj(Z)
        F, Jo = self.outer._vj(W)
        return F, Jo @ Ji

    def _v(self, Z):
        return self.outer._v(self.inner._v(Z))

    def _gap(self, Z, gap):
        return self.outer._gap(self.inner._v(Z), self.inner._gap(Z, gap))

    def to_dict(self):
        return {"kind": "compose", "outer": self.outer.to_dict(), "inner": self.inner.to_dict()}

    def depth(self):
        return 1 + max(self.outer.depth(), self.inner.depth())


def compose(*maps):
    """``compose(f, g, h) == f o g o h``."""
    out = maps[-1]
    for f in reversed(maps[:-1]):
        out = Compose(f, out)
    return out


def scaled(f, R):
    """The map ``R * f`` as a tree."""
    return Compose(Affine(R * np.eye(f.m)), f)


# -- map-spec serialization ------------------------------------------------


class MapSpecError(InputError):
    """Malformed map-spec document; ``path`` locates the offending field."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


def _decode_complex(obj, path):
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return complex(obj)
    if (
        isinstance(obj, list)
        and len(obj) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj)
    ):
        return complex(obj[0], obj[1])
    raise MapSpecError(path, f"expected a complex number as [re, im], got {obj!r}")


def _decode_vector(obj, path):
    if not isinstance(obj, list) or not obj:
        raise MapSpecError(path, "expected a non-empty list of complex numbers")
    return np.array([_decode_complex(v, f"{path}[{i}]") for i, v in enumerate(obj)])


def _decode_matrix(obj, path):
    if not isinstance(obj, list) or not obj:
        raise MapSpecError(path, "expected a non-empty list of rows")
    rows = [_decode_vector(r, f"{path}[{i}]") for i, r in enumerate(obj)]
    if len({len(r) for r in rows}) != 1:
        raise MapSpecError(path, "rows have different lengths")
    return np.array(rows)


def _field(obj, key, path):
    if key not in obj:
        raise MapSpecError(f"{path}.{key}", "missing field")
    return obj[key]


def _int_field(obj, key, path):
    v = _field(obj, key, path)
    if not isinstance(v, int) or isinstance(v, bool) or v < 1:
        raise MapSpecError(f"{path}.{key}", f"expected a positive integer, got {v!r}")
    return v


def from_dict(obj, path="map"):
    """Rebuild a tree from its ``to_dict`` form."""
    if not isinstance(obj, dict):
        raise MapSpecError(path, f"expected an object, got {type(obj).__name__}")
    kind = _field(obj, "kind", path)
    try:
        if kind == "const":
            return Const(_decode_vector(_field(obj, "c", path), f"{path}.c"), _int_field(obj, "n", path))
        if kind == "affine":
            A = _decode_matrix(_field(obj, "A", path), f"{path}.A")
            c = obj.get("c")
            return Affine(A, None if c is None else _decode_vector(c, f"{path}.c"))
        if kind == "polynomial":
            n = _int_field(obj, "n", path)
            terms_obj = _field(obj, "terms", path)
            if not isinstance(terms_obj, list) or not terms_obj:
                raise MapSpecError(f"{path}.terms", "expected a non-empty list")
            terms = {}
            for i, t in enumerate(terms_obj):
                tp = f"{path}.terms[{i}]"
                if not isinstance(t, dict):
                    raise MapSpecError(tp, "expected an object")
                alpha = _field(t, "alpha", tp)
                if not isinstance(alpha, list) or not all(
                    isinstance(k, int) and not isinstance(k, bool) and k >= 0 for k in alpha
                ):
                    raise MapSpecError(f"{tp}.alpha", "expected a list of non-negative integers")
                if tuple(alpha) in terms:
                    raise MapSpecError(f"{tp}.alpha", f"duplicate multi-index {alpha}")
                terms[tuple(alpha)] = _decode_vector(_field(t, "coeff", tp), f"{tp}.coeff")
            poly = Polynomial(terms, n)
            if "m" in obj and obj["m"] != poly.m:
                raise MapSpecError(f"{path}.m", f"declared {obj['m']}, coefficients have {poly.m}")
            return poly
        if kind == "mobius":
            return Mobius(_decode_vector(_field(obj, "a", path), f"{path}.a"))
        if kind == "compose":
            return Compose(
                from_dict(_field(obj, "outer", path), f"{path}.outer"),
                from_dict(_field(obj, "inner", path), f"{path}.inner"),
            )
    except MapSpecError:
        raise
    except InputError as exc:
        raise MapSpecError(path, str(exc)) from exc
    raise MapSpecError(f"{path}.kind", f"unknown node kind {kind!r}")


# -- certified ball maps ---------------------------------------------------


class Evidence(str, enum.Enum):
    STRUCTURAL = "structural"
    SAMPLED = "sampled"


@dataclass(frozen=True)
class BallMapCertificate:
    """A map together with the reason we believe it sends B_n into B_m.

    ``STRUCTURAL`` maps are ``phi_b o (u C) o phi_a`` with ``||C|| <= 1``;
    their image of the closed ball lies in the closed ball exactly.
    ``SAMPLED`` maps were rescaled so the sampled boundary sup equals
    ``margin``.
    """

    expr: MapExpr
    evidence: Evidence
    margin: float | None = None
    samples: int | None = None
    parts: dict = field(default_factory=dict, compare=False)

    @property
    def n(self):
        return self.expr.n

    @property
    def m(self):
        return self.expr.m


def structural_map(a, C, b, u=1.0, *, check=True):
    """``phi_b o (u C) o phi_a`` with its structural certificate.

    ``check=False`` skips the ``||C|| <= 1`` test for callers that have
    just normalized ``C`` themselves.
    """
    C = as_cmatrix(C)
    if check and opnorm(C) > 1.0 + 1e-12:
        raise InputError("structural recipe needs a contraction, ||C|| <= 1")
    if not 0.0 <= u <= 1.0:
        raise InputError(f"scale u must lie in [0, 1], got {u}")
    g = Affine(u * C)
    expr = compose(Mobius(b), g, Mobius(a))
    return BallMapCertificate(
        expr,
        Evidence.STRUCTURAL,
        parts={"a": np.asarray(a, complex), "b": np.asarray(b, complex), "g": g, "u": u},
    )


def gen_ball_map(n, m, rng, recipe="structural", normalize=False, degree=3, samples=10_000):
    """Random certified map B_n -> B_m.

    ``normalize=True`` forces ``f(0) = 0``: the structural recipe picks
    ``b = u C a`` so that ``phi_b`` sends ``g(phi_a(0))`` back to the
    origin; the polynomial recipe drops the constant term.
    """
    if n < 1 or m < 1:
        raise InputError(f"dimensions must be >= 1, got n={n}, m={m}")
    recipe = str(getattr(recipe, "value", recipe))
    if recipe == "structural":
        a = sample_ball(n, rng)
        C = complex_gaussian_matrix(m, n, rng)
        C = C / opnorm(C)
        u = 1.0 - rng.random()
        b = u * (C @ a) if normalize else sample_ball(m, rng)
        return structural_map(a, C, b, u, check=False)
    if recipe in ("polynomial", "sampled"):
        terms = {}
        for alpha in itertools.product(range(degree + 1), repeat=n):
            d = sum(alpha)
            if d > degree or (normalize and d == 0):
                continue
            terms[alpha] = (rng.standard_normal(m) + 1j * rng.standard_normal(m)) / (1 + d)
        if not terms:
            terms[(0,) * n] = np.zeros(m)
        raw = Polynomial(terms, n)
        sup = sup_norm_estimate(raw, samples, rng)
        scale = 0.99 / sup if sup > 0 else 1.0
        poly = Polynomial({k: scale * v for k, v in raw.terms.items()}, n)
        return BallMapCertificate(poly, Evidence.SAMPLED, margin=0.99, samples=samples)
    raise InputError(f"unknown recipe {recipe!r}")


def _ascend_sphere(f, X, steps):
    """Projected ascent of ``|f|`` on the unit sphere, one run per row of ``X``."""
    X = X / norm(X)[:, None]
    F, J = f._vj(X)
    val = norm(F)
    eta = np.full(X.shape[0], 0.5)
    for _ in range(steps):
        G = np.einsum("kji,kj->ki", np.conj(J), F)
        G = G - np.real(np.sum(np.conj(X) * G, axis=1))[:, None] * X
        gn = norm(G)
        live = (gn > 1e-15) & (eta > 1e-12)
        if not np.any(live):
            break
        T = X + (eta / np.maximum(gn, 1.0))[:, None] * G
        T = T / norm(T)[:, None]
        Ft, Jt = f._vj(T)
        vt = norm(Ft)
        up = live & (vt > val)
        X = np.where(up[:, None], T, X)
        F = np.where(up[:, None], Ft, F)
        J = np.where(up[:, None, None], Jt, J)
        val = np.where(up, vt, val)
        eta = np.where(up, np.minimum(2 * eta, 4.0), np.where(live, 0.25 * eta, eta))
    return float(np.max(val))


def sup_norm_estimate(f, samples, rng, refine=80):
    """Lower bound on ``sup_{|z|<1} |f(z)|``.

    By the maximum principle the sup is the max over the unit sphere, on
    which every node type here is still holomorphic, so ``samples``
    uniform sphere points are evaluated directly. ``refine`` steps of
    projected ascent then polish from fixed starts (the coordinate axes
    and the top right-singular direction of ``f'(0)``). Those starts do
    not depend on the sample set, so the estimate is monotone in it.
    """
    if samples < 1:
        raise InputError(f"samples must be >= 1, got {samples}")
    if isinstance(f, BallMapCertificate):
        f = f.expr
    pts = sample_sphere(f.n, rng, size=samples)
    best = float(np.max(norm(f.eval(pts))))
    if refine:
        starts = list(np.eye(f.n, dtype=np.complex128))
        J0 = f.jacobian(np.zeros(f.n))
        if np.any(J0 != 0):
            _, _, vh = np.linalg.svd(J0)
            starts.append(np.conj(vh[0]))
        best = max(best, _ascend_sphere(f, np.array(starts), refine))
    return best


def sup_upper_bound(f, radius=1.0):
    """Rigorous upper bound on ``sup_{|z| <= radius} |f(z)|``, or ``None``.

    Built node by node: a Moebius node maps the closed unit ball onto
    itself; an affine node splits ``c`` into its parts along and across
    the range of ``A``; a polynomial node uses ``sum |c_alpha| r^|alpha|``.
    ``None`` means a Moebius node would be evaluated outside the closed
    unit ball, where no bound is claimed.
    """
    if isinstance(f, BallMapCertificate):
        f = f.expr
    if isinstance(f, Const):
        return float(norm(f.c))
    if isinstance(f, Affine):
        if not np.any(f.A):
            return float(norm(f.c))
        # orthogonal projection of c onto range(A)
        coef, *_ = np.linalg.lstsq(f.A, f.c, rcond=None)
        c_par = f.A @ coef
        c_perp = f.c - c_par
        return float(np.hypot(radius * opnorm(f.A) + norm(c_par), norm(c_perp)))
    if isinstance(f, Polynomial):
        deg = f.exponents.sum(axis=1)
        return float(np.sum(norm(f.coeffs) * radius**deg))
    if isinstance(f, Mobius):
        return 1.0 if radius <= 1.0 else None
    if isinstance(f, Compose):
        r = sup_upper_bound(f.inner, radius)
        return None if r is None else sup_upper_bound(f.outer, r)
    raise InputError(f"no bound rule for {type(f).__name__}")


def has_polynomial(f):
    if isinstance(f, Compose):
        return has_polynomial(f.outer) or has_polynomial(f.inner)
    return isinstance(f, Polynomial)
