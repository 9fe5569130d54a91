"""Numerical sharpness checks and a counterexample hunter.

``sharpness_search`` maximizes ``lhs / rhs`` of an inequality over a
small parametric family by derivative-free coordinate search. The
families contain the known extremal maps, so the best ratio should come
out at 1 (and never above it).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .bounds import (
    DEFAULT_TOL,
    Inequality,
    _cert,
    arcsin_terms,
    deriv_at_zero_check,
    schwarz_pick_terms,
)
from .holomap import Affine, Mobius, gen_ball_map, structural_map
from .linalg import opnorm, sample_ball
from .pluriharmonic import PluriharmonicFn, pluriharmonic_terms

RATIO_LOW = 1.0 - 1e-6
RATIO_HIGH = 1.0 + 1e-9


class Family(str, enum.Enum):
    SCHUR_M2 = "schurm2"
    PLURI_EXAMPLE = "pluri"
    DISK_AUTO = "diskauto"


@dataclass(frozen=True)
class SearchResult:
    family: str
    best_params: tuple
    best_ratio: float
    evaluations: int
    witness: tuple
    min_ratio: float | None = None
    stagnated: bool = False
    restart: int = 0

    def within_bracket(self, low=RATIO_LOW, high=RATIO_HIGH):
        return low <= self.best_ratio <= high


@dataclass
class SearchConfig:
    """Coordinate search settings. ``budget`` caps objective evaluations across all restarts."""

    restarts: int = 3
    initial_step: float = 0.1
    shrink: float = 0.5
    min_step: float = 1e-10
    budget: int = 200_000
    seed: int = 0


def f_t(t):
    """``(z, w) -> (z sin t, cos t)``, parametrized by ``c = cos t``.

    ``sin t`` is recomputed from ``c`` as ``sqrt((1-c)(1+c))`` so the pair
    lies on the unit circle to working precision even for tiny ``t``.
    """
    c = float(np.cos(t))
    s = float(np.sqrt((1.0 - c) * (1.0 + c)))
    return Affine([[s, 0.0], [0.0, 0.0]], [0.0, c])


def sharpness_ft(grid):
    """Ratio of both sides of the origin bound for ``f_t`` on a ``t``-grid in (0, pi/2)."""
    if grid < 2:
        raise ValueError(f"grid must be >= 2, got {grid}")
    ts = np.linspace(0.0, np.pi / 2, grid + 2)[1:-1]
    ratios = np.empty(grid)
    for i, t in enumerate(ts):
        cert = deriv_at_zero_check(f_t(t))
        ratios[i] = cert.lhs / cert.rhs
    k = int(np.argmax(ratios))
    return SearchResult(
        family="ft",
        best_params=(float(ts[k]),),
        best_ratio=float(ratios[k]),
        evaluations=grid,
        witness=(0j, 0j),
        min_ratio=float(np.min(ratios)),
    )


def _squash(x):
    """``R^(2k)`` onto the open ball of ``C^k``: ``v / sqrt(1 + |v|^2)``."""
    v = np.asarray(x[0::2], dtype=np.float64) + 1j * np.asarray(x[1::2], dtype=np.float64)
    return v / np.sqrt(1.0 + np.sum(np.abs(v) ** 2))


def _schur_m2(p):
    b = _squash(p[0:4])
    theta, psi, q = p[4], p[5], p[6]
    v = np.array([np.cos(theta), np.exp(1j * psi) * np.sin(theta)])
    C = np.outer(v, [1.0, 0.0])
    f = structural_map(np.zeros(2), C, b, float(np.exp(-q * q))).expr
    z = np.zeros(2, dtype=np.complex128)
    lhs, rhs = schwarz_pick_terms(f, z)
    return lhs / rhs, z


def _pluri_example(p):
    z = _squash(p[0:2])
    theta = p[2]
    F = PluriharmonicFn(Affine([[-np.exp(1j * theta)]]))
    lhs, rhs = pluriharmonic_terms(F, z)
    return lhs / rhs, z


def _disk_auto(p):
    c = _squash(p[0:2])
    z = _squash(p[2:4])
    lhs, rhs = schwarz_pick_terms(Mobius(c), z)
    return lhs / rhs, z


_FAMILIES = {
    Family.SCHUR_M2: (_schur_m2, 7),
    Family.PLURI_EXAMPLE: (_pluri_example, 3),
    Family.DISK_AUTO: (_disk_auto, 4),
}


class _Budget:
    def __init__(self, limit):
        self.limit = limit
        self.used = 0

    def take(self):
        if self.used >= self.limit:
            return False
        self.used += 1
        return True


def coordinate_search(objective, x0, config, budget):
    """Maximize ``objective(x)[0]`` by compass steps along the coordinate axes.

    Each sweep tries ``x +/- step * e_k`` for every ``k`` and moves on
    improvement; a sweep without improvement shrinks the step. Returns
    ``(x, value, extra, stagnated)``.
    """
    x = np.array(x0, dtype=np.float64)
    if not budget.take():
        return x, -np.inf, None, True
    best, extra = objective(x)
    step = config.initial_step
    while step >= config.min_step:
        improved = False
        for k in range(x.size):
            for sign in (1.0, -1.0):
                trial = x.copy()
                trial[k] += sign * step
                if not budget.take():
                    return x, best, extra, True
                val, ex = objective(trial)
                if val > best:
                    x, best, extra, improved = trial, val, ex, True
                    break
        if not improved:
            step *= config.shrink
    return x, best, extra, False


def sharpness_search(family, config=None):
    """Best ratio ``lhs / rhs`` over a family, from ``config.restarts`` seeded starts.

    Restarts run in order against one shared evaluation budget; ties keep
    the lowest restart index.
    """
    config = config or SearchConfig()
    family = Family(family)
    objective, dim = _FAMILIES[family]
    rng = np.random.default_rng(config.seed)
    budget = _Budget(config.budget)
    best = None
    stagnated = False
    for r in range(config.restarts):
        x0 = rng.standard_normal(dim)
        x, val, witness, stalled = coordinate_search(objective, x0, config, budget)
        stagnated = stagnated or stalled
        if best is None or val > best[1]:
            best = (x, val, witness, r)
        if budget.used >= budget.limit:
            break
    x, val, witness, r = best
    return SearchResult(
        family=family.value,
        best_params=tuple(float(v) for v in x),
        best_ratio=float(val),
        evaluations=budget.used,
        witness=tuple(complex(w) for w in np.atleast_1d(witness)) if witness is not None else (),
        stagnated=stagnated,
        restart=r,
    )


# -- falsifier ---------------------------------------------------------------

POINTS_PER_MAP = 25
LOCAL_FRACTION = 0.1


def _unsquash(v):
    v = np.asarray(v, dtype=np.complex128)
    w = v / np.sqrt(max(1.0 - float(np.sum(np.abs(v) ** 2)), 1e-300))
    return np.ravel(np.column_stack([w.real, w.imag]))


class _Target:
    """One inequality on one recipe, as a function of a flat parameter vector.

    Structural maps are parametrized by ``(a, b, C, q)`` with ``u = exp(-q^2)``
    and ``C`` rescaled to norm 1; the point ``z`` is appended. Sampled
    (polynomial) maps are held fixed and only ``z`` varies.
    """

    def __init__(self, inequality, recipe, n, m):
        self.inequality = inequality
        self.structural = str(getattr(recipe, "value", recipe)) == "structural"
        self.recipe = recipe
        self.n = n
        self.m = 1 if inequality == Inequality.PLURIHARMONIC else m
        self.normalize = inequality == Inequality.ARCSIN
        self.fixed = None

    def draw(self, rng):
        cert = gen_ball_map(self.n, self.m, rng, self.recipe, normalize=self.normalize, samples=2_000)
        if not self.structural:
            self.fixed = cert
            return cert, np.zeros(0)
        pa = cert.parts
        C = pa["g"].A / pa["u"]
        head = [_unsquash(pa["a"])]
        if not self.normalize:
            head.append(_unsquash(pa["b"]))
        head += [C.real.ravel(), C.imag.ravel(), [np.sqrt(-np.log(pa["u"]))]]
        return cert, np.concatenate(head)

    def build(self, p):
        if not self.structural:
            return self.fixed
        n, m = self.n, self.m
        a = _squash(p[: 2 * n])
        k = 2 * n
        if not self.normalize:
            b = _squash(p[k : k + 2 * m])
            k += 2 * m
        C = (p[k : k + m * n] + 1j * p[k + m * n : k + 2 * m * n]).reshape(m, n)
        k += 2 * m * n
        u = float(np.exp(-p[k] ** 2))
        C = C / max(opnorm(C), 1e-300)
        if self.normalize:
            b = u * (C @ a)
        return structural_map(a, C, b, u, check=False)

    def terms(self, cert, Z):
        if self.inequality == Inequality.SCHWARZ_PICK:
            return schwarz_pick_terms(cert, Z)
        if self.inequality == Inequality.ARCSIN:
            return arcsin_terms(cert, Z)
        if self.inequality == Inequality.PLURIHARMONIC:
            return pluriharmonic_terms(PluriharmonicFn(cert), Z)
        raise ValueError(f"falsify does not drive {self.inequality.value!r}")


def _ratio(lhs, rhs):
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(rhs > 0, lhs / np.where(rhs > 0, rhs, 1.0), np.where(lhs > 0, np.inf, 0.0))
    return r


def falsify(inequality, recipe, budget, rng, *, n=2, m=2, tol=DEFAULT_TOL, rhs_scale=1.0):
    """Hunt for a point where ``lhs > rhs + tol`` over certified maps.

    Most of the budget goes to random maps and points; a tenth to a
    coordinate search over map parameters and point, started from the
    configuration with the largest ``lhs / rhs``. Returns the most
    negative-slack certificate if it breaks the tolerance, else ``None``.
    ``rhs_scale`` multiplies the right-hand side; it exists only so the
    falsifier itself can be tested against a deliberately wrong bound.
    """
    inequality = Inequality(inequality)
    target = _Target(inequality, recipe, n, m)
    worst = None
    best_cfg = None
    used = 0

    def record(cert, Z, lhs, rhs):
        nonlocal worst
        slack = rhs_scale * rhs - lhs
        i = int(np.argmin(slack))
        if worst is None or slack[i] < worst.slack:
            worst = _cert(inequality, cert.expr, [Z[i]], lhs[i], rhs_scale * rhs[i])

    explore = budget if budget < 2 * POINTS_PER_MAP else budget - int(LOCAL_FRACTION * budget)
    while used < explore:
        cert, p = target.draw(rng)
        k = min(POINTS_PER_MAP, explore - used)
        Z = sample_ball(n, rng, size=k)
        lhs, rhs = target.terms(cert, Z)
        used += k
        record(cert, Z, lhs, rhs)
        ratio = _ratio(lhs, rhs_scale * rhs)
        i = int(np.argmax(ratio))
        if best_cfg is None or ratio[i] > best_cfg[0]:
            best_cfg = (ratio[i], p, Z[i], cert)

    if used < budget and best_cfg is not None:
        _, p0, z0, cert0 = best_cfg
        if not target.structural:
            target.fixed = cert0
        x0 = np.concatenate([p0, _unsquash(z0 * (1.0 - 1e-9))])
        split = p0.size

        def objective(x):
            cert = target.build(x[:split])
            Z = _squash(x[split:])[None, :]
            lhs, rhs = target.terms(cert, Z)
            record(cert, Z, lhs, rhs)
            return float(_ratio(lhs, rhs_scale * rhs)[0]), None

        search_budget = _Budget(budget - used)
        restart = x0
        while search_budget.used < search_budget.limit:
            x, _, _, stalled = coordinate_search(objective, restart, SearchConfig(), search_budget)
            if stalled:
                break
            restart = x + 0.01 * rng.standard_normal(x.size)
        used += search_budget.used

    if worst is not None and worst.slack < -tol:
        return worst
    return None
