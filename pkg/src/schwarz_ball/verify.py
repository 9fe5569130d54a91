"""Batch verification suites behind ``schwarz-ball verify``.

A check is a function of ``(rng, config)`` that draws one sample from
its private random stream and returns ``(lhs, rhs, witness)`` for an
inequality ``lhs <= rhs``. Accuracy checks (oracle agreement, identities)
are phrased the same way with ``lhs = error`` and ``rhs = budget``.

Sample ``i`` of check ``c`` always uses the stream seeded by
``(seed, c, i)``, so results do not depend on the number of workers.
"""

from __future__ import annotations

import hashlib
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .bounds import (
    DEFAULT_TOL,
    arcsin_terms,
    ball_dh_upper,
    bloch_seminorm_estimate,
    disk_hyperbolic_distance,
    scaled_terms,
    schwarz_pick_terms,
)
from .holomap import Affine, encode_complex, gen_ball_map, scaled, sup_norm_estimate
from .linalg import norm, opnorm, sample_ball, sample_sphere
from .mobius import (
    MobiusAuto,
    m_norm_closed,
    m_operator,
    mobius_apply,
    mobius_jacobian,
    n_norm_closed,
    n_operator,
)
from .oracles import fd_jacobian, fd_real_gradient, jacobian_rel_error
from .pluriharmonic import (
    PluriharmonicFn,
    eval_f,
    grad_norm,
    omega_identities,
    arctan_example,
    pluriharmonic_terms,
    proof_scalar_check,
    strip_map,
    strip_map_inverse,
)

SUITES = ("mobius", "schwarz", "pluriharmonic", "corollaries", "all")
POINTS_PER_MAP = 10
HANE_SCALES = (0.5, 2.0, 10.0)


@dataclass(frozen=True)
class VerifyConfig:
    n: int = 2
    m: int = 2
    samples: int = 100
    seed: int = 0
    tol: float = DEFAULT_TOL
    resolution: int = 10_000


def _pt(z):
    return encode_complex(np.atleast_1d(z))


def _worst(lhs, rhs, Z=None):
    i = int(np.argmin(np.asarray(rhs) - np.asarray(lhs)))
    return float(lhs[i]), float(rhs[i]), i


# -- mobius -------------------------------------------------------------------


def _mobius_involution(rng, cfg):
    phi = MobiusAuto(sample_ball(cfg.n, rng))
    z = sample_ball(cfg.n, rng)
    err = norm(mobius_apply(phi, mobius_apply(phi, z)) - z)
    return float(err), 1e-12, {"a": _pt(phi.a), "z": _pt(z)}


def _mobius_fixed(rng, cfg):
    phi = MobiusAuto(sample_ball(cfg.n, rng))
    err = max(norm(phi(np.zeros(cfg.n)) - phi.a), norm(phi(phi.a)))
    return float(err), 1e-13, {"a": _pt(phi.a)}


def _mobius_boundary(rng, cfg):
    phi = MobiusAuto(sample_ball(cfg.n, rng))
    z = sample_sphere(cfg.n, rng)
    err = abs(norm(phi(z)) - 1.0)
    return float(err), 1e-12, {"a": _pt(phi.a), "z": _pt(z)}


def _mobius_interior(rng, cfg):
    phi = MobiusAuto(sample_ball(cfg.n, rng))
    z = sample_ball(cfg.n, rng)
    return float(norm(phi(z))), 1.0, {"a": _pt(phi.a), "z": _pt(z)}


def _mobius_jac_special(rng, cfg):
    a = sample_ball(cfg.n, rng)
    phi = MobiusAuto(a)
    M, N = m_operator(a), n_operator(a)
    e0 = np.linalg.norm(mobius_jacobian(phi, np.zeros(cfg.n)) - M) / np.linalg.norm(M)
    ea = np.linalg.norm(mobius_jacobian(phi, a) - N) / np.linalg.norm(N)
    return float(max(e0, ea)), 1e-13, {"a": _pt(a)}


def _mobius_jac_fd(rng, cfg):
    phi = MobiusAuto(sample_ball(cfg.n, rng))
    z = sample_ball(cfg.n, rng)
    err = jacobian_rel_error(mobius_jacobian(phi, z), fd_jacobian(phi, z))
    return err, 1e-6, {"a": _pt(phi.a), "z": _pt(z)}


def _mobius_chain(rng, cfg):
    phi = MobiusAuto(sample_ball(cfg.n, rng))
    z = sample_ball(cfg.n, rng)
    J = mobius_jacobian(phi, mobius_apply(phi, z)) @ mobius_jacobian(phi, z)
    err = np.linalg.norm(J - np.eye(cfg.n)) / max(1.0, np.linalg.norm(mobius_jacobian(phi, z)))
    return float(err), 1e-10, {"a": _pt(phi.a), "z": _pt(z)}


def _mobius_norms(rng, cfg):
    a = sample_ball(cfg.n, rng)
    err = max(
        abs(opnorm(m_operator(a)) - m_norm_closed(a)),
        abs(opnorm(n_operator(a)) - n_norm_closed(a)),
    )
    return float(err), 1e-10, {"a": _pt(a)}


# -- schwarz ------------------------------------------------------------------


def _map_witness(cert, Z, i):
    return {"z": _pt(Z[i]), "map": cert.expr.to_dict()}


def _schwarz_pick(rng, cfg):
    cert = gen_ball_map(cfg.n, cfg.m, rng)
    Z = sample_ball(cfg.n, rng, size=POINTS_PER_MAP)
    lhs, rhs, i = _worst(*schwarz_pick_terms(cert, Z), Z)
    return lhs, rhs, _map_witness(cert, Z, i)


def _schwarz_origin(rng, cfg):
    cert = gen_ball_map(cfg.n, cfg.m, rng)
    lhs, rhs = schwarz_pick_terms(cert, np.zeros(cfg.n))
    return float(lhs), float(rhs), {"map": cert.expr.to_dict()}


def _schwarz_polynomial(rng, cfg):
    cert = gen_ball_map(cfg.n, cfg.m, rng, "polynomial", degree=2, samples=2_000)
    Z = sample_ball(cfg.n, rng, size=POINTS_PER_MAP)
    lhs, rhs, i = _worst(*schwarz_pick_terms(cert, Z), Z)
    return lhs, rhs, _map_witness(cert, Z, i)


def _schwarz_decomposition(rng, cfg):
    cert = gen_ball_map(cfg.n, cfg.m, rng)
    a, b, g = cert.parts["a"], cert.parts["b"], cert.parts["g"]
    Ja = cert.expr.jacobian(a)
    Mb, G0, Na = m_operator(b), g.jacobian(np.zeros(cfg.n)), n_operator(a)
    scale = opnorm(Mb) * max(opnorm(G0), 1e-300) * opnorm(Na)
    err = np.linalg.norm(Ja - Mb @ G0 @ Na) / max(scale, 1.0)
    return float(err), 1e-10, {"map": cert.expr.to_dict()}


def _schwarz_classical(rng, cfg):
    cert = gen_ball_map(cfg.n, cfg.m, rng, normalize=True)
    Z = sample_ball(cfg.n, rng, size=POINTS_PER_MAP)
    lhs, rhs, i = _worst(norm(cert.expr.eval(Z)), norm(Z), Z)
    return lhs, rhs, _map_witness(cert, Z, i)


def _schwarz_normalized_derivative(rng, cfg):
    cert = gen_ball_map(cfg.n, cfg.m, rng)
    g = cert.parts["g"]
    return float(opnorm(g.jacobian(np.zeros(cfg.n)))), 1.0, {"map": cert.expr.to_dict()}


# -- pluriharmonic ------------------------------------------------------------


def _pluri_bound(rng, cfg):
    cert = gen_ball_map(cfg.n, 1, rng)
    F = PluriharmonicFn(cert)
    Z = sample_ball(cfg.n, rng, size=POINTS_PER_MAP)
    lhs, rhs, i = _worst(*pluriharmonic_terms(F, Z), Z)
    return lhs, rhs, _map_witness(cert, Z, i)


def _pluri_gradient(rng, cfg):
    cert = gen_ball_map(cfg.n, 1, rng)
    F = PluriharmonicFn(cert)
    z = sample_ball(cfg.n, rng) * 0.95
    g = grad_norm(F, z)
    ref = norm(fd_real_gradient(lambda x: eval_f(F, x), z))
    err = abs(g - ref) / max(ref, 1e-9)
    return float(err), 1e-6, {"z": _pt(z), "map": cert.expr.to_dict()}


def _pluri_example(rng, cfg):
    err = abs(grad_norm(arctan_example(cfg.n), np.zeros(cfg.n)) - 4.0 / np.pi)
    return float(err), 1e-12, {}


def _pluri_scalar(rng, cfg):
    t = (rng.random() - 0.5) * np.pi * (1 - 1e-12)
    return proof_scalar_check(t), 1.0, {"t": t}


def _pluri_omega(rng, cfg):
    r = float(np.exp(rng.uniform(-3.0, 3.0)))
    t = float(rng.uniform(-np.pi / 2, np.pi / 2))
    e1, e2 = omega_identities(r, t)
    return float(max(abs(e1), abs(e2))), 1e-12, {"r": r, "t": t}


def _pluri_roundtrip(rng, cfg):
    zeta = complex(sample_ball(1, rng)[0]) * 0.999
    v = complex(rng.uniform(-0.999, 0.999), rng.normal(0.0, 1.0))
    err = max(abs(strip_map_inverse(strip_map(zeta)) - zeta), abs(strip_map(strip_map_inverse(v)) - v))
    return float(err), 1e-12, {"zeta": _pt(zeta), "v": _pt(v)}


# -- corollaries ----------------------------------------------------------------


def _cor_arcsin(rng, cfg):
    cert = gen_ball_map(cfg.n, cfg.m, rng, normalize=True)
    Z = sample_ball(cfg.n, rng, size=POINTS_PER_MAP)
    lhs, rhs, i = _worst(*arcsin_terms(cert, Z), Z)
    return lhs, rhs, _map_witness(cert, Z, i)


def _cor_distance(rng, cfg):
    cert = gen_ball_map(cfg.n, 1, rng)
    z, w = sample_ball(cfg.n, rng), sample_ball(cfg.n, rng)
    f = cert.expr
    lhs = disk_hyperbolic_distance(f(z)[0], f(w)[0])
    rhs = ball_dh_upper(z, w, cfg.resolution)
    return lhs, rhs, {"z": _pt(z), "w": _pt(w), "map": f.to_dict()}


def _cor_scaled(rng, cfg):
    cert = gen_ball_map(cfg.n, cfg.m, rng)
    Z = sample_ball(cfg.n, rng, size=POINTS_PER_MAP)
    worst = None
    for R in HANE_SCALES:
        lhs, rhs, i = _worst(*scaled_terms(scaled(cert.expr, R), Z, R), Z)
        if worst is None or rhs - lhs < worst[1] - worst[0]:
            worst = (lhs, rhs, {"R": R, **_map_witness(cert, Z, i)})
    return worst


def _cor_bloch(rng, cfg):
    cert = gen_ball_map(cfg.n, cfg.m, rng)
    bloch = bloch_seminorm_estimate(cert, 200, rng)
    sup = sup_norm_estimate(cert, 1_000, rng)
    return bloch, sup + 1e-9, {"map": cert.expr.to_dict()}


def _cor_bloch_f0(rng, cfg):
    n = max(cfg.n, 2)
    A = np.zeros((2, n))
    A[0, 0] = 1.0
    f0 = Affine(A)
    err = max(abs(bloch_seminorm_estimate(f0, 100, rng) - 1.0), abs(sup_norm_estimate(f0, 1_000, rng) - 1.0))
    return float(err), 1e-9, {}


# (id, function, runs once instead of `samples` times)
_SUITE_CHECKS = {
    "mobius": [
        ("mobius.involution", _mobius_involution, False),
        ("mobius.fixed_points", _mobius_fixed, False),
        ("mobius.boundary", _mobius_boundary, False),
        ("mobius.interior", _mobius_interior, False),
        ("mobius.jacobian_special", _mobius_jac_special, False),
        ("mobius.jacobian_fd", _mobius_jac_fd, False),
        ("mobius.chain_rule", _mobius_chain, False),
        ("mobius.derivative_norms", _mobius_norms, False),
    ],
    "schwarz": [
        ("schwarz.pick", _schwarz_pick, False),
        ("schwarz.origin", _schwarz_origin, False),
        ("schwarz.polynomial", _schwarz_polynomial, False),
        ("schwarz.decomposition", _schwarz_decomposition, False),
        ("schwarz.classical", _schwarz_classical, False),
        ("schwarz.inner_derivative", _schwarz_normalized_derivative, False),
    ],
    "pluriharmonic": [
        ("pluri.bound", _pluri_bound, False),
        ("pluri.gradient_fd", _pluri_gradient, False),
        ("pluri.example", _pluri_example, True),
        ("pluri.scalar", _pluri_scalar, False),
        ("pluri.omega", _pluri_omega, False),
        ("pluri.strip_roundtrip", _pluri_roundtrip, False),
    ],
    "corollaries": [
        ("cor.arcsin", _cor_arcsin, False),
        ("cor.distance", _cor_distance, False),
        ("cor.scaled", _cor_scaled, False),
        ("cor.bloch", _cor_bloch, False),
        ("cor.bloch_f0", _cor_bloch_f0, True),
    ],
}


def suite_checks(suite):
    if suite == "all":
        return [c for s in SUITES[:-1] for c in _SUITE_CHECKS[s]]
    if suite not in _SUITE_CHECKS:
        raise ValueError(f"unknown suite {suite!r}")
    return list(_SUITE_CHECKS[suite])


_ALL = {cid: fn for checks in _SUITE_CHECKS.values() for cid, fn, _ in checks}


def _check_key(cid):
    return int.from_bytes(hashlib.sha256(cid.encode()).digest()[:4], "big")


def substream(seed, cid, index):
    return np.random.default_rng([seed, _check_key(cid), index])


def _run_chunk(args):
    cid, cfg_dict, indices = args
    cfg = VerifyConfig(**cfg_dict)
    fn = _ALL[cid]
    return [fn(substream(cfg.seed, cid, i), cfg) for i in indices]


def _chunks(count, workers):
    size = max(1, -(-count // (workers * 4)))
    return [range(i, min(count, i + size)) for i in range(0, count, size)]


def run_suite(suite, cfg, workers=1, timing=False):
    """Run ``suite`` and return the report as an ordered dict."""
    started = time.perf_counter()
    checks = suite_checks(suite)
    cfg_dict = asdict(cfg)
    jobs = []
    for cid, _, once in checks:
        count = 1 if once else cfg.samples
        for idx in _chunks(count, workers):
            jobs.append((cid, cfg_dict, idx))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_chunk, jobs))
    else:
        results = [_run_chunk(j) for j in jobs]

    per_check = {cid: [] for cid, _, _ in checks}
    for (cid, _, _), res in zip(jobs, results):
        per_check[cid].extend(res)

    records = []
    for cid, rows in per_check.items():
        slacks = np.array([rhs - lhs for lhs, rhs, _ in rows])
        i = int(np.argmin(slacks))
        lhs, rhs, witness = rows[i]
        records.append(
            {
                "id": cid,
                "count": len(rows),
                "min_slack": float(slacks[i]),
                "pass": bool(slacks[i] >= -cfg.tol),
                "worst": {"index": i, "lhs": float(lhs), "rhs": float(rhs), **witness},
            }
        )
    failed = [r["id"] for r in records if not r["pass"]]
    report = {
        "tool": "schwarz-ball",
        "version": __version__,
        "suite": suite,
        "seed": cfg.seed,
        "config": {"n": cfg.n, "m": cfg.m, "samples": cfg.samples, "tol": cfg.tol, "resolution": cfg.resolution},
        "checks": records,
        "summary": {"checks": len(records), "failed": failed, "pass": not failed},
    }
    if timing:
        report["wall_time_s"] = time.perf_counter() - started
    return report


def default_workers():
    try:
        return max(1, int(os.environ.get("SCHWARZ_BALL_WORKERS", "1")))
    except ValueError:
        return 1
