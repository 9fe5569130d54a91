"""Holomorphic maps between complex unit balls: automorphisms, derivatives,
operator norms and numerical checks of Schwarz-Pick type inequalities."""

__version__ = "0.1.0"

from .errors import HypothesisViolation, InputError, NumericalError, SchwarzBallError, SingularityError
from .linalg import one_minus_norm_sq, opnorm, sample_ball, sample_sphere
from .mobius import MobiusAuto, m_norm_closed, m_operator, mobius_apply, mobius_jacobian, n_norm_closed, n_operator
from .holomap import (
    Affine,
    BallMapCertificate,
    Compose,
    Const,
    Evidence,
    MapExpr,
    Mobius,
    Polynomial,
    compose,
    gen_ball_map,
    structural_map,
    sup_norm_estimate,
)
from .bounds import (
    BoundCertificate,
    Inequality,
    arcsin_check,
    ball_dh_upper,
    bloch_seminorm_estimate,
    deriv_at_zero_check,
    disk_hyperbolic_distance,
    distance_contraction_check,
    scaled_check,
    schwarz_pick_check,
)
from .pluriharmonic import PluriharmonicFn, grad_norm, pluriharmonic_check, strip_map, strip_map_inverse
from .extremal import SearchConfig, SearchResult, falsify, sharpness_ft, sharpness_search

__all__ = [name for name in dir() if not name.startswith("_")]
