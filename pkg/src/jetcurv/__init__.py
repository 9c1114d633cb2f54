"""Kähler curvature from potentials, Hermitian forms on 1-jets, and their flatness.

The package computes the curvature of a Kähler metric from a potential,
builds the Hermitian forms H and K on the 1-jet bundle, tests the flatness of
their Chern connections against constant holomorphic sectional curvature
+-2, and develops flat cases onto projective space or the complex ball.
"""

from .chern import connection_at, curvature_at, flatness_norm, flatness_verdict
from .develop import (
    Developer,
    developing_map,
    orthonormal_parallel_frame,
    path_independence,
    pullback_residual,
    transport,
)
from .errors import (
    ConfigError,
    DegenerateFormError,
    DomainError,
    EvaluationError,
    JetcurvError,
    NotFlatError,
    NotKahlerError,
    SingularFormError,
    TransportError,
    UnsupportedOrderError,
)
from .gauge import normalize_at, verify_claims
from .jet_hermitian import (
    canonical_section,
    dual_quadratic,
    h_field,
    h_matrix_at,
    k_field,
    k_matrix_at,
    quotient_identity_residual,
    signature_of,
)
from .kahler_core import chsc_residual, hsc_of_direction, metric_at, riemann_at
from .registry import REGISTRY, builtin, random_points
from .report import Report, RunConfig, __version__
from .wirtinger import PotentialSpec, WirtingerJet, eval_jet, fd_jet, load_spec, save_spec
