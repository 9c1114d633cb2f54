"""Hermitian forms H (on J^1(L)) and K (on J^1(L*)) in the jet frame.

The frame is ``{j(1), j(z^1), ..., j(z^n)}`` (for K: ``{j(s*), j(z^i s*)}``),
with ``h = exp(-phi)``. For holomorphic ``u, v`` in the frame,

    H(j(u), j(v)) = h u vbar + h <du - u dphi, dv - v dphi>_g
    K(j(u), j(v)) = h^-1 u vbar - h^-1 <du + u dphi, dv + v dphi>_g

where ``<a, b>_g = g^{p qbar} a_p conj(b_q)``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFormError, NotKahlerError, SingularFormError
from .kahler_core import metric_at
from .wirtinger import eval_jet


@dataclass(eq=False)
class JetHermitianMatrix:
    """``matrix[a, b] = M(s^a, s^b)`` for the jet frame ``s^0..s^n``."""

    matrix: np.ndarray
    point: np.ndarray
    form_kind: str  # "H" or "K"


def canonical_section(z):
    """Dual-frame components (1, z^1, ..., z^n) of the evaluation covector ``j_z(u) -> u(z)``."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    return np.concatenate([[1.0 + 0j], z])


def _jet_gram(jet, sign):
    n = jet.n
    metric = metric_at(jet)
    phi = jet.d().real
    dphi = np.array([jet.d((p,)) for p in range(n)])
    zeta = canonical_section(jet.point)
    # rows: components of du_a -/+ u_a dphi for u_a in (1, z^1, ..., z^n)
    U = np.vstack([np.zeros(n), np.eye(n)]) - sign * np.outer(zeta, dphi)
    inner = U @ metric.g_upper @ U.conj().T
    return phi, zeta, inner


def h_matrix_at(jet):
    phi, zeta, inner = _jet_gram(jet, +1)
    M = np.exp(-phi) * (np.outer(zeta, zeta.conj()) + inner)
    M = 0.5 * (M + M.conj().T)
    form = JetHermitianMatrix(M, jet.point, "H")
    try:
        np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        raise NotKahlerError(f"H is not positive definite at z={jet.point}") from None
    return form


def k_matrix_at(jet):
    """Matrix of K; signature is not enforced here, see :func:`signature_of`."""
    phi, zeta, inner = _jet_gram(jet, -1)
    M = np.exp(phi) * (np.outer(zeta, zeta.conj()) - inner)
    M = 0.5 * (M + M.conj().T)
    return JetHermitianMatrix(M, jet.point, "K")


def h_field(spec):
    """``z -> H(z)`` as an ndarray-valued function."""
    return lambda z: h_matrix_at(eval_jet(spec, z, 2)).matrix


def k_field(spec):
    return lambda z: k_matrix_at(eval_jet(spec, z, 2)).matrix


def form_field(spec, form_kind):
    if form_kind == "H":
        return h_field(spec)
    if form_kind == "K":
        return k_field(spec)
    raise ValueError(f"form_kind must be 'H' or 'K', got {form_kind!r}")


def _as_matrix(M):
    return M.matrix if isinstance(M, JetHermitianMatrix) else np.asarray(M)


def dual_quadratic(M, v):
    """Value of the dual form ``M^vee = (M^-1)^t`` on the covector ``v``."""
    M = _as_matrix(M)
    v = np.asarray(v, dtype=complex)
    if np.linalg.cond(M) > 1e14:
        raise SingularFormError("cannot dualise a singular Hermitian form")
    dual = np.linalg.inv(M).T
    return float(np.real(v @ dual @ v.conj()))


def quotient_identity_residual(jet):
    """Deviation of the dual forms on the canonical covector from ``h^-1`` (H) and ``h`` (K).

    Both entries vanish for every Kähler potential.
    """
    phi = jet.d().real
    v = canonical_section(jet.point)
    r_h = abs(dual_quadratic(h_matrix_at(jet), v) - np.exp(phi))
    r_k = abs(dual_quadratic(k_matrix_at(jet), v) - np.exp(-phi))
    return r_h, r_k


def signature_of(M):
    """(number of positive, number of negative) eigenvalues."""
    M = _as_matrix(M)
    lam = np.linalg.eigvalsh(0.5 * (M + M.conj().T))
    scale = float(np.max(np.abs(lam)))
    if scale == 0 or np.min(np.abs(lam)) < 1e-10 * scale:
        raise DegenerateFormError(f"degenerate form: eigenvalues {lam}")
    return int(np.sum(lam > 0)), int(np.sum(lam < 0))
