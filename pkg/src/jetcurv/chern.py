"""Chern connection and curvature of a Hermitian matrix field in a holomorphic frame.

A field is any callable ``z -> (r x r) Hermitian ndarray`` (typically
``jet_hermitian.h_field(spec)``). With ``dH = theta H`` the connection matrix is
``theta = (dH) H^-1`` and the curvature is ``Omega = dbar theta``; both are
obtained by nested central differences with Richardson extrapolation.
"""

from dataclasses import dataclass

import numpy as np

from . import _fd
from .errors import SingularFormError

FLAT_TOL = 1e-4
NONFLAT_TOL = 1e-2


@dataclass(eq=False)
class ConnectionForm:
    """``theta[k]`` is the dz^k component, an (r x r) matrix."""

    theta: np.ndarray
    point: np.ndarray

    def along(self, v):
        """theta evaluated on the tangent vector with dz-components ``v``."""
        return np.einsum("k,kab->ab", np.asarray(v, dtype=complex), self.theta)


@dataclass(eq=False)
class CurvatureForm:
    """``omega[k, l]`` is the dz^k ^ dzbar^l component."""

    omega: np.ndarray
    point: np.ndarray


def _step(z, step):
    return _fd.default_step(z) if step is None else step


def _theta(field, z, step):
    H = np.asarray(field(z))
    if np.linalg.cond(H) > 1e14:
        raise SingularFormError(f"Hermitian field is singular at z={z}")
    dH, _ = _fd.wirtinger_gradient(field, z, step)
    return dH @ np.linalg.inv(H)


def connection_at(field, z, step=None):
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    return ConnectionForm(_theta(field, z, _step(z, step)), z)


def curvature_at(field, z, step=None):
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    h = _step(z, step)
    _, dbar = _fd.wirtinger_gradient(lambda w: _theta(field, w, h), z, h)
    # dbar[l, k] = dbar_l theta_k
    return CurvatureForm(np.swapaxes(dbar, 0, 1), z)


def flatness_norm(field, z, step=None):
    """max_{k,l} max-entry |Omega_{k lbar}|, over max(1, max-entry |H(z)|)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    omega = curvature_at(field, z, step).omega
    scale = max(1.0, float(np.max(np.abs(field(z)))))
    return float(np.max(np.abs(omega))) / scale


def flatness_verdict(norm, flat_tol=FLAT_TOL, nonflat_tol=NONFLAT_TOL):
    """"flat", "non-flat", or "inconclusive" when the norm falls in the gap."""
    if norm < flat_tol:
        return "flat"
    if norm > nonflat_tol:
        return "non-flat"
    return "inconclusive"
