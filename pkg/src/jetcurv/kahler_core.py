"""Metric, curvature tensor and holomorphic sectional curvature from jets."""

from dataclasses import dataclass

import numpy as np

from .errors import NotKahlerError, UnsupportedOrderError


@dataclass(eq=False)
class MetricData:
    """``g_lower[i, j] = g_{i jbar}``; ``g_upper`` is its inverse transpose."""

    g_lower: np.ndarray
    g_upper: np.ndarray
    point: np.ndarray


@dataclass(eq=False)
class CurvatureTensor:
    """``R[i, j, k, l] = R_{i jbar k lbar}``."""

    R: np.ndarray
    point: np.ndarray

    def symmetry_defect(self):
        """Largest violation of the Kähler symmetries and of reality."""
        R = self.R
        swap_ik = np.max(np.abs(R - R.transpose(2, 1, 0, 3)))
        swap_jl = np.max(np.abs(R - R.transpose(0, 3, 2, 1)))
        # R_{j ibar l kbar} = conj(R_{i jbar k lbar})
        real = np.max(np.abs(R.transpose(1, 0, 3, 2) - np.conj(R)))
        return float(max(swap_ik, swap_jl, real))


def _require(jet, order):
    if jet.order < order:
        raise UnsupportedOrderError(f"need a jet of order >= {order}, got {jet.order}")


def _metric_lower(jet):
    n = jet.n
    return np.array([[jet.d((i,), (j,)) for j in range(n)] for i in range(n)])


def metric_at(jet):
    _require(jet, 2)
    g = _metric_lower(jet)
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        raise NotKahlerError(f"not a Kähler metric at z={jet.point}: g is not positive definite") from None
    return MetricData(g, np.linalg.inv(g).T, jet.point)


def riemann_at(jet):
    """Curvature tensor ``R_{i jbar k lbar} = -d_k dbar_l g_{i jbar} + g^{p qbar} (dbar_l g_{p jbar})(d_k g_{i qbar})``."""
    _require(jet, 4)
    n = jet.n
    m = metric_at(jet)
    rng = range(n)
    # dg[i, j, k] = d_k g_{i jbar};  dbg[p, j, l] = dbar_l g_{p jbar}
    dg = np.array([[[jet.d((i, k), (j,)) for k in rng] for j in rng] for i in rng])
    dbg = np.array([[[jet.d((p,), (j, l)) for l in rng] for j in rng] for p in rng])
    ddg = np.array(
        [[[[jet.d((i, k), (j, l)) for l in rng] for k in rng] for j in rng] for i in rng]
    )
    quad = np.einsum("pq,pjl,iqk->ijkl", m.g_upper, dbg, dg)
    tensor = CurvatureTensor(-ddg + quad, jet.point)
    return tensor


def chsc_model(g, kappa):
    """(kappa/2)(g_{i jbar} g_{k lbar} + g_{i lbar} g_{k jbar})."""
    return 0.5 * kappa * (np.einsum("ij,kl->ijkl", g, g) + np.einsum("il,kj->ijkl", g, g))


def chsc_residual(jet, kappa):
    """Max deviation of R from constant holomorphic sectional curvature ``kappa``.

    Normalised by ``max(1, max|g_{i jbar}|^2)`` so the value stays meaningful
    where the metric blows up near a ball boundary.
    """
    R = riemann_at(jet).R
    g = _metric_lower(jet)
    scale = max(1.0, float(np.max(np.abs(g))) ** 2)
    return float(np.max(np.abs(R - chsc_model(g, kappa)))) / scale


def hsc_of_direction(jet, v):
    """Holomorphic sectional curvature ``R(v, vbar, v, vbar) / g(v, vbar)^2`` of span(v)."""
    v = np.atleast_1d(np.asarray(v, dtype=complex))
    if not np.any(v):
        raise ValueError("direction must be non-zero")
    R = riemann_at(jet).R
    g = _metric_lower(jet)
    vb = np.conj(v)
    num = np.einsum("ijkl,i,j,k,l->", R, v, vb, v, vb)
    den = np.einsum("ij,i,j->", g, v, vb)
    return float((num / den**2).real)
