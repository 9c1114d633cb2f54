"""Normalized coordinates and potential gauge at a point, and the identities they imply.

``normalize_at(spec, p)`` returns a potential in new coordinates ``w`` with

    z(w) = p + L (w - 1/2 Gamma(w, w))
    phi'(w) = phi(z(w)) - 2 Re(c + a_i w^i + 1/2 b_ij w^i w^j)

chosen so that at ``w = 0``: ``g = I``, ``dg = 0`` (normal coordinates) and
``phi = dphi = d_i d_j phi = 0``. ``Gamma`` are the Christoffel symbols of the
linearly normalized metric at ``p``. With ``h = exp(-phi')`` this is exactly
``h(0) = 1``, ``dh(0) = 0`` and ``d_i d_j h(0) = 0``.
"""

from dataclasses import asdict, dataclass, field

import numpy as np

from . import _fd
from ._series import Series, basis, compose
from .errors import NotKahlerError
from .jet_hermitian import h_field, h_matrix_at, k_field, k_matrix_at
from .kahler_core import metric_at, riemann_at
from .wirtinger import WirtingerJet, eval_jet

FD_TOL = 1e-4
ALGEBRAIC_TOL = 1e-9


@dataclass(eq=False)
class GaugeNormalization:
    base_point: np.ndarray
    L: np.ndarray
    christoffel: np.ndarray  # christoffel[i, j, k] = Gamma^i_{jk}, symmetric in j, k
    c: float
    a: np.ndarray
    b: np.ndarray

    @classmethod
    def identity(cls, p):
        p = np.atleast_1d(np.asarray(p, dtype=complex))
        n = len(p)
        return cls(p, np.eye(n, dtype=complex), np.zeros((n, n, n), dtype=complex), 0.0,
                   np.zeros(n, dtype=complex), np.zeros((n, n), dtype=complex))

    def coordinates(self, w):
        """z(w)."""
        w = np.asarray(w, dtype=complex)
        quad = np.einsum("ijk,j,k->i", self.christoffel, w, w)
        return self.base_point + self.L @ (w - 0.5 * quad)

    def holomorphic_shift(self, w):
        w = np.asarray(w, dtype=complex)
        return self.c + self.a @ w + 0.5 * w @ self.b @ w


class NormalizedPotential:
    """``phi'`` of a base potential under a :class:`GaugeNormalization`; duck-types ``PotentialSpec``."""

    def __init__(self, base, gauge):
        self.base = base
        self.gauge = gauge
        self.n = base.n
        self.kind = f"normalized:{base.kind}"

    def check_point(self, w):
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        self.base.check_point(self.gauge.coordinates(w))
        return w

    def contains(self, w):
        return self.base.contains(self.gauge.coordinates(np.atleast_1d(np.asarray(w, dtype=complex))))

    def value(self, w):
        w = self.check_point(w)
        return self.base.value(self.gauge.coordinates(w)) - 2.0 * float(np.real(self.gauge.holomorphic_shift(w)))

    def series(self, w0, order):
        w0 = self.check_point(w0)
        gauge = self.gauge
        n = self.n
        B = basis(2 * n, order)
        outer = self.base.series(gauge.coordinates(w0), order)

        dw = [Series.variable(B, i) for i in range(n)]
        # u(w0 + dw) - u(w0) with u(w) = w - Gamma(w, w)/2
        du = []
        for i in range(n):
            s = dw[i]
            for j in range(n):
                for k in range(n):
                    g = gauge.christoffel[i, j, k]
                    if g != 0:
                        s = s - g * (w0[j] * dw[k] + 0.5 * dw[j] * dw[k])
            du.append(s)
        delta = []
        for i in range(n):
            s = Series.zeros(B)
            for j in range(n):
                if gauge.L[i, j] != 0:
                    s = s + gauge.L[i, j] * du[j]
            delta.append(s)
        images = delta + [d.conj_swap() for d in delta]
        out = compose(outer, images, B)

        w = [Series.variable(B, i, w0[i]) for i in range(n)]
        shift = Series.constant(B, gauge.c)
        for i in range(n):
            shift = shift + gauge.a[i] * w[i]
            for j in range(n):
                shift = shift + 0.5 * gauge.b[i, j] * (w[i] * w[j])
        return out - (shift + shift.conj_swap())


def normalize_at(spec, p):
    """Normalized coordinates and potential gauge of ``spec`` centred at ``p``."""
    p = spec.check_point(p)
    n = spec.n
    zero = np.zeros(n, dtype=complex)
    g = metric_at(eval_jet(spec, p, 2)).g_lower
    try:
        C = np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        raise NotKahlerError(f"metric not positive definite at {p}") from None
    gauge = GaugeNormalization.identity(p)
    # g' = L^t g conj(L) = I  for  L = C^{-t}
    gauge.L = np.linalg.inv(C).T

    jet = eval_jet(NormalizedPotential(spec, gauge), zero, 3)
    g_lin = np.array([[jet.d((i,), (j,)) for j in range(n)] for i in range(n)])
    ginv = np.linalg.inv(g_lin)
    dg = np.array([[[jet.d((a, c), (l,)) for l in range(n)] for c in range(n)] for a in range(n)])
    # Gamma^j_{ac} = sum_l (g^-1)_{l j} d_c g_{a lbar}
    gauge.christoffel = np.einsum("lj,acl->jac", ginv, dg)

    jet = eval_jet(NormalizedPotential(spec, gauge), zero, 2)
    gauge.c = 0.5 * float(jet.d().real)
    gauge.a = np.array([jet.d((i,)) for i in range(n)])
    gauge.b = np.array([[jet.d((i, j)) for j in range(n)] for i in range(n)])
    return NormalizedPotential(spec, gauge)


# -- claims ----------------------------------------------------------------


@dataclass
class ClaimCheck:
    name: str
    value: float
    tol: float
    kind: str  # "algebraic" or "fd"
    passed: bool
    details: dict = field(default_factory=dict)


@dataclass
class ClaimReport:
    potential: str
    point: list
    normalized: bool
    checks: list

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self):
        return {
            "potential": self.potential,
            "point": self.point,
            "normalized": self.normalized,
            "passed": self.passed,
            "checks": [asdict(c) for c in self.checks],
        }


def h_jet(spec, z, order):
    """Jet of ``h = exp(-phi)``."""
    s = (-spec.series(z, order)).exp()
    return WirtingerJet(np.atleast_1d(np.asarray(z, dtype=complex)), order, s.c * s.basis.weights)


def _check(name, value, kind, **details):
    tol = ALGEBRAIC_TOL if kind == "algebraic" else FD_TOL
    value = float(value)
    return ClaimCheck(name, value, tol, kind, bool(value < tol), details)


def verify_claims(spec, p, normalize=True, step=None):
    """Check the normalized-gauge identities for H and K at ``p``.

    With ``normalize=False`` the checks run on ``spec`` itself at ``p``,
    which is how a missing normalization shows up (dH(0) no longer vanishes).
    """
    p = spec.check_point(p)
    n = spec.n
    if normalize:
        target, x0 = normalize_at(spec, p), np.zeros(n, dtype=complex)
    else:
        target, x0 = spec, p
    h = _fd.default_step(x0) if step is None else step
    rng = range(n)
    eye = np.eye(n)

    jet = eval_jet(target, x0, 4)
    hj = h_jet(target, x0, 3)
    g = metric_at(jet).g_lower
    R = riemann_at(jet).R
    # R_{j ibar k lbar} rearranged to [i, j, k, l]
    R_swapped = R.transpose(1, 0, 2, 3)
    deltas = np.einsum("ij,kl->ijkl", eye, eye) + np.einsum("ik,jl->ijkl", eye, eye)

    checks = []
    gauge_terms = [abs(jet.d())] + [abs(jet.d((i,))) for i in rng] + [abs(jet.d((i, j))) for i in rng for j in rng]
    checks.append(_check("potential_gauge", max(gauge_terms), "algebraic"))
    dg = [abs(jet.d((i, k), (j,))) for i in rng for j in rng for k in rng]
    checks.append(_check("normal_coordinates", max([np.max(np.abs(g - eye))] + dg), "algebraic"))
    h_terms = [abs(hj.d() - 1)] + [abs(hj.d((i,))) for i in rng] + [abs(hj.d((i, j))) for i in rng for j in rng]
    checks.append(_check("h_normalization", max(h_terms), "algebraic"))
    ddh = np.array([[hj.d((k,), (l,)) for l in rng] for k in rng])
    checks.append(_check("ddbar_h", np.max(np.abs(ddh + eye)), "algebraic"))
    third = [abs(hj.d((k, q), (l,))) for k in rng for l in rng for q in rng]
    third += [abs(hj.d((k,), (l, q))) for k in rng for l in rng for q in rng]
    checks.append(_check("third_order_h", max(third), "algebraic"))

    for form_kind, field_fn, matrix_fn in (("H", h_field, h_matrix_at), ("K", k_field, k_matrix_at)):
        fld = field_fn(target)
        M0 = matrix_fn(eval_jet(target, x0, 2)).matrix
        ideal = np.eye(n + 1) if form_kind == "H" else np.diag([1.0] + [-1.0] * n)
        checks.append(_check(f"{form_kind}_at_origin", np.max(np.abs(M0 - ideal)), "algebraic"))
        d, dbar = _fd.wirtinger_gradient(fld, x0, h)
        checks.append(_check(f"d{form_kind}_vanishes", max(np.max(np.abs(d)), np.max(np.abs(dbar))), "fd"))
        ddb = _fd.ddbar(fld, x0, h)  # [k, l, a, b]
        row0 = max(np.max(np.abs(ddb[:, :, 0, :])), np.max(np.abs(ddb[:, :, :, 0])))
        checks.append(_check(f"ddbar_{form_kind}_row0", row0, "fd"))
        block = ddb[:, :, 1:, 1:].transpose(2, 3, 0, 1)  # [i, j, k, l]
        predicted = R_swapped - deltas if form_kind == "H" else -R_swapped - deltas
        checks.append(_check(
            f"ddbar_{form_kind}_vs_riemann",
            np.max(np.abs(block - predicted)),
            "fd",
            ddbar_11=[float(block[0, 0, 0, 0].real), float(block[0, 0, 0, 0].imag)],
        ))
    return ClaimReport(spec.kind, [[float(v.real), float(v.imag)] for v in p], normalize, checks)
