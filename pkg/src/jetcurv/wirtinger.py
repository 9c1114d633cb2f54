"""Kähler potentials and their mixed Wirtinger jets.

A jet of order ``m`` at ``z`` holds ``D^{alpha,beta} phi(z)`` for all
multi-indices with ``|alpha| + |beta| <= m``, where ``alpha`` counts
holomorphic derivatives ``d/dz_i`` and ``beta`` anti-holomorphic ones
``d/dzbar_j``. Built-in potential families are differentiated exactly through
truncated power series; arbitrary callables go through ``fd_jet``.
"""

import itertools
import json
import math
from fractions import Fraction
from dataclasses import dataclass, field
from math import comb, factorial

import numpy as np

from ._series import Series, basis
from .errors import ConfigError, DomainError, EvaluationError, UnsupportedOrderError

KINDS = (
    "fubini_study",
    "hyperbolic",
    "euclidean",
    "gl_pullback_fs",
    "u1n_pullback_ch",
    "perturbed_fs",
    "polynomial",
)
HYPERBOLIC_KINDS = ("hyperbolic", "u1n_pullback_ch")
MAX_DIM = 8
MAX_ORDER = 5
MAX_FD_ORDER = 4


def lorentz_form(n):
    """diag(1, -1, ..., -1) of size n+1."""
    return np.diag([1.0] + [-1.0] * n)


@dataclass(eq=False)
class PotentialSpec:
    """A real Kähler potential on the ball ``|z| < radius`` in C^n.

    ``radius`` defaults to 0.99 for the hyperbolic kinds and to ``inf``
    (all of C^n) otherwise.

    ``params`` by kind:

    * ``gl_pullback_fs``: ``A`` invertible (n+1)x(n+1), ``phi = log |A(1,z)|^2``.
    * ``u1n_pullback_ch``: ``A`` in U(1,n), ``phi = -log(1 - |F_A(z)|^2)``
      where ``F_A(z)`` are the affine coordinates of ``[A(1,z)]``.
    * ``perturbed_fs``: ``eps``, ``phi = log(1+|z|^2) + eps * sum |z_i|^4``.
    * ``polynomial``: ``terms``, a list of ``(alpha, beta, c)`` with
      ``phi = sum c z^alpha zbar^beta``; must be real.
    """

    kind: str
    n: int
    params: dict = field(default_factory=dict)
    radius: float = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown potential kind {self.kind!r}")
        if not 1 <= self.n <= MAX_DIM:
            raise ConfigError(f"dimension must be in 1..{MAX_DIM}, got {self.n}")
        if self.radius is None:
            self.radius = 0.99 if self.kind in HYPERBOLIC_KINDS else math.inf
        self.radius = float(self.radius)
        if self.radius <= 0:
            raise ConfigError("domain radius must be positive")
        if self.kind in HYPERBOLIC_KINDS and self.radius >= 1:
            raise ConfigError("hyperbolic potentials need radius < 1")
        self.params = dict(self.params)
        validate = getattr(self, f"_validate_{self.kind}", None)
        if validate is not None:
            validate()

    def _validate_gl_pullback_fs(self):
        A = np.asarray(self.params.get("A", np.eye(self.n + 1)), dtype=complex)
        if A.shape != (self.n + 1, self.n + 1):
            raise ConfigError(f"A must be {(self.n + 1,) * 2}, got {A.shape}")
        if np.linalg.cond(A) > 1e12:
            raise ConfigError("A is not invertible")
        self.params["A"] = A

    def _validate_u1n_pullback_ch(self):
        A = np.asarray(self.params.get("A", np.eye(self.n + 1)), dtype=complex)
        if A.shape != (self.n + 1, self.n + 1):
            raise ConfigError(f"A must be {(self.n + 1,) * 2}, got {A.shape}")
        J = lorentz_form(self.n)
        if np.max(np.abs(A.conj().T @ J @ A - J)) > 1e-12:
            raise ConfigError("A does not preserve diag(1,-1,...,-1)")
        self.params["A"] = A

    def _validate_perturbed_fs(self):
        self.params["eps"] = float(self.params.get("eps", 0.1))

    def _validate_polynomial(self):
        terms = []
        table = {}
        for alpha, beta, c in self.params.get("terms", []):
            alpha, beta = tuple(int(a) for a in alpha), tuple(int(b) for b in beta)
            if len(alpha) != self.n or len(beta) != self.n:
                raise ConfigError("multi-index length must equal n")
            c = complex(c)
            table[alpha, beta] = table.get((alpha, beta), 0) + c
            terms.append((alpha, beta, c))
        for (alpha, beta), c in table.items():
            if abs(table.get((beta, alpha), 0) - np.conj(c)) > 1e-12:
                raise ConfigError(f"polynomial is not real: coefficient {alpha},{beta} lacks its conjugate partner")
        self.params["terms"] = terms

    # -- domain ---------------------------------------------------------

    def check_point(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if z.shape != (self.n,):
            raise DomainError(f"expected a point in C^{self.n}, got shape {z.shape}")
        r2 = float(np.vdot(z, z).real)
        if r2 >= self.radius**2:
            raise DomainError(f"|z| = {np.sqrt(r2):.6g} outside ball of radius {self.radius}")
        if self.kind in HYPERBOLIC_KINDS:
            u = self._affine_image(z)
            if u[0].real**2 + u[0].imag**2 - np.sum(np.abs(u[1:]) ** 2) <= 0:
                raise DomainError("hyperbolic norm <= 0")
        return z

    def contains(self, z):
        try:
            self.check_point(z)
        except DomainError:
            return False
        return True

    def _affine_image(self, z):
        A = self.params.get("A", None)
        v = np.concatenate([[1.0], z])
        return v if A is None else A @ v

    # -- evaluation -----------------------------------------------------

    def value(self, z):
        """phi(z) from closed-form expressions."""
        z = self.check_point(z)
        r2 = float(np.vdot(z, z).real)
        kind = self.kind
        if kind == "euclidean":
            return r2
        if kind == "fubini_study":
            return float(np.log1p(r2))
        if kind == "hyperbolic":
            return float(-np.log1p(-r2))
        if kind == "perturbed_fs":
            return float(np.log1p(r2) + self.params["eps"] * np.sum(np.abs(z) ** 4))
        if kind == "gl_pullback_fs":
            u = self._affine_image(z)
            return float(np.log(np.vdot(u, u).real))
        if kind == "u1n_pullback_ch":
            u = self._affine_image(z)
            f = u[1:] / u[0]
            return float(-np.log1p(-np.vdot(f, f).real))
        total = 0.0
        for alpha, beta, c in self.params["terms"]:
            total += c * np.prod(z ** np.array(alpha)) * np.prod(np.conj(z) ** np.array(beta))
        return float(np.real(total))

    def series(self, z, order):
        """Truncated Taylor series of phi at z in (w, wbar)."""
        z = self.check_point(z)
        n = self.n
        B = basis(2 * n, order)
        w = [Series.variable(B, i, z[i]) for i in range(n)]
        wb = [Series.variable(B, n + i, np.conj(z[i])) for i in range(n)]
        kind = self.kind
        if kind == "euclidean":
            return sum((w[i] * wb[i] for i in range(n)), Series.zeros(B))
        if kind in ("fubini_study", "perturbed_fs"):
            out = _log_hermitian_quadratic(np.eye(n + 1), z, np.ones(n + 1), B)
            if kind == "perturbed_fs":
                eps = self.params["eps"]
                for i in range(n):
                    out = out + eps * (w[i] * wb[i]) ** 2
            return out
        if kind == "gl_pullback_fs":
            return _log_hermitian_quadratic(self.params["A"], z, np.ones(n + 1), B)
        if kind == "hyperbolic":
            signs = np.diag(lorentz_form(n))
            return -_log_hermitian_quadratic(np.eye(n + 1), z, signs, B)
        if kind == "u1n_pullback_ch":
            A = self.params["A"]
            signs = np.diag(lorentz_form(n))
            u0 = _affine(A[0], w, B)
            u0b = _affine(np.conj(A[0]), wb, B)
            return -_log_hermitian_quadratic(A, z, signs, B) + u0.log() + u0b.log()
        out = Series.zeros(B)
        for alpha, beta, c in self.params["terms"]:
            term = Series.constant(B, c)
            for i in range(n):
                if alpha[i]:
                    term = term * w[i] ** alpha[i]
                if beta[i]:
                    term = term * wb[i] ** beta[i]
            out = out + term
        return out


def _affine(row, w, B):
    out = Series.constant(B, row[0])
    for i, wi in enumerate(w):
        if row[i + 1] != 0:
            out = out + row[i + 1] * wi
    return out


def _log_hermitian_quadratic(A, z, signs, B):
    """log sum_a signs[a] |(A (1, z + w))_a|^2 as a series in (w, wbar)."""
    A = np.asarray(A, dtype=complex)
    n = len(z)
    # Q = zeta^t P conj(zeta) with zeta = (1, z + w)
    P = A.T @ (signs[:, None] * A.conj())
    zeta = np.concatenate([[1.0], z])
    c = np.zeros(B.size, dtype=complex)
    c[0] = zeta @ P @ zeta.conj()
    if B.order >= 1:
        c[B.linear[:n]] = P[1:, :] @ zeta.conj()
        c[B.linear[n:]] = zeta @ P[:, 1:]
    if B.order >= 2:
        c[B.quadratic[:n, n:]] = P[1:, 1:]
    return Series(B, c).log()


# -- jets ----------------------------------------------------------------


def multi_indices(n, order):
    """(alpha, beta) pairs in graded lexicographic storage order."""
    return [(e[:n], e[n:]) for e in basis(2 * n, order).exps]


class WirtingerJet:
    """All mixed Wirtinger derivatives of a real potential up to ``order``."""

    def __init__(self, point, order, coeffs):
        self.point = np.asarray(point, dtype=complex)
        self.order = int(order)
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self._basis = basis(2 * len(self.point), self.order)

    @property
    def n(self):
        return len(self.point)

    def __getitem__(self, key):
        alpha, beta = key
        return self.coeffs[self._basis.index[tuple(alpha) + tuple(beta)]]

    def d(self, holo=(), anti=()):
        """Derivative by coordinate indices, e.g. ``d((i, k), (j,))`` is d_i d_k dbar_j phi."""
        e = [0] * (2 * self.n)
        for i in holo:
            e[i] += 1
        for j in anti:
            e[self.n + j] += 1
        return self.coeffs[self._basis.index[tuple(e)]]

    def items(self):
        for (alpha, beta), c in zip(multi_indices(self.n, self.order), self.coeffs):
            yield alpha, beta, c

    def __repr__(self):
        return f"WirtingerJet(n={self.n}, order={self.order}, point={self.point})"


def _symmetrize(coeffs, B):
    # exact conjugate symmetry: a + conj(b) and b + conj(a) are conjugates bitwise
    return 0.5 * (coeffs + np.conj(coeffs[B.swap]))


def eval_jet(spec, z, order):
    """Exact jet of a potential (anything exposing ``series(z, order)``)."""
    if not 0 <= order <= MAX_ORDER:
        raise UnsupportedOrderError(f"order {order} not supported (max {MAX_ORDER})")
    s = spec.series(z, order)
    B = s.basis
    return WirtingerJet(np.atleast_1d(np.asarray(z, dtype=complex)), order, _symmetrize(s.c * B.weights, B))


def _central_weights(k, half):
    """Weights of the central stencil on offsets -half..half for the k-th derivative."""
    offsets = np.arange(-half, half + 1)
    V = np.vander(offsets, increasing=True).T.astype(float)
    rhs = np.zeros(len(offsets))
    rhs[k] = factorial(k)
    w = np.linalg.solve(V, rhs)
    # the exact weights are small rationals; snap away the solver's roundoff
    return {int(o): float(Fraction(c).limit_denominator(1000)) for o, c in zip(offsets, w) if abs(c) > 1e-12}


# 1D central stencils of fourth-order accuracy for derivative orders 0..4
_STENCILS = {0: {0: 1.0}, 1: _central_weights(1, 2), 2: _central_weights(2, 2),
             3: _central_weights(3, 3), 4: _central_weights(4, 3)}
# step per total derivative order; balances O(h^6) truncation against eps/h^k roundoff
_FD_STEPS = {1: 1e-2, 2: 1e-2, 3: 1e-2, 4: 2e-2}


def _wirtinger_to_real(a, b):
    """Coefficients of ((d_x - i d_y)/2)^a ((d_x + i d_y)/2)^b as {(p, q): c}."""
    out = {}
    for r in range(a + 1):
        for s in range(b + 1):
            c = comb(a, r) * comb(b, s) * (-1j) ** (a - r) * (1j) ** (b - s) / 2 ** (a + b)
            key = (r + s, a + b - r - s)
            out[key] = out.get(key, 0) + c
    return out


def fd_jet(phi, z, order, h=None):
    """Jet of a black-box real function by central differences.

    Parameters
    ----------
    phi : callable
        Real function of a complex n-vector.
    z : array_like
        Base point.
    order : int
        Maximum total derivative order, at most 4.
    h : float, optional
        Step for every order. By default each derivative order k uses its own
        step ``_FD_STEPS[k] * max(1, |z|)``.

    Notes
    -----
    Real partials come from tensor-product central stencils with one
    Richardson halving; Wirtinger derivatives are assembled from
    ``d = (d_x - i d_y)/2``, ``dbar = (d_x + i d_y)/2`` and finally
    conjugate-symmetrised.
    """
    if not 0 <= order <= MAX_FD_ORDER:
        raise UnsupportedOrderError(f"fd_jet supports order <= {MAX_FD_ORDER}")
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    n = len(z)
    x0 = np.concatenate([z.real, z.imag])
    scale = max(1.0, float(np.linalg.norm(z)))
    values = {}

    def f_at(step, offsets):
        key = (step, offsets)
        v = values.get(key)
        if v is None:
            x = x0 + step * np.array(offsets, dtype=float)
            v = float(phi(x[:n] + 1j * x[n:]))
            if not np.isfinite(v):
                raise EvaluationError(f"potential returned {v} at {x[:n] + 1j * x[n:]}")
            values[key] = v
        return v

    def real_partial(gamma, step):
        k = sum(gamma)
        stencils = [_STENCILS[g].items() for g in gamma]
        total = 0.0
        for combo in itertools.product(*stencils):
            offsets = tuple(o for o, _ in combo)
            weight = np.prod([w for _, w in combo])
            total += weight * f_at(step, offsets)
        return total / step**k

    partial_cache = {}

    def real_derivative(gamma):
        d = partial_cache.get(gamma)
        if d is None:
            k = sum(gamma)
            if k == 0:
                d = f_at(0.0, (0,) * (2 * n))
            else:
                step = (h if h is not None else _FD_STEPS[k] * scale)
                d = (16 * real_partial(gamma, step / 2) - real_partial(gamma, step)) / 15
            partial_cache[gamma] = d
        return d

    B = basis(2 * n, order)
    coeffs = np.zeros(B.size, dtype=complex)
    for idx, e in enumerate(B.exps):
        alpha, beta = e[:n], e[n:]
        per_coord = [_wirtinger_to_real(alpha[j], beta[j]).items() for j in range(n)]
        total = 0j
        for combo in itertools.product(*per_coord):
            c = np.prod([cc for _, cc in combo])
            gamma = tuple(pq[0] for pq, _ in combo) + tuple(pq[1] for pq, _ in combo)
            total += c * real_derivative(gamma)
        coeffs[idx] = total
    return WirtingerJet(z, order, _symmetrize(coeffs, B))


# -- potential files -----------------------------------------------------


def _cpx(pair):
    if isinstance(pair, (int, float)):
        return complex(pair)
    re, im = pair
    return complex(re, im)


def _pair(c):
    c = complex(c)
    return [c.real, c.imag]


def spec_from_dict(data):
    try:
        kind = data["kind"]
        n = int(data["n"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"potential spec needs 'kind' and 'n': {exc}") from None
    raw = data.get("params", {}) or {}
    params = {}
    if "A" in raw:
        params["A"] = np.array([[_cpx(x) for x in row] for row in raw["A"]])
    if "eps" in raw:
        params["eps"] = float(raw["eps"])
    if "terms" in raw:
        params["terms"] = [(t["alpha"], t["beta"], _cpx(t["c"])) for t in raw["terms"]]
    radius = data.get("radius")
    return PotentialSpec(kind, n, params, None if radius is None else float(radius))


def spec_to_dict(spec):
    params = {}
    if "A" in spec.params:
        params["A"] = [[_pair(x) for x in row] for row in spec.params["A"]]
    if "eps" in spec.params:
        params["eps"] = spec.params["eps"]
    if "terms" in spec.params:
        params["terms"] = [
            {"alpha": list(a), "beta": list(b), "c": _pair(c)} for a, b, c in spec.params["terms"]
        ]
    radius = None if math.isinf(spec.radius) else spec.radius
    return {"kind": spec.kind, "n": spec.n, "radius": radius, "params": params}


def load_spec(path):
    """Read a potential spec file.

    JSON object with ``kind``, ``n``, ``radius`` (null for all of C^n) and
    ``params``; complex numbers are ``[re, im]`` pairs and polynomial terms are
    ``{"alpha": [...], "beta": [...], "c": [re, im]}``. Multi-indices list the
    exponent of each coordinate; jets are stored in graded lexicographic order.
    """
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read potential file {path}: {exc}") from None
    return spec_from_dict(data)


def save_spec(spec, path):
    with open(path, "w") as fh:
        json.dump(spec_to_dict(spec), fh, indent=2)
