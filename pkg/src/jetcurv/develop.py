"""Parallel frames of the flat jet connection and the developing map.

A frame is stored as a matrix ``A`` whose column ``a`` holds the coordinates
of ``e_a`` in the jet frame, so the Gram matrix of the frame is
``A^t M(z) conj(A)``. Parallel sections along a path ``gamma`` solve
``dA/dt = -theta(gamma')^t A``.

The developing map sends ``z`` to the components of the evaluation covector
``(1, z^1, ..., z^n)`` in the dual of a parallel orthonormal frame,
``w = A^t (1, z)``, followed by one fixed normalization making ``w(0) = e_0``.
"""

from dataclasses import dataclass

import numpy as np

from . import _fd
from .chern import FLAT_TOL, connection_at, flatness_norm
from .errors import DomainError, NotFlatError, SingularFormError, TransportError
from .jet_hermitian import canonical_section, form_field
from .kahler_core import metric_at
from .wirtinger import eval_jet, lorentz_form

STEPS_PER_UNIT = 200
DEFAULT_RTOL = 1e-6


def model_gram(form_kind, n):
    return np.eye(n + 1) if form_kind == "H" else lorentz_form(n)


@dataclass(eq=False)
class ParallelFrame:
    base: np.ndarray
    point: np.ndarray
    A: np.ndarray
    form_kind: str
    gram_drift: float = 0.0


@dataclass(eq=False)
class DevelopingMapSample:
    point: np.ndarray
    w: np.ndarray
    form_kind: str

    @property
    def model_coordinates(self):
        """Affine coordinates w[1:]/w[0] of f(z)."""
        return self.w[1:] / self.w[0]


def _gram(A, M):
    return A.T @ M @ A.conj()


def _drift(G, G0):
    return float(np.max(np.abs(G - G0))) / max(1.0, float(np.max(np.abs(G0))))


def _transport(field, path, A0, rtol, steps_per_unit, step):
    path = [np.atleast_1d(np.asarray(p, dtype=complex)) for p in path]
    A = np.array(A0, dtype=complex)
    G0 = _gram(A, field(path[0]))
    worst = 0.0
    total_steps = 0

    def theta_along(x, v):
        return -connection_at(field, x, step).along(v).T

    for start, end in zip(path[:-1], path[1:]):
        v = end - start
        length = float(np.linalg.norm(v))
        if length == 0:
            continue
        N = max(1, int(np.ceil(steps_per_unit * length)))
        total_steps += N
        dt = 1.0 / N
        # the midpoint coefficient serves k2 and k3; the endpoint one is reused by the next step
        T_end = theta_along(start, v)
        for i in range(N):
            x = start + i * dt * v
            T0, T_mid, T_end = T_end, theta_along(x + 0.5 * dt * v, v), theta_along(x + dt * v, v)
            k1 = T0 @ A
            k2 = T_mid @ (A + 0.5 * dt * k1)
            k3 = T_mid @ (A + 0.5 * dt * k2)
            k4 = T_end @ (A + dt * k3)
            A = A + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
            worst = max(worst, _drift(_gram(A, field(x + dt * v)), G0))
    if worst > rtol:
        # RK4 global error scales like N^-4
        factor = (worst / rtol) ** 0.25 * 1.5
        suggested = int(np.ceil(max(total_steps, 1) * factor))
        raise TransportError(
            f"transport accuracy failure: Gram drift {worst:.3g} > {rtol:.3g}; "
            f"try about {suggested} steps",
            suggested_steps=suggested,
        )
    return A, worst


def transport(field, path, A0, rtol=DEFAULT_RTOL, steps_per_unit=STEPS_PER_UNIT, step=None):
    """Parallel-transport the frame ``A0`` along a polyline (list of points); return the final frame.

    Uses classical RK4 with ``ceil(steps_per_unit * length)`` steps per segment and
    raises :class:`TransportError` if the Gram matrix drifts by more than ``rtol``.
    """
    return _transport(field, path, A0, rtol, steps_per_unit, step)[0]


def _gram_schmidt(M, form_kind, first=None):
    """Columns orthonormal for ``x^t M conj(y)``, positive vector first.

    ``first`` optionally fixes the direction of the first column.
    """
    r = M.shape[0]
    G0 = model_gram(form_kind, r - 1)
    candidates = [np.eye(r)[:, a] for a in range(r)]
    if first is not None:
        candidates = [np.asarray(first, dtype=complex)] + candidates
    cols = []
    for b in candidates:
        if len(cols) == r:
            break
        x = b.astype(complex)
        for e in cols:
            s = (e @ M @ e.conj()).real
            x = x - (x @ M @ e.conj()) / s * e
        norm2 = (x @ M @ x.conj()).real
        want = G0[len(cols), len(cols)]
        if abs(norm2) < 1e-10 * max(1.0, np.linalg.norm(x) ** 2) or np.sign(norm2) != want:
            continue
        cols.append(x / np.sqrt(abs(norm2)))
    if len(cols) < r:
        return None
    return np.column_stack(cols)


def initial_frame(M, form_kind):
    """``A0`` with ``A0^t M conj(A0)`` equal to I (H) or diag(1,-1,...,-1) (K)."""
    M = np.asarray(M)
    if form_kind == "H":
        C = np.linalg.cholesky(M)
        return np.linalg.inv(C).T
    A = _gram_schmidt(M, form_kind)
    if A is None:
        lam, U = np.linalg.eigh(M)
        if np.sum(lam > 0) != 1 or np.min(np.abs(lam)) < 1e-12 * np.max(np.abs(lam)):
            raise SingularFormError("K does not have signature (1, n)")
        order = np.argsort(-lam)
        lam, U = lam[order], U[:, order]
        A = U.conj() / np.sqrt(np.abs(lam))
    return A


class Developer:
    """Developing map of one potential; caches the base frame and nearby samples."""

    def __init__(self, spec, form_kind, rtol=DEFAULT_RTOL, steps_per_unit=STEPS_PER_UNIT,
                 step=None, flat_tol=FLAT_TOL, check_flat=True):
        if form_kind not in ("H", "K"):
            raise ValueError("form_kind must be 'H' or 'K'")
        self.spec = spec
        self.form_kind = form_kind
        self.rtol = rtol
        self.steps_per_unit = steps_per_unit
        self.step = step
        self.flat_tol = flat_tol
        self.check_flat = check_flat
        self.field = form_field(spec, form_kind)
        n = spec.n
        self.base = np.zeros(n, dtype=complex)
        self.G0 = model_gram(form_kind, n)
        self.A0 = initial_frame(self.field(self.base), form_kind)
        w0 = self.A0.T @ canonical_section(self.base)
        q0 = self.quadratic(w0)
        if q0 <= 0:
            raise DomainError("image left U+: base point has non-positive norm")
        B = _gram_schmidt(np.diag(np.diag(self.G0)).astype(complex), form_kind, first=w0 / np.sqrt(q0))
        self.normalizer = np.linalg.inv(B) / np.sqrt(q0)
        self._samples = {}

    def quadratic(self, w):
        """Model norm of w: |w|^2 (H) or |w_0|^2 - |w_1|^2 - ... (K)."""
        return float(np.real(np.sum(np.diag(self.G0) * np.abs(w) ** 2)))

    def _require_flat(self, z):
        for t in np.linspace(0.0, 1.0, 5):
            x = t * z
            norm = flatness_norm(self.field, x, self.step)
            if norm >= self.flat_tol:
                raise NotFlatError(
                    f"connection not flat: developing map undefined (flatness {norm:.3g} at {x})"
                )

    def frame(self, z):
        z = self.spec.check_point(z)
        if self.check_flat:
            self._require_flat(z)
        A, drift = _transport(self.field, [self.base, z], self.A0, self.rtol, self.steps_per_unit, self.step)
        return ParallelFrame(self.base, z, A, self.form_kind, drift)

    def w_of(self, frame):
        return self.normalizer @ frame.A.T @ canonical_section(frame.point)

    def sample(self, frame):
        w = self.w_of(frame)
        if self.form_kind == "K" and self.quadratic(w) <= 0:
            raise DomainError(f"image left U+ at z={frame.point}")
        return DevelopingMapSample(frame.point, w, self.form_kind)

    def nearby(self, frame, z):
        """w at ``z`` by transporting ``frame`` along the straight segment to ``z``."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        key = (frame.point.tobytes(), z.tobytes())
        w = self._samples.get(key)
        if w is None:
            A, _ = _transport(self.field, [frame.point, z], frame.A, self.rtol, self.steps_per_unit, self.step)
            w = self.w_of(ParallelFrame(self.base, z, A, self.form_kind))
            self._samples[key] = w
        return w

    def _fd_step(self, z):
        return _fd.default_step(z) if self.step is None else self.step

    def pullback_residual(self, z, frame=None):
        """max |ddbar(+-log q(w)) - g| at z."""
        frame = frame or self.frame(z)
        sign = 1.0 if self.form_kind == "H" else -1.0
        F = lambda x: sign * np.log(self.quadratic(self.nearby(frame, x)))
        ddb = _fd.ddbar(F, frame.point, self._fd_step(frame.point))
        g = metric_at(eval_jet(self.spec, frame.point, 2)).g_lower
        return float(np.max(np.abs(ddb - g)))

    def roundtrip_residual(self, z, frame=None):
        """Pull the model potential back through the affine coordinates of f and compare metrics."""
        frame = frame or self.frame(z)

        def model(x):
            w = self.nearby(frame, x)
            zeta = w[1:] / w[0]
            r2 = float(np.vdot(zeta, zeta).real)
            return np.log1p(r2) if self.form_kind == "H" else -np.log1p(-r2)

        ddb = _fd.ddbar(model, frame.point, self._fd_step(frame.point))
        g = metric_at(eval_jet(self.spec, frame.point, 2)).g_lower
        return float(np.max(np.abs(ddb - g)))

    def holomorphy_residual(self, z, frame=None):
        """max |dbar w| at z by central differences."""
        frame = frame or self.frame(z)
        _, dbar = _fd.wirtinger_gradient(lambda x: self.nearby(frame, x), frame.point, self._fd_step(frame.point))
        return float(np.max(np.abs(dbar)))

    def gram_residual(self, frame):
        return _drift(_gram(frame.A, self.field(frame.point)), self.G0)


def orthonormal_parallel_frame(spec, form_kind, z, rtol=DEFAULT_RTOL, **kwargs):
    """Parallel orthonormal frame at z, transported radially from the origin."""
    return Developer(spec, form_kind, rtol, **kwargs).frame(z)


def developing_map(spec, form_kind, z, rtol=DEFAULT_RTOL, **kwargs):
    dev = Developer(spec, form_kind, rtol, **kwargs)
    return dev.sample(dev.frame(z))


def pullback_residual(spec, form_kind, z, rtol=DEFAULT_RTOL, **kwargs):
    return Developer(spec, form_kind, rtol, **kwargs).pullback_residual(z)


def default_paths(z):
    """The two L-shaped paths 0 -> Re z -> z and 0 -> i Im z -> z."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    zero = np.zeros_like(z)
    return [zero, z.real.astype(complex), z], [zero, 1j * z.imag, z]


def path_independence(spec, form_kind, z, paths=None, rtol=DEFAULT_RTOL,
                      steps_per_unit=STEPS_PER_UNIT, step=None):
    """max-entry difference of the frames transported to z along two paths from the origin."""
    z = spec.check_point(z)
    field = form_field(spec, form_kind)
    first, second = paths if paths is not None else default_paths(z)
    A0 = initial_frame(field(np.atleast_1d(np.asarray(first[0], dtype=complex))), form_kind)
    A1 = transport(field, first, A0, rtol, steps_per_unit, step)
    A2 = transport(field, second, A0, rtol, steps_per_unit, step)
    return float(np.max(np.abs(A1 - A2)))
