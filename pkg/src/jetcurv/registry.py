"""Built-in potentials and seeded random sampling."""

import numpy as np

from .errors import ConfigError
from .wirtinger import PotentialSpec, lorentz_form

REGISTRY = (
    "fubini_study",
    "hyperbolic",
    "euclidean",
    "gl_pullback_fs",
    "u1n_pullback_ch",
    "perturbed_fs",
)

# expected (chsc +2, chsc -2) pattern of each registry potential
EXPECTED_CHSC = {
    "fubini_study": (True, False),
    "hyperbolic": (False, True),
    "euclidean": (False, False),
    "gl_pullback_fs": (True, False),
    "u1n_pullback_ch": (False, True),
    "perturbed_fs": (False, False),
}


def random_gl(n, rng, spread=0.5, max_cond=10.0):
    """Well-conditioned element of GL(n+1, C) near the identity."""
    while True:
        G = rng.normal(size=(n + 1, n + 1)) + 1j * rng.normal(size=(n + 1, n + 1))
        A = np.eye(n + 1) + spread * G / np.sqrt(2 * (n + 1))
        if np.linalg.cond(A) < max_cond:
            return A


def _random_unitary(m, rng):
    G = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    Q, R = np.linalg.qr(G)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_u1n(n, rng, max_rapidity=0.6):
    """Element of U(1,n): rotation, boost along e_1, rotation."""
    t = rng.uniform(0.2, max_rapidity)
    boost = np.eye(n + 1, dtype=complex)
    boost[0, 0] = boost[1, 1] = np.cosh(t)
    boost[0, 1] = boost[1, 0] = np.sinh(t)
    left = np.eye(n + 1, dtype=complex)
    right = np.eye(n + 1, dtype=complex)
    left[0, 0] = np.exp(1j * rng.uniform(0, 2 * np.pi))
    left[1:, 1:] = _random_unitary(n, rng)
    right[1:, 1:] = _random_unitary(n, rng)
    A = left @ boost @ right
    # the validator requires A^H J A = J to 1e-12
    J = lorentz_form(n)
    assert np.max(np.abs(A.conj().T @ J @ A - J)) < 1e-13
    return A


def builtin(name, n, seed=0, eps=0.1, radius=None):
    """Registry potential by name; random parameters come from ``seed``."""
    rng = np.random.default_rng(seed)
    if name in ("fubini_study", "hyperbolic", "euclidean"):
        return PotentialSpec(name, n, radius=radius)
    if name == "gl_pullback_fs":
        return PotentialSpec(name, n, {"A": random_gl(n, rng)}, radius)
    if name == "u1n_pullback_ch":
        return PotentialSpec(name, n, {"A": random_u1n(n, rng)}, radius)
    if name == "perturbed_fs":
        return PotentialSpec(name, n, {"eps": eps}, radius)
    raise ConfigError(f"unknown builtin potential {name!r}; choose from {', '.join(REGISTRY)}")


def random_points(spec, count, seed=0, fraction=0.6):
    """``count`` seeded points uniformly in the ball of radius ``fraction * min(1, spec.radius)``."""
    rng = np.random.default_rng(seed)
    n = spec.n
    pts = []
    while len(pts) < count:
        v = rng.normal(size=n) + 1j * rng.normal(size=n)
        v /= np.linalg.norm(v)
        r = fraction * min(1.0, spec.radius) * rng.uniform() ** (1.0 / (2 * n))
        z = r * v
        if spec.contains(z):
            pts.append(z)
    return pts
