import numpy as np
import pytest

from jetcurv import PotentialSpec, builtin, eval_jet, normalize_at, random_points
from jetcurv.chern import FLAT_TOL, connection_at, curvature_at, flatness_norm, flatness_verdict
from jetcurv.errors import SingularFormError
from jetcurv.jet_hermitian import h_field, k_field
from jetcurv.kahler_core import chsc_residual, riemann_at
from jetcurv.registry import EXPECTED_CHSC, REGISTRY


def test_constant_fields_have_zero_connection():
    for z in ([0.0], [0.4 - 0.3j]):
        theta = connection_at(h_field(PotentialSpec("fubini_study", 1)), z).theta
        assert np.max(np.abs(theta)) < 1e-10
        theta = connection_at(k_field(PotentialSpec("hyperbolic", 1)), z).theta
        assert np.max(np.abs(theta)) < 1e-10


def test_connection_vanishes_at_normalized_origin():
    spec = normalize_at(builtin("euclidean", 2), [0.3, -0.2j])
    theta = connection_at(h_field(spec), [0, 0]).theta
    assert np.max(np.abs(theta)) < 1e-6


def test_connection_along_is_linear():
    spec = builtin("perturbed_fs", 2)
    conn = connection_at(h_field(spec), [0.2, 0.1j])
    v = np.array([1 - 1j, 0.5])
    assert np.allclose(conn.along(v), v[0] * conn.theta[0] + v[1] * conn.theta[1])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_fs_curvature_zero(n):
    spec = PotentialSpec("fubini_study", n)
    for z in random_points(spec, 2, seed=n):
        assert np.max(np.abs(curvature_at(h_field(spec), z).omega)) < 1e-6


def test_euclidean_curvature_at_normalized_origin():
    omega = curvature_at(h_field(normalize_at(PotentialSpec("euclidean", 1), [0])), [0]).omega
    assert omega.shape == (1, 1, 2, 2)
    assert omega[0, 0, 1, 1] == pytest.approx(-2, abs=1e-4)
    assert np.max(np.abs(omega[0, 0, 0, :])) < 1e-4
    assert np.max(np.abs(omega[0, 0, :, 0])) < 1e-4


def test_flatness_examples():
    assert flatness_norm(h_field(PotentialSpec("euclidean", 1)), [0]) == pytest.approx(2, abs=1e-4)
    assert flatness_norm(h_field(builtin("perturbed_fs", 1, eps=0.1)), [0]) > 0.01
    for seed in (0, 1):
        spec = builtin("gl_pullback_fs", 2, seed=seed)
        assert max(flatness_norm(h_field(spec), z) for z in random_points(spec, 10, seed=seed)) < 1e-5
    spec = builtin("u1n_pullback_ch", 2, seed=1)
    assert max(flatness_norm(k_field(spec), z) for z in random_points(spec, 10, seed=1)) < 1e-5


@pytest.mark.parametrize("name", ["fubini_study", "euclidean", "perturbed_fs", "gl_pullback_fs"])
def test_curvature_block_matches_riemann(name):
    """Omega at a normalized point against R_{j ibar k lbar} - (delta delta + delta delta)."""
    spec = builtin(name, 2, seed=3)
    p = random_points(spec, 1, seed=3)[0]
    target = normalize_at(spec, p)
    zero = np.zeros(2)
    omega = curvature_at(h_field(target), zero).omega  # [k, l, a, b]
    R = riemann_at(eval_jet(target, zero, 4)).R
    eye = np.eye(2)
    for i, j, k, l in np.ndindex(2, 2, 2, 2):
        predicted = R[j, i, k, l] - (eye[i, j] * eye[k, l] + eye[i, k] * eye[j, l])
        assert abs(omega[k, l, i + 1, j + 1] - predicted) < 1e-4


@pytest.mark.parametrize("name", REGISTRY)
def test_flatness_iff_chsc(name):
    spec = builtin(name, 2, seed=2)
    pts = random_points(spec, 3, seed=2)
    jets = [eval_jet(spec, z, 4) for z in pts]
    chsc2 = max(chsc_residual(j, 2) for j in jets) < 1e-6
    chscm2 = max(chsc_residual(j, -2) for j in jets) < 1e-6
    flat_h = max(flatness_norm(h_field(spec), z) for z in pts)
    flat_k = max(flatness_norm(k_field(spec), z) for z in pts)
    assert (chsc2, chscm2) == EXPECTED_CHSC[name]
    assert chsc2 == (flat_h < FLAT_TOL) and (chsc2 or flat_h > 1e-2)
    assert chscm2 == (flat_k < FLAT_TOL) and (chscm2 or flat_k > 1e-2)


def test_step_robustness():
    spec = builtin("gl_pullback_fs", 2, seed=5)
    for z in random_points(spec, 3, seed=5):
        a = flatness_norm(h_field(spec), z, 1e-3)
        b = flatness_norm(h_field(spec), z, 5e-4)
        assert abs(a - b) < 10 * FLAT_TOL


def test_verdict_gap():
    assert flatness_verdict(1e-6) == "flat"
    assert flatness_verdict(0.5) == "non-flat"
    assert flatness_verdict(1e-3) == "inconclusive"


def test_singular_field():
    with pytest.raises(SingularFormError):
        connection_at(lambda z: np.zeros((2, 2)), [0.1])
