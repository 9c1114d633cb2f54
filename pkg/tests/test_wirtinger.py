import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from jetcurv import PotentialSpec, builtin, eval_jet, fd_jet, load_spec, random_points, save_spec
from jetcurv.errors import ConfigError, DomainError, EvaluationError, UnsupportedOrderError
from jetcurv.registry import REGISTRY
from jetcurv.wirtinger import multi_indices, spec_from_dict, spec_to_dict


def quartic_re_poly(c):
    """c (Re z)^4 on C^1 as a polynomial spec: (z + zbar)^4 / 16."""
    terms = [((4,), (0,), c / 16), ((0,), (4,), c / 16), ((3,), (1,), 4 * c / 16),
             ((1,), (3,), 4 * c / 16), ((2,), (2,), 6 * c / 16)]
    return PotentialSpec("polynomial", 1, {"terms": terms})


# -- examples ----------------------------------------------------------------


def test_fs_at_origin():
    jet = eval_jet(PotentialSpec("fubini_study", 1), [0], 2)
    assert jet[(0,), (0,)] == 0
    assert jet[(1,), (0,)] == 0
    assert jet[(1,), (1,)] == 1


def test_euclidean_jet():
    jet = eval_jet(PotentialSpec("euclidean", 2), [1, 1j], 3)
    assert jet[(1, 0), (0, 0)] == np.conj(1)
    assert jet[(1, 0), (1, 0)] == 1
    for alpha, beta, c in jet.items():
        if sum(alpha) + sum(beta) == 3:
            assert c == 0


def test_hyperbolic_second_derivative():
    jet = eval_jet(PotentialSpec("hyperbolic", 1), [0.5], 4)
    assert jet[(1,), (1,)] == pytest.approx(0.75**-2, rel=1e-14)
    for (a, b), v in oracles.hyperbolic_jet_1d(0.5).items():
        assert jet[(a,), (b,)] == pytest.approx(v, rel=1e-13)


def test_hyperbolic_jet_off_axis():
    z = 0.3 - 0.45j
    jet = eval_jet(PotentialSpec("hyperbolic", 1), [z], 2)
    for (a, b), v in oracles.hyperbolic_jet_1d(z).items():
        assert abs(jet[(a,), (b,)] - v) < 1e-13


def test_fd_quadratic_exact():
    jet = fd_jet(lambda z: abs(z[0]) ** 2, [0], 2)
    assert abs(jet[(1,), (1,)] - 1) < 1e-10


def test_fd_fs_at_origin():
    jet = fd_jet(lambda z: np.log(1 + abs(z[0]) ** 2), [0], 4)
    ref = eval_jet(PotentialSpec("fubini_study", 1), [0], 4)
    assert np.max(np.abs(jet.coeffs - ref.coeffs)) < 1e-6


def test_fd_sum_of_closed_forms():
    phi = lambda z: np.log(1 + abs(z[0]) ** 2) + 0.1 * z[0].real ** 4
    jet = fd_jet(phi, [0.3], 4)
    ref = eval_jet(PotentialSpec("fubini_study", 1), [0.3], 4).coeffs + eval_jet(quartic_re_poly(0.1), [0.3], 4).coeffs
    assert np.max(np.abs(jet.coeffs - ref)) < 1e-6


# -- errors ------------------------------------------------------------------


def test_outside_domain():
    with pytest.raises(DomainError):
        eval_jet(PotentialSpec("hyperbolic", 1), [0.995], 2)
    with pytest.raises(DomainError):
        eval_jet(PotentialSpec("fubini_study", 2, radius=1.0), [1.0, 0.5], 2)


def test_order_limits():
    spec = PotentialSpec("fubini_study", 1)
    eval_jet(spec, [0.1], 5)
    with pytest.raises(UnsupportedOrderError):
        eval_jet(spec, [0.1], 6)
    with pytest.raises(UnsupportedOrderError):
        fd_jet(spec.value, [0.1], 5)


def test_fd_non_finite():
    with pytest.raises(EvaluationError):
        fd_jet(lambda z: np.nan, [0.1], 1)


def test_invalid_specs():
    with pytest.raises(ConfigError):
        PotentialSpec("nope", 1)
    with pytest.raises(ConfigError):
        PotentialSpec("fubini_study", 9)
    with pytest.raises(ConfigError):
        PotentialSpec("polynomial", 1, {"terms": [((2,), (1,), 1.0)]})
    with pytest.raises(ConfigError):
        PotentialSpec("u1n_pullback_ch", 1, {"A": 2 * np.eye(2)})
    with pytest.raises(ConfigError):
        PotentialSpec("gl_pullback_fs", 1, {"A": np.zeros((2, 2))})


# -- invariants --------------------------------------------------------------


def test_multi_index_storage_is_graded():
    idx = multi_indices(1, 2)
    assert idx[0] == ((0,), (0,))
    assert [sum(a) + sum(b) for a, b in idx] == [0, 1, 1, 2, 2, 2]


@pytest.mark.parametrize("name", REGISTRY)
@pytest.mark.parametrize("n", [1, 2])
def test_fd_cross_validation(name, n):
    spec = builtin(name, n, seed=11)
    for z in random_points(spec, 2, seed=n):
        ref = eval_jet(spec, z, 4).coeffs
        fd = fd_jet(spec.value, z, 4).coeffs
        assert np.max(np.abs(fd - ref) / np.maximum(1.0, np.abs(ref))) < 1e-5


@pytest.mark.parametrize("name", REGISTRY)
def test_conjugate_symmetry_exact(name):
    spec = builtin(name, 2, seed=5)
    for z in random_points(spec, 3, seed=2):
        for jet in (eval_jet(spec, z, 5), fd_jet(spec.value, z, 3)):
            for alpha, beta, c in jet.items():
                assert jet[beta, alpha] == np.conj(c)
            assert jet.d().imag == 0


@given(st.integers(1, 3), st.floats(0, 0.9), st.floats(0, 2 * np.pi))
def test_gl_identity_reproduces_fs(n, r, t):
    z = np.zeros(n, dtype=complex)
    z[0] = r * np.exp(1j * t)
    a = eval_jet(PotentialSpec("gl_pullback_fs", n, {"A": np.eye(n + 1)}), z, 4).coeffs
    b = eval_jet(PotentialSpec("fubini_study", n), z, 4).coeffs
    assert np.array_equal(a, b)


@given(st.integers(0, 10**6))
def test_series_value_matches_closed_form(seed):
    rng = np.random.default_rng(seed)
    name = REGISTRY[seed % len(REGISTRY)]
    spec = builtin(name, 2, seed=seed)
    z = random_points(spec, 1, seed=seed)[0]
    assert eval_jet(spec, z, 0).d() == pytest.approx(spec.value(z), rel=1e-12, abs=1e-14)


def test_u1n_equals_hyperbolic_through_its_ball_automorphism():
    rng = np.random.default_rng(3)
    spec = builtin("u1n_pullback_ch", 2, seed=3)
    A = spec.params["A"]
    for z in random_points(spec, 4, seed=9):
        u = A @ np.concatenate([[1], z])
        f = u[1:] / u[0]
        assert spec.value(z) == pytest.approx(-np.log(1 - np.vdot(f, f).real), rel=1e-13)


# -- files -------------------------------------------------------------------


def test_spec_file_round_trip(tmp_path):
    for spec in (builtin("gl_pullback_fs", 2, seed=1), builtin("perturbed_fs", 1, eps=0.25), quartic_re_poly(0.3)):
        path = tmp_path / f"{spec.kind}.json"
        save_spec(spec, path)
        back = load_spec(path)
        assert spec_to_dict(back) == spec_to_dict(spec)
        z = [0.1 + 0.2j] + [0.05] * (spec.n - 1)
        assert np.array_equal(eval_jet(back, z, 3).coeffs, eval_jet(spec, z, 3).coeffs)


def test_spec_file_rejects_non_real_polynomial(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"kind": "polynomial", "n": 1, "params": {
        "terms": [{"alpha": [1], "beta": [0], "c": [1, 0]}]}}))
    with pytest.raises(ConfigError):
        load_spec(path)
    with pytest.raises(ConfigError):
        spec_from_dict({"n": 1})
