"""Acceptance criteria, one test per criterion.

Each test records a one-line PASS/FAIL summary (shown at the end of the pytest
run) before asserting, so a failing criterion still reports what was measured.
"""

import time

import numpy as np
import pytest

import oracles
from jetcurv import PotentialSpec, builtin, eval_jet, random_points
from jetcurv.chern import flatness_norm
from jetcurv.cli import main
from jetcurv.develop import Developer, path_independence
from jetcurv.gauge import normalize_at, verify_claims
from jetcurv.jet_hermitian import h_field, h_matrix_at, k_field, k_matrix_at, quotient_identity_residual, signature_of
from jetcurv.kahler_core import chsc_residual, riemann_at
from jetcurv.registry import REGISTRY

RESULTS = {}


def record(number, ok, text):
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'} - {text}"
    RESULTS[number] = line
    print(line)
    assert ok, line


def grid(n, count=5, half=0.5):
    """count x count points in the z1-plane; further coordinates follow z1 at a smaller scale."""
    axis = np.linspace(-half, half, count)
    pts = []
    for x in axis:
        for y in axis:
            z = np.zeros(n, dtype=complex)
            z[0] = x + 1j * y
            for k in range(1, n):
                z[k] = 0.3 * (y - 1j * x) / k
            pts.append(z)
    return pts


def test_criterion_01_model_curvature():
    worst = {}
    for n in (1, 2, 3):
        pts = grid(n)
        assert len(pts) == 25
        worst[f"fs n={n}"] = max(chsc_residual(eval_jet(PotentialSpec("fubini_study", n), z, 4), 2) for z in pts)
        worst[f"ch n={n}"] = max(chsc_residual(eval_jet(PotentialSpec("hyperbolic", n), z, 4), -2) for z in pts)
    m = max(worst.values())
    record(1, m < 1e-8, f"chsc residual of FS (k=2) and CH (k=-2), n=1..3, 25 points each: max {m:.2e} < 1e-8")


def test_criterion_02_jet_form_examples():
    fs, ch = PotentialSpec("fubini_study", 1), PotentialSpec("hyperbolic", 1)
    dh = max(np.max(np.abs(h_matrix_at(eval_jet(fs, z, 2)).matrix - np.eye(2))) for z in grid(1, half=1.5))
    dk = max(np.max(np.abs(k_matrix_at(eval_jet(ch, z, 2)).matrix - np.diag([1.0, -1.0])))
             for z in random_points(ch, 25, seed=2, fraction=0.95))
    record(2, max(dh, dk) < 1e-12,
           f"H(FS) = I and K(CH) = diag(1,-1) at 25 points: deviations {dh:.1e}, {dk:.1e} < 1e-12")


def test_criterion_03_quotient_identity():
    worst = 0.0
    for name in REGISTRY:
        spec = builtin(name, 2, seed=3)
        for z in random_points(spec, 10, seed=3):
            worst = max(worst, *quotient_identity_residual(eval_jet(spec, z, 2)))
    record(3, worst < 1e-9, f"quotient identity, 6 potentials x 10 points, both slots: max {worst:.2e} < 1e-9")


def test_criterion_04_flat_forward():
    worst_h = 0.0
    for seed in (0, 1, 2):
        spec = builtin("gl_pullback_fs", 2, seed=seed)
        worst_h = max(worst_h, max(flatness_norm(h_field(spec), z) for z in random_points(spec, 10, seed=seed)))
    spec = builtin("u1n_pullback_ch", 2, seed=0)
    worst_k = max(flatness_norm(k_field(spec), z) for z in random_points(spec, 10, seed=0))
    record(4, max(worst_h, worst_k) < 1e-4,
           f"flatness H on gl_pullback_fs (3 seeds) {worst_h:.1e}, K on u1n_pullback_ch {worst_k:.1e}, "
           f"10 points each, < 1e-4")


def test_criterion_05_converse_controls():
    eu = normalize_at(PotentialSpec("euclidean", 1), [0.3 - 0.2j])
    at_origin = flatness_norm(h_field(eu), [0])
    spec = builtin("perturbed_fs", 1, eps=0.1)
    pert = max(flatness_norm(h_field(spec), z) for z in [[0.0]] + random_points(spec, 4, seed=1))
    ok = abs(at_origin - 2) < 1e-3 and at_origin > 1e-2 and pert > 1e-2
    record(5, ok, f"flatness H: euclidean at normalized origin {at_origin:.6f} (2 +- 1e-3), "
                  f"perturbed_fs max {pert:.3f} > 1e-2")


def test_criterion_06_claims():
    failed, worst_fd, worst_alg, count = [], 0.0, 0.0, 0
    for name in REGISTRY:
        spec = builtin(name, 2, seed=6)
        for p in random_points(spec, 3, seed=6):
            report = verify_claims(spec, p)
            count += 1
            failed += [f"{name}:{c.name}" for c in report.checks if not c.passed]
            worst_fd = max([worst_fd] + [c.value for c in report.checks if c.kind == "fd"])
            worst_alg = max([worst_alg] + [c.value for c in report.checks if c.kind == "algebraic"])
            assert "ddbar_H_vs_riemann" in {c.name for c in report.checks}
    record(6, not failed, f"gauge identities for H and K at {count} base points: max FD residual {worst_fd:.1e} (< 1e-4), "
                          f"max algebraic {worst_alg:.1e} (< 1e-9){'; failed ' + ', '.join(failed) if failed else ''}")


def _develop_stats(spec, kind, pts):
    dev = Developer(spec, kind)
    pull, gram, paths = 0.0, 0.0, 0.0
    for z in pts:
        frame = dev.frame(z)
        pull = max(pull, dev.pullback_residual(z, frame))
        gram = max(gram, dev.gram_residual(frame))
        paths = max(paths, path_independence(spec, kind, z))
    return pull, gram, paths


def test_criterion_07_developing_round_trip():
    lines, ok = [], True
    for n in (1, 2):
        pts = grid(n, count=3, half=0.4)
        pull, gram, paths = _develop_stats(builtin("gl_pullback_fs", n, seed=7), "H", pts)
        ok &= pull < 1e-4 and paths < 1e-4 and gram < 1e-5
        lines.append(f"gl n={n}: pullback {pull:.1e}, paths {paths:.1e}, Gram {gram:.1e}")
    pull, gram, paths = _develop_stats(builtin("u1n_pullback_ch", 1, seed=7), "K", grid(1, count=3, half=0.4))
    ok &= pull < 1e-4 and paths < 1e-4 and gram < 1e-5
    lines.append(f"u1n n=1 (K): pullback {pull:.1e}, paths {paths:.1e}, Gram {gram:.1e}")
    record(7, ok, "developing map on 9-point grids; " + "; ".join(lines))


def test_criterion_08_oracle_cross_validation():
    worst = 0.0
    for name in REGISTRY:
        spec = builtin(name, 2, seed=8)
        for z in random_points(spec, 5, seed=8):
            R = riemann_at(eval_jet(spec, z, 4)).R
            ref = oracles.riemann_from_metric_fd(spec, z)
            worst = max(worst, np.max(np.abs(R - ref)) / max(1.0, np.max(np.abs(ref))))
    record(8, worst < 1e-5, f"riemann_at vs metric-FD oracle, 6 potentials x 5 points: max rel {worst:.1e} < 1e-5")


def test_criterion_09_signature():
    bad = []
    for name in ("hyperbolic", "u1n_pullback_ch"):
        for n in (1, 2, 3):
            spec = builtin(name, n, seed=9)
            for z in random_points(spec, 10, seed=9, fraction=0.95):
                sig = signature_of(k_matrix_at(eval_jet(spec, z, 2)))
                if sig != (1, n):
                    bad.append((name, n, sig))
    record(9, not bad, f"signature of K = (1, n) on hyperbolic and u1n_pullback_ch, n=1..3, 60 points; "
                       f"{len(bad)} mismatches")


def test_criterion_10_runtime(tmp_path):
    start = time.perf_counter()
    code = main(["verify-all", "--n", "3", "--out", str(tmp_path / "v.json")])
    elapsed = time.perf_counter() - start
    record(10, code == 0 and elapsed < 60, f"verify-all n=3 default config: exit {code}, {elapsed:.1f} s < 60 s")
