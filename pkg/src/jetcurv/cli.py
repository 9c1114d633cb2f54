"""Command-line front end: ``jetcurv <command> [options]``.

Commands sweep a grid of points (or seeded random points) and emit a JSON
report, or CSV for grid data. Exit codes: 0 pass, 1 fail, 2 inconclusive,
64 configuration error.
"""

import argparse
import csv
import io
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .chern import NONFLAT_TOL, flatness_norm, flatness_verdict
from .develop import Developer, path_independence
from .errors import ConfigError, JetcurvError, NotFlatError
from .gauge import verify_claims
from .jet_hermitian import form_field, k_matrix_at, quotient_identity_residual, signature_of
from .kahler_core import chsc_residual, hsc_of_direction
from .registry import EXPECTED_CHSC, REGISTRY, builtin, random_points
from .report import EXIT_CONFIG, Report, RunConfig
from .wirtinger import HYPERBOLIC_KINDS, eval_jet, load_spec

COMMANDS = ("curvature", "flatness", "claims", "develop", "verify-all")
DEFAULT_AXIS = (-0.5, 0.5, 5)


# -- configuration ---------------------------------------------------------


def parse_grid(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid axis must be min:max:count, got {text!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"grid axis must be min:max:count, got {text!r}") from None
    return [lo, hi, count]


class _ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgumentError(message)


def build_parser():
    p = _Parser(prog="jetcurv", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--potential", default="builtin:fubini_study",
                   help="potential file (JSON) or builtin:<name>")
    p.add_argument("--n", type=int, default=None, help="dimension for builtin potentials (default 1)")
    p.add_argument("--grid", action="append", default=[], metavar="MIN:MAX:COUNT",
                   help="one real axis per flag (Re z1, Im z1, Re z2, ...); a single flag covers Re z1 and Im z1")
    p.add_argument("--kappa", type=float, default=2.0)
    p.add_argument("--form", choices=("H", "K"), default=None)
    p.add_argument("--tol-flat", type=float, default=1e-4)
    p.add_argument("--tol-chsc", type=float, default=1e-6)
    p.add_argument("--tol-pullback", type=float, default=1e-4)
    p.add_argument("--transport-rtol", type=float, default=1e-6)
    p.add_argument("--fd-step", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps", type=float, default=0.1, help="perturbation size for builtin:perturbed_fs")
    p.add_argument("--points", type=int, default=3, help="random points per potential for verify-all")
    p.add_argument("--no-normalize", action="store_true", help="claims: skip the gauge normalization")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    return p


def config_from_args(args):
    grid = [parse_grid(g) for g in args.grid]
    if len(grid) == 1:
        grid = [grid[0], list(grid[0])]
    form = args.form
    if form is None:
        form = "K" if args.potential.split(":")[-1] in HYPERBOLIC_KINDS else "H"
    n = args.n if args.n is not None else 1
    if not args.potential.startswith("builtin:"):
        n = load_spec(args.potential).n
    cfg = RunConfig(
        command=args.command, potential=args.potential, n=n, grid=grid, kappa=args.kappa,
        form=form, flat_tol=args.tol_flat, chsc_tol=args.tol_chsc, pullback_tol=args.tol_pullback,
        transport_rtol=args.transport_rtol, fd_step=args.fd_step, seed=args.seed, eps=args.eps,
        normalize=not args.no_normalize, points=args.points,
    )
    return cfg.validate()


def resolve_potential(cfg):
    if cfg.potential.startswith("builtin:"):
        return builtin(cfg.potential[len("builtin:"):], cfg.n, seed=cfg.seed, eps=cfg.eps)
    return load_spec(cfg.potential)


def sample_points(cfg, spec):
    """Grid points (all must lie in the domain), or the default 5x5 grid in the z1-plane."""
    grid = cfg.grid or [list(DEFAULT_AXIS), list(DEFAULT_AXIS)]
    pts = RunConfig(cfg.command, n=spec.n, grid=grid).grid_points()
    if not pts:
        raise ConfigError("empty grid")
    for z in pts:
        if not spec.contains(z):
            raise ConfigError(f"grid point {z} lies outside the domain of {spec.kind}")
    return pts


def worker_count():
    raw = os.environ.get("JETCURV_THREADS")
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        k = int(raw)
    except ValueError:
        raise ConfigError(f"JETCURV_THREADS must be a positive integer, got {raw!r}") from None
    if k < 1:
        raise ConfigError(f"JETCURV_THREADS must be a positive integer, got {raw!r}")
    return k


def pmap(fn, items):
    """Map over points on the worker pool, keeping input order."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _point(z):
    return [[float(v.real), float(v.imag)] for v in z]


def _guarded(fn):
    """Turn a numerical failure at one point into a failing record."""
    def run(item):
        index, z = item
        try:
            rec = fn(index, z)
        except JetcurvError as exc:
            rec = {"residual": None, "verdict": "fail", "error": f"{type(exc).__name__}: {exc}"}
        return {"index": index, "z": _point(z), **rec}
    return run


# -- commands --------------------------------------------------------------


def cmd_curvature(cfg):
    spec = resolve_potential(cfg)
    pts = sample_points(cfg, spec)

    def one(index, z):
        jet = eval_jet(spec, z, 4)
        res = chsc_residual(jet, cfg.kappa)
        rng = np.random.default_rng([cfg.seed, index])
        v = rng.normal(size=spec.n) + 1j * rng.normal(size=spec.n)
        e1 = np.eye(spec.n)[0]
        return {
            "residual": res,
            "hsc_e1": hsc_of_direction(jet, e1),
            "hsc_random": hsc_of_direction(jet, v),
            "verdict": "pass" if res < cfg.chsc_tol else "fail",
        }

    return pmap(_guarded(one), enumerate(pts)), {}


def cmd_flatness(cfg):
    spec = resolve_potential(cfg)
    pts = sample_points(cfg, spec)
    fld = form_field(spec, cfg.form)

    def one(index, z):
        norm = flatness_norm(fld, z, cfg.fd_step)
        state = flatness_verdict(norm, cfg.flat_tol, NONFLAT_TOL)
        verdict = {"flat": "pass", "non-flat": "fail"}.get(state, "inconclusive")
        return {"residual": norm, "flatness": state, "verdict": verdict}

    return pmap(_guarded(one), enumerate(pts)), {}


def _claims_record(report):
    worst = max(c.value for c in report.checks)
    return {
        "residual": worst,
        "verdict": "pass" if report.passed else "fail",
        "failed": [c.name for c in report.checks if not c.passed],
        "checks": [
            {"name": c.name, "value": c.value, "tol": c.tol, "kind": c.kind, "passed": c.passed, **c.details}
            for c in report.checks
        ],
    }


def cmd_claims(cfg):
    spec = resolve_potential(cfg)
    pts = sample_points(cfg, spec)

    def one(index, z):
        return _claims_record(verify_claims(spec, z, normalize=cfg.normalize, step=cfg.fd_step))

    return pmap(_guarded(one), enumerate(pts)), {}


def cmd_develop(cfg):
    spec = resolve_potential(cfg)
    pts = sample_points(cfg, spec)
    dev = Developer(spec, cfg.form, rtol=cfg.transport_rtol, step=cfg.fd_step, flat_tol=cfg.flat_tol)

    def one(index, z):
        frame = dev.frame(z)
        sample = dev.sample(frame)
        res = dev.pullback_residual(z, frame)
        return {
            "w": [[float(c.real), float(c.imag)] for c in sample.w],
            "residual": res,
            "gram_residual": dev.gram_residual(frame),
            "verdict": "pass" if res < cfg.pullback_tol else "fail",
        }

    # flatness is checked once per point inside dev.frame; NotFlatError aborts the run
    records = pmap(lambda item: {"index": item[0], "z": _point(item[1]), **one(*item)}, enumerate(pts))
    # path-independence spot check at the point farthest from the base point
    far = max(pts, key=lambda z: float(np.linalg.norm(z)))
    spot = path_independence(spec, cfg.form, far, rtol=cfg.transport_rtol, step=cfg.fd_step)
    extra = {"path_independence": spot, "path_independence_point": _point(far)}
    if spot >= cfg.pullback_tol:
        for r in records:
            r["verdict"] = "fail"
    return records, extra


def _verify_potential(cfg, name):
    spec = builtin(name, cfg.n, seed=cfg.seed, eps=cfg.eps)
    if cfg.grid:
        pts = [z for z in RunConfig(cfg.command, n=cfg.n, grid=cfg.grid).grid_points() if spec.contains(z)]
    else:
        pts = [np.zeros(cfg.n, dtype=complex)] + random_points(spec, cfg.points, seed=cfg.seed)
    if not pts:
        raise ConfigError(f"no grid point lies in the domain of {name}")
    H, K = form_field(spec, "H"), form_field(spec, "K")
    rows = []
    for z in pts:
        jet = eval_jet(spec, z, 4)
        r_h, r_k = quotient_identity_residual(jet)
        try:
            sig = list(signature_of(k_matrix_at(jet)))
        except JetcurvError:
            sig = None
        claims = verify_claims(spec, z, step=cfg.fd_step)
        rows.append({
            "z": _point(z),
            "chsc_plus2": chsc_residual(jet, 2.0),
            "chsc_minus2": chsc_residual(jet, -2.0),
            "flat_H": flatness_norm(H, z, cfg.fd_step),
            "flat_K": flatness_norm(K, z, cfg.fd_step),
            "quotient_H": r_h,
            "quotient_K": r_k,
            "signature_K": sig,
            "claims_passed": claims.passed,
            "claims_residual": max(c.value for c in claims.checks if c.kind == "fd"),
        })

    def status(key, tol, fail_above):
        # holds if below tol at every point; fails if above fail_above somewhere; else undecided
        worst = max(r[key] for r in rows)
        if worst < tol:
            return True
        if worst > fail_above:
            return False
        return None

    chsc2 = status("chsc_plus2", cfg.chsc_tol, cfg.chsc_tol)
    chscm2 = status("chsc_minus2", cfg.chsc_tol, cfg.chsc_tol)
    flat_h = status("flat_H", cfg.flat_tol, NONFLAT_TOL)
    flat_k = status("flat_K", cfg.flat_tol, NONFLAT_TOL)
    expected = EXPECTED_CHSC[name]
    checks = {
        "biconditional_H": chsc2 == flat_h,
        "biconditional_K": chscm2 == flat_k,
        "expected_pattern": (chsc2, chscm2) == expected,
        "quotient_identity": all(max(r["quotient_H"], r["quotient_K"]) < 1e-9 for r in rows),
        "claims": all(r["claims_passed"] for r in rows),
    }
    if name in HYPERBOLIC_KINDS:
        checks["signature_K"] = all(r["signature_K"] == [1, cfg.n] for r in rows)
    if None in (chsc2, chscm2, flat_h, flat_k):
        verdict = "inconclusive"
    else:
        verdict = "pass" if all(checks.values()) else "fail"
    universal = [max(r["quotient_H"], r["quotient_K"], r["claims_residual"]) for r in rows]
    return {
        "potential": name,
        "chsc_plus2": chsc2,
        "chsc_minus2": chscm2,
        "flat_H": flat_h,
        "flat_K": flat_k,
        "checks": checks,
        "points": rows,
        "residual": max(universal),
        "verdict": verdict,
    }


def cmd_verify_all(cfg):
    if cfg.grid and not RunConfig(cfg.command, n=cfg.n, grid=cfg.grid).grid_points():
        raise ConfigError("empty grid")
    records = pmap(lambda name: _verify_potential(cfg, name), REGISTRY)
    matrix = {r["potential"]: {k: r[k] for k in ("chsc_plus2", "chsc_minus2", "flat_H", "flat_K")} for r in records}
    return records, {"matrix": matrix}


HANDLERS = {
    "curvature": cmd_curvature,
    "flatness": cmd_flatness,
    "claims": cmd_claims,
    "develop": cmd_develop,
    "verify-all": cmd_verify_all,
}


def run(cfg, argv=()):
    """Execute a validated config; return the :class:`Report`."""
    start = time.perf_counter()
    records, extra = HANDLERS[cfg.command](cfg)
    return Report.build(argv, cfg, records, time.perf_counter() - start, extra=extra)


# -- output ----------------------------------------------------------------


def to_csv(report):
    buf = io.StringIO()
    buf.write(f"# jetcurv {report.version} {report.config['command']} config_hash={report.config_hash}\n")
    records = report.records
    if report.config["command"] == "verify-all":
        header = ["potential", "z", "chsc_plus2", "chsc_minus2", "flat_H", "flat_K", "quotient_H", "quotient_K"]
        w = csv.writer(buf)
        w.writerow(header)
        for r in records:
            for p in r["points"]:
                w.writerow([r["potential"], " ".join(f"{a}{b:+}j" for a, b in p["z"])] + [p[k] for k in header[2:]])
        return buf.getvalue()
    n = report.config["n"]
    header = [f"{part}(z{i + 1})" for i in range(n) for part in ("re", "im")]
    develop = report.config["command"] == "develop"
    if develop:
        header += [f"{part}(w{a})" for a in range(n + 1) for part in ("re", "im")] + ["pullback_residual"]
    else:
        header += ["residual", "verdict"]
    w = csv.writer(buf)
    w.writerow(header)
    for r in records:
        row = [x for pair in r["z"] for x in pair]
        if develop:
            row += [x for pair in r["w"] for x in pair] + [r["residual"]]
        else:
            row += [r["residual"], r["verdict"]]
        w.writerow(row)
    return buf.getvalue()


def emit(report, fmt, out):
    text = report.to_json() + "\n" if fmt == "json" else to_csv(report)
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _attach_values(argv):
    # "--grid -0.5:0.5:5" would otherwise read the axis as an option
    out = []
    it = iter(argv)
    for tok in it:
        if tok == "--grid":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"--grid={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_attach_values(argv))
        cfg = config_from_args(args)
        report = run(cfg, ["jetcurv"] + argv)
    except (_ArgumentError, ConfigError) as exc:
        print(f"jetcurv: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NotFlatError as exc:
        print(f"jetcurv: {exc}", file=sys.stderr)
        return 1
    emit(report, args.format, args.out)
    s = report.summary
    print(f"jetcurv {cfg.command}: {s['verdict']} (max residual {s['max_residual']}, "
          f"{s['count']} records, {s['runtime']:.2f} s)", file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
