"""Command-line front end.

Every command reads a JSON config (``--config``) and writes a JSON report
(``--out`` or stdout); ``dump-field`` writes CSV. Exit codes: 0 success,
2 negative verdict, 3 numerical-quality failure, 4 configuration error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import replace

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, _cplx
from .geometry import Circle, Cycle, contains
from .green import green_boundary_flux, green_cycle_period, green_function, log_capacity
from .harmonic import BoundaryData, dirichlet_solve, harmonic_measures
from .search import (
    FOUND, build_counterexample_domain, certify_no_equality, find_equality_config, image_disk, product_combine,
)
from .suita import (
    IMPOSSIBLE_BY_COUNT, NOT_EQUALITY, QuadratureFailure, annulus_criterion, equality_defect,
    integrality_deltas,
)

EXIT_OK, EXIT_VERDICT, EXIT_NUMERIC, EXIT_CONFIG = 0, 2, 3, 4
COMMANDS = (
    "solve-dirichlet", "green", "capacity", "harmonic-measures", "check-equality", "search-equality",
    "build-counterexample", "certify-counterexample", "annulus-check", "product-check", "dump-field",
)


def _pair(z):
    z = complex(z)
    return [z.real, z.imag]


def _points(opts, key="points"):
    return [_cplx(p) for p in opts.get(key, [])]


def _check_inside(d, pts):
    if pts and not np.all(contains(d, np.array(pts))):
        raise ConfigError("evaluation point outside the domain")


def _to_json(obj):
    if isinstance(obj, dict):
        return {str(k): _to_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_json(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if np.isfinite(x) else str(x)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return _pair(obj)
    return obj


class _Outcome:
    def __init__(self, outputs, code=EXIT_OK, residual=0.0):
        self.outputs, self.code, self.residual = outputs, code, residual


def _quality(cfg, residual, code=EXIT_OK):
    return EXIT_NUMERIC if residual > cfg.solver.residual_tol else code


# -- commands ---------------------------------------------------------------

def cmd_solve_dirichlet(cfg: RunConfig):
    d = cfg.build_domain()
    opts = cfg.options
    data = opts.get("boundary")
    if data is None or len(data) != d.n:
        raise ConfigError(f"options.boundary needs {d.n} entries (holes first, outer last)")
    pts = _points(opts)
    _check_inside(d, pts)
    u = dirichlet_solve(d, BoundaryData(tuple(data)), cfg.solver.degree, cfg.solver.boundary_nodes)
    out = {
        "values": [float(u(z)) for z in pts],
        "conjugate_periods": [u.conjugate_period(k) for k in range(d.n - 1)],
        "residual": u.residual,
    }
    return _Outcome(out, _quality(cfg, u.residual), u.residual)


def cmd_green(cfg: RunConfig):
    d = cfg.build_domain()
    opts = cfg.options
    if "pole" not in opts:
        raise ConfigError("options.pole is required")
    z0 = _cplx(opts["pole"])
    _check_inside(d, [z0])
    g = green_function(d, z0, cfg.solver.degree)
    pts = _points(opts)
    _check_inside(d, pts)
    out = {
        "pole": _pair(z0),
        "values": [float(g(z)) for z in pts],
        "capacity": log_capacity(g),
        "flux": [green_boundary_flux(g, k) for k in range(d.n)],
        "cycle_periods": [green_cycle_period(g, k) for k in range(d.n - 1)],
        "pole_period": green_cycle_period(g, Cycle(z0, 0.5 * float(d.clearance(z0)))),
        "residual": g.residual,
    }
    return _Outcome(out, _quality(cfg, g.residual), g.residual)


def cmd_capacity(cfg: RunConfig):
    d = cfg.build_domain()
    poles = _points(cfg.options, "poles")
    if not poles:
        raise ConfigError("options.poles is required")
    _check_inside(d, poles)
    gs = [green_function(d, z, cfg.solver.degree) for z in poles]
    res = max(g.residual for g in gs)
    out = {"poles": [_pair(z) for z in poles], "capacities": [log_capacity(g) for g in gs], "residual": res}
    return _Outcome(out, _quality(cfg, res), res)


def cmd_harmonic_measures(cfg: RunConfig):
    d = cfg.build_domain()
    pts = _points(cfg.options)
    _check_inside(d, pts)
    ms = harmonic_measures(d, cfg.solver.degree, cfg.solver.boundary_nodes)
    res = max([u.residual for u in ms] + [0.0])
    out = {
        "count": len(ms),
        "values": [[float(u(z)) for z in pts] for u in ms],
        "period_matrix": [[u.conjugate_period(l) for l in range(d.n - 1)] for u in ms],
        "residual": res,
    }
    return _Outcome(out, _quality(cfg, res), res)


def cmd_check_equality(cfg: RunConfig):
    d = cfg.build_domain()
    w = cfg.build_weight(d)
    j = cfg.build_jets()
    s = cfg.solver
    try:
        rep = equality_defect(d, w, j, s.basis_degree, s.degree, s.tolerance, s.area_nodes)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    code = EXIT_VERDICT if rep.verdict in (NOT_EQUALITY, IMPOSSIBLE_BY_COUNT) else EXIT_OK
    return _Outcome(rep.to_dict(), _quality(cfg, rep.harmonic_residual, code), rep.harmonic_residual)


def cmd_search_equality(cfg: RunConfig):
    d = cfg.build_domain()
    w = cfg.build_weight(d)
    opts = cfg.options
    try:
        res = find_equality_config(
            d, w, int(opts.get("m", 1)), int(opts.get("q_max", 12)), cfg.solver.degree,
            np.random.default_rng(cfg.seed), tol=float(opts.get("tol", 1e-8)),
            check_gradient=bool(opts.get("check_gradient", False)), criterion_tol=cfg.solver.tolerance,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return _Outcome(res.to_dict(), EXIT_OK if res.status == FOUND else EXIT_VERDICT)


def _counterexample(cfg):
    o = cfg.options
    try:
        m, n, M = int(o["m"]), int(o["n"]), int(o["M"])
    except KeyError as exc:
        raise ConfigError(f"options.{exc.args[0]} is required") from exc
    extra = o.get("extra_holes")
    if extra is not None:
        extra = [Circle(_cplx(h["c"]), float(h["r"])) for h in extra]
    try:
        return build_counterexample_domain(m, n, M, float(o.get("a", 0.5)), extra, o.get("eps"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _counterexample_checks(ce, rng):
    """Involution and collar-separation checks of the Mobius maps."""
    inv, sep = 0.0, 0.0
    z = 0.95 * np.sqrt(rng.uniform(0, 1, 20)) * np.exp(2j * np.pi * rng.uniform(0, 1, 20))
    for j in range(ce.m + 1):
        phi = ce.phi(j)
        inv = max(inv, float(np.max(np.abs(phi(phi(z)) - z))))
        r = ce.r0 * np.sqrt(rng.uniform(0, 1, 20))
        zz = r * np.exp(2j * np.pi * rng.uniform(0, 1, 20))
        b = abs(ce.centers[j])
        # rotate so that the center sits on the positive axis
        rot = ce.centers[j] / b
        sep = max(sep, float(np.max(np.abs(phi(zz) / rot - b) - (b + 1) * r)))
    return inv, sep


def cmd_build_counterexample(cfg: RunConfig):
    ce = _counterexample(cfg)
    inv, sep = _counterexample_checks(ce, np.random.default_rng(cfg.seed))
    out = {
        "domain": ce.domain.spec.to_dict(), "params": ce.params(),
        "centers": [_pair(b) for b in ce.centers],
        "collars": [image_disk(b, ce.r0).to_dict() for b in ce.centers],
        "involution_error": inv, "separation_excess": sep,
    }
    return _Outcome(out)


def cmd_certify_counterexample(cfg: RunConfig):
    ce = _counterexample(cfg)
    cert = certify_no_equality(ce, int(cfg.options.get("samples", 200)), np.random.default_rng(cfg.seed),
                               cfg.solver.degree)
    out = cert.to_dict()
    out["domain"] = ce.domain.spec.to_dict()
    code = EXIT_OK if cert.status == "PASSED" else EXIT_NUMERIC
    return _Outcome(out, code, cert.max_residual)


def cmd_annulus_check(cfg: RunConfig):
    d = cfg.build_domain()
    if d.spec.kind != "annulus":
        raise ConfigError("annulus-check needs an annulus domain")
    R = d.spec.R
    j = cfg.build_jets()
    w = cfg.build_weight(d)
    if "c" in cfg.options:
        c = float(cfg.options["c"])
    elif w.u is None:
        c = 0.0
    else:
        # flux of u toward the inner circle equals 2 pi times minus its conjugate period
        c = -2 * np.pi * w.u.conjugate_period(0)
    try:
        ok, N, resid = annulus_criterion(R, c, [abs(z) for z in j.points], j.orders, cfg.solver.tolerance)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    deltas = integrality_deltas(d, w, j, cfg.solver.degree)
    out = {"ok": ok, "N": N, "log_residual": resid, "c": c, "deltas": [x for x, _ in deltas]}
    return _Outcome(out, EXIT_OK if ok else EXIT_VERDICT)


def cmd_product_check(cfg: RunConfig):
    o = cfg.options
    factors = o.get("factors")
    if not factors:
        raise ConfigError("options.factors is required")
    results, gammas, ps, details = [], [], [], []
    for f in factors:
        sub = RunConfig.from_dict({
            "domain": f["domain"], "weight": f.get("weight", {}), "jets": f["jets"],
            "solver": cfg.to_dict()["solver"],
        })
        d = sub.build_domain()
        w = sub.build_weight(d)
        j = sub.build_jets()
        deltas = integrality_deltas(d, w, j, cfg.solver.degree)
        results.append(deltas)
        gammas.append(list(j.orders))
        ps.append(list(j.p))
        details.append({"deltas": [x for x, _ in deltas], "distances": [x for _, x in deltas]})
    try:
        ok = product_combine(results, o.get("p_weights", ps), o.get("gamma_orders", gammas), cfg.solver.tolerance)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return _Outcome({"equality": ok, "factors": details}, EXIT_OK if ok else EXIT_VERDICT)


def cmd_dump_field(cfg: RunConfig):
    d = cfg.build_domain()
    o = cfg.options
    kind = o.get("field", "measure")
    if kind == "measure":
        k = int(o.get("index", 0))
        ms = harmonic_measures(d, cfg.solver.degree)
        if not 0 <= k < len(ms):
            raise ConfigError(f"measure index {k} out of range")
        f = ms[k]
    elif kind == "green":
        z0 = _cplx(o["pole"])
        _check_inside(d, [z0])
        f = green_function(d, z0, cfg.solver.degree)
    else:
        raise ConfigError(f"unknown field {kind!r}")
    nx, ny = (int(v) for v in o.get("grid", [101, 101]))
    x0, x1, y0, y1 = d.bounding_box()
    xs, ys = np.linspace(x0, x1, nx), np.linspace(y0, y1, ny)
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["x", "y", "value"])
    inside_vals = []
    for y in ys:
        z = xs + 1j * y
        inside = contains(d, z)
        vals = np.full(nx, np.nan)
        if np.any(inside):
            vals[inside] = f(z[inside], check=False)
            if kind == "green":
                vals[z == f.pole] = -np.inf
        inside_vals.append(vals[inside])
        for x, v in zip(xs, vals):
            wr.writerow([repr(float(x)), repr(float(y)), "NaN" if np.isnan(v) else repr(float(v))])
    finite = np.concatenate(inside_vals) if inside_vals else np.array([])
    residual = f.residual
    meta = {"field": kind, "grid": [nx, ny], "inside": int(finite.size),
            "min": float(np.min(finite)) if finite.size else None,
            "max": float(np.max(finite)) if finite.size else None, "residual": residual}
    return _Outcome(meta, _quality(cfg, residual), residual), buf.getvalue()


HANDLERS = {
    "solve-dirichlet": cmd_solve_dirichlet, "green": cmd_green, "capacity": cmd_capacity,
    "harmonic-measures": cmd_harmonic_measures, "check-equality": cmd_check_equality,
    "search-equality": cmd_search_equality, "build-counterexample": cmd_build_counterexample,
    "certify-counterexample": cmd_certify_counterexample, "annulus-check": cmd_annulus_check,
    "product-check": cmd_product_check, "dump-field": cmd_dump_field,
}


def build_parser():
    p = argparse.ArgumentParser(prog="planar-suita", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="JSON config file")
    p.add_argument("--out", help="output file (JSON report, or CSV for dump-field); default stdout")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--tolerance", type=float, help="override the integrality tolerance")
    p.add_argument("--degree", type=int, help="override the harmonic basis degree")
    p.add_argument("--no-timings", action="store_true", help="omit wall-clock timings from the report")
    return p


def _apply_flags(cfg: RunConfig, args) -> RunConfig:
    solver = cfg.solver
    if args.tolerance is not None:
        solver = replace(solver, tolerance=args.tolerance)
    if args.degree is not None:
        solver = replace(solver, degree=args.degree)
    cfg = replace(cfg, solver=solver)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    # re-validate the overridden values
    return RunConfig.from_dict(cfg.to_dict())


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors, which would collide with the verdict code
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    t0 = time.perf_counter()
    report = {"command": args.command, "version": __version__}
    csv_text = None
    try:
        cfg = _apply_flags(RunConfig.load(args.config), args)
        report["config"] = cfg.to_dict()
        result = HANDLERS[args.command](cfg)
        if isinstance(result, tuple):
            result, csv_text = result
        report["outputs"] = result.outputs
        report["residuals"] = {"max_harmonic": result.residual}
        code = result.code
    except ConfigError as exc:
        report["error"] = f"config error: {exc}"
        code = EXIT_CONFIG
    except (QuadratureFailure, np.linalg.LinAlgError, FloatingPointError) as exc:
        report["error"] = f"numerical failure: {exc}"
        code = EXIT_NUMERIC
    report["exit_code"] = code
    if not args.no_timings:
        report["timings"] = {"total_s": time.perf_counter() - t0}
    text = json.dumps(_to_json(report), sort_keys=True, indent=2) + "\n"

    if csv_text is not None and args.out:
        with open(args.out, "w") as fh:
            fh.write(csv_text)
        sys.stderr.write(text)
    elif csv_text is not None:
        sys.stdout.write(csv_text)
        sys.stderr.write(text)
    elif args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
