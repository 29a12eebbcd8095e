"""Command-line front end: ``covering-webs {web,dim,verify,orbit}``.

Exit codes: 0 success, 1 a verification check failed, 2 bad configuration,
3 tracing failure or an orbit that left the domain.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, benenti, flow, systems, verify, webs
from .geometry import DomainError, Plane2, Sphere2, sector_bounds
from .killing import KillingTensorSpec, SphereTensorSpec, dimension_report
from .rational import RationalSyntaxError, format_rational, parse_list, parse_number, parse_rational

SEED_ENV = "COVERING_WEBS_SEED"


class ConfigError(ValueError):
    pass


def _seed() -> int:
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV}={raw!r} is not an integer") from None


def _dump(obj, path=None):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _floats(text, n=None, what="values"):
    vals = [float(v) for v in parse_list(text, parse_number)]
    if n is not None and len(vals) != n:
        raise ConfigError(f"{what} needs {n} comma-separated numbers, got {len(vals)}")
    return vals


# -- web --------------------------------------------------------------------------------

FIGURES = {
    "1": [("plane", "elliptic", k, "nonconformal", None) for k in ("1", "1/2", "2")],
    "4": [("plane", "elliptic", "1/2", "conformal", None), ("plane", "elliptic", "2", "conformal", 0)],
    "5": [("plane", "elliptic2", k, "nonconformal", None) for k in ("1", "3/2", "3")],
    "6": [("plane", "parabolic", k, "nonconformal", None) for k in ("1", "2/3", "3")],
    "7": [("sphere", "conical", k, "nonconformal", None) for k in ("1", "4/3", "3")],
    "8": [("euclid3", None, "2", None, None)],
}


def _web_jobs(args):
    """Fully validated list of web jobs ``(name, callable)``."""
    if args.figure:
        if args.figure not in FIGURES:
            raise ConfigError(f"unknown figure {args.figure!r}; choose from {sorted(FIGURES)}")
        specs = FIGURES[args.figure]
    else:
        if args.k is None:
            raise ConfigError("--k is required without --figure")
        specs = [(args.family, args.tensor, args.k, args.mode, args.sector)]
    jobs = []
    for family, tensor, k_text, mode, sector in specs:
        k = parse_number(k_text)
        if float(k) <= 0:
            raise ConfigError("k must be positive")
        name = f"{args.prefix or 'web'}" if not args.figure else f"fig{args.figure}_k{str(k_text).replace('/', '-')}"
        if family == "euclid3":
            jobs.append((name, _cloud_job(args, k)))
            continue
        if args.coeffs:
            coeffs = _floats(args.coeffs, 6, "--coeffs")
            K = (KillingTensorSpec if family == "plane" else SphereTensorSpec)(tuple(coeffs), k)
        else:
            preset = tensor or ("elliptic" if family == "plane" else "conical")
            try:
                K = webs.plane_preset(preset, k) if family == "plane" else webs.sphere_preset(preset, k)
            except ValueError as err:
                raise ConfigError(str(err)) from None
        if args.window:
            w = _floats(args.window, None, "--window")
            if len(w) not in (2, 4):
                raise ConfigError("--window takes lo,hi or lo,hi,phi_lo,phi_hi")
            try:
                window = webs.Window(*w)
            except webs.WebError as err:
                raise ConfigError(str(err)) from None
        elif family == "plane":
            window = webs.Window(0.2, 3.0)
        else:
            window = webs.Window(0.05, math.pi - 0.05)
        if sector is not None:
            if mode != "conformal":
                raise ConfigError("--sector only applies to conformal mode")
            lo, hi = sector_bounds(int(sector), k)
            if sector < 0 or lo >= 2 * math.pi:
                raise ConfigError(f"sector {sector} does not exist for k = {k_text}")
            window = webs.Window(window.lo0, window.hi0, max(lo, window.lo1), min(hi, window.hi1))
        levels = int(args.levels)
        if levels < 1:
            raise ConfigError("--levels must be at least 1")
        grid = tuple(int(v) for v in _floats(args.grid, 2, "--grid"))
        model = Plane2(k) if family == "plane" else Sphere2(k)

        def run(K=K, model=model, window=window, mode=mode, family=family, levels=levels, grid=grid):
            if family == "sphere":
                return webs.spherical_conical_web(K, window, levels, mode, grid)
            return webs.trace_web(K, model, window, levels, mode, grid)

        jobs.append((name, run))
    return jobs


def _cloud_job(args, k):
    params = _floats(args.params or "1,4,8", 3, "--params")
    if len(set(params)) < 3:
        raise ConfigError("ellipsoidal parameters must be distinct")
    levels = int(args.levels)
    n = int(args.cloud_grid)

    def run():
        grid = benenti.ShellGrid((0.05, 3.0, n), (0.05, math.pi - 0.05, n), (0.0, 2 * math.pi, 2 * n))
        clouds = []
        for idx in (1, 2, 3):
            # levels at evenly spaced quantiles of the eigenvalue over the box
            r = np.linspace(0.05, 3.0, 12)
            th = np.linspace(0.05, math.pi - 0.05, 12)
            ph = np.linspace(0, 2 * math.pi, 24)
            R, T, P = np.meshgrid(r, th, ph, indexing="ij")
            kf = float(k)
            X, Y, Z = kf * R * np.sin(T) * np.cos(P / kf), kf * R * np.sin(T) * np.sin(P / kf), kf * R * np.cos(T)
            rho = np.linalg.eigvalsh(benenti._ellipsoidal_batch(params, X, Y, Z))[..., idx - 1]
            for level in np.quantile(rho, np.linspace(0.2, 0.8, levels)):
                pts = benenti.eigen_surface_sample(params, k, float(level), idx, grid, args.cloud_mode)
                clouds.append((idx, float(level), pts))
        return clouds

    return run


def cmd_web(args) -> int:
    jobs = _web_jobs(args)
    out_dir = Path(args.out_dir)
    results = {}
    outputs = []
    for name, run in jobs:
        try:
            res = run()
        except webs.WebError as err:
            print(f"error: {err}", file=sys.stderr)
            return 3
        outputs.append((name, res))
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, res in outputs:
        if res and isinstance(res[0], tuple):
            path = out_dir / f"{name}_cloud.csv"
            benenti.write_cloud_csv(path, res)
            results[name] = {"points": {str(i): int(sum(len(p) for j, _, p in res if j == i)) for i in (1, 2, 3)}}
            continue
        if args.format in ("svg", "both"):
            (out_dir / f"{name}.svg").write_text(webs.svg_text(res, header=f"covering_webs {__version__}"))
        if args.format in ("csv", "both"):
            webs.write_curves_csv(out_dir / f"{name}.csv", res)
        results[name] = webs.summarize(res)
    _dump(results)
    return 0


# -- dim ---------------------------------------------------------------------------------


def cmd_dim(args) -> int:
    if args.family in ("sphere3",):
        if not args.params:
            raise ConfigError("--params a,b,c is required for sphere3")
        groups = [tuple(parse_list(g, parse_rational)) for g in args.params.split(";")]
        for g in groups:
            if len(g) != 3:
                raise ConfigError("--params needs three rationals a,b,c")
        order = args.order or "vector"
        rows = [dimension_report("sphere3", order, g) for g in groups]
        for r in rows:
            r["rule"] = "derived rule: V3..V6 global iff b/a and c/a are integers"
    elif args.family == "cylinder":
        rows = [dimension_report("cylinder", args.order or "vector", (1,))]
        rows[0]["parameter"] = "-"
    else:
        if not args.k:
            raise ConfigError("--k is required")
        ks = parse_list(args.k, parse_rational)
        rows = [dimension_report(args.family, args.order or "vector", (k,)) for k in ks]
    for r in rows:
        if any(Fraction(p) <= 0 for p in r["parameter"].split(",") if p != "-"):
            raise ConfigError("parameters must be positive")
    _dump(rows, args.out)
    return 0


# -- verify --------------------------------------------------------------------------------

SUITES = ("kc", "killing", "sphere3", "curvature", "parabolic", "seam", "benenti", "ttw", "pw", "drift")


def _rational_arg(text, name, default=None):
    if text is None:
        if default is None:
            raise ConfigError(f"--{name} is required for this suite")
        return default
    return parse_rational(text)


def cmd_verify(args) -> int:
    seed = _seed()
    suite = args.suite
    params = {}
    if suite == "kc":
        k = _rational_arg(args.k, "k")
        params = {"k": format_rational(k), "a": args.a}
        run = lambda: verify.suite_kc(k, float(args.a), seed)  # noqa: E731
    elif suite == "killing":
        k = _rational_arg(args.k, "k")
        params = {"k": format_rational(k)}
        run = lambda: verify.suite_killing(k, seed)  # noqa: E731
    elif suite == "sphere3":
        abc = parse_list(args.params or "1,1,1", parse_rational)
        if len(abc) != 3:
            raise ConfigError("--params needs a,b,c")
        params = {"params": [format_rational(v) for v in abc]}
        run = lambda: verify.suite_sphere3(abc, seed)  # noqa: E731
    elif suite == "curvature":
        k = _rational_arg(args.k, "k", Fraction(7, 3))
        params = {"k": format_rational(k)}
        run = lambda: verify.suite_curvature(k, seed=seed)  # noqa: E731
    elif suite == "parabolic":
        k = _rational_arg(args.k, "k", Fraction(1))
        params = {"k": format_rational(k)}
        run = lambda: verify.suite_parabolic(k, seed)  # noqa: E731
    elif suite == "seam":
        ks = parse_list(args.k, parse_rational) if args.k else list(verify.SEAM_KS)
        params = {"k": [format_rational(v) for v in ks]}
        run = lambda: verify.suite_seam(ks)  # noqa: E731
    elif suite == "benenti":
        k = _rational_arg(args.k, "k", Fraction(2))
        abc = parse_list(args.params or "1,4,8", parse_rational)
        if len(abc) != 3:
            raise ConfigError("--params needs a,b,c")
        params = {"k": format_rational(k), "params": [format_rational(v) for v in abc]}
        run = lambda: verify.suite_benenti(tuple(float(v) for v in abc), k, seed)  # noqa: E731
    elif suite in ("ttw", "pw"):
        h = _rational_arg(args.h, "h")
        spec = _system_from_args(args, suite, h)
        params = {key: (format_rational(v) if isinstance(v, Fraction) else v) for key, v in spec.params.items()}
        run = lambda: verify.suite_system(spec, seed)  # noqa: E731
    elif suite == "drift":
        k = _rational_arg(args.k, "k", Fraction(1))
        params = {"k": format_rational(k), "steps": args.steps}
        run = lambda: verify.suite_drift(k, float(args.a), int(args.steps))  # noqa: E731
    else:
        raise ConfigError(f"unknown suite {suite!r}")
    report = verify.as_report(suite, params, run())
    _dump(report, args.out)
    return 0 if report["passed"] else 1


# -- orbit ------------------------------------------------------------------------------------


def _num_arg(args, name, default=0.0):
    v = getattr(args, name)
    return default if v is None else parse_number(v)


def _system_from_args(args, system, h=None) -> systems.SystemSpec:
    form = args.form or ("covering_form" if system == "kc" else "base_form")
    if system == "kc":
        return systems.kc(_num_arg(args, "a", -1), parse_number(args.k) if args.k else 1)
    if h is None:
        h = parse_number(args.h) if args.h else 1
    if system == "ttw":
        return systems.ttw(_num_arg(args, "alpha1"), _num_arg(args, "alpha2"), _num_arg(args, "omega", 1), h, form)
    if system == "oscillator":
        return systems.oscillator(_num_arg(args, "omega", 1), h, form)
    if system == "pw":
        if form == "base_form":
            return systems.pw_base(_num_arg(args, "E", 2), _num_arg(args, "c1"), _num_arg(args, "c2"), h)
        return systems.pw_covering(_num_arg(args, "alpha"), _num_arg(args, "beta"), _num_arg(args, "Q", 4), h)
    raise ConfigError(f"unknown system {system!r}")


def cmd_orbit(args) -> int:
    spec = _system_from_args(args, args.system)
    z0 = _floats(args.state, 4, "--state")
    s0 = systems.PhaseState.from_array(z0)
    if float(args.dt) <= 0 or int(args.steps) < 0:
        raise ConfigError("--dt must be positive and --steps non-negative")
    ints = systems.integrals(spec)
    try:
        for I in ints:
            I(s0)
    except DomainError as err:
        raise ConfigError(f"initial state: {err}") from None
    traj = flow.integrate(ints[0], s0, float(args.dt), int(args.steps))
    if args.out:
        flow.write_trajectory_csv(args.out, traj, ints, every=int(args.every))
    summary = {
        "system": spec.family,
        "form": spec.form,
        "steps": len(traj) - 1,
        "dt": float(args.dt),
        "status": traj.status,
        "message": traj.message,
        "drift": flow.conservation_drift(traj, ints),
        "relative_drift": flow.conservation_drift(traj, ints, relative=True),
        "winding_number": flow.winding_number(traj) if len(traj) else 0.0,
        "angular_extent_turns": flow.winding_extent(traj),
        "r_range": [float(traj.z[:, 0].min()), float(traj.z[:, 0].max())],
    }
    _dump(summary, args.summary)
    return 3 if traj.status == "domain_exit" else (1 if traj.halted else 0)


# -- parser ------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="covering-webs", description="Separable webs and superintegrable systems on Riemannian coverings.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    w = sub.add_parser("web", help="trace a coordinate web to SVG/CSV")
    w.add_argument("--figure", help="reproduce a figure set: 1, 4, 5, 6, 7 or 8")
    w.add_argument("--family", choices=("plane", "sphere", "euclid3"), default="plane")
    w.add_argument("--k", help="covering index, p/q or decimal")
    w.add_argument("--tensor", help="preset: " + ", ".join(webs.PLANE_PRESETS + webs.SPHERE_PRESETS))
    w.add_argument("--coeffs", help="six tensor coefficients b1..b6 (or s1..s6 on the sphere)")
    w.add_argument("--mode", choices=("nonconformal", "conformal", "rectangle"), default="nonconformal")
    w.add_argument("--sector", type=int, help="conformal mode: draw only sector m")
    w.add_argument("--window", help="lo,hi[,phi_lo,phi_hi] in chart coordinates")
    w.add_argument("--levels", default="6", help="levels per eigenvalue")
    w.add_argument("--grid", default="400,400")
    w.add_argument("--params", help="ellipsoidal a,b,c for euclid3 clouds")
    w.add_argument("--cloud-grid", default="40", help="samples per chart axis for euclid3 clouds")
    w.add_argument("--cloud-mode", choices=("covering", "nonconformal"), default="nonconformal")
    w.add_argument("--format", choices=("svg", "csv", "both"), default="both")
    w.add_argument("--out-dir", default=".")
    w.add_argument("--prefix", default="web")
    w.set_defaults(func=cmd_web)

    d = sub.add_parser("dim", help="global Killing dimensions as JSON")
    d.add_argument("--family", choices=("plane", "sphere", "sphere3", "cylinder"), required=True)
    d.add_argument("--order", choices=("vector", "tensor2"))
    d.add_argument("--k", help="comma-separated rationals")
    d.add_argument("--params", help="a,b,c rationals; several triples separated by ';'")
    d.add_argument("--out")
    d.set_defaults(func=cmd_dim)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", choices=SUITES, required=True)
    v.add_argument("--k")
    v.add_argument("--h")
    v.add_argument("--a", default="-1")
    v.add_argument("--params")
    v.add_argument("--form", choices=systems.FORMS)
    for name in ("alpha1", "alpha2", "omega", "alpha", "beta", "Q", "E", "c1", "c2"):
        v.add_argument(f"--{name}")
    v.add_argument("--steps", default="10000")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("orbit", help="integrate an orbit")
    o.add_argument("--system", choices=("kc", "ttw", "pw", "oscillator"), required=True)
    o.add_argument("--form", choices=systems.FORMS)
    for name in ("a", "k", "h", "alpha1", "alpha2", "omega", "alpha", "beta", "Q", "E", "c1", "c2"):
        o.add_argument(f"--{name}")
    o.add_argument("--state", required=True, help="r,phi,p_r,p_phi")
    o.add_argument("--dt", type=float, default=1e-3)
    o.add_argument("--steps", type=int, default=10000)
    o.add_argument("--out", help="trajectory CSV")
    o.add_argument("--every", default="1", help="write every n-th row")
    o.add_argument("--summary", help="summary JSON (default stdout)")
    o.set_defaults(func=cmd_orbit)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _seed()
        return args.func(args)
    except (ConfigError, RationalSyntaxError, DomainError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
