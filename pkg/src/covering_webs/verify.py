"""Fixed-seed verification suites that back ``covering-webs verify``."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import benenti, flow, systems, webs
from .dual import central_gradient
from .geometry import Euclid3, Flat, Plane2, Sphere2, Sphere3, polar, random_points, riemann_norm, sectional_curvature_at
from .killing import (
    TENSOR_NAMES,
    VECTOR_NAMES,
    KillingTensorSpec,
    KillingVectorSpec,
    S3KillingForm,
    is_global,
    killing_residual,
    to_fraction,
    unit,
)
from .rational import format_rational


@dataclass
class Check:
    name: str
    value: float
    tolerance: float
    passed: bool
    comparison: str = "<"
    note: str = ""


def _lt(name, value, tol, note=""):
    value = float(value)
    return Check(name, value, tol, bool(value < tol), "<", note)


def _eq(name, value, expected, note=""):
    return Check(name, value, expected, bool(value == expected), "==", note)


def _info(name, value, note=""):
    return Check(name, value, float("nan"), True, "info", note)


def suite_killing(k, seed=0, n=50) -> list[Check]:
    rng = np.random.default_rng(seed)
    model = Plane2(k)
    pts = random_points(model, n, rng)
    out = []
    for name in VECTOR_NAMES:
        out.append(_lt(f"vector {name} residual", killing_residual(KillingVectorSpec(unit(VECTOR_NAMES, name), k), model, pts), 1e-6))
    for name in TENSOR_NAMES:
        out.append(_lt(f"tensor {name} residual", killing_residual(KillingTensorSpec(unit(TENSOR_NAMES, name), k), model, pts), 1e-6))
    return out


def suite_sphere3(params, seed=0, n=50) -> list[Check]:
    rng = np.random.default_rng(seed)
    model = Sphere3(*params)
    pts = random_points(model, n, rng)
    return [_lt(f"S3 form V{j} residual", killing_residual(S3KillingForm(j, tuple(params)), model, pts), 1e-5) for j in range(1, 7)]


def suite_curvature(k=Fraction(7, 3), params=(2, 1, 5), seed=0, n=100) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []
    for model, target in ((Plane2(k), 0.0), (Sphere2(k), 1.0), (Sphere3(*params), 1.0 / float(params[0]) ** 2)):
        vals = [sectional_curvature_at(model, p) for p in random_points(model, n, rng)]
        out.append(_lt(f"{model!r} curvature - {target:g}", max(abs(v - target) for v in vals), 1e-7))
    e3 = Euclid3(k)
    out.append(_lt(f"{e3!r} Riemann norm", max(riemann_norm(e3, p) for p in random_points(e3, n, rng)), 1e-7))
    return out


def suite_parabolic(k, seed=0, n=200) -> list[Check]:
    rng = np.random.default_rng(seed)
    kf = float(k)
    K = webs.plane_preset("parabolic", k)
    model = Plane2(k)
    rt = 0.0
    eig = 0.0
    met = 0.0
    for _ in range(n):
        # principal branch: k phi in (-pi/2, pi/2) mod 2 pi, phi < 2 pi
        big = rng.uniform(-math.pi / 2 + 1e-3, math.pi / 2 - 1e-3)
        big = big % (2 * math.pi)
        if big / kf >= 2 * math.pi:
            big = rng.uniform(1e-3, math.pi / 2 - 1e-3)
        p = polar(rng.uniform(0.2, 3.0), big / kf)
        u, v = webs.parabolic_from_polar(p, k)
        q = webs.polar_from_parabolic(u, v, k)
        rt = max(rt, abs(q.coords[0] - p.coords[0]), abs(q.coords[1] - p.coords[1]))
        e = webs.eigen_of(K, model, p)
        eig = max(eig, abs(e.eigenvalues[0] - v), abs(e.eigenvalues[1] - u))
        met = max(met, pullback_mismatch(u, v, k))
    return [
        _lt("roundtrip polar->parabolic->polar", rt, 1e-10),
        _lt("eigenvalues vs (v, u)", eig, 1e-10),
        _lt("metric vs finite-difference pullback (relative)", met, 1e-6),
    ]


def pullback_mismatch(u, v, k) -> float:
    """Relative difference between the closed-form (u, v) metric and ``J^T g J``."""
    kf = float(k)

    def chart(w):
        # unwrapped inverse map: the seam at Phi = 0 is invisible to the differences
        return np.array([kf * kf * (w[0] - w[1]), math.asin((w[0] + w[1]) / (w[0] - w[1])) / kf])

    x = np.array([u, v])
    # the chart has square-root behaviour at u = 0 and v = 0: scale the step to the nearer one
    step = 1e-3 * min(1.0, abs(u), abs(v))
    J = np.empty((2, 2))
    for i in range(2):
        J[i, :] = central_gradient(lambda w: chart(w)[i], x, step)
    g = Plane2(k).matrix(chart(x))  # the metric does not depend on phi
    pulled = J.T @ g @ J
    exact = webs.parabolic_metric(u, v, k)
    return float(np.max(np.abs(pulled - exact)) / np.max(np.abs(exact)))


SEAM_KS = (Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3))


def suite_seam(ks=SEAM_KS) -> list[Check]:
    agree = 0
    total = 0
    for k in ks:
        for name in TENSOR_NAMES:
            K = KillingTensorSpec(unit(TENSOR_NAMES, name), k)
            agree += webs.seam_continuity(K, r_probe=1.0) == is_global({f * k for f in K.frequencies()})
            total += 1
    return [_eq("seam test agrees with frequency rule", agree, total)]


def suite_kc(k, a=-1.0, seed=0) -> list[Check]:
    rng = np.random.default_rng(seed)
    spec = systems.kc(a, k)
    H, L, K = systems.kc_integrals(a, k)
    states = systems.sample_states(spec, 50, rng)
    hl = max(abs(systems.poisson_bracket(H, L, s)) for s in states)
    hk = max(abs(systems.poisson_bracket(H, K, s)) for s in states)
    cross = 0.0
    for s in states[:10]:
        d = systems.phase_gradient(K, s, "dual")
        c = systems.phase_gradient(K, s, "central")
        cross = max(cross, float(np.max(np.abs(d - c)) / max(1.0, np.max(np.abs(d)))))
    ranks = [systems.independence_rank([H, L, K], s) for s in states[:20]]
    report = systems.globality_report(spec)
    k_global = next(r["global"] for r in report["integrals"] if r["name"] == "K")
    return [
        _lt("max |{H,L}|", hl, 1e-9),
        _lt("max |{H,K}|", hk, 1e-9),
        _lt("dual vs central gradient of K (relative)", cross, 1e-7),
        _eq("min rank(H,L,K) over 20 states", min(ranks), 3),
        _eq("K global", k_global, to_fraction(k).denominator == 1, "global iff k is an integer"),
        _info("K frequencies", ",".join(report["integrals"][2]["frequencies"])),
    ]


def suite_system(spec: systems.SystemSpec, seed=0) -> list[Check]:
    rep = systems.verification_report(spec, 50, seed)
    out = [
        _lt(f"max |{{H,{r['name']}}}|", r["max_bracket_residual"], 1e-9) for r in rep["integrals"] if r["name"] != "H"
    ]
    try:
        g = systems.globality_report(spec)
        out.append(_info("regime", g["regime_verdict"]))
        out.extend(_info(f"{r['name']} global", r["global"]) for r in g["integrals"])
    except ValueError as err:
        out.append(_info("globality", str(err)))
    return out


def suite_benenti(params, k, seed=0) -> list[Check]:
    rng = np.random.default_rng(seed)
    flat = random_points(Flat(3), 100, rng)
    cov = random_points(Euclid3(k), 50, rng)
    out = [
        _lt("E3 K1 residual", benenti.cartesian_residual(params, 1, flat), 1e-5),
        _lt("E3 K2 residual", benenti.cartesian_residual(params, 2, flat), 1e-5),
        _lt("covering K'1 residual", benenti.covering_residual(params, k, 1, cov), 1e-5),
        _lt("covering K'2 residual", benenti.covering_residual(params, k, 2, cov), 1e-5),
    ]
    cons = 0.0
    comp = 0.0
    rel = 0.0
    for p in cov:
        a = benenti.covering_basis(params, k, p)
        b = benenti.pulled_back_basis(params, k, p)
        cons = max(cons, max(float(np.max(np.abs(x - y))) for x, y in zip(a, b)))
        Lp = benenti.pullback_L(params, k, p)
        comp = max(comp, abs(Lp[1, 0] - benenti.theta_r_component(params, k, p)))
        rel = max(rel, abs(Lp[0, 1] - p[0] ** 2 * Lp[1, 0]))
    out += [
        _lt("pullback consistency", cons, 1e-8),
        _lt("L'^theta_r closed form", comp, 1e-10),
        _lt("L'^r_theta - r^2 L'^theta_r", rel, 1e-10),
    ]
    return out


def suite_drift(k=1, a=-1.0, steps=10000, dt=1e-3) -> list[Check]:
    H, L, K = systems.kc_integrals(a, k)
    s0 = systems.state(1.0, math.pi / (2 * float(k)), 0.0, 1.1)
    traj = flow.integrate(H, s0, dt, steps)
    d = flow.conservation_drift(traj, [H, L, K], relative=True)
    return [_lt(f"relative drift of {n}", v, 1e-6) for n, v in d.items()] + [_info("steps", len(traj) - 1, traj.status)]


def as_report(suite: str, params: dict, checks: list[Check]) -> dict:
    return {
        "suite": suite,
        "parameters": params,
        "passed": all(c.passed for c in checks),
        "checks": [_jsonable(asdict(c)) for c in checks],
    }


def _jsonable(d):
    out = {}
    for key, v in d.items():
        if isinstance(v, (np.floating, np.integer)):
            v = v.item()
        if isinstance(v, np.bool_):
            v = bool(v)
        if isinstance(v, Fraction):
            v = format_rational(v)
        if isinstance(v, float) and not math.isfinite(v):
            v = None
        out[key] = v
    return out
