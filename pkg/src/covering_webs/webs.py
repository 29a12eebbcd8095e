"""Separable coordinate webs from Killing-tensor eigenvalues.

The web of a Killing 2-tensor ``K`` is the family of level curves of the two
eigenvalues of the endomorphism ``K^i_j = K^il g_lj``.  Curves are extracted on
an ``(r, phi)`` (or ``(theta, phi)``) grid, glued across the ``phi = 0 ~ 2 pi``
seam when the display identifies the two boundaries, and drawn in the plane
either non-conformally, ``(r cos phi, r sin phi)``, or through the covering
angle ``k phi``.

Also here: the parabolic chart of the plane covering and the seam test for
Killing tensors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .contour import isolines
from .geometry import TWO_PI, ChartPoint, DomainError, MetricModel, Plane2, Sphere2, polar, random_points
from .killing import (
    SPHERE_TENSOR_NAMES,
    TENSOR_NAMES,
    KillingTensorSpec,
    SphereTensorSpec,
    killing_residual,
)

DEGENERATE_GAP = 1e-10


class WebError(RuntimeError):
    """The requested web cannot be traced (empty window, constant eigenvalues)."""


@dataclass
class EigenData:
    eigenvalues: tuple
    eigenvectors: tuple
    degenerate: bool


def endomorphism(K, model: MetricModel, x) -> np.ndarray:
    """Mixed tensor ``K^i_j`` at raw coordinates."""
    up = np.array(K.contravariant(tuple(x)), dtype=float)
    return up @ model.matrix(x)


def eigen_of(K, model: MetricModel, p) -> EigenData:
    """Eigenvalues (ascending) and ``g``-orthonormal eigenvectors of ``K^i_j``.

    Solved as the symmetric pencil ``(g K g) v = rho g v``.
    """
    if isinstance(p, ChartPoint):
        model.check(p)
        x = p.coords
    else:
        x = tuple(map(float, p))
    g = model.matrix(x)
    up = np.array(K.contravariant(x), dtype=float)
    vals, vecs = scipy.linalg.eigh(g @ up @ g, g)
    degenerate = bool(abs(vals[-1] - vals[0]) < DEGENERATE_GAP * max(1.0, abs(vals[-1])))
    return EigenData(tuple(float(v) for v in vals), tuple(vecs[:, i].copy() for i in range(len(vals))), degenerate)


def eigenvalue_fields(K, model: MetricModel, x0, x1):
    """Closed-form ``(rho1, rho2)`` over coordinate arrays, ``rho1 <= rho2``."""
    kup = K.contravariant((x0, x1))
    g00, g11 = model.diagonal((x0, x1))
    m00 = kup[0][0] * g00
    m11 = kup[1][1] * g11
    m01m10 = kup[0][1] * kup[1][0] * g00 * g11
    tr = m00 + m11
    disc = np.sqrt(np.maximum((m00 - m11) ** 2 + 4.0 * m01m10, 0.0))
    return 0.5 * (tr - disc), 0.5 * (tr + disc)


# -- parabolic chart ---------------------------------------------------------------


def parabolic_from_polar(p, k) -> tuple[float, float]:
    """``(u, v)`` with ``u = r (sin k phi + 1) / 2k^2 >= 0``, ``v = r (sin k phi - 1) / 2k^2 <= 0``."""
    if isinstance(p, ChartPoint):
        if p.chart != "polar2":
            raise DomainError(f"expected a polar2 point, got {p.chart}")
        r, phi = p.coords
    else:
        r, phi = polar(*p).coords
    k = float(k)
    s = math.sin(k * phi)
    return r * (s + 1.0) / (2 * k * k), r * (s - 1.0) / (2 * k * k)


def polar_from_parabolic(u: float, v: float, k) -> ChartPoint:
    """Inverse on the principal ``arcsin`` branch.

    Only one petal of the covering is reached; ``k phi`` lands in
    ``[0, pi/2] U [3 pi/2, 2 pi)``.  Points of that petal that fall outside
    ``0 <= phi < 2 pi`` (possible for ``k < 1``) raise :class:`DomainError`.
    """
    if not (u > 0 and v < 0):
        raise DomainError(f"parabolic chart needs u > 0 > v, got u={u!r}, v={v!r}")
    k = float(k)
    s = min(1.0, max(-1.0, (u + v) / (u - v)))
    big_phi = math.asin(s)
    if big_phi < 0:
        big_phi += TWO_PI
    return polar(k * k * (u - v), big_phi / k)


def parabolic_metric(u: float, v: float, k) -> np.ndarray:
    """Plane-covering metric in ``(u, v)``: ``k^4 (u - v) diag(1/u, -1/v)``."""
    if u <= 0 or v >= 0:
        raise DomainError(f"parabolic chart needs u > 0 > v, got u={u!r}, v={v!r}")
    k4 = float(k) ** 4
    return np.diag([k4 * (u - v) / u, -k4 * (u - v) / v])


# -- presets ---------------------------------------------------------------------

# confocal conics with foci at (x0 +- c, y0); centre off the origin so that
# the pattern is not symmetric under phi -> phi + pi
_X0, _Y0, _C = 0.5, 0.25, 1.0


def elliptic_coeffs(x0: float, y0: float, c: float) -> tuple:
    """``R'^2 + c^2 T_x^2`` with ``R'`` the rotation about ``(x0, y0)``: confocal conics, foci ``(x0 +- c, y0)``."""
    return (
        1.0,
        -2 * y0,
        -2 * x0,
        (x0**2 + y0**2 + c**2) / 2,
        x0 * y0,
        (x0**2 - y0**2 - c**2) / 2,
    )


def plane_preset(name: str, k) -> KillingTensorSpec:
    """Named Killing tensors of the plane covering.

    ``elliptic``: confocal conics with foci ``(0.5 +- 1, 0.25)``;
    ``elliptic2``: foci ``(-0.3 +- 0.8, 0.6)``; ``parabolic``: the tensor
    whose eigenvalues are the parabolic coordinates ``(v, u)``; ``polar``:
    ``R^2``; ``cartesian``: ``T_x^2`` (constant eigenvalues, so it has no
    traceable web).
    """
    if name == "elliptic":
        coeffs = elliptic_coeffs(_X0, _Y0, _C)
    elif name == "elliptic2":
        coeffs = elliptic_coeffs(-0.3, 0.6, 0.8)
    elif name == "parabolic":
        coeffs = (0.0, 1.0 / float(k) ** 2, 0.0, 0.0, 0.0, 0.0)
    elif name == "polar":
        coeffs = (1.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    elif name == "cartesian":
        coeffs = (0.0, 0.0, 0.0, 0.5, 0.0, -0.5)
    else:
        raise ValueError(f"unknown tensor preset {name!r}")
    return KillingTensorSpec(coeffs, k)


def sphere_preset(name: str, k) -> SphereTensorSpec:
    """``conical``: ``L1 L1 + 2 L2 L2`` (spherical-conical web)."""
    if name == "conical":
        return SphereTensorSpec((0.0, 0.0, 0.0, 1.5, 0.0, -0.5), k)
    if name == "polar":
        return SphereTensorSpec((1.0, 0.0, 0.0, 0.0, 0.0, 0.0), k)
    raise ValueError(f"unknown sphere tensor preset {name!r}")


PLANE_PRESETS = ("elliptic", "elliptic2", "parabolic", "polar", "cartesian")
SPHERE_PRESETS = ("conical", "polar")


# -- tracing ------------------------------------------------------------------------


@dataclass(frozen=True)
class Window:
    """Chart rectangle ``lo0 <= x0 <= hi0`` (r or theta), ``lo1 <= phi <= hi1``."""

    lo0: float
    hi0: float
    lo1: float = 0.0
    hi1: float = TWO_PI

    def __post_init__(self):
        if not (self.hi0 > self.lo0 and self.hi1 > self.lo1):
            raise WebError(f"empty window {self}")


@dataclass
class WebCurve:
    eigen_index: int
    level: float
    points: np.ndarray  # plot-plane (x, y)
    closed: bool
    chart_points: np.ndarray = field(repr=False, default=None)  # (x0, phi)


def _display(model: MetricModel, x0, phi, k, mode):
    if mode == "rectangle":
        return np.column_stack([phi, x0])
    ang = phi if mode == "nonconformal" else float(k) * phi
    if mode not in ("nonconformal", "conformal"):
        raise ValueError(f"unknown plot mode {mode!r}")
    return np.column_stack([x0 * np.cos(ang), x0 * np.sin(ang)])


def _identified(window: Window, k, mode) -> bool:
    """Whether the display glues the ``phi = lo1`` and ``phi = hi1`` edges."""
    span = window.hi1 - window.lo1
    if mode == "conformal":
        span *= float(k)
    turns = span / TWO_PI
    return abs(turns - round(turns)) < 1e-9 and round(turns) >= 1


def _glue(lines, nj, tol):
    """Join polylines whose ends sit on opposite phi-edges at the same radius."""
    ends = []  # (line, which_end, i, side)
    for n, (pts, closed) in enumerate(lines):
        if closed:
            continue
        for which, idx in ((0, 0), (1, -1)):
            i, j = pts[idx]
            if abs(j) < 1e-9:
                ends.append((n, which, i, 0))
            elif abs(j - (nj - 1)) < 1e-9:
                ends.append((n, which, i, 1))
    link = {}
    lows = [e for e in ends if e[3] == 0]
    for n, which, i, _ in sorted((e for e in ends if e[3] == 1), key=lambda e: e[2]):
        best = None
        for cand in lows:
            key = (cand[0], cand[1])
            if key in link:
                continue
            d = abs(cand[2] - i)
            if d <= tol and (best is None or d < best[0]):
                best = (d, key)
        if best is not None:
            link[(n, which)] = best[1]
            link[best[1]] = (n, which)

    out = []
    used = set()
    for n, (pts, closed) in enumerate(lines):
        if n in used:
            continue
        if closed:
            used.add(n)
            out.append((pts, True))
            continue
        # walk back to a free end (or detect a cycle)
        start, which = n, 0
        while (start, which) in link:
            prev, pwhich = link[(start, which)]
            start, which = prev, 1 - pwhich
            if start == n:
                break
        # now walk forward from (start, entering end `which`)
        pieces = []
        cur, enter = start, which
        cycle = False
        while True:
            used.add(cur)
            seg = lines[cur][0]
            pieces.append(seg if enter == 0 else seg[::-1])
            leave = 1 - enter
            if (cur, leave) not in link:
                break
            nxt, nenter = link[(cur, leave)]
            if nxt == start and nenter == which:
                cycle = True
                break
            if nxt in used:
                break
            cur, enter = nxt, nenter
        out.append((pieces, cycle))
    return out


def trace_web(
    K,
    model: MetricModel,
    window: Window,
    levels=6,
    mode: str = "nonconformal",
    grid: tuple[int, int] = (400, 400),
    percentiles: tuple[float, float] = (5.0, 95.0),
) -> list[WebCurve]:
    """Level curves of both eigenvalues of ``K`` over ``window``.

    ``levels`` is a count per eigenvalue (spread over the 5th-95th percentile
    of the field, or over ``percentiles``) or a mapping ``{1: [...], 2: [...]}`` of explicit levels.
    Cells where the eigenvalues nearly coincide are skipped, since the sorted
    branches are not smooth there.
    """
    if window.lo0 <= 0 and isinstance(model, Plane2):
        raise WebError("window must exclude r = 0")
    n0, n1 = grid
    x0 = np.linspace(window.lo0, window.hi0, n0)
    x1 = np.linspace(window.lo1, window.hi1, n1)
    X0, X1 = np.meshgrid(x0, x1, indexing="ij")
    rho = eigenvalue_fields(K, model, X0, X1)
    scale = max(float(np.nanmax(np.abs(rho[1]))), 1e-300)
    gap = rho[1] - rho[0]
    mask = gap < 1e-6 * scale
    variable = [float(np.ptp(f[~mask])) > 1e-12 * scale if (~mask).any() else False for f in rho]
    if not any(variable):
        raise WebError("eigenvalue fields are constant or degenerate everywhere; no web to trace")

    seam = _identified(window, getattr(K, "k", 1), mode)
    tol = 0.5 * math.sqrt(2.0)
    curves = []
    for idx, f in enumerate(rho, start=1):
        if not variable[idx - 1]:
            continue
        if isinstance(levels, dict):
            lv = [float(v) for v in levels.get(idx, [])]
        elif int(levels) < 1:
            raise WebError("need at least one level per eigenvalue")
        else:
            lv = [float(v) for v in np.percentile(f[~mask], np.linspace(*percentiles, int(levels)))]
        for level in lv:
            lines = isolines(f, level, mask)
            joined = _glue(lines, n1, tol) if seam else [([p], c) for p, c in lines]
            for pieces, closed in joined:
                if isinstance(pieces, np.ndarray):
                    pieces = [pieces]
                pts = np.vstack(pieces)
                if len(pts) < 2:
                    continue
                c0 = window.lo0 + pts[:, 0] * (window.hi0 - window.lo0) / (n0 - 1)
                c1 = window.lo1 + pts[:, 1] * (window.hi1 - window.lo1) / (n1 - 1)
                xy = _display(model, c0, c1, getattr(K, "k", 1), mode)
                curves.append(WebCurve(idx, level, xy, bool(closed), np.column_stack([c0, c1])))
    return curves


def spherical_conical_web(
    K: SphereTensorSpec, window: Window | None = None, levels=6, mode: str = "nonconformal", grid=(400, 400)
) -> list[WebCurve]:
    """Web of a sphere-covering Killing tensor, certified Killing before tracing."""
    model = Sphere2(K.k)
    if window is None:
        window = Window(0.05, math.pi - 0.05)
    if window.lo0 <= 0 or window.hi0 >= math.pi:
        raise WebError("window must stay inside 0 < theta < pi")
    rng = np.random.default_rng(0)
    residual = killing_residual(K, model, random_points(model, 10, rng))
    if residual >= 1e-6:
        raise WebError(f"tensor failed Killing certification (residual {residual:.3g})")
    return trace_web(K, model, window, levels, mode, grid)


# -- seam -----------------------------------------------------------------------------


def seam_continuity(K, k=None, r_probe: float = 1.0) -> bool:
    """Whether every component of ``K`` returns to its value after ``phi`` turns by ``2 pi``."""
    if r_probe <= 0:
        raise DomainError("r_probe must be positive")
    if k is not None and float(k) != float(K.k):
        K = type(K)(K.coeffs, k)
    a = np.array(K.contravariant((r_probe, 0.0)), dtype=float)
    b = np.array(K.contravariant((r_probe, TWO_PI)), dtype=float)
    return bool(np.max(np.abs(a - b)) <= 1e-9)


# -- crossings --------------------------------------------------------------------


@dataclass
class Crossing:
    x: float
    y: float
    angle: float  # degrees in [0, 90]
    chart: tuple


def _tangent(pts, s, t, reach):
    n = len(pts)
    lo = max(0, s - reach + 1)
    hi = min(n - 1, s + reach)
    return pts[hi] - pts[lo]


def crossing_angles(curves: list[WebCurve], reach: int = 1, margin: int = 2) -> list[Crossing]:
    """Euclidean plot-plane angles where curves of eigenvalue 1 cross curves of eigenvalue 2.

    Tangents are chords spanning ``reach`` segments either side of the
    crossing (``reach=1`` is the crossing segment itself);
    crossings within ``margin`` points of a curve end are ignored.
    """
    first = [c for c in curves if c.eigen_index == 1]
    second = [c for c in curves if c.eigen_index == 2]
    out = []
    for a in first:
        pa = a.points
        amin, amax = pa.min(axis=0), pa.max(axis=0)
        for b in second:
            pb = b.points
            bmin, bmax = pb.min(axis=0), pb.max(axis=0)
            if np.any(amax < bmin) or np.any(bmax < amin):
                continue
            out.extend(_intersections(a, b, reach, margin))
    return out


def _intersections(a: WebCurve, b: WebCurve, reach, margin):
    p0, p1 = a.points[:-1], a.points[1:]
    q0, q1 = b.points[:-1], b.points[1:]
    res = []
    chunk = 512
    for start in range(0, len(p0), chunk):
        P0, P1 = p0[start : start + chunk, None, :], p1[start : start + chunk, None, :]
        d1 = P1 - P0
        d2 = (q1 - q0)[None]
        w = q0[None] - P0
        den = d1[..., 0] * d2[..., 1] - d1[..., 1] * d2[..., 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (w[..., 0] * d2[..., 1] - w[..., 1] * d2[..., 0]) / den
            u = (w[..., 0] * d1[..., 1] - w[..., 1] * d1[..., 0]) / den
        hit = (den != 0) & (t >= 0) & (t < 1) & (u >= 0) & (u < 1)
        for si, sj in np.argwhere(hit):
            s = start + si
            if not a.closed and (s < margin or s > len(p0) - margin):
                continue
            if not b.closed and (sj < margin or sj > len(q0) - margin):
                continue
            ta = _tangent(a.points, s, t[si, sj], reach)
            tb = _tangent(b.points, sj, u[si, sj], reach)
            cosang = abs(ta @ tb) / (np.linalg.norm(ta) * np.linalg.norm(tb))
            ang = math.degrees(math.acos(min(1.0, cosang)))
            xy = a.points[s] + t[si, sj] * (a.points[s + 1] - a.points[s])
            ch = a.chart_points[s] + t[si, sj] * (a.chart_points[s + 1] - a.chart_points[s])
            res.append(Crossing(float(xy[0]), float(xy[1]), ang, (float(ch[0]), float(ch[1]))))
    return res


def tensor_generators(family: str = "plane") -> tuple:
    return TENSOR_NAMES if family == "plane" else SPHERE_TENSOR_NAMES


# -- export -------------------------------------------------------------------------

_COLOURS = {1: "#1f5fa8", 2: "#c0392b"}


def write_curves_csv(path, curves: list[WebCurve]) -> None:
    """Columns ``curve_id, eigen_index, level, point_index, x, y, closed``."""
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["curve_id", "eigen_index", "level", "point_index", "x", "y", "closed"])
        for cid, c in enumerate(curves):
            for i, (x, y) in enumerate(c.points):
                w.writerow([cid, c.eigen_index, repr(float(c.level)), i, f"{x:.10g}", f"{y:.10g}", int(c.closed)])


def svg_text(curves: list[WebCurve], size: int = 600, header: str = "") -> str:
    """One ``path`` per curve; the viewport is fitted to the curves."""
    if curves:
        allpts = np.vstack([c.points for c in curves])
        lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    else:
        lo, hi = np.zeros(2), np.ones(2)
    span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-12))
    pad = 0.02 * span
    scale = size / (span + 2 * pad)

    def tx(p):
        return (p[0] - lo[0] + pad) * scale, (hi[1] - p[1] + pad) * scale

    lines = ['<?xml version="1.0" encoding="UTF-8"?>']
    if header:
        lines.append(f"<!-- {header} -->")
    lines.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">'
    )
    for c in curves:
        pts = [tx(p) for p in c.points]
        d = "M" + " L".join(f"{x:.2f},{y:.2f}" for x, y in pts)
        if c.closed:
            d += " Z"
        lines.append(
            f'<path d="{d}" fill="none" stroke="{_COLOURS.get(c.eigen_index, "#333")}" stroke-width="1" '
            f'data-eigen="{c.eigen_index}" data-level="{float(c.level):.6g}"/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def summarize(curves: list[WebCurve]) -> dict:
    """Curve and closed-curve counts per eigenvalue index."""
    out = {}
    for idx in (1, 2):
        sel = [c for c in curves if c.eigen_index == idx]
        out[str(idx)] = {"curves": len(sel), "closed": sum(c.closed for c in sel)}
    return out
