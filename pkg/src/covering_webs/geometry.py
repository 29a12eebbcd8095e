"""Covering metric families, charts, connection and curvature, covering maps.

The four metric families are the plane covering ``dr^2 + k^2 r^2 dphi^2``, the
sphere covering ``dtheta^2 + k^2 sin^2(theta) dphi^2``, the 3D Euclidean
covering ``k^2 (dr^2 + r^2 dtheta^2) + r^2 sin^2(theta) dphi^2`` and the
three-parameter Hopf sphere ``a^2 deta^2 + b^2 sin^2(eta) dxi1^2 +
c^2 cos^2(eta) dxi2^2``.  A flat Cartesian family is kept for the Benenti
tensors, which live on Cartesian E^3.

Every metric is diagonal, and the diagonal is written against
:mod:`covering_webs.dual` so it can be evaluated on floats, numpy grids or
dual numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import dual as dm

TWO_PI = 2.0 * math.pi

CHARTS = ("polar2", "sphere2", "parabolic2", "spherical3", "hopf3", "cartesian")


class DomainError(ValueError):
    """A point lies outside the open domain of its chart."""


class ChartMismatch(ValueError):
    """A point was handed to a model or map that expects another chart."""


def _open(lo, hi):
    return lambda x: lo < x < hi


def _half_open(lo, hi):
    return lambda x: lo <= x < hi


_POSITIVE = _open(0.0, math.inf)
_NEGATIVE = _open(-math.inf, 0.0)
_ANGLE = _half_open(0.0, TWO_PI)

_DOMAINS = {
    "polar2": (("r", _POSITIVE), ("phi", _ANGLE)),
    "sphere2": (("theta", _open(0.0, math.pi)), ("phi", _ANGLE)),
    "parabolic2": (("u", _POSITIVE), ("v", _NEGATIVE)),
    "spherical3": (("r", _POSITIVE), ("theta", _open(0.0, math.pi)), ("phi", _ANGLE)),
    "hopf3": (("eta", _open(0.0, math.pi / 2)), ("xi1", _ANGLE), ("xi2", _ANGLE)),
}


@dataclass(frozen=True)
class ChartPoint:
    """Coordinates in a named chart, validated against the chart's open domain."""

    chart: str
    coords: tuple

    def __post_init__(self):
        if self.chart not in CHARTS:
            raise ValueError(f"unknown chart {self.chart!r}")
        coords = tuple(float(c) for c in self.coords)
        object.__setattr__(self, "coords", coords)
        if not all(math.isfinite(c) for c in coords):
            raise DomainError(f"non-finite coordinates {coords}")
        if self.chart == "cartesian":
            if len(coords) not in (2, 3):
                raise DomainError("cartesian points need 2 or 3 coordinates")
            return
        spec = _DOMAINS[self.chart]
        if len(coords) != len(spec):
            raise DomainError(f"{self.chart} needs {len(spec)} coordinates, got {len(coords)}")
        for (name, inside), value in zip(spec, coords):
            if not inside(value):
                raise DomainError(f"{self.chart}: {name}={value!r} outside the chart domain")

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]


def polar(r, phi) -> ChartPoint:
    return ChartPoint("polar2", (r, phi))


# -- metric families ---------------------------------------------------------


class MetricModel:
    """A member of one of the covering metric families.

    Subclasses define ``family``, ``chart`` and :meth:`diagonal`.
    """

    family: str
    chart: str
    dim: int

    def __init__(self, *params):
        if not params or any(float(p) <= 0 for p in params):
            raise ValueError(f"{type(self).__name__} parameters must be strictly positive")
        self.params = tuple(params)

    def __repr__(self):
        return f"{type(self).__name__}({', '.join(str(p) for p in self.params)})"

    def __eq__(self, other):
        return type(self) is type(other) and self.params == other.params

    def __hash__(self):
        return hash((type(self), self.params))

    def diagonal(self, x) -> list:
        raise NotImplementedError

    def matrix(self, x) -> np.ndarray:
        """Metric matrix at raw coordinates ``x`` (no domain check)."""
        return np.diag(np.array(self.diagonal(x), dtype=float))

    def check(self, p: ChartPoint) -> ChartPoint:
        if not isinstance(p, ChartPoint):
            raise TypeError("expected a ChartPoint")
        if p.chart != self.chart:
            raise ChartMismatch(f"{self!r} lives on chart {self.chart}, got {p.chart}")
        return p


class Plane2(MetricModel):
    family, chart, dim = "plane", "polar2", 2

    def __init__(self, k):
        super().__init__(k)
        self.k = float(k)

    def diagonal(self, x):
        r = x[0]
        return [1.0 + 0.0 * r, self.k**2 * r * r]


class Sphere2(MetricModel):
    family, chart, dim = "sphere", "sphere2", 2

    def __init__(self, k):
        super().__init__(k)
        self.k = float(k)

    def diagonal(self, x):
        s = dm.sin(x[0])
        return [1.0 + 0.0 * s, self.k**2 * s * s]


class Euclid3(MetricModel):
    family, chart, dim = "euclid3", "spherical3", 3

    def __init__(self, k):
        super().__init__(k)
        self.k = float(k)

    def diagonal(self, x):
        r, theta = x[0], x[1]
        s = dm.sin(theta)
        k2 = self.k**2
        return [k2 + 0.0 * r, k2 * r * r, r * r * s * s]


class Sphere3(MetricModel):
    family, chart, dim = "sphere3", "hopf3", 3

    def __init__(self, a, b, c):
        super().__init__(a, b, c)
        self.a, self.b, self.c = float(a), float(b), float(c)

    def diagonal(self, x):
        s, c = dm.sin(x[0]), dm.cos(x[0])
        return [self.a**2 + 0.0 * s, self.b**2 * s * s, self.c**2 * c * c]


class Flat(MetricModel):
    """Identity metric in Cartesian coordinates."""

    family, chart = "flat", "cartesian"

    def __init__(self, dim=3):
        super().__init__(dim)
        self.dim = int(dim)

    def diagonal(self, x):
        return [1.0 + 0.0 * x[0]] * self.dim


# -- pointwise geometry -------------------------------------------------------


def metric_components(model: MetricModel, p: ChartPoint) -> np.ndarray:
    """Metric matrix ``g_ij`` at ``p``."""
    model.check(p)
    return model.matrix(p.coords)


def metric_derivatives(model: MetricModel, x) -> tuple[np.ndarray, np.ndarray]:
    """``(g, dg)`` with ``dg[i, j, m] = d_m g_ij`` by forward-mode AD."""
    vals, jac = dm.jacobian(model.diagonal, x)
    n = len(vals)
    g = np.diag(vals)
    dg = np.zeros((n, n, n))
    for i in range(n):
        dg[i, i] = jac[i]
    return g, dg


def christoffel_at(model: MetricModel, x) -> np.ndarray:
    """Christoffel symbols ``gamma[i, j, k] = Gamma^i_{jk}`` at raw coordinates."""
    g, dg = metric_derivatives(model, x)
    ginv = np.linalg.inv(g)
    # lower[l, j, k] = 1/2 (d_j g_lk + d_k g_lj - d_l g_jk)
    lower = 0.5 * (
        np.einsum("lkj->ljk", dg) + np.einsum("ljk->ljk", dg) - np.einsum("jkl->ljk", dg)
    )
    return np.einsum("il,ljk->ijk", ginv, lower)


def christoffel(model: MetricModel, p: ChartPoint) -> np.ndarray:
    """Christoffel symbols of the second kind at ``p``, indexed ``[i, j, k]``."""
    model.check(p)
    return christoffel_at(model, p.coords)


def fd_step(x: float) -> float:
    return 1e-4 * max(1.0, abs(x))


def _gamma_slope(model, x, m, h):
    xp, xm = x.copy(), x.copy()
    xp[m] += h
    xm[m] -= h
    return (christoffel_at(model, xp) - christoffel_at(model, xm)) / (2 * h)


def riemann_at(model: MetricModel, x) -> np.ndarray:
    """Riemann tensor ``R^i_{jkl}`` from Richardson-extrapolated central
    differences of the (AD-exact) connection.

    Convention: ``R^i_{jkl} = d_k G^i_{lj} - d_l G^i_{kj} + G^i_{km} G^m_{lj}
    - G^i_{lm} G^m_{kj}``.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    gam = christoffel_at(model, x)
    dgam = np.empty((n,) + gam.shape)  # dgam[m] = d_m Gamma
    for m in range(n):
        h = fd_step(x[m])
        dgam[m] = (4.0 * _gamma_slope(model, x, m, h / 2) - _gamma_slope(model, x, m, h)) / 3.0
    riem = (
        np.einsum("kilj->ijkl", dgam)
        - np.einsum("likj->ijkl", dgam)
        + np.einsum("ikm,mlj->ijkl", gam, gam)
        - np.einsum("ilm,mkj->ijkl", gam, gam)
    )
    return riem


def riemann_norm(model: MetricModel, x) -> float:
    """Invariant norm ``sqrt(R_abcd R^abcd)``."""
    g = model.matrix(x)
    ginv = np.linalg.inv(g)
    riem = riemann_at(model, x)
    low = np.einsum("ae,ebcd->abcd", g, riem)
    up = np.einsum("bf,cg,dh,afgh->abcd", ginv, ginv, ginv, riem)
    return float(math.sqrt(abs(np.einsum("abcd,abcd->", low, up))))


def sectional_curvature_at(model: MetricModel, x, plane=(0, 1)) -> float:
    i, j = plane
    g = model.matrix(x)
    riem = riemann_at(model, x)
    # R_{ijij} = g_ia R^a_{jij}
    r_low = float(g[i] @ riem[:, j, i, j])
    return r_low / (g[i, i] * g[j, j] - g[i, j] ** 2)


def curvature(model: MetricModel, p: ChartPoint) -> float:
    """Gaussian curvature in 2D; in 3D the sectional curvature of the plane
    spanned by the first two coordinate directions."""
    model.check(p)
    return sectional_curvature_at(model, p.coords)


# -- covering map and sectors -------------------------------------------------


def _check_angle(phi: float) -> None:
    if not 0.0 <= phi < TWO_PI:
        raise DomainError(f"phi={phi!r} outside [0, 2pi)")


def covering_angle(phi: float, k) -> float:
    """The base-plane angle ``k * phi`` covered by ``phi``."""
    _check_angle(phi)
    return float(k) * phi


def is_integer(k) -> bool:
    if isinstance(k, (int, Fraction)):
        return Fraction(k).denominator == 1
    return float(k).is_integer()


@dataclass(frozen=True)
class SectorIndex:
    m: int
    incomplete: bool


def sector_of(phi: float, k) -> SectorIndex:
    """Sector ``m`` with ``m 2pi/k <= phi < (m+1) 2pi/k``.

    For non-integer ``k`` the last sector (``m == floor(k)``) covers only part
    of a plane and is flagged incomplete; for ``k < 1`` that is the whole
    domain.
    """
    _check_angle(phi)
    kf = float(k)
    if kf <= 0:
        raise ValueError("k must be positive")
    m = int(math.floor(phi * kf / TWO_PI))
    whole = int(math.floor(kf))
    if is_integer(k):
        m = min(m, whole - 1)
        return SectorIndex(m, False)
    m = min(m, whole)
    return SectorIndex(m, m == whole)


def sector_bounds(m: int, k) -> tuple[float, float]:
    """``[lo, hi)`` of sector ``m`` in ``phi``, clipped to ``[0, 2pi)``."""
    kf = float(k)
    return m * TWO_PI / kf, min((m + 1) * TWO_PI / kf, TWO_PI)


def plot_plane(p: ChartPoint, k, mode: str = "nonconformal") -> tuple[float, float]:
    """Draw a ``polar2`` point in the plane.

    ``nonconformal`` uses ``(r cos phi, r sin phi)``; ``conformal`` uses the
    covering angle, ``(r cos k phi, r sin k phi)``, which is an isometry on
    each sector.
    """
    if p.chart != "polar2":
        raise ChartMismatch(f"plot_plane expects a polar2 point, got {p.chart}")
    r, phi = p.coords
    if mode == "nonconformal":
        ang = phi
    elif mode == "conformal":
        ang = float(k) * phi
    else:
        raise ValueError(f"unknown plot mode {mode!r}")
    return r * math.cos(ang), r * math.sin(ang)


def plot_plane_inverse(x: float, y: float, k, m: int) -> ChartPoint:
    """Inverse of the conformal drawing restricted to sector ``m``."""
    r = math.hypot(x, y)
    big_phi = math.atan2(y, x) % TWO_PI
    phi = (big_phi + TWO_PI * m) / float(k)
    return polar(r, phi)


def random_points(model: MetricModel, n: int, rng: np.random.Generator, margin: float = 0.1) -> list:
    """Raw coordinate samples away from coordinate singularities."""
    pts = []
    for _ in range(n):
        if model.chart == "polar2":
            pts.append((rng.uniform(0.2, 3.0), rng.uniform(0.0, TWO_PI)))
        elif model.chart == "sphere2":
            pts.append((rng.uniform(margin, math.pi - margin), rng.uniform(0.0, TWO_PI)))
        elif model.chart == "spherical3":
            pts.append(
                (rng.uniform(0.2, 3.0), rng.uniform(margin, math.pi - margin), rng.uniform(0.0, TWO_PI))
            )
        elif model.chart == "hopf3":
            pts.append(
                (rng.uniform(margin, math.pi / 2 - margin), rng.uniform(0.0, TWO_PI), rng.uniform(0.0, TWO_PI))
            )
        else:
            pts.append(tuple(rng.uniform(-2.0, 2.0, size=model.dim)))
    return pts


def as_coords(p) -> tuple:
    """Accept a ChartPoint or a raw coordinate tuple."""
    return p.coords if isinstance(p, ChartPoint) else tuple(float(c) for c in p)


def symmetric(mat: Sequence) -> bool:
    a = np.asarray(mat, dtype=float)
    return bool(np.allclose(a, a.T, atol=1e-14))
