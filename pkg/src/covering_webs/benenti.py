"""Ellipsoidal Benenti tensor, its Killing-Stackel recursion and the 3D covering.

Everything is expressed with mixed (endomorphism) indices.  On Cartesian E^3
the metric is the identity, so the ellipsoidal ``L`` is also its own
contravariant form; on the covering ``(r, theta, phi)`` chart the pulled-back
``L'`` is ``J^-1 L J`` with ``J`` the Jacobian of :func:`covering_transform3`.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import dual as dm
from .geometry import ChartPoint, DomainError, Euclid3, Flat
from .killing import killing_residual


def _params(params):
    a, b, c = (float(v) for v in params)
    return a, b, c


def _cartesian(p):
    if isinstance(p, ChartPoint):
        if p.chart != "cartesian":
            raise DomainError(f"expected a cartesian point, got {p.chart}")
        return p.coords
    return tuple(p)


def _L_entries(params, x):
    a, b, c = _params(params)
    X, Y, Z = x
    return [
        [a + X * X, X * Y, X * Z],
        [X * Y, b + Y * Y, Y * Z],
        [X * Z, Y * Z, c + Z * Z],
    ]


def ellipsoidal_L(params, p) -> np.ndarray:
    """``L = diag(a, b, c) + x x^T`` at a Cartesian point."""
    return np.array(_L_entries(params, tuple(map(float, _cartesian(p)))), dtype=float)


# nested-list algebra so the recursion also runs on dual numbers


def _matmul(A, B):
    n = len(A)
    return [[sum(A[i][m] * B[m][j] for m in range(n)) for j in range(n)] for i in range(n)]


def _recursion(L, n):
    dim = len(L)
    eye = [[1.0 if i == j else 0.0 for j in range(dim)] for i in range(dim)]
    out = [eye]
    for a in range(1, n):
        KL = _matmul(out[-1], L)
        tr = sum(KL[i][i] for i in range(dim))
        out.append([[(tr / a if i == j else 0.0) - KL[i][j] for j in range(dim)] for i in range(dim)])
    return out


def benenti_recursion(L_mixed, n: int = 3) -> list[np.ndarray]:
    """``K_0 = I``, ``K_a = tr(K_{a-1} L) I / a - K_{a-1} L``; returns ``n`` endomorphisms."""
    if n < 1:
        raise ValueError("n must be at least 1")
    L = np.asarray(L_mixed, dtype=float)
    return [np.array(K, dtype=float) for K in _recursion(L.tolist(), n)]


@dataclass(frozen=True)
class CartesianStackelTensor:
    """``K_index`` of the ellipsoidal recursion as a field on Cartesian E^3."""

    params: tuple
    index: int
    rank = 2

    def contravariant(self, x):
        return _recursion(_L_entries(self.params, x), self.index + 1)[self.index]


def stackel_basis(params, p, n: int = 3) -> list[np.ndarray]:
    """Killing-Stackel basis of E^3 at a Cartesian point."""
    return benenti_recursion(ellipsoidal_L(params, p), n)


# -- covering map ----------------------------------------------------------------


def _spherical(p):
    if isinstance(p, ChartPoint):
        if p.chart != "spherical3":
            raise DomainError(f"expected a spherical3 point, got {p.chart}")
        return p.coords
    r, th, ph = (float(v) for v in p)
    ChartPoint("spherical3", (r, th, ph))
    return r, th, ph


def _transform(x, k):
    r, th, ph = x
    st = dm.sin(th)
    return [k * r * st * dm.cos(ph / k), k * r * st * dm.sin(ph / k), k * r * dm.cos(th)]


def covering_transform3(p, k) -> np.ndarray:
    """``(x, y, z) = k r (sin th cos(ph/k), sin th sin(ph/k), cos th)``."""
    return np.array(_transform(_spherical(p), float(k)), dtype=float)


def _frame(x, k):
    """Jacobian ``J[a][i] = dX^a/dx^i`` and its inverse, as nested lists."""
    r, th, ph = x
    st, ct = dm.sin(th), dm.cos(th)
    sp, cp = dm.sin(ph / k), dm.cos(ph / k)
    n = [st * cp, st * sp, ct]
    e_th = [ct * cp, ct * sp, -st]
    e_ph = [-sp, cp, 0.0 * cp]
    cols = [[k * v for v in n], [k * r * v for v in e_th], [r * st * v for v in e_ph]]
    rows = [[v / k for v in n], [v / (k * r) for v in e_th], [v / (r * st) for v in e_ph]]
    J = [[cols[i][a] for i in range(3)] for a in range(3)]
    return J, rows


def covering_jacobian(p, k) -> tuple[np.ndarray, np.ndarray]:
    """``(J, J^-1)`` of :func:`covering_transform3`; singular on the axis."""
    x = _spherical(p)
    if math.sin(x[1]) == 0:
        raise DomainError("Jacobian is singular on the polar axis")
    J, Jinv = _frame(x, float(k))
    return np.array(J, dtype=float), np.array(Jinv, dtype=float)


def _pullback(params, k, x, M):
    J, Jinv = _frame(x, k)
    return _matmul(Jinv, _matmul(M, J))


def pullback_L(params, k, p) -> np.ndarray:
    """Mixed components ``L'^i_j`` in the covering chart ``(r, theta, phi)``."""
    x = _spherical(p)
    k = float(k)
    L = _L_entries(params, _transform(x, k))
    return np.array(_pullback(params, k, x, L), dtype=float)


def theta_r_component(params, k, p) -> float:
    """Closed form ``L'^theta_r = ((a - b) cos^2(phi/k) + b - c) sin th cos th / r``."""
    a, b, c = _params(params)
    r, th, ph = _spherical(p)
    return ((a - b) * math.cos(ph / float(k)) ** 2 + b - c) * math.sin(th) * math.cos(th) / r


@dataclass(frozen=True)
class CoveringStackelTensor:
    """``K'_index`` from the recursion on ``L'``, raised with the covering metric."""

    params: tuple
    k: float
    index: int
    rank = 2

    def contravariant(self, x):
        k = float(self.k)
        Lp = _pullback(self.params, k, x, _L_entries(self.params, _transform(x, k)))
        K = _recursion(Lp, self.index + 1)[self.index]
        ginv = [1.0 / g for g in Euclid3(k).diagonal(x)]
        return [[K[i][j] * ginv[j] for j in range(3)] for i in range(3)]


def covering_basis(params, k, p, n: int = 3) -> list[np.ndarray]:
    """Recursion applied to ``L'`` on the covering chart."""
    return benenti_recursion(pullback_L(params, k, p), n)


def pulled_back_basis(params, k, p, n: int = 3) -> list[np.ndarray]:
    """E^3 basis at the image point, conjugated back by the Jacobian."""
    x = _spherical(p)
    J, Jinv = covering_jacobian(x, k)
    return [Jinv @ K @ J for K in stackel_basis(params, covering_transform3(x, k), n)]


def cartesian_residual(params, index: int, samples) -> float:
    return killing_residual(CartesianStackelTensor(tuple(params), index), Flat(3), samples)


def covering_residual(params, k, index: int, samples) -> float:
    return killing_residual(CoveringStackelTensor(tuple(params), float(k), index), Euclid3(k), samples)


# -- level surfaces ---------------------------------------------------------------


@dataclass(frozen=True)
class ShellGrid:
    """Sample box in the covering chart."""

    r: tuple = (0.05, 3.0, 40)
    theta: tuple = (0.05, math.pi - 0.05, 40)
    phi: tuple = (0.0, 2 * math.pi, 80)


def _ellipsoidal_batch(params, X, Y, Z):
    a, b, c = _params(params)
    v = np.stack([X, Y, Z], axis=-1)
    L = v[..., :, None] * v[..., None, :]
    L[..., 0, 0] += a
    L[..., 1, 1] += b
    L[..., 2, 2] += c
    return L


def eigen_surface_sample(
    params,
    k,
    level: float,
    eigen_index: int,
    grid: ShellGrid = ShellGrid(),
    mode: str = "covering",
    field=None,
) -> np.ndarray:
    """Points of the covering grid where ``rho_eigen_index`` is within half a cell's variation of ``level``.

    ``rho_1 <= rho_2 <= rho_3`` are the eigenvalues of ``L'``, equal to those of
    ``L`` at the image point.  Output coordinates are the image under
    :func:`covering_transform3` (``mode="covering"``) or the non-conformal
    picture ``r (sin th cos ph, sin th sin ph, cos th)`` (``mode="nonconformal"``).
    ``field`` replaces the ellipsoidal tensor by any ``(X, Y, Z) -> (..., 3, 3)``.
    May return an empty array.
    """
    if eigen_index not in (1, 2, 3):
        raise ValueError("eigen_index must be 1, 2 or 3")
    if mode not in ("covering", "nonconformal"):
        raise ValueError(f"unknown mode {mode!r}")
    a, b, c = _params(params)
    if field is None and len({a, b, c}) < 3:
        raise ValueError("ellipsoidal parameters must be distinct to draw a web")
    if grid.theta[0] <= 0 or grid.theta[1] >= math.pi or grid.r[0] <= 0:
        raise DomainError("grid must lie inside the spherical chart")
    k = float(k)
    r = np.linspace(*grid.r[:2], int(grid.r[2]))
    th = np.linspace(*grid.theta[:2], int(grid.theta[2]))
    ph = np.linspace(*grid.phi[:2], int(grid.phi[2]))
    R, TH, PH = np.meshgrid(r, th, ph, indexing="ij")
    X = k * R * np.sin(TH) * np.cos(PH / k)
    Y = k * R * np.sin(TH) * np.sin(PH / k)
    Z = k * R * np.cos(TH)
    L = field(X, Y, Z) if field is not None else _ellipsoidal_batch(params, X, Y, Z)
    rho = np.linalg.eigvalsh(L)[..., eigen_index - 1]
    var = np.zeros_like(rho)
    for axis in range(3):
        d = np.abs(np.diff(rho, axis=axis))
        lo = [slice(None)] * 3
        hi = [slice(None)] * 3
        lo[axis] = slice(0, -1)
        hi[axis] = slice(1, None)
        var[tuple(lo)] = np.maximum(var[tuple(lo)], d)
        var[tuple(hi)] = np.maximum(var[tuple(hi)], d)
    hit = np.abs(rho - level) <= 0.5 * var
    if not (var > 0).any():
        hit = np.abs(rho - level) == 0
    if mode == "covering":
        pts = np.column_stack([X[hit], Y[hit], Z[hit]])
    else:
        Rh, Th, Ph = R[hit], TH[hit], PH[hit]
        pts = np.column_stack([Rh * np.sin(Th) * np.cos(Ph), Rh * np.sin(Th) * np.sin(Ph), Rh * np.cos(Th)])
    return pts


def write_cloud_csv(path, clouds) -> None:
    """``clouds``: iterable of ``(eigen_index, level, points)``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["eigen_index", "level", "x", "y", "z"])
        for idx, level, pts in clouds:
            for x, y, z in pts:
                w.writerow([idx, repr(float(level)), f"{x:.10g}", f"{y:.10g}", f"{z:.10g}"])
