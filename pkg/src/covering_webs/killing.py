"""Killing vectors and symmetric Killing 2-tensors of the covering metrics.

Closed-form bases are provided for the plane covering (three vectors, six
tensors), the sphere covering (Fourier-adapted products of the rotation
generators) and the Hopf three-sphere (six Killing 1-forms).  Each basis
element records the trigonometric frequencies it carries, so the globally
defined subspace on ``M_k`` can be counted with exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import dual as dm
from .geometry import ChartPoint, MetricModel, christoffel_at, DomainError

VECTOR_NAMES = ("a1", "a2", "a3")
TENSOR_NAMES = ("b1", "b2", "b3", "b4", "b5", "b6")
SPHERE_TENSOR_NAMES = ("s1", "s2", "s3", "s4", "s5", "s6")

# frequency content of each generator, as multiples of k
_VECTOR_FREQS = {"a1": (0,), "a2": (1,), "a3": (1,)}
_TENSOR_FREQS = {"b1": (0,), "b2": (1,), "b3": (1,), "b4": (0,), "b5": (2,), "b6": (2,)}


def to_fraction(x) -> Fraction:
    """Exact rational from an int, Fraction or ``"p/q"`` string.

    Floats are refused: integrality of a float says nothing about the
    rational it was meant to be.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        from .rational import parse_rational

        return parse_rational(x)
    raise ValueError(f"{x!r} is not an exact rational; pass an int, Fraction or 'p/q'")


def is_global(frequencies: Iterable, scale=1) -> bool:
    """True iff every ``f * scale`` is an integer, i.e. the field is
    ``2 pi``-periodic in the angle."""
    s = to_fraction(scale)
    return all((to_fraction(f) * s).denominator == 1 for f in frequencies)


# -- plane covering -------------------------------------------------------------


def _check_polar(p) -> tuple[float, float]:
    if isinstance(p, ChartPoint):
        if p.chart != "polar2":
            raise DomainError(f"expected a polar2 point, got {p.chart}")
        return p.coords
    r, phi = float(p[0]), float(p[1])
    if r <= 0:
        raise DomainError(f"r={r!r} must be positive")
    return r, phi


@dataclass(frozen=True)
class KillingVectorSpec:
    """``a1`` rotation, ``a2``/``a3`` the two translations of the base plane."""

    coeffs: tuple
    k: object = 1
    rank = 1

    def __post_init__(self):
        if len(self.coeffs) != 3:
            raise ValueError("a Killing vector needs three coefficients")
        if float(self.k) <= 0:
            raise ValueError("k must be positive")

    def frequencies(self) -> set:
        return {Fraction(f) for name, c in zip(VECTOR_NAMES, self.coeffs) if c for f in _VECTOR_FREQS[name]}

    def contravariant(self, x):
        a1, a2, a3 = self.coeffs
        k = float(self.k)
        r, phi = x[0], x[1]
        s, c = dm.sin(k * phi), dm.cos(k * phi)
        return [a3 * s - a2 * c, (a3 * c + a2 * s + a1 * r) / (k * r)]


@dataclass(frozen=True)
class KillingTensorSpec:
    """Six-parameter symmetric Killing 2-tensor of the plane covering.

    ``b1`` is the squared rotation, ``b4`` the inverse metric, ``b2``/``b3``
    rotation-translation products and ``b5``/``b6`` the traceless
    translation products.  The mixed ``r phi`` entry is half of the
    ``d_r . d_phi`` coefficient, so that ``b4 = 1`` gives exactly ``g^-1``.
    """

    coeffs: tuple
    k: object = 1
    rank = 2

    def __post_init__(self):
        if len(self.coeffs) != 6:
            raise ValueError("a Killing tensor needs six coefficients")
        if float(self.k) <= 0:
            raise ValueError("k must be positive")

    def frequencies(self) -> set:
        return {Fraction(f) for name, c in zip(TENSOR_NAMES, self.coeffs) if c for f in _TENSOR_FREQS[name]}

    def contravariant(self, x):
        b1, b2, b3, b4, b5, b6 = self.coeffs
        k = float(self.k)
        r, phi = x[0], x[1]
        s1, c1 = dm.sin(k * phi), dm.cos(k * phi)
        s2, c2 = dm.sin(2 * k * phi), dm.cos(2 * k * phi)
        krr = -b5 * s2 - b6 * c2 + b4
        krp = 0.5 * (b3 * r * s1 - b2 * r * c1 + 2 * b6 * s2 - 2 * b5 * c2) / (k * r)
        kpp = (b2 * r * s1 + b3 * r * c1 + b1 * r * r + b5 * s2 + b6 * c2 + b4) / (k * k * r * r)
        return [[krr, krp], [krp, kpp]]

    def components(self, r, phi):
        """``(K^rr, K^rphi, K^phiphi)``; vectorises over numpy arrays."""
        m = self.contravariant((r, phi))
        return m[0][0], m[0][1], m[1][1]


def killing_vector(spec: KillingVectorSpec, p) -> np.ndarray:
    """Contravariant components ``(V^r, V^phi)`` at a polar point."""
    x = _check_polar(p)
    return np.array(spec.contravariant(x), dtype=float)


def killing_tensor(spec: KillingTensorSpec, p) -> np.ndarray:
    """Contravariant symmetric matrix ``K^ij`` at a polar point."""
    x = _check_polar(p)
    return np.array(spec.contravariant(x), dtype=float)


def unit(names: Sequence[str], name: str) -> tuple:
    return tuple(1.0 if n == name else 0.0 for n in names)


# -- sphere covering --------------------------------------------------------------


def _sphere_rotations(k, theta, phi):
    """Contravariant ``(theta, phi)`` components of the three rotation generators."""
    big = k * phi
    s, c = dm.sin(big), dm.cos(big)
    cot = dm.cos(theta) / dm.sin(theta)
    l1 = (-s, -cot * c / k)
    l2 = (c, -cot * s / k)
    l3 = (0.0 * s, 1.0 / k + 0.0 * s)
    return l1, l2, l3


def _sym(u, v):
    return [[0.5 * (u[i] * v[j] + v[i] * u[j]) for j in range(2)] for i in range(2)]


_SPHERE_TENSOR_FREQS = {"s1": (0,), "s2": (1,), "s3": (1,), "s4": (0,), "s5": (2,), "s6": (2,)}


@dataclass(frozen=True)
class SphereTensorSpec:
    """Killing 2-tensor of ``d theta^2 + k^2 sin^2 theta d phi^2``.

    Basis (``L1``, ``L2`` tilted rotations, ``L3`` the axial one):
    ``s1 = L3 L3``, ``s2 = L1 . L3``, ``s3 = L2 . L3``, ``s4 = L1 L1 + L2 L2``,
    ``s5 = L1 . L2``, ``s6 = L1 L1 - L2 L2``, where ``.`` is the symmetric
    product ``(u v + v u) / 2``.  Frequencies match the plane basis term by
    term.
    """

    coeffs: tuple
    k: object = 1
    rank = 2

    def __post_init__(self):
        if len(self.coeffs) != 6:
            raise ValueError("a sphere Killing tensor needs six coefficients")

    def frequencies(self) -> set:
        return {
            Fraction(f) for name, c in zip(SPHERE_TENSOR_NAMES, self.coeffs) if c for f in _SPHERE_TENSOR_FREQS[name]
        }

    def contravariant(self, x):
        k = float(self.k)
        l1, l2, l3 = _sphere_rotations(k, x[0], x[1])
        parts = (
            _sym(l3, l3),
            _sym(l1, l3),
            _sym(l2, l3),
            _add(_sym(l1, l1), _sym(l2, l2), 1.0),
            _sym(l1, l2),
            _add(_sym(l1, l1), _sym(l2, l2), -1.0),
        )
        out = [[0.0, 0.0], [0.0, 0.0]]
        for coeff, part in zip(self.coeffs, parts):
            if coeff:
                out = _add(out, part, 1.0, coeff)
        return out


def _add(a, b, sb, sa=1.0):
    return [[sa * a[i][j] + sb * b[i][j] for j in range(2)] for i in range(2)]


# -- Hopf three-sphere --------------------------------------------------------------


@dataclass(frozen=True)
class S3KillingForm:
    """Killing 1-form ``V_j`` (``j = 1..6``) of the Hopf sphere metric.

    ``V_3`` is the displayed mixed form; ``V_4``, ``V_5``, ``V_6`` replace
    ``(cos, sin)`` of the ``xi1`` argument, the ``xi2`` argument, or both,
    by ``(-sin, cos)``.
    """

    j: int
    params: tuple = (1, 1, 1)
    rank = 1

    def __post_init__(self):
        if self.j not in range(1, 7):
            raise ValueError(f"form index j={self.j} outside 1..6")

    def frequencies(self) -> set:
        a, b, c = (to_fraction(p) for p in self.params)
        if self.j <= 2:
            return {Fraction(0)}
        return {b / a, c / a}

    def covariant(self, x):
        eta, xi1, xi2 = x[0], x[1], x[2]
        a, b, c = (float(p) for p in self.params)
        se, ce = dm.sin(eta), dm.cos(eta)
        zero = 0.0 * se
        if self.j == 1:
            return [zero, se * se, zero]
        if self.j == 2:
            return [zero, zero, ce * ce]
        s1, c1 = dm.sin(b / a * xi1), dm.cos(b / a * xi1)
        s2, c2 = dm.sin(c / a * xi2), dm.cos(c / a * xi2)
        if self.j in (4, 6):
            s1, c1 = c1, -s1
        if self.j in (5, 6):
            s2, c2 = c2, -s2
        return [a * s1 * c2, se * ce * b * c1 * c2, se * ce * c * s1 * s2]

    def contravariant(self, x):
        from .geometry import Sphere3

        diag = Sphere3(*self.params).diagonal(x)
        return [v / g for v, g in zip(self.covariant(x), diag)]


def s3_killing_form(j: int, params, p) -> np.ndarray:
    """Covariant components ``(V_eta, V_xi1, V_xi2)`` of the ``j``-th form."""
    if isinstance(p, ChartPoint) and p.chart != "hopf3":
        raise DomainError(f"expected a hopf3 point, got {p.chart}")
    x = p.coords if isinstance(p, ChartPoint) else tuple(map(float, p))
    return np.array(S3KillingForm(j, tuple(params)).covariant(x), dtype=float)


# -- numerical certification ------------------------------------------------------------


def _lowered(model: MetricModel, field_, x):
    """Covariant components of ``field_`` at dual-number coordinates ``x``."""
    diag = model.diagonal(x)
    up = field_.contravariant(x)
    n = len(diag)
    if field_.rank == 1:
        return [diag[i] * up[i] for i in range(n)]
    return [[diag[i] * diag[j] * up[i][j] for j in range(n)] for i in range(n)]


def killing_defect(field_, model: MetricModel, x) -> float:
    """Metric norm of the symmetrised covariant derivative at one point."""
    x = tuple(float(v) for v in x)
    low, dlow = dm.jacobian(lambda z: _lowered(model, field_, z), x)
    gam = christoffel_at(model, x)
    ginv = np.diag(1.0 / np.diag(model.matrix(x)))
    if field_.rank == 1:
        # dlow[j, i] = d_i xi_j
        cov = dlow.T - np.einsum("lij,l->ij", gam, low)
        sym = 0.5 * (cov + cov.T)
        return float(math.sqrt(abs(np.einsum("ij,ia,jb,ab->", sym, ginv, ginv, sym))))
    # cov[i, j, k] = nabla_i K_jk
    dk = np.einsum("jki->ijk", dlow)
    cov = dk - np.einsum("lij,lk->ijk", gam, low) - np.einsum("lik,jl->ijk", gam, low)
    sym = (cov + np.einsum("jki->ijk", cov) + np.einsum("kij->ijk", cov)) / 3.0
    return float(math.sqrt(abs(np.einsum("ijk,ia,jb,kc,abc->", sym, ginv, ginv, ginv, sym))))


def killing_residual(field_, model: MetricModel, samples) -> float:
    """Largest Killing defect over ``samples`` (ChartPoints or raw tuples)."""
    samples = list(samples)
    if not samples:
        raise ValueError("killing_residual needs at least one sample point")
    worst = 0.0
    for p in samples:
        x = p.coords if isinstance(p, ChartPoint) else p
        worst = max(worst, killing_defect(field_, model, x))
    return worst


@dataclass(frozen=True)
class CoordinateField:
    """A field given directly by contravariant component functions."""

    func: object
    rank: int = 1
    freqs: frozenset = field(default_factory=frozenset)

    def contravariant(self, x):
        return self.func(x)

    def frequencies(self) -> set:
        return set(self.freqs)


# -- global dimension --------------------------------------------------------------------


@dataclass(frozen=True)
class Generator:
    name: str
    frequencies: tuple
    secular: bool = False  # polynomial in the angle: never periodic


def generators(family: str, order: str, params) -> list[Generator]:
    """Basis generators with their frequencies, already scaled by the parameters."""
    if order not in ("vector", "tensor2"):
        raise ValueError(f"unknown order {order!r}")
    if family in ("plane", "sphere"):
        (k,) = params
        k = to_fraction(k)
        if order == "vector":
            names, freqs = VECTOR_NAMES, _VECTOR_FREQS
            if family == "sphere":
                names = ("L3", "L1", "L2")
                freqs = {"L3": (0,), "L1": (1,), "L2": (1,)}
        else:
            names = TENSOR_NAMES if family == "plane" else SPHERE_TENSOR_NAMES
            freqs = _TENSOR_FREQS if family == "plane" else _SPHERE_TENSOR_FREQS
        return [Generator(n, tuple(Fraction(f) * k for f in freqs[n])) for n in names]
    if family == "sphere3":
        if order != "vector":
            raise ValueError("only Killing vectors are catalogued for the Hopf sphere")
        a, b, c = (to_fraction(p) for p in params)
        gens = [Generator("V1", (Fraction(0),)), Generator("V2", (Fraction(0),))]
        gens += [Generator(f"V{j}", (b / a, c / a)) for j in range(3, 7)]
        return gens
    if family == "cylinder":
        # dz^2 + dpsi^2 with psi periodic; R = z d_psi - psi d_z is not
        zero = (Fraction(0),)
        if order == "vector":
            return [Generator("d_z", zero), Generator("d_psi", zero), Generator("R", zero, True)]
        return [
            Generator("d_z.d_z", zero),
            Generator("d_psi.d_psi", zero),
            Generator("d_z.d_psi", zero),
            Generator("R.d_z", zero, True),
            Generator("R.d_psi", zero, True),
            Generator("R.R", zero, True),
        ]
    raise ValueError(f"unknown family {family!r}")


def global_generators(family: str, order: str, params) -> list[str]:
    return [g.name for g in generators(family, order, params) if not g.secular and is_global(g.frequencies)]


def global_dimension(family: str, order: str, params) -> int:
    """Dimension of the globally defined Killing space on the covering."""
    return len(global_generators(family, order, params))


def dimension_report(family: str, order: str, params) -> dict:
    params = tuple(to_fraction(p) for p in params)
    surviving = global_generators(family, order, params)
    return {
        "family": family,
        "order": order,
        "parameter": ",".join(f"{p.numerator}/{p.denominator}" for p in params),
        "dimension": len(surviving),
        "surviving_coefficients": surviving,
    }
