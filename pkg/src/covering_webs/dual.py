"""Forward-mode automatic differentiation with multivariate dual numbers.

A :class:`Dual` carries a value and its gradient with respect to a fixed set
of seed variables.  The elementary functions in this module (``sin``, ``cos``,
``sqrt``, ...) accept plain floats, numpy arrays and duals alike, so closed-form
evaluators written against them can be evaluated, differentiated and
vectorised over whole trajectories with the same code.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np


class Dual:
    """Value ``val`` plus first-order part ``der`` (gradient w.r.t. the seeds)."""

    __slots__ = ("val", "der")

    def __init__(self, val: float, der: np.ndarray):
        self.val = float(val)
        self.der = der

    def __repr__(self) -> str:
        return f"Dual({self.val!r}, {self.der!r})"

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val + other.val, self.der + other.der)
        return Dual(self.val + other, self.der)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val - other.val, self.der - other.der)
        return Dual(self.val - other, self.der)

    def __rsub__(self, other):
        return Dual(other - self.val, -self.der)

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val * other.val, other.val * self.der + self.val * other.der)
        return Dual(self.val * other, other * self.der)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            inv = 1.0 / other.val
            q = self.val * inv
            return Dual(q, (self.der - q * other.der) * inv)
        return Dual(self.val / other, self.der / other)

    def __rtruediv__(self, other):
        inv = 1.0 / self.val
        q = other * inv
        return Dual(q, (-q * inv) * self.der)

    def __neg__(self):
        return Dual(-self.val, -self.der)

    def __pos__(self):
        return self

    def __pow__(self, n):
        if isinstance(n, Dual):
            raise TypeError("dual exponents are not supported")
        if n == 2:
            return Dual(self.val * self.val, (2.0 * self.val) * self.der)
        return Dual(self.val**n, (n * self.val ** (n - 1)) * self.der)

    def __abs__(self):
        return -self if self.val < 0 else self

    # comparisons act on the value part only
    def __lt__(self, other):
        return self.val < _value(other)

    def __le__(self, other):
        return self.val <= _value(other)

    def __gt__(self, other):
        return self.val > _value(other)

    def __ge__(self, other):
        return self.val >= _value(other)

    def __float__(self):
        return self.val


def _value(x):
    return x.val if isinstance(x, Dual) else x


def sin(x):
    if isinstance(x, Dual):
        return Dual(math.sin(x.val), math.cos(x.val) * x.der)
    return np.sin(x)


def cos(x):
    if isinstance(x, Dual):
        return Dual(math.cos(x.val), -math.sin(x.val) * x.der)
    return np.cos(x)


def tan(x):
    if isinstance(x, Dual):
        t = math.tan(x.val)
        return Dual(t, (1.0 + t * t) * x.der)
    return np.tan(x)


def sqrt(x):
    if isinstance(x, Dual):
        s = math.sqrt(x.val)
        return Dual(s, (0.5 / s) * x.der)
    return np.sqrt(x)


def exp(x):
    if isinstance(x, Dual):
        e = math.exp(x.val)
        return Dual(e, e * x.der)
    return np.exp(x)


def log(x):
    if isinstance(x, Dual):
        return Dual(math.log(x.val), x.der / x.val)
    return np.log(x)


def value(x) -> float:
    """Value part of a dual, or ``x`` itself."""
    return float(_value(x))


def seed(values: Sequence[float]) -> list[Dual]:
    """Independent dual variables, one unit direction per entry."""
    n = len(values)
    eye = np.eye(n)
    return [Dual(v, eye[i]) for i, v in enumerate(values)]


def derivative_part(x, n: int) -> np.ndarray:
    """Gradient carried by ``x``; zero for constants."""
    if isinstance(x, Dual):
        return x.der
    return np.zeros(n)


def gradient(f: Callable, x: Sequence[float]) -> tuple[float, np.ndarray]:
    """Value and gradient of scalar ``f(list_of_args)`` at ``x``."""
    x = list(map(float, x))
    out = f(seed(x))
    return value(out), derivative_part(out, len(x)).copy()


def jacobian(f: Callable, x: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Values and Jacobian of an array-valued ``f``.

    The output of ``f`` may be any nested sequence of duals/floats; the
    Jacobian gets the output shape with one trailing axis per input.
    """
    x = list(map(float, x))
    n = len(x)
    out = np.asarray(f(seed(x)), dtype=object)
    vals = np.empty(out.shape)
    jac = np.empty(out.shape + (n,))
    for idx in np.ndindex(out.shape):
        vals[idx] = value(out[idx])
        jac[idx] = derivative_part(out[idx], n)
    return vals, jac


def central_gradient(f: Callable, x: Sequence[float], step: float = 1e-6) -> np.ndarray:
    """Richardson-extrapolated central differences; the independent oracle.

    Step per coordinate is ``step * max(1, |x_i|)``.
    """
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    for i in range(x.size):
        h = step * max(1.0, abs(x[i]))
        grad[i] = (4.0 * _central(f, x, i, h / 2) - _central(f, x, i, h)) / 3.0
    return grad


def _central(f, x, i, h):
    xp = x.copy()
    xm = x.copy()
    xp[i] += h
    xm[i] -= h
    return (float(f(list(xp))) - float(f(list(xm)))) / (2.0 * h)
