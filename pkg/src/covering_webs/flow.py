"""Implicit-midpoint integration of Hamilton's equations in polar-type charts."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import dual as dm
from .geometry import TWO_PI, DomainError
from .systems import FirstIntegral, PhaseState

FP_TOL = 1e-12
FP_MAX_ITER = 50


class IntegrationError(RuntimeError):
    pass


@dataclass
class Trajectory:
    """Rows of ``z`` are ``(r, angle_unwrapped, p_r, p_angle)`` at ``times``."""

    times: np.ndarray
    z: np.ndarray
    dt: float
    order: int = 2
    method: str = "implicit midpoint"
    status: str = "completed"  # or "domain_exit", "no_convergence"
    halt_step: int | None = None
    message: str = ""
    iterations: np.ndarray = field(default=None, repr=False)

    def __len__(self):
        return len(self.times)

    @property
    def states(self) -> list[PhaseState]:
        return [PhaseState.from_array(row) for row in self.z]

    @property
    def halted(self) -> bool:
        return self.status != "completed"


def _hamilton_field(H):
    func = H.func if isinstance(H, FirstIntegral) else H

    def rhs(z):
        _, g = dm.gradient(func, z)
        n = len(z) // 2
        return np.concatenate([g[n:], -g[:n]])

    return rhs


def _as_array(s0) -> np.ndarray:
    return s0.as_array() if isinstance(s0, PhaseState) else np.asarray(s0, dtype=float)


def integrate(H, s0, dt: float, n_steps: int) -> Trajectory:
    """Implicit midpoint ``z1 = z0 + dt J grad H((z0 + z1)/2)``.

    Each step is solved by fixed-point iteration to ``1e-12`` (at most 50
    sweeps), seeded by extrapolating the last two midpoint slopes.  Leaving the
    domain (``r <= 0`` or a singular potential) stops the run at the last
    valid state; so does a step that fails to converge.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    rhs = _hamilton_field(H)
    z = np.empty((n_steps + 1, 4))
    iters = np.zeros(n_steps, dtype=np.int16)
    z[0] = _as_array(s0)
    if z[0, 0] <= 0:
        raise DomainError("initial radius must be positive")
    try:
        slope = rhs(z[0])
    except DomainError as err:
        raise DomainError(f"initial state is singular: {err}") from None
    prev = slope
    status, halt, msg = "completed", None, ""
    n_done = n_steps
    for n in range(n_steps):
        z0 = z[n]
        # linear extrapolation of the midpoint slope
        z1 = z0 + dt * (2.0 * slope - prev)
        prev = slope
        ok = False
        try:
            for it in range(1, FP_MAX_ITER + 1):
                mid = 0.5 * (z0 + z1)
                if mid[0] <= 0:
                    raise DomainError("r reached 0")
                slope = rhs(mid)
                z_new = z0 + dt * slope
                err = np.max(np.abs(z_new - z1) / np.maximum(1.0, np.abs(z_new)))
                z1 = z_new
                if not np.all(np.isfinite(z1)):
                    raise DomainError("non-finite state")
                if err < FP_TOL:
                    ok = True
                    break
        except DomainError as exc:
            status, halt, msg = "domain_exit", n, f"step {n}: {exc}"
            n_done = n
            break
        iters[n] = it
        if z1[0] <= 0:
            status, halt, msg = "domain_exit", n, f"step {n}: r reached 0"
            n_done = n
            break
        if not ok:
            status, halt, msg = "no_convergence", n, f"step {n}: fixed point did not converge in {FP_MAX_ITER} sweeps"
            n_done = n
            break
        z[n + 1] = z1
    z = z[: n_done + 1]
    times = dt * np.arange(n_done + 1)
    return Trajectory(times, z, dt, status=status, halt_step=halt, message=msg, iterations=iters[:n_done])


def conservation_drift(traj: Trajectory, integrals, relative: bool = False) -> dict:
    """Per integral ``max_t |I(z_t) - I(z_0)|`` (optionally divided by ``|I(z_0)|``)."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    out = {}
    for I in integrals:
        vals = I.values(traj.z)
        d = float(np.max(np.abs(vals - vals[0])))
        if relative:
            d /= max(abs(float(vals[0])), 1e-300)
        out[I.name] = d
    return out


def drift_series(traj: Trajectory, I: FirstIntegral) -> np.ndarray:
    vals = I.values(traj.z)
    return np.abs(vals - vals[0])


def winding_number(traj: Trajectory, k=1) -> float:
    """Net angular advance over ``2 pi``, in the trajectory's own chart angle.

    ``k`` is accepted for symmetry with the plotting helpers; the circuit test
    is about the chart angle ``phi`` itself.
    """
    if np.any(traj.z[:, 0] <= 0):
        raise DomainError("trajectory crosses r = 0")
    return float((traj.z[-1, 1] - traj.z[0, 1]) / TWO_PI)


def winding_extent(traj: Trajectory) -> float:
    """Total angular span ``max phi - min phi`` over ``2 pi``."""
    ang = traj.z[:, 1]
    return float((ang.max() - ang.min()) / TWO_PI)


def write_trajectory_csv(path, traj: Trajectory, integrals=(), every: int = 1) -> None:
    """Columns ``t, r, phi_unwrapped, p_r, p_phi``, one per integral, then
    ``status`` (the run's status, so a truncated file is flagged on every row).
    The last state is always written."""
    if every < 1:
        raise ValueError("every must be at least 1")
    vals = [I.values(traj.z) for I in integrals]
    rows = list(range(0, len(traj), every))
    if rows and rows[-1] != len(traj) - 1:
        rows.append(len(traj) - 1)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "r", "phi_unwrapped", "p_r", "p_phi", *[I.name for I in integrals], "status"])
        for i in rows:
            row = [traj.times[i], *traj.z[i], *[v[i] for v in vals]]
            w.writerow([f"{x:.15g}" for x in row] + [traj.status])


def radial_extrema(traj: Trajectory) -> tuple[float, float]:
    """Smallest and largest radius, refined by a parabola through each discrete extremum."""
    r = traj.z[:, 0]
    lo, hi = float(r.min()), float(r.max())
    for i in range(1, len(r) - 1):
        if (r[i] <= r[i - 1] and r[i] <= r[i + 1]) or (r[i] >= r[i - 1] and r[i] >= r[i + 1]):
            a, b, c = r[i - 1], r[i], r[i + 1]
            den = a - 2 * b + c
            if den != 0:
                v = b - 0.125 * (c - a) ** 2 / den
                lo, hi = min(lo, v), max(hi, v)
    return lo, hi


def period_estimate(times, signal) -> float:
    """Mean spacing of upward mean-crossings, linearly interpolated."""
    s = np.asarray(signal) - np.mean(signal)
    idx = np.nonzero((s[:-1] < 0) & (s[1:] >= 0))[0]
    if len(idx) < 2:
        return math.nan
    t = times[idx] - s[idx] * (times[idx + 1] - times[idx]) / (s[idx + 1] - s[idx])
    return float(np.mean(np.diff(t)))
