"""Riemannian coverings of the plane, the sphere and E^3: Killing fields,
separable webs and superintegrable systems."""

__version__ = "0.1.0"

from .geometry import ChartPoint, DomainError, Euclid3, Flat, Plane2, Sphere2, Sphere3, curvature, polar
from .killing import KillingTensorSpec, KillingVectorSpec, SphereTensorSpec, global_dimension, killing_residual
from .systems import PhaseState, SystemSpec, integrals, poisson_bracket
from .flow import Trajectory, integrate

__all__ = [
    "ChartPoint",
    "DomainError",
    "Euclid3",
    "Flat",
    "KillingTensorSpec",
    "KillingVectorSpec",
    "PhaseState",
    "Plane2",
    "Sphere2",
    "Sphere3",
    "SphereTensorSpec",
    "SystemSpec",
    "Trajectory",
    "curvature",
    "global_dimension",
    "integrals",
    "integrate",
    "killing_residual",
    "poisson_bracket",
    "polar",
]
