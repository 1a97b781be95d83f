"""scalar fields on S^n and on R^n, and the pullback g = 2^{n-1} f(inverse stereo) / (1 + |x|^2)^{n-1}."""

import logging
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from src.geometry.core import measure_weight, north_pole, stereo_inverse

logger = logging.getLogger(__name__)


def _bump(distance_sq: np.ndarray, radius: float, amplitude: float) -> np.ndarray:
    """amplitude * exp(-1 / (radius^2 - d^2)) inside the ball, zero outside."""
    gap = radius**2 - distance_sq
    inside = gap > 0.0
    values = np.zeros_like(distance_sq, dtype=float)
    values[inside] = amplitude * np.exp(-1.0 / gap[inside])
    return values


class SphereField:
    """a scalar field on S^n evaluated at rows of R^{n+1} coordinates."""

    def __call__(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def c0_compatible(self) -> bool:
        """true when the field vanishes in a neighborhood of the north pole."""
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantField(SphereField):
    value: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.full(x.shape[:-1], float(self.value))

    @property
    def c0_compatible(self) -> bool:
        return self.value == 0.0


@dataclass(frozen=True)
class CoordinateField(SphereField):
    index: int

    def __call__(self, x):
        return np.asarray(x, dtype=float)[..., self.index]

    @property
    def c0_compatible(self) -> bool:
        return False


@dataclass(frozen=True)
class CapBumpField(SphereField):
    """smooth bump supported in the chordal ball |x - center| < radius."""

    center: Tuple[float, ...]
    radius: float
    amplitude: float = 1.0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        diff = x - np.asarray(self.center, dtype=float)
        return _bump(np.sum(diff * diff, axis=-1), self.radius, self.amplitude)

    def support_distance(self, x: np.ndarray) -> np.ndarray:
        """chordal distance from points to the support ball (negative inside)."""
        x = np.asarray(x, dtype=float)
        return np.linalg.norm(x - np.asarray(self.center, dtype=float), axis=-1) - self.radius

    def max_height(self) -> float:
        """largest x_{n+1} over the support on S^n."""
        angular_radius = 2.0 * np.arcsin(min(self.radius / 2.0, 1.0))
        elevation = np.arcsin(np.clip(self.center[-1], -1.0, 1.0))
        return float(np.sin(min(elevation + angular_radius, np.pi / 2.0)))

    @property
    def c0_compatible(self) -> bool:
        pole = north_pole(len(self.center))
        return bool(np.linalg.norm(pole - np.asarray(self.center)) > self.radius) or self.amplitude == 0.0


@dataclass(frozen=True)
class SumField(SphereField):
    terms: Tuple[SphereField, ...]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        total = np.zeros(x.shape[:-1])
        for term in self.terms:
            total = total + term(x)
        return total

    @property
    def c0_compatible(self) -> bool:
        return all(term.c0_compatible for term in self.terms)


def bumps_of(field: SphereField) -> Tuple[CapBumpField, ...]:
    """all cap bumps contained in a field."""
    if isinstance(field, CapBumpField):
        return (field,)
    if isinstance(field, SumField):
        return tuple(bump for term in field.terms for bump in bumps_of(term))
    return ()


class PlaneField:
    """a scalar field on R^n evaluated at rows of coordinates."""

    def __call__(self, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantPlaneField(PlaneField):
    value: float

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        return np.full(y.shape[:-1], float(self.value))


@dataclass(frozen=True)
class RadialField(PlaneField):
    """g(y) = profile(|y - center|)."""

    profile: Callable[[np.ndarray], np.ndarray]
    center: Tuple[float, ...] = (0.0, 0.0)

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        return self.profile(np.linalg.norm(y - np.asarray(self.center), axis=-1))


def quadratic_field(dim: int = 2) -> RadialField:
    """g(y) = |y|^2."""
    return RadialField(lambda r: r * r, (0.0,) * dim)


@dataclass(frozen=True)
class BumpPlaneField(PlaneField):
    center: Tuple[float, ...]
    radius: float
    amplitude: float = 1.0

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        diff = y - np.asarray(self.center, dtype=float)
        return _bump(np.sum(diff * diff, axis=-1), self.radius, self.amplitude)


@dataclass(frozen=True)
class GaussianPlaneField(PlaneField):
    center: Tuple[float, ...]
    width: float
    amplitude: float = 1.0

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        diff = y - np.asarray(self.center, dtype=float)
        return self.amplitude * np.exp(-np.sum(diff * diff, axis=-1) / self.width**2)


@dataclass(frozen=True)
class PullbackField(PlaneField):
    """g(y) = measure_weight(y) f(stereo_inverse(y))."""

    source: SphereField

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        return measure_weight(y) * self.source(stereo_inverse(y))

    @property
    def compactly_supported(self) -> bool:
        return self.source.c0_compatible


def pullback_field(f: SphereField) -> PullbackField:
    return PullbackField(f)
