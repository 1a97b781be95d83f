"""ambient geometry: points, subspheres, euclidean spheres, stereographic projection and quadrature nodes.

points of the unit sphere S^n live in R^{n+1}; the last coordinate is the
symmetry axis and e_{n+1} is the north pole. supported ambient dimensions
are 2 (n=1) and 3 (n=2).
"""

import logging
from dataclasses import dataclass, field
from typing import Iterator, Literal, Tuple

import numpy as np

from src.core.config import settings
from src.core.constants import GEOM_TOL, UNIT_TOL
from src.core.errors import (
    DegenerateSphere,
    InvalidSubsphere,
    NorthPoleSingular,
    NotOnSphere,
    PassesThroughNorthPole,
)

logger = logging.getLogger(__name__)

SUPPORTED_AMBIENT_DIMS = (2, 3)


def _frozen(values: np.ndarray) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


def north_pole(ambient_dim: int) -> np.ndarray:
    """the unit vector e_{n+1} of R^{n+1}."""
    pole = np.zeros(ambient_dim)
    pole[-1] = 1.0
    return pole


@dataclass(frozen=True)
class AmbientPoint:
    """a point of R^{n+1}."""

    coords: np.ndarray

    def __post_init__(self):
        coords = _frozen(self.coords)
        if coords.ndim != 1 or coords.shape[0] not in SUPPORTED_AMBIENT_DIMS:
            raise ValueError(f"ambient point must have length 2 or 3, got shape {coords.shape}")
        if not np.all(np.isfinite(coords)):
            raise ValueError("ambient point has non-finite entries")
        object.__setattr__(self, "coords", coords)

    @property
    def ambient_dim(self) -> int:
        return self.coords.shape[0]

    @classmethod
    def north(cls, ambient_dim: int) -> "AmbientPoint":
        return cls(north_pole(ambient_dim))


@dataclass(frozen=True)
class SubsphereParam:
    """the subsphere {x in S^n : x . psi = rho}, also the hyperplane H_{psi,rho}."""

    psi: np.ndarray
    rho: float

    def __post_init__(self):
        psi = _frozen(self.psi)
        if psi.ndim != 1 or psi.shape[0] not in SUPPORTED_AMBIENT_DIMS:
            raise InvalidSubsphere(f"psi must have length 2 or 3, got shape {psi.shape}")
        if abs(np.linalg.norm(psi) - 1.0) > UNIT_TOL:
            raise InvalidSubsphere(f"psi is not a unit vector (norm {np.linalg.norm(psi)!r})")
        if not 0.0 <= self.rho < 1.0:
            raise InvalidSubsphere(f"rho must lie in [0, 1), got {self.rho!r}")
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "rho", float(self.rho))

    @property
    def ambient_dim(self) -> int:
        return self.psi.shape[0]

    @property
    def radius(self) -> float:
        """radius of the subsphere inside its hyperplane."""
        return float(np.sqrt(1.0 - self.rho**2))

    @property
    def pole_gap(self) -> float:
        """rho - psi_{n+1}; zero iff the subsphere passes through the north pole."""
        return self.rho - float(self.psi[-1])

    def hyperplane_residual(self, x: np.ndarray) -> np.ndarray:
        """x . psi - rho for points x (last axis = coordinates)."""
        return np.asarray(x, dtype=float) @ self.psi - self.rho

    @classmethod
    def from_closest_point(cls, y: np.ndarray) -> "SubsphereParam":
        """the hyperplane whose closest point to the origin is y != 0."""
        y = np.asarray(y, dtype=float)
        norm = float(np.linalg.norm(y))
        return cls(y / norm, norm)


@dataclass(frozen=True)
class EuclideanSphere:
    """the sphere S^{n-1}(center, radius) in R^n, read as the point (center, radius) of R^n x R^+."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        center = _frozen(np.atleast_1d(self.center))
        if not np.all(np.isfinite(center)) or not np.isfinite(self.radius):
            raise ValueError("sphere has non-finite center or radius")
        if self.radius < 0.0:
            raise ValueError(f"sphere radius must be >= 0, got {self.radius!r}")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def as_point(self) -> np.ndarray:
        """(center, radius) as a point of R^n x R^+."""
        return np.append(self.center, self.radius)

    def contains(self, y: np.ndarray) -> np.ndarray:
        """membership in the open ball B_n(center, radius)."""
        return np.linalg.norm(np.asarray(y, dtype=float) - self.center, axis=-1) < self.radius


@dataclass(frozen=True)
class CapRegion:
    """the spherical cap {x in S^n : x_{n+1} < h} (below) or {x_{n+1} > h} (above)."""

    axis_height: float
    side: Literal["below", "above"] = "below"

    def __post_init__(self):
        if not -1.0 < self.axis_height < 1.0:
            raise ValueError(f"cap axis height must lie in (-1, 1), got {self.axis_height!r}")

    def contains(self, x: np.ndarray) -> np.ndarray:
        heights = np.asarray(x, dtype=float)[..., -1]
        if self.side == "below":
            return heights < self.axis_height
        return heights > self.axis_height


@dataclass(frozen=True)
class QuadratureNodes:
    """nodes (rows of points) and positive weights of a quadrature rule."""

    points: np.ndarray
    weights: np.ndarray = field(repr=False)

    def __iter__(self) -> Iterator[Tuple[np.ndarray, float]]:
        return iter(zip(self.points, self.weights))

    def __len__(self) -> int:
        return self.weights.shape[0]

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(values, self.weights))


def _check_on_sphere(x: np.ndarray) -> None:
    norms = np.linalg.norm(x, axis=-1)
    if np.any(np.abs(norms - 1.0) > GEOM_TOL):
        raise NotOnSphere(f"point not on the unit sphere (max |norm - 1| = {np.max(np.abs(norms - 1.0)):.3e})")


def stereo_forward(x: np.ndarray) -> np.ndarray:
    """stereographic projection from S^n minus the north pole to R^n.

    args:
        x: point(s) on S^n, coordinates on the last axis

    returns:
        (x_1, ..., x_n) / (1 - x_{n+1})

    raises:
        NotOnSphere: if |x| deviates from 1 by more than GEOM_TOL
        NorthPoleSingular: if x_{n+1} >= 1 - UNIT_TOL
    """
    x = np.asarray(x, dtype=float)
    _check_on_sphere(x)
    last = x[..., -1]
    if np.any(last >= 1.0 - UNIT_TOL):
        raise NorthPoleSingular("stereographic projection is undefined at the north pole")
    return x[..., :-1] / (1.0 - last)[..., None]


def stereo_inverse(y: np.ndarray) -> np.ndarray:
    """inverse stereographic projection (2y, |y|^2 - 1) / (1 + |y|^2)."""
    y = np.asarray(y, dtype=float)
    sq = np.sum(y * y, axis=-1, keepdims=True)
    return np.concatenate([2.0 * y, sq - 1.0], axis=-1) / (1.0 + sq)


def subsphere_image(s: SubsphereParam) -> EuclideanSphere:
    """stereographic image of a subsphere avoiding the north pole.

    center psi* / (rho - psi_{n+1}), radius sqrt(1 - rho^2) / |rho - psi_{n+1}|.

    raises:
        PassesThroughNorthPole: if |rho - psi_{n+1}| < UNIT_TOL
    """
    gap = s.pole_gap
    if abs(gap) < UNIT_TOL:
        raise PassesThroughNorthPole(f"subsphere passes through the north pole (gap {gap:.3e})")
    return EuclideanSphere(s.psi[:-1] / gap, s.radius / abs(gap))


def measure_weight(y: np.ndarray) -> np.ndarray:
    """density 2^{n-1} / (1 + |y|^2)^{n-1} of dS with respect to dS* pulled to R^n."""
    y = np.asarray(y, dtype=float)
    n = y.shape[-1]
    sq = np.sum(y * y, axis=-1)
    return (2.0 / (1.0 + sq)) ** (n - 1)


def orthonormal_complement(psi: np.ndarray) -> np.ndarray:
    """orthonormal basis (rows) of psi-perp.

    the first vector is gram-schmidt of the coordinate axis with smallest
    |psi . e_i| (lowest index on ties); in R^3 the second is psi x u.
    """
    psi = np.asarray(psi, dtype=float)
    k = int(np.argmin(np.abs(psi)))
    u = -psi[k] * psi
    u[k] += 1.0
    u /= np.linalg.norm(u)
    if psi.shape[0] == 2:
        return u[None, :]
    return np.stack([u, np.cross(psi, u)])


def _check_node_count(count: int) -> None:
    if count < settings.min_nodes:
        raise ValueError(f"need at least {settings.min_nodes} nodes, got {count}")


def subsphere_nodes(s: SubsphereParam, count: int) -> QuadratureNodes:
    """trapezoid nodes on a subsphere.

    for n=2 the circle rho*psi + sqrt(1 - rho^2)(cos t u + sin t v) at
    uniform angles with weights 2 pi sqrt(1 - rho^2) / count; for n=1 the
    two points rho*psi +- sqrt(1 - rho^2) u with unit weights.
    """
    frame = orthonormal_complement(s.psi)
    base = s.rho * s.psi
    if s.ambient_dim == 2:
        u = frame[0]
        points = np.stack([base + s.radius * u, base - s.radius * u])
        return QuadratureNodes(points, np.ones(2))

    _check_node_count(count)
    angles = 2.0 * np.pi * np.arange(count) / count
    points = base + s.radius * (np.cos(angles)[:, None] * frame[0] + np.sin(angles)[:, None] * frame[1])
    weights = np.full(count, 2.0 * np.pi * s.radius / count)
    return QuadratureNodes(points, weights)


def sphere_nodes(sphere: EuclideanSphere, count: int) -> QuadratureNodes:
    """trapezoid nodes on a euclidean sphere in R^n (n = 1 or 2)."""
    if sphere.dim == 1:
        x, t = float(sphere.center[0]), sphere.radius
        return QuadratureNodes(np.array([[x - t], [x + t]]), np.ones(2))

    _check_node_count(count)
    if sphere.radius <= 0.0:
        raise DegenerateSphere("quadrature on a circle needs a positive radius")
    angles = 2.0 * np.pi * np.arange(count) / count
    offsets = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    points = sphere.center + sphere.radius * offsets
    weights = np.full(count, 2.0 * np.pi * sphere.radius / count)
    return QuadratureNodes(points, weights)


def stereo_distortion(s: SubsphereParam, count: int) -> float:
    """ratio of the largest to smallest stereographic scale factor over the subsphere nodes."""
    nodes = subsphere_nodes(s, count)
    scale = 1.0 - nodes.points[:, -1]
    return float(scale.max() / scale.min())
