"""profile curves, surfaces of revolution and their singularity structure.

a profile gamma(theta), theta in [-pi, pi), is a closed planar curve inside
the unit circle; in R^3 it is revolved about the last coordinate axis. the
in-plane normal used throughout is n = (gamma_2', -gamma_1'), so that
x . grad F - F_{x_{n+1}} becomes gamma_1 gamma_2' - gamma_2 gamma_1' + gamma_1'.
"""

import logging
from dataclasses import dataclass
from typing import List, Literal, Optional, Protocol, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.optimize import bisect

from src.core.config import Settings, settings
from src.core.constants import UNIT_TOL
from src.core.errors import DegenerateTangent, EmptyBoundary, NoAxisCrossing, NotContained
from src.geometry.core import CapRegion

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
DOMAIN = (-np.pi, np.pi)


class Profile(Protocol):
    """anything that evaluates gamma and its first two derivatives."""

    def gamma(self, theta: np.ndarray) -> np.ndarray: ...

    def d1(self, theta: np.ndarray) -> np.ndarray: ...

    def d2(self, theta: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class ProfileCurve:
    """analytic closed profile curve.

    polar_trig: gamma = (a r cos t, a r sin t + d), r = b + c sin(k t + phase).
    offset_circle: gamma = lam * omega + radius * (cos t, sin t).
    """

    family: Literal["polar_trig", "offset_circle"]
    scale: float = 1.0
    base: float = 0.5
    amp: float = 0.0
    freq: float = 1.0
    phase: float = 0.0
    vertical_shift: float = 0.0
    lam: float = 0.0
    omega: Tuple[float, float] = (0.0, 1.0)
    radius: float = 0.5

    @classmethod
    def polar_trig(cls, scale: float, base: float, amp: float, freq: float, phase: float,
                   vertical_shift: float = 0.0) -> "ProfileCurve":
        return cls("polar_trig", scale=scale, base=base, amp=amp, freq=freq, phase=phase,
                   vertical_shift=vertical_shift)

    @classmethod
    def offset_circle(cls, lam: float, omega: Tuple[float, float], radius: float) -> "ProfileCurve":
        omega = (float(omega[0]), float(omega[1]))
        if abs(np.hypot(*omega) - 1.0) > UNIT_TOL:
            raise ValueError(f"omega must be a unit vector, got {omega}")
        return cls("offset_circle", lam=lam, omega=omega, radius=radius)

    @classmethod
    def centered_circle(cls, radius: float) -> "ProfileCurve":
        return cls.offset_circle(0.0, (0.0, 1.0), radius)

    def _polar(self, theta: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        arg = self.freq * theta + self.phase
        r = self.base + self.amp * np.sin(arg)
        r1 = self.amp * self.freq * np.cos(arg)
        r2 = -self.amp * self.freq**2 * np.sin(arg)
        return r, r1, r2

    def gamma(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        cos, sin = np.cos(theta), np.sin(theta)
        if self.family == "offset_circle":
            return np.stack([self.lam * self.omega[0] + self.radius * cos,
                             self.lam * self.omega[1] + self.radius * sin], axis=-1)
        r, _, _ = self._polar(theta)
        return np.stack([self.scale * r * cos, self.scale * r * sin + self.vertical_shift], axis=-1)

    def d1(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        cos, sin = np.cos(theta), np.sin(theta)
        if self.family == "offset_circle":
            return np.stack([-self.radius * sin, self.radius * cos], axis=-1)
        r, r1, _ = self._polar(theta)
        return self.scale * np.stack([r1 * cos - r * sin, r1 * sin + r * cos], axis=-1)

    def d2(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        cos, sin = np.cos(theta), np.sin(theta)
        if self.family == "offset_circle":
            return np.stack([-self.radius * cos, -self.radius * sin], axis=-1)
        r, r1, r2 = self._polar(theta)
        return self.scale * np.stack([r2 * cos - 2.0 * r1 * sin - r * cos,
                                      r2 * sin + 2.0 * r1 * cos - r * sin], axis=-1)

    def max_norm(self, samples: int = 4096) -> float:
        theta = np.linspace(-np.pi, np.pi, samples, endpoint=False)
        return float(np.max(np.linalg.norm(self.gamma(theta), axis=-1)))


@dataclass(frozen=True)
class RevolutionSurface:
    """the surface swept by a profile about the last axis of R^{ambient_dim}.

    for ambient_dim 2 the surface is the profile itself.
    """

    profile: ProfileCurve
    ambient_dim: int = 3

    def __post_init__(self):
        if self.ambient_dim not in (2, 3):
            raise ValueError(f"ambient_dim must be 2 or 3, got {self.ambient_dim}")
        if self.profile.max_norm() >= 1.0 - settings.containment_margin:
            raise NotContained("profile is not strictly inside the unit sphere")

    def _revolve(self, planar: np.ndarray, azimuth) -> np.ndarray:
        if self.ambient_dim == 2:
            return planar
        azimuth = np.asarray(azimuth, dtype=float)
        return np.stack([planar[..., 0] * np.cos(azimuth),
                         planar[..., 0] * np.sin(azimuth),
                         planar[..., 1]], axis=-1)

    def point(self, theta, azimuth=0.0) -> np.ndarray:
        return self._revolve(self.profile.gamma(theta), azimuth)

    def normal(self, theta, azimuth=0.0) -> np.ndarray:
        """unnormalized normal (gamma_2', -gamma_1') revolved."""
        d1 = self.profile.d1(theta)
        planar = np.stack([d1[..., 1], -d1[..., 0]], axis=-1)
        return self._revolve(planar, azimuth)


@dataclass(frozen=True)
class TangentPlaneData:
    """tangent plane {z : z . psi = rho} with rho >= 0."""

    psi: np.ndarray
    rho: float

    @property
    def foot(self) -> np.ndarray:
        """closest point of the plane to the origin."""
        return self.rho * self.psi


class ComponentDecomposition(BaseModel):
    """connected components of Sigma minus Sigma' as parameter intervals."""

    model_config = ConfigDict(frozen=True)

    components: List[Tuple[float, float]]
    singular_params: List[float]
    sigma0_extra_params: List[float]
    regular_flags: List[bool]
    upper_index: int
    top_param: float

    def component_of(self, theta: float) -> int:
        for index, (lo, hi) in enumerate(self.components):
            if _in_interval(theta, lo, hi):
                return index
        raise ValueError(f"parameter {theta!r} lies on the singular set")


class RegularityResult(BaseModel):
    regular: bool
    witness: float
    min_abs_curvature: float
    sign_change: bool


def _in_interval(theta: float, lo: float, hi: float) -> bool:
    """open-interval membership modulo 2 pi."""
    shifted = lo + np.mod(theta - lo, TWO_PI)
    return bool(lo < shifted < hi)


def singular_expression(profile: Profile, theta) -> np.ndarray:
    """gamma_1 gamma_2' - gamma_2 gamma_1' + gamma_1' (zero on Sigma')."""
    g, d1 = profile.gamma(theta), profile.d1(theta)
    return g[..., 0] * d1[..., 1] - g[..., 1] * d1[..., 0] + d1[..., 0]


def origin_expression(profile: Profile, theta) -> np.ndarray:
    """gamma_1 gamma_2' - gamma_2 gamma_1' (zero where the tangent passes through the origin)."""
    g, d1 = profile.gamma(theta), profile.d1(theta)
    return g[..., 0] * d1[..., 1] - g[..., 1] * d1[..., 0]


def curvature_expression(profile: Profile, theta) -> np.ndarray:
    """gamma_1' gamma_2'' - gamma_1'' gamma_2'."""
    d1, d2 = profile.d1(theta), profile.d2(theta)
    return d1[..., 0] * d2[..., 1] - d2[..., 0] * d1[..., 1]


def _wrap(theta: float) -> float:
    return float(np.mod(theta + np.pi, TWO_PI) - np.pi)


def periodic_roots(fn, config: Settings = settings) -> List[float]:
    """sign-change roots of a 2 pi periodic function on [-pi, pi).

    uniform scan of config.scan_points nodes (wrapping last to first),
    refined by bisection to config.bisection_xtol.
    """
    count = config.scan_points
    grid = -np.pi + TWO_PI * np.arange(count + 1) / count
    values = np.asarray(fn(grid), dtype=float)
    values[-1] = values[0]

    roots = []
    for i in range(count):
        a, b = values[i], values[i + 1]
        if a == 0.0:
            roots.append(float(grid[i]))
        elif a * b < 0.0:
            root = bisect(lambda t: float(fn(np.array(t))), grid[i], grid[i + 1],
                          xtol=config.bisection_xtol)
            roots.append(_wrap(root))
    return sorted(roots)


def tangent_plane_at(surface: RevolutionSurface, theta: float, azimuth: float = 0.0) -> TangentPlaneData:
    """tangent plane of the surface at the point with profile parameter theta.

    args:
        surface: surface of revolution
        theta: profile parameter
        azimuth: revolution angle (ignored in the plane)

    returns:
        unit normal psi and offset rho >= 0 (psi flipped when needed)

    raises:
        DegenerateTangent: if |gamma'(theta)| < 1e-12
    """
    normal = surface.normal(theta, azimuth)
    length = float(np.linalg.norm(normal))
    if length < UNIT_TOL:
        raise DegenerateTangent(f"gamma' vanishes at theta={theta!r}")
    psi = normal / length
    rho = float(np.dot(surface.point(theta, azimuth), psi))
    if rho < 0.0:
        psi, rho = -psi, -rho
    return TangentPlaneData(psi, rho)


def axis_crossings(profile: Profile, config: Settings = settings) -> List[float]:
    return periodic_roots(lambda t: profile.gamma(t)[..., 0], config)


def singular_param_set(surface: RevolutionSurface, config: Settings = settings) -> Tuple[List[float], List[float]]:
    """roots of the Sigma' condition and of the through-origin condition.

    returns:
        (singular_params, sigma0_extra_params), both sorted in [-pi, pi)
    """
    profile = surface.profile
    singular = periodic_roots(lambda t: singular_expression(profile, t), config)
    through_origin = periodic_roots(lambda t: origin_expression(profile, t), config)
    logger.debug(f"singular roots: {len(singular)}, through-origin roots: {len(through_origin)}")
    return singular, through_origin


def regularity_check(profile: Profile, interval: Tuple[float, float],
                     config: Settings = settings) -> RegularityResult:
    """check gamma_1' gamma_2'' - gamma_1'' gamma_2' != 0 on an open interval.

    the interval is scanned at config.regularity_scan_points interior points;
    a sign change of the expression counts as a zero and its bisected root is
    the witness, otherwise the witness is the minimizer of the magnitude.
    """
    lo, hi = interval
    count = config.regularity_scan_points
    theta = lo + (hi - lo) * (np.arange(count) + 0.5) / count
    values = curvature_expression(profile, theta)
    magnitude = np.abs(values)
    index = int(np.argmin(magnitude))
    witness = float(theta[index])

    changes = np.nonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)[0]
    sign_change = changes.size > 0
    if sign_change:
        i = int(changes[0])
        witness = bisect(lambda t: float(curvature_expression(profile, np.array(t))),
                         theta[i], theta[i + 1], xtol=config.bisection_xtol)

    regular = (not sign_change) and float(magnitude[index]) > config.regularity_threshold
    return RegularityResult(
        regular=regular,
        witness=_wrap(witness),
        min_abs_curvature=float(magnitude[index]),
        sign_change=sign_change,
    )


def split_components(surface: RevolutionSurface, singular: List[float], sigma0: Optional[List[float]] = None,
                     config: Settings = settings) -> ComponentDecomposition:
    """open parameter intervals between consecutive singular roots (wrapping).

    raises:
        NoAxisCrossing: if the profile never meets the symmetry axis
    """
    crossings = axis_crossings(surface.profile, config)
    if not crossings:
        raise NoAxisCrossing("profile never meets the symmetry axis")
    heights = surface.profile.gamma(np.array(crossings))[:, 1]
    top = float(crossings[int(np.argmax(heights))])

    roots = sorted(singular)
    if not roots:
        components = [(-np.pi, np.pi)]
    else:
        components = [(roots[i], roots[i + 1]) for i in range(len(roots) - 1)]
        components.append((roots[-1], roots[0] + TWO_PI))

    flags = [regularity_check(surface.profile, interval, config).regular for interval in components]
    upper = 0
    for index, (lo, hi) in enumerate(components):
        if _in_interval(top, lo, hi):
            upper = index
            break

    return ComponentDecomposition(
        components=[(float(lo), float(hi)) for lo, hi in components],
        singular_params=[float(t) for t in roots],
        sigma0_extra_params=[float(t) for t in (sigma0 or [])],
        regular_flags=flags,
        upper_index=upper,
        top_param=top,
    )


def decompose(surface: RevolutionSurface, config: Settings = settings) -> ComponentDecomposition:
    singular, sigma0 = singular_param_set(surface, config)
    return split_components(surface, singular, sigma0, config)


def cone_height(boundary: np.ndarray) -> float:
    """height of the second intersection of the line through (0, 1) and boundary with the unit circle."""
    direction = np.asarray(boundary, dtype=float) - np.array([0.0, 1.0])
    return float(1.0 - 2.0 * direction[1] ** 2 / np.dot(direction, direction))


def projection_set(surface: RevolutionSurface, decomposition: Optional[ComponentDecomposition] = None,
                   config: Settings = settings) -> CapRegion:
    """the projection set of the tangent cone on the unit sphere.

    lines through the north pole and the boundary points of the upper
    component meet the unit circle again at height h; the lower of the two
    endpoint heights bounds the cap {x_{n+1} < h}.

    raises:
        EmptyBoundary: if Sigma' is empty
    """
    decomposition = decomposition or decompose(surface, config)
    if not decomposition.singular_params:
        raise EmptyBoundary("singular set is empty, the tangent cone is undefined")
    lo, hi = decomposition.components[decomposition.upper_index]
    endpoints = surface.profile.gamma(np.array([lo, hi]))
    height = min(cone_height(endpoints[0]), cone_height(endpoints[1]))
    return CapRegion(height, "below")
