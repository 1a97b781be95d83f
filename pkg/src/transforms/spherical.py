"""spherical transform, its modified form indexed by closest points, spherical means and the vanishing check."""

import logging
import math
from typing import Iterable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel

from src.core.config import Settings, settings
from src.core.constants import QUAD_RELTOL, UNIT_TOL
from src.core.errors import DomainClip, OnSigma0, OriginUndefined, OutsideUnitBall
from src.geometry.core import (
    EuclideanSphere,
    SubsphereParam,
    sphere_nodes,
    stereo_distortion,
    subsphere_nodes,
)
from src.geometry.maps import psi0_map, psi_map
from src.geometry.surfaces import RevolutionSurface
from src.transforms.fields import PlaneField, SphereField, pullback_field

logger = logging.getLogger(__name__)


class RelationResidual(BaseModel):
    lhs: float
    rhs: float
    residual: float
    scaled_residual: float
    image_nodes: int

    @property
    def passed(self) -> bool:
        return self.scaled_residual < QUAD_RELTOL


class VanishingReport(BaseModel):
    """max |S_0 f| and max |grad S_0 f| over the images Psi_0(x) of the samples."""

    samples: int
    evaluated: int
    skipped_on_sigma0: int
    skipped_domain_clip: int
    tol: float
    max_value: float
    max_gradient: float
    worst_param: Optional[float] = None
    passed: bool


def spherical_transform(f: SphereField, s: SubsphereParam, count: Optional[int] = None) -> float:
    """trapezoid rule for the integral of f over the subsphere x . psi = rho."""
    nodes = subsphere_nodes(s, count or settings.quad_nodes)
    return nodes.integrate(f(nodes.points))


def _check_closest_point(y: np.ndarray) -> float:
    norm = float(np.linalg.norm(y))
    if norm < UNIT_TOL:
        raise OriginUndefined("S_0 f is not defined at the origin")
    if norm >= 1.0:
        raise OutsideUnitBall(f"|y| = {norm!r} is not inside the unit ball")
    return norm


def modified_spherical_transform(f: SphereField, y: np.ndarray, count: Optional[int] = None) -> float:
    """(S_0 f)(y) = (S f)(y / |y|, |y|).

    raises:
        OriginUndefined: at y = 0
        OutsideUnitBall: if |y| >= 1
    """
    y = np.asarray(y, dtype=float)
    norm = _check_closest_point(y)
    return spherical_transform(f, SubsphereParam(y / norm, norm), count)


def s0_gradient_fd(f: SphereField, y: np.ndarray, step: Optional[float] = None,
                   count: Optional[int] = None) -> np.ndarray:
    """central-difference gradient of S_0 f at y.

    raises:
        DomainClip: if a stencil point y +- step e_i leaves the punctured unit ball
    """
    y = np.asarray(y, dtype=float)
    step = step or settings.fd_step_gradient
    gradient = np.empty_like(y)
    for i in range(y.shape[0]):
        shift = np.zeros_like(y)
        shift[i] = step
        stencil = (y + shift, y - shift)
        for point in stencil:
            norm = float(np.linalg.norm(point))
            if norm < UNIT_TOL or norm >= 1.0:
                raise DomainClip(f"stencil point {point.tolist()} leaves the domain of S_0 f")
        forward = modified_spherical_transform(f, stencil[0], count)
        backward = modified_spherical_transform(f, stencil[1], count)
        gradient[i] = (forward - backward) / (2.0 * step)
    return gradient


def spherical_mean(g: PlaneField, sphere: EuclideanSphere, count: Optional[int] = None) -> float:
    """integral of g over the sphere |x' - x| = t (two-point sum for n = 1)."""
    nodes = sphere_nodes(sphere, count or settings.quad_nodes)
    return nodes.integrate(g(nodes.points))


def image_node_count(s: SubsphereParam, count: int, config: Settings = settings) -> int:
    """nodes for the spherical-mean side so its resolution matches the subsphere side."""
    if s.ambient_dim == 2:
        return count
    scaled = count * math.ceil(stereo_distortion(s, count))
    return int(min(scaled, max(config.max_image_nodes, count)))


def transform_relation_check(f: SphereField, s: SubsphereParam, count: Optional[int] = None,
                             config: Settings = settings) -> RelationResidual:
    """compare (S f)(psi, rho) with (R g)(Psi(psi, rho)) for the pullback g of f.

    the scaled residual divides by max(|S f|, 1).
    """
    count = count or config.quad_nodes
    lhs = spherical_transform(f, s, count)
    image = psi_map(s)
    image_count = image_node_count(s, count, config)
    rhs = spherical_mean(pullback_field(f), image, image_count)
    residual = abs(lhs - rhs)
    return RelationResidual(
        lhs=lhs,
        rhs=rhs,
        residual=residual,
        scaled_residual=residual / max(abs(lhs), 1.0),
        image_nodes=image_count,
    )


def vanishing_data_check(f: SphereField, surface: RevolutionSurface, params: Iterable[Tuple[float, float]],
                         tol: Optional[float] = None, config: Settings = settings) -> VanishingReport:
    """check that S_0 f and its first partials vanish at Psi_0(x) for sampled x.

    args:
        f: field on the sphere
        surface: surface of revolution
        params: (theta, azimuth) pairs of the sampled points
        tol: threshold for values and gradient norms

    returns:
        report with the maxima; excluded samples are counted, not raised
    """
    tol = config.vanishing_tol if tol is None else tol
    params = list(params)
    max_value = 0.0
    max_gradient = 0.0
    worst: Optional[float] = None
    worst_score = -1.0
    skipped_sigma0 = 0
    skipped_clip = 0

    for theta, azimuth in params:
        try:
            y = psi0_map(surface, theta, azimuth)
        except OnSigma0:
            skipped_sigma0 += 1
            continue
        try:
            gradient = s0_gradient_fd(f, y, config.fd_step_gradient, config.quad_nodes)
        except DomainClip:
            skipped_clip += 1
            continue
        value = abs(modified_spherical_transform(f, y, config.quad_nodes))
        gradient_norm = float(np.linalg.norm(gradient))
        if max(value, gradient_norm) > worst_score:
            worst, worst_score = float(theta), max(value, gradient_norm)
        max_value = max(max_value, value)
        max_gradient = max(max_gradient, gradient_norm)

    evaluated = len(params) - skipped_sigma0 - skipped_clip
    if skipped_sigma0 or skipped_clip:
        logger.info(f"vanishing check skipped {skipped_sigma0} samples on sigma_0 and {skipped_clip} clipped")
    return VanishingReport(
        samples=len(params),
        evaluated=evaluated,
        skipped_on_sigma0=skipped_sigma0,
        skipped_domain_clip=skipped_clip,
        tol=tol,
        max_value=max_value,
        max_gradient=max_gradient,
        worst_param=worst,
        passed=max_value < tol and max_gradient < tol,
    )


def subsphere_support_margin(bump_distance, subspheres: List[SubsphereParam], count: int) -> float:
    """min over all nodes of the given subspheres of a support-distance function."""
    margin = np.inf
    for s in subspheres:
        nodes = subsphere_nodes(s, count)
        margin = min(margin, float(np.min(bump_distance(nodes.points))))
    return float(margin)
