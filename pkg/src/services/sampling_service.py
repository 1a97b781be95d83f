"""sampling service: deterministic samplers of subspheres, component parameters and ball points."""

import logging
from typing import List, Tuple

import numpy as np

from src.core.config import Settings, settings
from src.geometry.core import SubsphereParam
from src.geometry.surfaces import ComponentDecomposition, RevolutionSurface, singular_expression

logger = logging.getLogger(__name__)


def random_unit_vectors(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    vectors = rng.standard_normal((count, dim))
    return vectors / np.linalg.norm(vectors, axis=-1, keepdims=True)


def random_subspheres(rng: np.random.Generator, count: int, ambient_dim: int = 3,
                      min_gap: float = 0.05, rho_max: float = 0.95) -> List[SubsphereParam]:
    """subspheres with uniform normals, uniform rho and |rho - psi_{n+1}| > min_gap.

    args:
        rng: seeded generator
        count: number of subspheres
        ambient_dim: 2 or 3
        min_gap: distance of the hyperplane from the north pole
        rho_max: upper bound of rho

    returns:
        list of subspheres, drawn by rejection
    """
    result: List[SubsphereParam] = []
    while len(result) < count:
        psi = random_unit_vectors(rng, 1, ambient_dim)[0]
        rho = float(rng.uniform(0.0, rho_max))
        if abs(rho - psi[-1]) > min_gap:
            result.append(SubsphereParam(psi, rho))
    return result


def random_ball_points(rng: np.random.Generator, count: int, dim: int, radius: float = 1.0) -> np.ndarray:
    """uniform points of the ball B(0, radius) in R^dim."""
    directions = random_unit_vectors(rng, count, dim)
    radii = radius * rng.uniform(0.0, 1.0, count) ** (1.0 / dim)
    return directions * radii[:, None]


def _near(theta: np.ndarray, roots: List[float], margin: float) -> np.ndarray:
    if not roots:
        return np.zeros(theta.shape, dtype=bool)
    diff = np.abs(np.mod(theta[:, None] - np.asarray(roots)[None, :] + np.pi, 2.0 * np.pi) - np.pi)
    return np.any(diff < margin, axis=-1)


def component_params(decomposition: ComponentDecomposition, index: int, count: int,
                     margin: float, exclude_sigma0: bool = True) -> np.ndarray:
    """count uniform parameters of a component, keeping margin away from its ends.

    parameters within margin of a through-origin root are dropped when
    exclude_sigma0 is set, so fewer than count may be returned.
    """
    lo, hi = decomposition.components[index]
    theta = np.linspace(lo + margin, hi - margin, count)
    if exclude_sigma0:
        theta = theta[~_near(theta, decomposition.sigma0_extra_params, margin)]
    return theta


def u_params(decomposition: ComponentDecomposition, config: Settings = settings) -> List[Tuple[float, float]]:
    """(theta, azimuth) samples of the upper component."""
    thetas = component_params(decomposition, decomposition.upper_index, config.u_samples, config.sample_margin)
    azimuths = 2.0 * np.pi * np.arange(config.u_azimuths) / config.u_azimuths
    return [(float(t), float(a)) for t in thetas for a in azimuths]


def image_params(surface: RevolutionSurface, decomposition: ComponentDecomposition, index: int,
                 count: int, config: Settings = settings) -> Tuple[np.ndarray, int]:
    """component parameters whose image is finite enough to sample.

    returns:
        (parameters, number excluded for a singular denominator below config.denominator_cutoff)
    """
    theta = component_params(decomposition, index, count, config.image_sample_margin, exclude_sigma0=False)
    keep = np.abs(singular_expression(surface.profile, theta)) >= config.denominator_cutoff
    excluded = int(np.count_nonzero(~keep))
    if excluded:
        logger.debug(f"component {index}: excluded {excluded} samples near the singular set")
    return theta[keep], excluded
