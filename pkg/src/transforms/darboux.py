"""normalized spherical means Q(x, t) = t^{1-n} R g(x, t) and the residual of Darboux's equation.

L[Q] = Q_tt + ((n - 1) / t) Q_t - Laplace_x Q vanishes for every g; the
residual is evaluated with second-order central differences on a uniform
grid in (x, t).
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel

from src.core.config import settings
from src.geometry.core import EuclideanSphere
from src.transforms.fields import PlaneField
from src.transforms.spherical import spherical_mean

logger = logging.getLogger(__name__)

MIN_RADIUS = 1e-3


@dataclass(frozen=True)
class MeanGrid:
    """Q sampled on axes[0] x ... x axes[n-1] x radii, spacing h on every axis."""

    axes: tuple
    radii: np.ndarray
    values: np.ndarray
    spacing: float

    @property
    def dim(self) -> int:
        return len(self.axes)


class DarbouxStudy(BaseModel):
    spacings: list[float]
    max_residuals: list[float]
    observed_order: Optional[float]


def build_mean_grid(g: PlaneField, center: Sequence[float], radius: float, half_width: float,
                    spacing: float, count: Optional[int] = None) -> MeanGrid:
    """sample Q on a cube of cells around (center, radius).

    args:
        g: plane field (n = len(center))
        center: grid center in R^n
        radius: grid center in t
        half_width: physical half-width on every axis, rounded to whole cells
        spacing: grid spacing h
        count: quadrature nodes per circle

    returns:
        immutable grid of Q values, shape (len(axis),) * n + (len(radii),)
    """
    count = count or settings.quad_nodes
    center = np.asarray(center, dtype=float)
    n = center.shape[0]
    cells = int(round(half_width / spacing))
    offsets = spacing * np.arange(-cells, cells + 1)
    radii = radius + offsets
    if radii[0] < max(spacing, MIN_RADIUS):
        raise ValueError(f"grid reaches t = {radii[0]!r}, below max(h, {MIN_RADIUS})")

    axes = tuple(center[i] + offsets for i in range(n))
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    values = np.empty((mesh.shape[0], radii.shape[0]))
    for j, t in enumerate(radii):
        for i, x in enumerate(mesh):
            values[i, j] = spherical_mean(g, EuclideanSphere(x, t), count) * t ** (1 - n)

    values = values.reshape((offsets.shape[0],) * n + (radii.shape[0],))
    values.setflags(write=False)
    logger.debug(f"built mean grid with {values.size} values at h={spacing}")
    return MeanGrid(axes, radii, values, spacing)


def darboux_residual(grid: MeanGrid) -> np.ndarray:
    """central-difference L[Q] on interior grid points (one-cell margin on every axis)."""
    q = grid.values
    h = grid.spacing
    n = grid.dim
    inner = tuple(slice(1, -1) for _ in range(n + 1))

    def shifted(axis: int, step: int) -> np.ndarray:
        index = list(inner)
        index[axis] = slice(1 + step, q.shape[axis] - 1 + step)
        return q[tuple(index)]

    center = q[inner]
    t = grid.radii[1:-1]
    q_tt = (shifted(n, 1) - 2.0 * center + shifted(n, -1)) / h**2
    q_t = (shifted(n, 1) - shifted(n, -1)) / (2.0 * h)
    laplacian = sum((shifted(axis, 1) - 2.0 * center + shifted(axis, -1)) / h**2 for axis in range(n))
    return q_tt + (n - 1) / t * q_t - laplacian


def _shared_points(study_grid: MeanGrid, coarse: float, coarse_cells: int) -> tuple:
    """indices into darboux_residual(study_grid) of the coarse grid's interior points."""
    ratio = coarse / study_grid.spacing
    step = int(round(ratio))
    if step < 1 or abs(ratio - step) > 1e-9:
        raise ValueError(f"spacing {study_grid.spacing!r} does not divide the coarsest spacing {coarse!r}")
    cells = (len(study_grid.radii) - 1) // 2
    index = cells - 1 + step * np.arange(-(coarse_cells - 1), coarse_cells)
    return np.ix_(*([index] * (study_grid.dim + 1)))


def refinement_study(g: PlaneField, center: Sequence[float], radius: float, half_width: float,
                     spacings: Sequence[float], count: Optional[int] = None) -> DarbouxStudy:
    """max |L[Q]| over the coarsest grid's interior points for decreasing h, and the observed order between the last two.

    every spacing must divide the first one so all grids share those points.
    """
    coarse = spacings[0]
    coarse_cells = int(round(half_width / coarse))
    residuals = []
    for h in spacings:
        grid = build_mean_grid(g, center, radius, half_width, h, count)
        shared = darboux_residual(grid)[_shared_points(grid, coarse, coarse_cells)]
        residuals.append(float(np.max(np.abs(shared))))
        logger.info(f"darboux residual at h={h}: {residuals[-1]:.3e}")

    order = None
    if len(spacings) >= 2 and residuals[-1] > 0.0 and residuals[-2] > 0.0:
        order = float(np.log(residuals[-2] / residuals[-1]) / np.log(spacings[-2] / spacings[-1]))
    return DarbouxStudy(spacings=list(spacings), max_residuals=residuals, observed_order=order)
