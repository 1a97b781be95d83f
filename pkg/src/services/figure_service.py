"""figure service: data series behind figures 1, 3, 4 and 5, written as csv.

every series is a 2d section: profile points (x1, x2) on the left side of a
figure, image points (center, radius) of R x R^+ on the right side.
"""

import csv
import io
import logging
from pathlib import Path
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field

from src.core.config import Settings, settings
from src.core.errors import ConfigInvalid
from src.core.utils import format_float
from src.geometry.maps import classify_psi1, hyperboloid_side, in_s0_interior, phi_profile, phi_sigma, psi1_map
from src.geometry.surfaces import (
    ComponentDecomposition,
    ProfileCurve,
    RevolutionSurface,
    decompose,
    projection_set,
)
from src.services.sampling_service import component_params, image_params
from src.services.suite_service import FIGURE4_PROFILE

logger = logging.getLogger(__name__)

FIGURE_IDS = (1, 3, 4, 5)
PALETTE = ("blue", "yellow", "green", "orange", "purple", "cyan", "magenta", "gray")


class FigureSeries(BaseModel):
    series: str
    component: int
    color: str
    params: List[float]
    points: List[List[float]]


class FigureDataset(BaseModel):
    """labeled sample series of one figure; every series is non-empty and finite."""

    figure: int
    series: List[FigureSeries] = Field(default_factory=list)

    def add(self, series: str, component: int, color: str, params, points) -> None:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        params = np.asarray(params, dtype=float)
        finite = np.all(np.isfinite(points), axis=-1) & np.isfinite(params)
        if not np.any(finite):
            logger.warning(f"figure {self.figure}: series {series}/{component} has no finite points, dropped")
            return
        self.series.append(FigureSeries(
            series=series,
            component=component,
            color=color,
            params=params[finite].tolist(),
            points=points[finite].tolist(),
        ))

    def select(self, series: str) -> List[FigureSeries]:
        return [item for item in self.series if item.series == series]


def figure_surface(figure: int) -> RevolutionSurface:
    """default surface of a figure: shifted profile for 1 and 3, the six-component profile for 4."""
    if figure == 4:
        return RevolutionSurface(ProfileCurve.polar_trig(**FIGURE4_PROFILE), 2)
    return RevolutionSurface(ProfileCurve.polar_trig(1.0, 0.5, 0.2, 3.0, 3.1, vertical_shift=-0.2), 2)


def _color(decomposition: ComponentDecomposition, index: int) -> str:
    if index == decomposition.upper_index:
        return "red"
    others = [i for i in range(len(decomposition.components)) if i != decomposition.upper_index]
    return PALETTE[others.index(index) % len(PALETTE)]


def _add_components(dataset: FigureDataset, surface: RevolutionSurface, decomposition: ComponentDecomposition,
                    resolution: int) -> None:
    for index in range(len(decomposition.components)):
        thetas = component_params(decomposition, index, resolution, 0.0, exclude_sigma0=False)[1:-1]
        dataset.add("component", index, _color(decomposition, index), thetas, surface.profile.gamma(thetas))


def _add_singular(dataset: FigureDataset, surface: RevolutionSurface, decomposition: ComponentDecomposition) -> None:
    if decomposition.singular_params:
        roots = np.array(decomposition.singular_params)
        dataset.add("singular", -1, "black", roots, surface.profile.gamma(roots))


def _figure1(surface, decomposition, resolution, config) -> FigureDataset:
    dataset = FigureDataset(figure=1)
    _add_components(dataset, surface, decomposition, resolution)
    _add_singular(dataset, surface, decomposition)
    return dataset


def _figure3(surface, decomposition, resolution, config) -> FigureDataset:
    dataset = _figure1(surface, decomposition, resolution, config)
    dataset.figure = 3
    cap = projection_set(surface, decomposition, config)

    pole = np.array([0.0, 1.0])
    lo, hi = decomposition.components[decomposition.upper_index]
    for index, boundary in enumerate(surface.profile.gamma(np.array([lo, hi]))):
        direction = boundary - pole
        end = -2.0 * direction[1] / np.dot(direction, direction)
        s = np.linspace(0.0, end, resolution)
        dataset.add("cone", index, "black", s, pole + s[:, None] * direction)

    top = np.arcsin(cap.axis_height)
    angles = np.linspace(-np.pi - top, top, resolution)
    dataset.add("projection_set", decomposition.upper_index, "red", angles,
                np.stack([np.cos(angles), np.sin(angles)], axis=-1))
    return dataset


def _figure4(surface, decomposition, resolution, config) -> FigureDataset:
    dataset = FigureDataset(figure=4)
    _add_components(dataset, surface, decomposition, resolution)
    for index in range(len(decomposition.components)):
        thetas, _ = image_params(surface, decomposition, index, resolution, config)
        if thetas.size:
            dataset.add("image", index, _color(decomposition, index), thetas, phi_profile(surface.profile, thetas))
    return dataset


def _figure5(resolution: int, config: Settings) -> FigureDataset:
    """psi_1 on the unit disk: the two parts of its domain and their images around t^2 - c^2 = 1."""
    dataset = FigureDataset(figure=5)
    radii = np.linspace(0.0, 1.0, resolution + 2)[1:-1]
    angles = 2.0 * np.pi * np.arange(resolution) / resolution
    grid = (radii[:, None, None] * np.stack([np.cos(angles), np.sin(angles)], axis=-1)[None, :, :]).reshape(-1, 2)
    gap = np.abs(np.sum(grid * grid, axis=-1) - grid[:, -1])
    grid = grid[gap > config.sample_margin]
    labels = np.arange(grid.shape[0], dtype=float)

    inside = in_s0_interior(grid)
    dataset.add("s0_interior", 0, "blue", labels[inside], grid[inside])
    dataset.add("s0_exterior", 1, "lightblue", labels[~inside], grid[~inside])

    images = np.array([psi1_map(y).as_point() for y in grid])
    above = np.array([classify_psi1(y) == "above" for y in grid])
    dataset.add("image_above", 0, "blue", labels[above], images[above])
    dataset.add("image_below", 1, "lightblue", labels[~above], images[~above])

    finite = images[np.all(np.isfinite(images), axis=-1)]
    reach = float(np.max(np.abs(finite[:, 0]))) if finite.size else 1.0
    c = np.linspace(-reach, reach, resolution)
    boundary = np.stack([c, np.sqrt(1.0 + c * c)], axis=-1)
    dataset.add("hyperboloid", -1, "black", c, boundary)
    logger.debug(f"figure 5: max |t^2 - c^2 - 1| on the boundary {np.max(np.abs(hyperboloid_side(boundary))):.3e}")
    return dataset


def emit_figure(figure: int, surface: Optional[RevolutionSurface] = None, resolution: int = 200,
                config: Settings = settings) -> FigureDataset:
    """sample the series of one figure.

    args:
        figure: 1, 3, 4 or 5
        surface: surface override; figures 1, 3 and 4 default to figure_surface
        resolution: samples per series
        config: settings

    returns:
        dataset with one series per labeled component

    raises:
        ConfigInvalid: for an unknown figure id or a resolution below 3
    """
    if figure not in FIGURE_IDS:
        raise ConfigInvalid(f"unknown figure {figure!r}", [f"field 'which': expected one of {FIGURE_IDS}"])
    if resolution < 3:
        raise ConfigInvalid(f"resolution {resolution} too small", ["field 'resolution': must be at least 3"])

    logger.info(f"emitting figure {figure} at resolution {resolution}")
    if figure == 5:
        return _figure5(resolution, config)

    surface = surface or figure_surface(figure)
    decomposition = decompose(surface, config)
    builder = {1: _figure1, 3: _figure3, 4: _figure4}[figure]
    return builder(surface, decomposition, resolution, config)


def dataset_csv(dataset: FigureDataset) -> str:
    """csv text with header series,component,param,x1,...,xk and '\\n' line endings."""
    width = max((len(item.points[0]) for item in dataset.series), default=0)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["series", "component", "param"] + [f"x{i + 1}" for i in range(width)])
    for item in dataset.series:
        for param, point in zip(item.params, item.points):
            writer.writerow([item.series, item.component, format_float(param)] + [format_float(v) for v in point])
    return buffer.getvalue()


def write_csv(dataset: FigureDataset, path: str | Path) -> None:
    Path(path).write_text(dataset_csv(dataset), encoding="utf-8", newline="")
    logger.info(f"wrote {len(dataset.series)} series to {path}")


def map_surface(surface: RevolutionSurface, samples: int, config: Settings = settings) -> FigureDataset:
    """images Phi_Sigma(x) in R^n x R^+ of samples of every component (azimuth 0).

    the dataset carries figure id 0, it belongs to no figure.
    """
    decomposition = decompose(surface, config)
    dataset = FigureDataset(figure=0)
    for index in range(len(decomposition.components)):
        thetas, excluded = image_params(surface, decomposition, index, samples, config)
        if excluded:
            logger.info(f"component {index}: {excluded} samples excluded near the singular set")
        images = [phi_sigma(surface, float(theta)).as_point() for theta in thetas]
        if images:
            dataset.add("image", index, _color(decomposition, index), thetas, images)
    return dataset
