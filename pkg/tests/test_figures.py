import csv
import io

import numpy as np
import pytest

from src.core.errors import ConfigInvalid
from src.services.figure_service import (
    FigureDataset,
    dataset_csv,
    emit_figure,
    figure_surface,
    map_surface,
    write_csv,
)


def test_figure4_series(config):
    dataset = emit_figure(4, resolution=50, config=config)
    components = dataset.select("component")
    images = dataset.select("image")
    assert len(components) == 6
    assert len(images) == 6
    assert sum(item.color == "red" for item in components) == 1
    # images live in R x R^+
    assert all(point[1] >= 0.0 for item in images for point in item.points)


def test_figure1_singular_points(config):
    dataset = emit_figure(1, resolution=50, config=config)
    (singular,) = dataset.select("singular")
    surface = figure_surface(1)
    for theta, point in zip(singular.params, singular.points):
        assert np.allclose(surface.profile.gamma(theta), point)


def test_figure3_projection_set(config):
    dataset = emit_figure(3, resolution=50, config=config)
    (arc,) = dataset.select("projection_set")
    points = np.array(arc.points)
    assert np.allclose(np.linalg.norm(points, axis=-1), 1.0)
    height = points[0, 1]
    assert points[-1, 1] == pytest.approx(height)
    assert np.all(points[:, 1] <= height + 1e-12)
    assert -1.0 < height < 1.0
    assert len(dataset.select("cone")) == 2
    # each cone segment starts at the north pole and ends on the unit circle
    for segment in dataset.select("cone"):
        assert np.allclose(segment.points[0], [0.0, 1.0])
        assert np.linalg.norm(segment.points[-1]) == pytest.approx(1.0)


def test_figure5_partition(config):
    dataset = emit_figure(5, resolution=20, config=config)
    (inside,) = dataset.select("s0_interior")
    (above,) = dataset.select("image_above")
    (outside,) = dataset.select("s0_exterior")
    (below,) = dataset.select("image_below")
    assert inside.params == above.params
    assert outside.params == below.params
    assert all(p[1] ** 2 - p[0] ** 2 > 1.0 for p in above.points)
    assert all(p[1] ** 2 - p[0] ** 2 < 1.0 for p in below.points)
    (boundary,) = dataset.select("hyperboloid")
    assert np.allclose([p[1] ** 2 - p[0] ** 2 for p in boundary.points], 1.0)


@pytest.mark.parametrize("figure, resolution", [(2, 50), (6, 50), (4, 2)])
def test_invalid_figure_arguments(config, figure, resolution):
    with pytest.raises(ConfigInvalid):
        emit_figure(figure, resolution=resolution, config=config)


def test_dataset_drops_non_finite_points():
    dataset = FigureDataset(figure=0)
    dataset.add("image", 0, "red", [0.0, 1.0, 2.0], [[0.0, 1.0], [np.inf, 1.0], [2.0, np.nan]])
    (item,) = dataset.series
    assert item.params == [0.0]
    dataset.add("image", 1, "blue", [0.0], [[np.nan, 0.0]])
    assert len(dataset.series) == 1


def test_csv_layout(config, tmp_path):
    dataset = emit_figure(4, resolution=20, config=config)
    text = dataset_csv(dataset)
    assert text.startswith("series,component,param,x1,x2\n")
    assert "\r" not in text
    rows = list(csv.reader(io.StringIO(text)))
    assert len(rows) == 1 + sum(len(item.points) for item in dataset.series)

    path = tmp_path / "figure4.csv"
    write_csv(dataset, path)
    assert path.read_text(encoding="utf-8") == text


def test_csv_is_deterministic(config):
    assert dataset_csv(emit_figure(3, resolution=30, config=config)) == dataset_csv(
        emit_figure(3, resolution=30, config=config))


def test_map_surface(sphere, config):
    dataset = map_surface(sphere, 40, config)
    assert dataset.figure == 0
    images = dataset.select("image")
    assert len(images) == 2
    assert all(len(point) == 3 for item in images for point in item.points)
