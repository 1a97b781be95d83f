import numpy as np
import pytest

from src.core.errors import DomainClip, OriginUndefined, OutsideUnitBall
from src.geometry.core import EuclideanSphere, SubsphereParam
from src.services.sampling_service import random_subspheres
from src.transforms.fields import (
    CapBumpField,
    ConstantField,
    ConstantPlaneField,
    CoordinateField,
    PullbackField,
    SumField,
    bumps_of,
    pullback_field,
    quadratic_field,
)
from src.transforms.spherical import (
    modified_spherical_transform,
    s0_gradient_fd,
    spherical_mean,
    spherical_transform,
    subsphere_support_margin,
    transform_relation_check,
    vanishing_data_check,
)

E3 = np.array([0.0, 0.0, 1.0])
SOUTH = (0.0, 0.0, -1.0)


@pytest.mark.parametrize("rho", [0.0, 0.3, 0.5, 0.9])
def test_spherical_transform_latitude_circles(rho):
    s = SubsphereParam(E3, rho)
    length = 2.0 * np.pi * np.sqrt(1.0 - rho**2)
    assert spherical_transform(ConstantField(1.0), s) == pytest.approx(length)
    assert spherical_transform(CoordinateField(2), s) == pytest.approx(rho * length)


def test_spherical_transform_planar():
    # n = 1: the subsphere is a pair of points
    s = SubsphereParam(np.array([0.0, 1.0]), 0.6)
    assert spherical_transform(CoordinateField(0), s) == pytest.approx(0.0, abs=1e-12)
    assert spherical_transform(CoordinateField(1), s) == pytest.approx(1.2)


def test_modified_transform_of_one():
    y = np.array([0.0, 0.0, 0.5])
    assert modified_spherical_transform(ConstantField(1.0), y) == pytest.approx(np.pi * np.sqrt(3.0))
    gradient = s0_gradient_fd(ConstantField(1.0), y)
    assert np.allclose(gradient, [0.0, 0.0, -2.0 * np.pi / np.sqrt(3.0)], atol=1e-6)


@pytest.mark.parametrize("y, error", [((0.0, 0.0, 0.0), OriginUndefined), ((0.0, 0.0, 1.0), OutsideUnitBall)])
def test_modified_transform_domain(y, error):
    with pytest.raises(error):
        modified_spherical_transform(ConstantField(1.0), np.array(y))


def test_gradient_stencil_clipped():
    with pytest.raises(DomainClip):
        s0_gradient_fd(ConstantField(1.0), np.array([0.0, 0.0, 0.99995]), step=1e-4)


def test_spherical_mean():
    circle = EuclideanSphere(np.array([0.3, -0.4]), 0.7)
    assert spherical_mean(ConstantPlaneField(1.0), circle) == pytest.approx(2.0 * np.pi * 0.7)
    assert spherical_mean(quadratic_field(2), circle) == pytest.approx(2.0 * np.pi * 0.7 * (0.25 + 0.49))

    pair = EuclideanSphere(np.array([0.5]), 0.25)
    assert spherical_mean(ConstantPlaneField(1.0), pair) == pytest.approx(2.0)
    assert spherical_mean(quadratic_field(1), pair) == pytest.approx(0.25**2 + 0.75**2)


def test_relation_for_one_at_the_top():
    report = transform_relation_check(ConstantField(1.0), SubsphereParam(E3, 0.5))
    assert report.lhs == pytest.approx(np.pi * np.sqrt(3.0))
    assert report.rhs == pytest.approx(np.pi * np.sqrt(3.0))
    assert report.passed


@pytest.mark.parametrize("field", [ConstantField(1.0), CoordinateField(0), CoordinateField(2),
                                   CapBumpField(SOUTH, 0.4, 1.0)])
def test_relation_random_subspheres(rng, config, field):
    for s in random_subspheres(rng, 8, 3):
        assert transform_relation_check(field, s, config=config).passed


def test_relation_planar(rng, config):
    for s in random_subspheres(rng, 20, 2):
        assert transform_relation_check(CoordinateField(1), s, config=config).passed


def test_cap_bump_field():
    bump = CapBumpField(SOUTH, 0.3, 2.0)
    values = bump(np.array([SOUTH, E3]))
    assert values[0] == pytest.approx(2.0 * np.exp(-1.0 / 0.09))
    assert values[1] == 0.0
    assert bump.c0_compatible
    assert bump.max_height() == pytest.approx(-1.0 + 0.09 / 2.0)
    assert bump.support_distance(np.array(SOUTH)) == pytest.approx(-0.3)
    assert not CapBumpField((0.0, 0.0, 1.0), 0.3).c0_compatible


def test_sum_field():
    a = CapBumpField(SOUTH, 0.3, 1.0)
    b = CapBumpField((1.0, 0.0, 0.0), 0.2, 1.0)
    field = SumField((a, SumField((b, ConstantField(0.0)))))
    assert bumps_of(field) == (a, b)
    assert field.c0_compatible
    points = np.array([SOUTH, (1.0, 0.0, 0.0), E3])
    assert np.allclose(field(points), a(points) + b(points))
    assert not SumField((a, ConstantField(1.0))).c0_compatible


def test_pullback_field():
    g = pullback_field(ConstantField(3.0))
    assert np.allclose(g(np.array([[0.0, 0.0], [1.0, 0.0]])), [6.0, 3.0])
    assert not g.compactly_supported
    assert PullbackField(CapBumpField(SOUTH, 0.3)).compactly_supported


def test_vanishing_check(sphere, config):
    params = [(np.pi / 2.0, 0.0), (2.0, 1.0)]
    report = vanishing_data_check(ConstantField(0.0), sphere, params, config=config)
    assert report.passed
    assert report.evaluated == 2
    assert report.max_value == 0.0

    report = vanishing_data_check(ConstantField(1.0), sphere, params, config=config)
    assert not report.passed
    assert report.max_value == pytest.approx(np.pi * np.sqrt(3.0))
    assert report.worst_param is not None


def test_vanishing_check_far_cap(sphere, config):
    # tangent planes of the upper component stay clear of a cap around the south pole
    report = vanishing_data_check(CapBumpField(SOUTH, 0.3, 1e5), sphere, [(np.pi / 2.0, 0.0), (1.2, 0.5)], config=config)
    assert report.passed


def test_support_margin():
    bump = CapBumpField(SOUTH, 0.3, 1.0)
    margin = subsphere_support_margin(bump.support_distance, [SubsphereParam(E3, 0.0)], 64)
    assert margin == pytest.approx(np.sqrt(2.0) - 0.3)


@pytest.mark.parametrize(
    "field, negated",
    [
        (ConstantField(1.0), ConstantField(-1.0)),
        (CapBumpField((1.0, 0.0, 0.0), 0.3, 1e5), CapBumpField((1.0, 0.0, 0.0), 0.3, -1e5)),
        (CapBumpField(SOUTH, 0.3, 1e5), CapBumpField(SOUTH, 0.3, -1e5)),
    ],
)
def test_vanishing_check_ignores_the_sign_of_the_field(sphere, config, field, negated):
    params = [(np.pi / 2.0, 0.0), (1.2, 0.5), (2.0, 2.0)]
    report = vanishing_data_check(field, sphere, params, config=config)
    flipped = vanishing_data_check(negated, sphere, params, config=config)
    assert flipped.passed == report.passed
    assert flipped.max_value == pytest.approx(report.max_value, rel=1e-12, abs=1e-300)
    assert flipped.max_gradient == pytest.approx(report.max_gradient, rel=1e-12, abs=1e-300)
    y = np.array([0.0, 0.0, 0.5])
    assert modified_spherical_transform(negated, y) == pytest.approx(-modified_spherical_transform(field, y),
                                                                      rel=1e-12, abs=1e-300)
