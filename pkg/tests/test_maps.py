import numpy as np
import pytest

from src.core.errors import (
    DegenerateTangent,
    DenominatorVanishes,
    NotContained,
    NotRegular,
    OnS0,
    OnSigma0,
    OnSingularSet,
    OriginUndefined,
    OutsideUnitBall,
)
from src.geometry.core import SubsphereParam
from src.geometry.maps import (
    classify_psi1,
    h_identity_residual,
    hyperboloid_model,
    hyperboloid_side,
    image_normal,
    in_s0_interior,
    offset_sphere_phi,
    phi_implicit,
    phi_profile,
    phi_sigma,
    phi_tangent_direction,
    psi0_implicit,
    psi0_map,
    psi1_jacobian_det,
    psi1_jacobian_fd,
    psi1_map,
    psi_map,
    spacelike_verify,
)
from src.geometry.surfaces import ProfileCurve, RevolutionSurface, origin_expression, singular_expression


@pytest.mark.parametrize(
    "y, center, radius",
    [
        ((0.0, 0.0, -0.5), (0.0, 0.0), 1.0 / np.sqrt(3.0)),
        ((0.0, 0.0, 0.4), (0.0, 0.0), 0.4 * np.sqrt(0.84) / 0.24),
        ((0.0, 0.0, 0.5), (0.0, 0.0), np.sqrt(3.0)),
    ],
)
def test_psi1_map(y, center, radius):
    image = psi1_map(np.array(y))
    assert np.allclose(image.center, center, atol=1e-12)
    assert image.radius == pytest.approx(radius, rel=1e-12)


@pytest.mark.parametrize(
    "y, error",
    [((0.0, 0.0, 0.0), OriginUndefined), ((0.0, 0.6, 0.8), OutsideUnitBall), ((0.5, 0.0, 0.5), OnS0)],
)
def test_psi1_errors(y, error):
    with pytest.raises(error):
        psi1_map(np.array(y))


def test_psi1_jacobian_closed_form():
    assert psi1_jacobian_det(np.array([0.0, 0.0, -0.5])) == pytest.approx(1.36854, rel=1e-5)


@pytest.mark.parametrize("y", [(0.2, -0.1, -0.3), (0.1, 0.3, 0.6), (0.3, -0.4), (-0.2, 0.7)])
def test_psi1_jacobian_matches_finite_differences(y):
    y = np.array(y)
    assert psi1_jacobian_fd(y) == pytest.approx(psi1_jacobian_det(y), rel=1e-6)


def test_psi1_sides():
    # inside S0 the image lies above the hyperboloid, outside below
    assert in_s0_interior(np.array([0.0, 0.0, 0.5]))
    assert not in_s0_interior(np.array([0.0, 0.0, -0.5]))
    assert classify_psi1(np.array([0.0, 0.0, 0.5])) == "above"
    assert classify_psi1(np.array([0.0, 0.0, -0.5])) == "below"
    assert hyperboloid_side(np.array([0.0, 0.0, 1.0])) == pytest.approx(0.0)


def test_psi0_map(sphere):
    assert np.allclose(psi0_map(sphere, np.pi / 2.0), [0.0, 0.0, 0.5], atol=1e-12)
    assert np.allclose(psi0_map(sphere, -np.pi / 2.0), [0.0, 0.0, -0.5], atol=1e-12)


def test_phi_sigma_at_the_top(sphere):
    image = phi_sigma(sphere, np.pi / 2.0)
    assert np.allclose(image.center, 0.0, atol=1e-12)
    assert image.radius == pytest.approx(np.sqrt(3.0))


def test_phi_sigma_on_singular_set(sphere):
    with pytest.raises(OnSingularSet):
        phi_sigma(sphere, np.arcsin(0.5))


def test_phi_profile():
    circle = ProfileCurve.centered_circle(0.5)
    assert np.allclose(phi_profile(circle, np.pi / 2.0), [0.0, np.sqrt(3.0)], atol=1e-12)
    with pytest.raises(DenominatorVanishes):
        phi_profile(circle, np.arcsin(0.5))


def test_phi_profile_matches_phi_sigma(fig4_profile):
    planar = RevolutionSurface(fig4_profile, 2)
    thetas = np.linspace(-np.pi, np.pi, 400, endpoint=False)
    thetas = thetas[np.abs(singular_expression(fig4_profile, thetas)) > 0.05]
    closed = phi_profile(fig4_profile, thetas)
    direct = np.array([phi_sigma(planar, float(t)).as_point() for t in thetas])
    assert np.allclose(closed, direct, rtol=1e-9, atol=1e-9)


def test_h_identity(fig4_profile):
    thetas = np.linspace(-np.pi, np.pi, 1000)
    assert np.allclose(h_identity_residual(fig4_profile, thetas), 0.0, atol=1e-10)


def test_phi_tangent_direction(segment_profile):
    nu, k = phi_tangent_direction(ProfileCurve.centered_circle(0.5), np.pi / 2.0)
    assert k == pytest.approx(4.0)
    assert np.allclose(nu, [2.0, 0.0], atol=1e-12)

    with pytest.raises(NotRegular):
        phi_tangent_direction(segment_profile, 0.3)


def test_phi_tangent_direction_is_a_derivative(fig4_profile):
    h = 1e-6
    for t in (0.4, 1.3, -2.2):
        if abs(float(singular_expression(fig4_profile, t))) < 0.05:
            continue
        nu, _ = phi_tangent_direction(fig4_profile, t)
        fd = (phi_profile(fig4_profile, t + h) - phi_profile(fig4_profile, t - h)) / (2.0 * h)
        assert np.allclose(nu, fd, rtol=1e-5, atol=1e-6)


def test_image_normal():
    assert np.allclose(image_normal(np.array([1.0, 0.0])), [0.0, 1.0])
    normal = image_normal(np.array([3.0, 4.0]), np.pi / 2.0, 3)
    assert np.allclose(normal, [0.0, -0.8, 0.6])


def test_spacelike_verify():
    report = spacelike_verify(np.zeros((2, 2)), np.array([[0.0, 2.0], [0.5, 1.0]]))
    assert report.passed
    assert report.min_defect == pytest.approx(0.6)

    report = spacelike_verify(np.zeros((1, 2)), np.array([[1.0, 0.0]]), params=[0.25])
    assert not report.passed
    assert report.sampled_params == [0.25]

    with pytest.raises(ValueError):
        spacelike_verify(np.zeros((2, 2)), np.zeros((3, 2)))


def test_hyperboloid_constants_centered():
    model = hyperboloid_model(0.0, np.array([0.0, 0.0, 1.0]), 0.5)
    assert model.A == pytest.approx(0.75)
    assert model.B == pytest.approx(-1.0 / np.sqrt(3.0))
    assert model.C == pytest.approx(0.75)
    assert model.D == pytest.approx(0.75)
    assert model.omega_hat is None

    with pytest.raises(NotContained):
        hyperboloid_model(0.5, np.array([0.0, 0.0, 1.0]), 0.5)


def test_sphere_image_on_hyperboloid(sphere):
    model = hyperboloid_model(0.0, np.array([0.0, 0.0, 1.0]), 0.5)
    for theta in np.linspace(-np.pi, np.pi, 37):
        if abs(float(singular_expression(sphere.profile, theta))) < 0.02:
            continue
        for azimuth in (0.0, 1.0, 2.5):
            point = phi_sigma(sphere, float(theta), azimuth).as_point()
            residual, _ = model.residual(point[None, :])
            assert abs(float(residual[0])) / max(1.0, float(point @ point)) < 1e-9


@pytest.mark.parametrize("lam, omega, r", [(0.0, (0.0, 1.0), 0.5), (0.2, (0.0, 1.0), 0.3), (0.2, (0.6, 0.8), 0.4)])
def test_offset_sphere_phi_matches_surface_map(lam, omega, r):
    surface = RevolutionSurface(ProfileCurve.offset_circle(lam, omega, r), 2)
    for theta in np.linspace(-np.pi, np.pi, 50, endpoint=False):
        if abs(float(singular_expression(surface.profile, theta))) < 0.05:
            continue
        explicit = offset_sphere_phi(lam, np.array(omega), r, surface.point(theta))
        direct = phi_sigma(surface, float(theta))
        assert np.allclose(explicit.as_point(), direct.as_point(), rtol=1e-9, atol=1e-9)


def test_psi0_is_the_identity_on_a_centered_sphere(rng, sphere):
    for theta in rng.uniform(0.6, 2.5, 20):
        x = sphere.point(theta, 0.3)
        assert np.allclose(psi0_map(sphere, theta, 0.3), x, atol=1e-12)


def test_psi0_on_the_singular_set(sphere):
    with pytest.raises(OnSigma0):
        psi0_map(sphere, np.arcsin(0.5))


@pytest.mark.parametrize("y", [(0.2, -0.1, -0.3), (0.1, 0.3, 0.6), (0.3, -0.4)])
def test_psi1_is_psi_of_the_normal_subsphere(y):
    y = np.array(y)
    norm = float(np.linalg.norm(y))
    direct = psi_map(SubsphereParam(y / norm, norm))
    image = psi1_map(y)
    assert np.allclose(direct.center, image.center, atol=1e-12)
    assert direct.radius == pytest.approx(image.radius, rel=1e-12)


@pytest.mark.parametrize(
    "lam, omega, r, dim",
    [(0.2, (0.0, 0.0, 1.0), 0.3, 3), (0.1, (0.0, 0.0, 1.0), 0.4, 3), (0.2, (0.6, 0.8), 0.3, 2), (0.3, (0.0, -1.0), 0.5, 2)],
)
def test_offset_sphere_image_relation(lam, omega, r, dim):
    omega = np.array(omega)
    model = hyperboloid_model(lam, omega, r)
    assert not model.factors
    profile_omega = (0.0, float(omega[-1])) if dim == 3 else (float(omega[0]), float(omega[1]))
    surface = RevolutionSurface(ProfileCurve.offset_circle(lam, profile_omega, r), dim)
    for theta in np.linspace(-np.pi, np.pi, 97):
        if abs(float(singular_expression(surface.profile, theta))) < 0.02:
            continue
        for azimuth in ((0.0, 1.3) if dim == 3 else (0.0,)):
            point = phi_sigma(surface, float(theta), azimuth).as_point()
            residual, _ = model.residual(point)
            assert abs(float(residual)) < 1e-9


def test_offset_sphere_image_at_the_poles():
    # lam = 0.2, r = 0.3: top x = (0, 0, 0.5) maps to (0, sqrt 3), bottom x = (0, 0, -0.1) to (0, sqrt 0.99 / 1.1)
    model = hyperboloid_model(0.2, np.array([0.0, 0.0, 1.0]), 0.3)
    for height in (np.sqrt(3.0), np.sqrt(0.99) / 1.1):
        assert float(model.image_relation(np.array([0.0, 0.0, height]))) == pytest.approx(0.0, abs=1e-12)
    assert abs(float(model.image_relation(np.array([0.0, 0.0, 1.0])))) > 1e-3


@pytest.mark.parametrize("r", [0.3, 0.5, 0.7])
def test_centered_sphere_image_splits_over_both_branches(r):
    surface = RevolutionSurface(ProfileCurve.centered_circle(r))
    model = hyperboloid_model(0.0, np.array([0.0, 0.0, 1.0]), r)
    assert model.factors
    seen = set()
    for theta in np.linspace(-np.pi, np.pi, 61):
        if abs(float(singular_expression(surface.profile, theta))) < 0.02:
            continue
        point = phi_sigma(surface, float(theta), 0.7).as_point()
        both = model.branch_residuals(point)
        assert float(np.min(np.abs(both))) / max(1.0, float(point @ point)) < 1e-9
        _, branch = model.residual(point)
        seen.add(int(branch))
    assert seen == {-1, 1}


@pytest.mark.parametrize("theta", [0.4, 1.3, 2.0, -2.2])
def test_negating_the_defining_function(fig4_surface, theta):
    profile = fig4_surface.profile
    if min(abs(float(singular_expression(profile, theta))), abs(float(origin_expression(profile, theta)))) < 0.05:
        pytest.skip("tangent plane too close to the north pole or the origin")
    x = fig4_surface.point(theta, 0.8)
    gradient = fig4_surface.normal(theta, 0.8)
    for g in (gradient, -gradient, -3.0 * gradient):
        assert np.allclose(psi0_implicit(x, g), psi0_map(fig4_surface, theta, 0.8), atol=1e-12)
        image = phi_implicit(x, g)
        direct = phi_sigma(fig4_surface, theta, 0.8)
        assert np.allclose(image.as_point(), direct.as_point(), rtol=1e-10, atol=1e-10)


def test_implicit_maps_on_the_offset_sphere():
    lam, omega, r = 0.2, np.array([0.6, 0.8]), 0.3
    x = lam * omega + r * np.array([np.cos(0.4), np.sin(0.4)])
    expected = offset_sphere_phi(lam, omega, r, x).as_point()
    assert np.allclose(phi_implicit(x, x - lam * omega).as_point(), expected, atol=1e-12)
    assert np.allclose(phi_implicit(x, lam * omega - x).as_point(), expected, atol=1e-12)
    with pytest.raises(DegenerateTangent):
        psi0_implicit(x, np.zeros(2))
    with pytest.raises(OnSingularSet):
        # the line x1 + x2 = 1 through (0.5, 0.5) meets the north pole
        phi_implicit(np.array([0.5, 0.5]), np.array([1.0, 1.0]))


def test_figure4_foot_is_perpendicular(fig4_profile):
    planar = RevolutionSurface(fig4_profile, 2)
    theta = np.pi / 2.0
    x = planar.point(theta)
    foot = psi0_map(planar, theta)
    tangent = np.asarray(fig4_profile.d1(np.array([theta])))[0]
    tangent = tangent / np.linalg.norm(tangent)
    assert abs(float(np.dot(foot - x, tangent))) < 1e-10
    assert np.linalg.norm(foot) > 0.0
    # the foot is the closest point of the tangent line to the origin
    assert abs(float(np.dot(foot, tangent))) < 1e-10
