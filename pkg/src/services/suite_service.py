"""suite service: the verification suites behind `spherex verify`.

every suite draws from its own generator make_rng(seed, stream), maps its
sample loop with parallel_map (order preserving) and returns a list of
CheckResult; run_suite wraps them into a VerifySuiteResult.
"""

import logging
import math
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from src.core.config import Settings, settings
from src.core.constants import QUAD_RELTOL
from src.core.errors import ConfigInvalid, OnS0, OnSigma0, OriginUndefined
from src.core.schemas import CheckResult, VerifySuiteResult
from src.core.utils import make_rng, parallel_map
from src.geometry.core import SubsphereParam, stereo_forward, stereo_inverse, subsphere_image, subsphere_nodes
from src.geometry.maps import (
    SpacelikeReport,
    classify_psi1,
    h_identity_residual,
    hyperboloid_model,
    image_normal,
    in_s0_interior,
    offset_sphere_phi,
    phi_implicit,
    phi_profile,
    phi_sigma,
    phi_tangent_direction,
    psi0_map,
    psi1_jacobian_det,
    psi1_jacobian_fd,
    psi1_map,
    psi_map,
    spacelike_verify,
)
from src.geometry.surfaces import (
    ComponentDecomposition,
    ProfileCurve,
    RegularityResult,
    RevolutionSurface,
    decompose,
    regularity_check,
)
from src.services.experiment_service import theorem31_experiment
from src.services.sampling_service import (
    image_params,
    random_ball_points,
    random_subspheres,
    random_unit_vectors,
)
from src.transforms.darboux import build_mean_grid, darboux_residual, refinement_study
from src.transforms.fields import (
    CapBumpField,
    ConstantField,
    ConstantPlaneField,
    CoordinateField,
    GaussianPlaneField,
    SphereField,
    quadratic_field,
)
from src.transforms.spherical import spherical_transform, transform_relation_check

logger = logging.getLogger(__name__)

FIGURE4_PROFILE = {"scale": 0.9, "base": 0.5, "amp": 0.2, "freq": 3.0, "phase": 3.1}
BUMP_AMPLITUDE = 1e5
DARBOUX_SPACINGS = (0.02, 0.01)
DARBOUX_MIN_ORDER = 1.8


def figure4_surface(ambient_dim: int = 3) -> RevolutionSurface:
    """r(t) = 0.9 (0.5 + 0.2 sin(3t + 3.1)), six components."""
    return RevolutionSurface(ProfileCurve.polar_trig(**FIGURE4_PROFILE), ambient_dim)


def centered_sphere(radius: float = 0.5, ambient_dim: int = 3) -> RevolutionSurface:
    return RevolutionSurface(ProfileCurve.centered_circle(radius), ambient_dim)


def default_pass_field() -> CapBumpField:
    return CapBumpField((0.0, 0.0, -1.0), 0.3, BUMP_AMPLITUDE)


def default_fail_field() -> CapBumpField:
    return CapBumpField((1.0, 0.0, 0.0), 0.3, BUMP_AMPLITUDE)


@dataclass(frozen=True)
class SuiteContext:
    """inputs shared by all suites of one run."""

    surface: Optional[RevolutionSurface]
    field: Optional[SphereField]
    config: Settings
    tol: Optional[float] = None

    def tolerance(self, default: float) -> float:
        return default if self.tol is None else self.tol

    def rng(self, stream: int) -> np.random.Generator:
        return make_rng(self.config.seed, stream)

    def map(self, fn, items) -> list:
        return parallel_map(fn, items, self.config.threads)


def _check(name: str, residual: float, tolerance: float, passed: Optional[bool] = None, **detail) -> CheckResult:
    residual = float(residual)
    return CheckResult(
        name=name,
        max_residual=residual if math.isfinite(residual) else None,
        tolerance=tolerance,
        passed=bool(residual <= tolerance) if passed is None else passed,
        detail=detail,
    )


def _max(values) -> float:
    values = list(values)
    return float(max(values)) if values else 0.0


# stereographic images: subspheres map onto spheres, measures correspond

def _image_residual(s: SubsphereParam, count: int) -> float:
    nodes = subsphere_nodes(s, count)
    image = subsphere_image(s)
    distance = np.linalg.norm(stereo_forward(nodes.points) - image.center, axis=-1)
    return float(np.max(np.abs(distance - image.radius)) / max(image.radius, 1.0))


def suite_lemma21(ctx: SuiteContext) -> List[CheckResult]:
    rng = ctx.rng(0)
    config = ctx.config
    count = config.quad_nodes
    subspheres = random_subspheres(rng, 1000, 3) + random_subspheres(rng, 100, 2)
    one = ConstantField(1.0)

    image = ctx.map(lambda s: _image_residual(s, count), subspheres)
    measure = ctx.map(lambda s: transform_relation_check(one, s, count, config).scaled_residual, subspheres)

    y = random_ball_points(rng, 1000, 2, 10.0)
    y_trip = np.linalg.norm(stereo_forward(stereo_inverse(y)) - y, axis=-1) / np.maximum(np.linalg.norm(y, axis=-1), 1.0)
    x = random_unit_vectors(rng, 2000, 3)
    x = x[x[:, -1] <= 0.999][:1000]
    x_trip = np.linalg.norm(stereo_inverse(stereo_forward(x)) - x, axis=-1)

    return [
        _check("stereo_image_on_sphere", _max(image), ctx.tolerance(1e-10), subspheres=len(subspheres)),
        _check("measure_weighted_integral", _max(measure), ctx.tolerance(QUAD_RELTOL), subspheres=len(subspheres)),
        _check("stereo_round_trip", max(float(y_trip.max()), float(x_trip.max())), ctx.tolerance(1e-12),
               samples=int(y.shape[0] + x.shape[0])),
    ]


# spherical transform against spherical means of the pullback

def suite_relation22(ctx: SuiteContext) -> List[CheckResult]:
    rng = ctx.rng(1)
    config = ctx.config
    count = config.quad_nodes
    subspheres = random_subspheres(rng, 100, 3)
    fields: List[Tuple[str, SphereField]] = [
        ("constant", ConstantField(1.0)),
        ("coordinate", CoordinateField(2)),
        ("cap_bump", CapBumpField((0.0, 0.0, -1.0), 0.4, 1.0)),
    ]
    if ctx.field is not None:
        fields.append(("field", ctx.field))

    checks = []
    for label, f in fields:
        residuals = ctx.map(lambda s: transform_relation_check(f, s, count, config).scaled_residual, subspheres)
        checks.append(_check(f"relation_{label}", _max(residuals), ctx.tolerance(QUAD_RELTOL),
                             subspheres=len(subspheres)))

    closed = transform_relation_check(ConstantField(1.0), SubsphereParam(np.array([0.0, 0.0, 1.0]), 0.5), count, config)
    exact = math.pi * math.sqrt(3.0)
    checks.append(_check("relation_closed_form", max(abs(closed.lhs - exact), abs(closed.rhs - exact)),
                         ctx.tolerance(1e-10), lhs=closed.lhs, rhs=closed.rhs))

    odd = spherical_transform(CoordinateField(2), SubsphereParam(np.array([1.0, 0.0, 0.0]), 0.0), count)
    checks.append(_check("funk_odd_kernel", abs(odd), ctx.tolerance(1e-10)))
    return checks


# offset spheres: their images lie on upper hyperboloids

def _example38_cases(ctx: SuiteContext) -> List[Tuple[str, float, np.ndarray, float, int]]:
    surface = ctx.surface
    if surface is not None and surface.profile.family == "offset_circle":
        p = surface.profile
        omega = np.array(p.omega) if surface.ambient_dim == 2 else np.array([0.0, 0.0, p.omega[1]])
        return [(f"lam{p.lam:g}_r{p.radius:g}", p.lam, omega, p.radius, surface.ambient_dim)]

    axial = np.array([0.0, 0.0, 1.0])
    planar = random_unit_vectors(ctx.rng(12), 1, 2)[0]
    return [
        ("lam0_r0.3", 0.0, axial, 0.3, 3),
        ("lam0_r0.5", 0.0, axial, 0.5, 3),
        ("lam0_r0.7", 0.0, axial, 0.7, 3),
        ("lam0.2_r0.3", 0.2, axial, 0.3, 3),
        ("lam0.2_r0.3_planar", 0.2, planar, 0.3, 2),
    ]


def _spread_params(surface: RevolutionSurface, total: int, config: Settings) -> np.ndarray:
    """about total image-safe parameters spread over all components."""
    decomposition = decompose(surface, config)
    per = math.ceil(total / len(decomposition.components))
    chunks = [image_params(surface, decomposition, index, per, config)[0]
              for index in range(len(decomposition.components))]
    return np.concatenate(chunks)[:total]


def suite_example38(ctx: SuiteContext) -> List[CheckResult]:
    rng = ctx.rng(2)
    config = ctx.config
    checks = []
    for label, lam, omega, r, dim in _example38_cases(ctx):
        model = hyperboloid_model(lam, omega, r)
        profile_omega = (float(omega[0]), float(omega[1])) if dim == 2 else (0.0, float(omega[-1]))
        surface = RevolutionSurface(ProfileCurve.offset_circle(lam, profile_omega, r), dim)
        thetas = _spread_params(surface, 500, config)
        azimuths = rng.uniform(0.0, 2.0 * np.pi, thetas.shape[0]) if dim == 3 else np.zeros(thetas.shape[0])

        def sample(pair):
            theta, azimuth = pair
            y = phi_sigma(surface, theta, azimuth).as_point()
            value, branch = model.residual(y)
            scale = max(1.0, float(np.dot(y, y)))
            on_branch = float(np.min(np.abs(model.branch_residuals(y)))) / scale
            x = surface.point(theta, azimuth)
            explicit = offset_sphere_phi(lam, omega, r, x).as_point()
            # F = r^2 - |x - lam omega|^2, the negated defining function
            negated = phi_implicit(x, lam * omega - x).as_point()
            gap = max(float(np.linalg.norm(explicit - y)), float(np.linalg.norm(negated - y)))
            return abs(float(value)), gap / math.sqrt(scale), on_branch, int(branch)

        results = ctx.map(sample, list(zip(thetas, azimuths)))
        checks.append(_check(f"hyperboloid_{label}", _max(h for h, _, _, _ in results), ctx.tolerance(1e-9),
                             samples=len(results), A=model.A, B=model.B, C=model.C, D=model.D))
        checks.append(_check(f"explicit_phi_{label}", _max(e for _, e, _, _ in results), ctx.tolerance(1e-9),
                             samples=len(results)))
        if model.factors:
            # each sample sits on one of the two hyperboloids and both are reached
            branches = sorted({b for _, _, _, b in results})
            checks.append(_check(f"branches_{label}", _max(o for _, _, o, _ in results), ctx.tolerance(1e-9),
                                 passed=None if branches == [-1, 1] else False, branches=branches))
            expected = 1.0 - r**2
            constants = max(abs(model.A - expected), abs(model.C - expected), abs(model.D - expected),
                            abs(model.B + r / math.sqrt(expected)))
            checks.append(_check(f"constants_{label}", constants, ctx.tolerance(1e-12)))
    return checks


# space-like images: the regular component's image is space-like

def _angle_to_fd(profile: ProfileCurve, t: float, config: Settings) -> float:
    nu, _ = phi_tangent_direction(profile, t, config)
    step = config.fd_step_tangent
    fd = (phi_profile(profile, t + step) - phi_profile(profile, t - step)) / (2.0 * step)
    cross = abs(nu[0] * fd[1] - nu[1] * fd[0])
    return float(np.arctan2(cross, abs(float(np.dot(nu, fd)))))


def component_spacelike(surface: RevolutionSurface, decomposition: ComponentDecomposition, index: int,
                        samples: int, config: Settings = settings) -> Tuple[RegularityResult, Optional[SpacelikeReport]]:
    """regularity of one component and, when regular, the space-like test of its planar image.

    raises:
        ConfigInvalid: if the component index is out of range
    """
    if not 0 <= index < len(decomposition.components):
        raise ConfigInvalid(f"component {index} out of range",
                            [f"field 'component': expected 0..{len(decomposition.components) - 1}"])
    profile = surface.profile
    regularity = regularity_check(profile, decomposition.components[index], config)
    if not regularity.regular:
        return regularity, None
    thetas, excluded = image_params(surface, decomposition, index, samples, config)
    points = phi_profile(profile, thetas)
    normals = np.array([image_normal(phi_tangent_direction(profile, th, config)[0]) for th in thetas])
    return regularity, spacelike_verify(points, normals, list(thetas), excluded)


def suite_theorem36(ctx: SuiteContext) -> List[CheckResult]:
    rng = ctx.rng(3)
    config = ctx.config
    surface = ctx.surface or figure4_surface()
    profile = surface.profile

    t = rng.uniform(-np.pi, np.pi, 1000)
    identity = float(np.max(np.abs(h_identity_residual(profile, t))))

    decomposition = decompose(surface, config)
    components = []
    regular_defects = []
    nonregular_found = False
    tangent_angles = []
    for index, interval in enumerate(decomposition.components):
        regularity, report = component_spacelike(surface, decomposition, index, 200, config)
        entry = {"index": index, "interval": list(interval), "regular": regularity.regular,
                 "witness": regularity.witness}
        if report is not None:
            thetas = np.array(report.sampled_params)
            entry["min_defect"] = report.min_defect
            entry["spacelike"] = report.passed
            regular_defects.append(report.min_defect)
            nonregular_found = nonregular_found or not report.passed
            tangent_angles += ctx.map(lambda th: _angle_to_fd(profile, th, config), thetas[:: max(1, len(thetas) // 50)])
        else:
            nonregular_found = True
        components.append(entry)

    spacelike_residual = max(0.0, -min(regular_defects)) if regular_defects else float("inf")

    samples = _spread_params(surface, 200, config)
    azimuths = rng.uniform(0.0, 2.0 * np.pi, samples.shape[0]) if surface.ambient_dim == 3 else np.zeros(samples.shape[0])

    def factorization(pair):
        theta, azimuth = pair
        direct = phi_sigma(surface, theta, azimuth).as_point()
        try:
            composed = psi1_map(psi0_map(surface, theta, azimuth)).as_point()
        except (OnSigma0, OriginUndefined, OnS0):
            return None
        return float(np.linalg.norm(composed - direct)) / max(1.0, float(np.linalg.norm(direct)))

    def planar(theta):
        image = phi_sigma(surface, theta, 0.0)
        closed = phi_profile(profile, theta)
        direct = np.array([image.center[0], image.radius])
        return float(np.linalg.norm(closed - direct)) / max(1.0, float(np.linalg.norm(direct)))

    factor = [value for value in ctx.map(factorization, list(zip(samples, azimuths))) if value is not None]
    consistency = ctx.map(planar, samples[:100])

    return [
        _check("h_identity", identity, ctx.tolerance(1e-10), samples=int(t.shape[0])),
        _check("regular_component_spacelike", spacelike_residual, ctx.tolerance(1e-9),
               passed=bool(regular_defects) and spacelike_residual <= ctx.tolerance(1e-9),
               components=components),
        _check("nonregular_component_detected", 0.0 if nonregular_found else 1.0, 0.0),
        _check("tangent_direction_fd", _max(tangent_angles), ctx.tolerance(1e-5), samples=len(tangent_angles)),
        _check("phi_factorization", _max(factor), ctx.tolerance(1e-9), samples=len(factor),
               skipped_on_sigma0=int(samples.shape[0]) - len(factor)),
        _check("phi_profile_consistency", _max(consistency), ctx.tolerance(1e-9), samples=len(consistency)),
    ]


# psi_1: jacobian, partition of the image and agreement with psi

def _domain_points(rng: np.random.Generator, count: int, dim: int, gap: float = 0.05) -> np.ndarray:
    """points of the punctured ball kept gap away from the origin, the unit sphere and S0."""
    kept = np.empty((0, dim))
    while kept.shape[0] < count:
        y = random_ball_points(rng, 4 * count, dim, 1.0 - gap)
        sq = np.sum(y * y, axis=-1)
        y = y[(np.sqrt(sq) > gap) & (np.abs(sq - y[:, -1]) > gap)]
        kept = np.concatenate([kept, y])
    return kept[:count]


def _side_points(rng: np.random.Generator, count: int, inside: bool) -> np.ndarray:
    kept = np.empty((0, 3))
    while kept.shape[0] < count:
        y = random_ball_points(rng, 16 * count, 3, 0.999)
        sq = np.sum(y * y, axis=-1)
        y = y[(sq > 1e-6) & (np.abs(sq - y[:, -1]) > 1e-6) & (in_s0_interior(y) == inside)]
        kept = np.concatenate([kept, y])
    return kept[:count]


def _jacobian_error(y: np.ndarray, step: float) -> float:
    closed = psi1_jacobian_det(y)
    return abs(psi1_jacobian_fd(y, step) - closed) / closed


def suite_jacobian(ctx: SuiteContext) -> List[CheckResult]:
    rng = ctx.rng(4)
    step = ctx.config.fd_step_jacobian
    fd_points = list(_domain_points(rng, 50, 3)) + list(_domain_points(rng, 50, 2))
    fd_errors = ctx.map(lambda y: _jacobian_error(y, step), fd_points)

    dets = np.array([psi1_jacobian_det(y) for y in _domain_points(rng, 10_000, 3, gap=1e-6)])
    nonpositive = int(np.count_nonzero(dets <= 0.0))

    inside = _side_points(rng, 1000, True)
    outside = _side_points(rng, 1000, False)
    misclassified = sum(classify_psi1(y) != "above" for y in inside) + sum(classify_psi1(y) != "below" for y in outside)

    subspheres = random_subspheres(rng, 100, 3)

    def agreement(s: SubsphereParam) -> float:
        expected = psi_map(s).as_point()
        return float(np.linalg.norm(psi1_map(s.rho * s.psi).as_point() - expected)) / max(1.0, float(np.linalg.norm(expected)))

    return [
        _check("jacobian_fd", _max(fd_errors), ctx.tolerance(1e-6), samples=len(fd_points)),
        _check("jacobian_positive", nonpositive, 0.0, samples=int(dets.shape[0]), min_det=float(dets.min())),
        _check("psi1_partition", misclassified, 0.0, samples=int(inside.shape[0] + outside.shape[0])),
        _check("psi1_matches_psi", _max(ctx.map(agreement, subspheres)), ctx.tolerance(1e-10)),
    ]


# darboux structure of the normalized spherical means

def suite_darboux(ctx: SuiteContext) -> List[CheckResult]:
    count = ctx.config.quad_nodes
    cases = [
        ("constant", ConstantPlaneField(1.0), (0.0, 0.0)),
        ("quadratic", quadratic_field(2), (0.0, 0.0)),
        ("quadratic_planar", quadratic_field(1), (0.0,)),
    ]

    def residual(case) -> float:
        _, g, center = case
        grid = build_mean_grid(g, center, 0.5, 0.02, 0.01, count)
        return float(np.max(np.abs(darboux_residual(grid))))

    residuals = ctx.map(residual, cases)
    checks = [_check(f"darboux_{label}", value, ctx.tolerance(1e-8)) for (label, _, _), value in zip(cases, residuals)]

    study = refinement_study(GaussianPlaneField((0.1, 0.0), 0.5, 1.0), (0.0, 0.0), 0.5, 0.04, DARBOUX_SPACINGS, count)
    order = study.observed_order
    checks.append(_check("bump_convergence_order", order if order is not None else float("nan"), DARBOUX_MIN_ORDER,
                         passed=order is not None and order >= DARBOUX_MIN_ORDER,
                         spacings=study.spacings, max_residuals=study.max_residuals))
    return checks


# vanishing experiment: vanishing data on U against the support of f

def suite_theorem31(ctx: SuiteContext) -> List[CheckResult]:
    config = ctx.config
    surface = ctx.surface or centered_sphere(0.5)
    if ctx.field is None:
        field, fail_field = default_pass_field(), default_fail_field()
    else:
        field, fail_field = ctx.field, None

    tol = ctx.tolerance(config.vanishing_tol)
    report = theorem31_experiment(surface, field, fail_field, config, tol)
    if report.error is not None:
        return [_check("experiment", float("nan"), 0.0, passed=False, error=report.error,
                       nodes_executed=report.nodes_executed)]

    margin = report.precondition_margin
    shortfall = 0.0 if margin is None and report.precondition_met else (
        max(0.0, config.disjointness_margin - margin) if margin is not None else float("inf"))
    pass_arm, fail_arm = report.pass_arm, report.fail_arm
    pass_residual = max(pass_arm.max_value or 0.0, pass_arm.max_gradient or 0.0)

    return [
        _check("precondition", shortfall, 0.0, passed=bool(report.precondition_met),
               margin=margin, cap_height=report.cap_height, u_samples=report.u_samples),
        _check("pass_arm", pass_residual, tol, passed=pass_arm.status == "vanished", status=pass_arm.status),
        _check("fail_arm", fail_arm.max_value or 0.0, config.violation_threshold,
               passed=fail_arm.status in ("violated", "skipped"), status=fail_arm.status,
               field_center=fail_arm.field_center),
        _check("consistent", 0.0 if report.consistent else 1.0, 0.0),
    ]


SUITES: Dict[str, Callable[[SuiteContext], List[CheckResult]]] = {
    "lemma21": suite_lemma21,
    "relation22": suite_relation22,
    "example38": suite_example38,
    "theorem36": suite_theorem36,
    "darboux": suite_darboux,
    "jacobian": suite_jacobian,
    "theorem31": suite_theorem31,
}
SUITE_NAMES = tuple(SUITES) + ("all",)


def run_suite(name: str, surface: Optional[RevolutionSurface] = None, field: Optional[SphereField] = None,
              config: Settings = settings, tol: Optional[float] = None) -> VerifySuiteResult:
    """run one verification suite, or all of them in order.

    args:
        name: suite name or "all"
        surface: surface override (suites that take one)
        field: sphere field override (relation22, theorem31)
        config: settings, seed included
        tol: tolerance override for residual checks

    returns:
        suite result; checks of "all" are prefixed with their suite name

    raises:
        ConfigInvalid: if the suite name is unknown
    """
    if name not in SUITE_NAMES:
        raise ConfigInvalid(f"unknown suite {name!r}", [f"field 'suite': expected one of {', '.join(SUITE_NAMES)}"])

    ctx = SuiteContext(surface, field, config, tol)
    logger.info(f"running suite {name} with seed {config.seed}")
    started = time.perf_counter()

    if name == "all":
        checks = []
        for suite_name, suite in SUITES.items():
            checks += [check.model_copy(update={"name": f"{suite_name}.{check.name}"}) for check in suite(ctx)]
    else:
        checks = SUITES[name](ctx)

    runtime_ms = (time.perf_counter() - started) * 1000.0
    overall = all(check.passed for check in checks)
    logger.info(f"suite {name} finished in {runtime_ms:.1f} ms: {sum(c.passed for c in checks)}/{len(checks)} passed")
    return VerifySuiteResult(
        suite=name,
        seed=config.seed,
        checks=checks,
        overall=overall,
        runtime_ms=runtime_ms if config.report_timings else None,
    )
