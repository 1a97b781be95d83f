import numpy as np
import pytest

from src.agent.nodes.precondition import support_margin, tangent_subspheres
from src.core.errors import PreconditionUnmet
from src.geometry.core import SubsphereParam
from src.geometry.surfaces import ProfileCurve, RevolutionSurface
from src.services.experiment_service import theorem31_experiment
from src.services.suite_service import default_fail_field, default_pass_field
from src.transforms.fields import CapBumpField, ConstantField, SumField

FULL_RUN = ["projection", "precondition", "pass_arm", "fail_arm", "report"]


def test_pass_and_fail_arms(sphere, config):
    report = theorem31_experiment(sphere, default_pass_field(), default_fail_field(), config)

    assert report.error is None
    assert report.nodes_executed == FULL_RUN
    assert report.cap_height == pytest.approx(-0.5, abs=1e-9)
    assert report.upper_component[0] == pytest.approx(np.pi / 6.0, abs=1e-9)
    assert report.upper_component[1] == pytest.approx(5.0 * np.pi / 6.0, abs=1e-9)
    assert report.u_samples == config.u_samples

    assert report.precondition_met
    assert report.precondition_margin > config.disjointness_margin
    assert report.support_in_projection_set
    assert report.c0_compatible

    assert report.pass_arm.status == "vanished"
    assert report.pass_arm.max_value < config.vanishing_tol
    assert report.fail_arm.status == "violated"
    assert report.fail_arm.max_value > config.violation_threshold
    assert report.fail_arm.support_margin < 0.0
    assert report.consistent


def test_moved_bump_is_violated(sphere, config):
    report = theorem31_experiment(sphere, default_pass_field(), None, config)
    assert report.fail_arm.status == "violated"
    center = np.array(report.fail_arm.field_center)
    assert np.linalg.norm(center) == pytest.approx(1.0)
    assert report.consistent


def test_zero_field(sphere, config):
    report = theorem31_experiment(sphere, ConstantField(0.0), None, config)
    assert report.precondition_met
    assert report.precondition_margin is None
    assert report.pass_arm.status == "vanished"
    assert report.fail_arm.status == "skipped"
    assert report.consistent


def test_unbounded_support_is_unmet(sphere, config):
    report = theorem31_experiment(sphere, ConstantField(1.0), None, config)
    assert report.precondition_met is False
    assert report.pass_arm.status == "precondition_unmet"
    assert report.nodes_executed == ["projection", "precondition", "fail_arm", "report"]
    assert not report.support_in_projection_set

    with pytest.raises(PreconditionUnmet):
        theorem31_experiment(sphere, ConstantField(1.0), None, config, require_precondition=True)


def test_custom_tolerance(sphere, config):
    report = theorem31_experiment(sphere, default_pass_field(), default_fail_field(), config, tol=1e-3)
    assert report.pass_arm.status == "vanished"
    assert report.consistent


def test_graph_error_is_reported(config):
    surface = RevolutionSurface(ProfileCurve.offset_circle(0.5, (1.0, 0.0), 0.2), 2)
    report = theorem31_experiment(surface, ConstantField(0.0), None, config)
    assert report.error is not None
    assert report.nodes_executed == ["projection", "error"]
    assert not report.consistent


def test_support_margin():
    subspheres = [SubsphereParam(np.array([0.0, 0.0, 1.0]), 0.5)]
    assert support_margin(ConstantField(0.0), subspheres, 64) == np.inf
    assert support_margin(ConstantField(1.0), subspheres, 64) == -np.inf

    near = CapBumpField((0.0, 0.0, -1.0), 0.3)
    far = CapBumpField((1.0, 0.0, 0.0), 0.3)
    both = support_margin(SumField((near, far)), subspheres, 64)
    assert both == pytest.approx(support_margin(far, subspheres, 64))
    assert both < support_margin(near, subspheres, 64)


def test_tangent_subspheres(sphere):
    (top,) = tangent_subspheres(sphere, [(np.pi / 2.0, 0.0)])
    assert np.allclose(top.psi, [0.0, 0.0, 1.0])
    assert top.rho == pytest.approx(0.5)
