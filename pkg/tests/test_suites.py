import numpy as np
import pytest

from src.core.errors import ConfigInvalid
from src.geometry.surfaces import ProfileCurve, RevolutionSurface, decompose
from src.services.suite_service import (
    SUITE_NAMES,
    centered_sphere,
    component_spacelike,
    figure4_surface,
    run_suite,
)
from src.transforms.fields import CapBumpField, ConstantField


def _names(result):
    return [check.name for check in result.checks]


def _failed(result):
    return [(check.name, check.max_residual, check.tolerance) for check in result.checks if not check.passed]


def test_suite_names():
    assert SUITE_NAMES == ("lemma21", "relation22", "example38", "theorem36", "darboux", "jacobian",
                           "theorem31", "all")


def test_unknown_suite(config):
    with pytest.raises(ConfigInvalid) as info:
        run_suite("lemma99", config=config)
    assert info.value.diagnostics


def test_relation_suite(config):
    result = run_suite("relation22", config=config)
    assert result.overall, _failed(result)
    assert _names(result) == ["relation_constant", "relation_coordinate", "relation_cap_bump",
                              "relation_closed_form", "funk_odd_kernel"]
    assert result.runtime_ms is None


def test_relation_suite_with_field(config):
    field = CapBumpField((0.6, 0.0, -0.8), 0.5, 2.0)
    result = run_suite("relation22", field=field, config=config)
    assert "relation_field" in _names(result)
    assert result.overall, _failed(result)


def test_offset_sphere_suite(config):
    result = run_suite("example38", config=config)
    assert result.overall, _failed(result)
    names = _names(result)
    assert "hyperboloid_lam0_r0.5" in names
    assert "constants_lam0_r0.5" in names
    assert "explicit_phi_lam0.2_r0.3_planar" in names
    assert not any(name.startswith("constants_lam0.2") for name in names)


def test_offset_sphere_suite_with_surface(config):
    surface = RevolutionSurface(ProfileCurve.offset_circle(0.1, (0.0, 1.0), 0.4), 3)
    result = run_suite("example38", surface=surface, config=config)
    assert _names(result) == ["hyperboloid_lam0.1_r0.4", "explicit_phi_lam0.1_r0.4"]
    assert result.overall, _failed(result)


def test_spacelike_suite(config):
    result = run_suite("theorem36", config=config)
    assert result.overall, _failed(result)
    components = next(c for c in result.checks if c.name == "regular_component_spacelike").detail["components"]
    assert len(components) == 6


def test_component_spacelike(config):
    surface = figure4_surface(2)
    decomposition = decompose(surface, config)
    results = [component_spacelike(surface, decomposition, i, 100, config)
               for i in range(len(decomposition.components))]
    assert any(report is not None and report.passed for _, report in results)
    assert any(report is None or not report.passed for _, report in results)
    with pytest.raises(ConfigInvalid):
        component_spacelike(surface, decomposition, len(decomposition.components), 100, config)


def test_jacobian_suite(config):
    result = run_suite("jacobian", config=config)
    assert result.overall, _failed(result)
    assert _names(result) == ["jacobian_fd", "jacobian_positive", "psi1_partition", "psi1_matches_psi"]


def test_darboux_suite(config):
    result = run_suite("darboux", config=config)
    assert result.overall, _failed(result)
    order = next(c for c in result.checks if c.name == "bump_convergence_order")
    assert order.max_residual >= 1.8


def test_vanishing_suite(config):
    result = run_suite("theorem31", config=config)
    assert result.overall, _failed(result)
    assert _names(result) == ["precondition", "pass_arm", "fail_arm", "consistent"]


def test_vanishing_suite_zero_field(config):
    result = run_suite("theorem31", surface=centered_sphere(0.5), field=ConstantField(0.0), config=config)
    assert result.overall, _failed(result)
    fail_arm = next(c for c in result.checks if c.name == "fail_arm")
    assert fail_arm.detail["status"] == "skipped"


def test_vanishing_suite_graph_error(config):
    surface = RevolutionSurface(ProfileCurve.offset_circle(0.5, (1.0, 0.0), 0.2), 2)
    result = run_suite("theorem31", surface=surface, config=config)
    assert not result.overall
    assert _names(result) == ["experiment"]
    assert result.checks[0].max_residual is None


def test_tolerance_override_fails_checks(config):
    result = run_suite("jacobian", config=config, tol=0.0)
    assert not result.overall


def test_deterministic(config):
    first = run_suite("jacobian", config=config).model_dump_json()
    second = run_suite("jacobian", config=config.with_overrides(threads=4)).model_dump_json()
    assert first == second

    other = run_suite("jacobian", config=config.with_overrides(seed=8))
    assert other.seed == 8


def test_timings(config):
    result = run_suite("darboux", config=config.with_overrides(report_timings=True))
    assert result.runtime_ms is not None and result.runtime_ms > 0.0


def test_check_residuals_finite(config):
    result = run_suite("relation22", config=config)
    assert all(check.max_residual is None or np.isfinite(check.max_residual) for check in result.checks)
