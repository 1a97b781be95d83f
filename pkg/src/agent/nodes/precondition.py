"""precondition node: confirm that every tangent subsphere of U avoids the field's support."""

import logging
from typing import Any, Dict, List

import numpy as np

from src.core.schemas import ExperimentState
from src.geometry.core import SubsphereParam
from src.geometry.surfaces import RevolutionSurface, tangent_plane_at
from src.transforms.fields import ConstantField, SphereField, SumField, bumps_of
from src.transforms.spherical import subsphere_support_margin

logger = logging.getLogger(__name__)


def tangent_subspheres(surface: RevolutionSurface, params) -> List[SubsphereParam]:
    """subspheres cut by the tangent planes at the sampled points."""
    planes = [tangent_plane_at(surface, theta, azimuth) for theta, azimuth in params]
    return [SubsphereParam(plane.psi, plane.rho) for plane in planes]


def _is_zero(field: SphereField) -> bool:
    if isinstance(field, ConstantField):
        return field.value == 0.0
    if isinstance(field, SumField):
        return all(_is_zero(term) for term in field.terms)
    return False


def _has_unbounded_support(field: SphereField) -> bool:
    """true if some non-zero term is not a cap bump."""
    if isinstance(field, SumField):
        return any(_has_unbounded_support(term) for term in field.terms)
    return not bumps_of(field) and not _is_zero(field)


def support_margin(field: SphereField, subspheres: List[SubsphereParam], count: int) -> float:
    """min chordal distance from the subsphere nodes to the support of the field.
    
    returns:
        inf for the zero field, -inf if the support is not a union of caps
    """
    if _has_unbounded_support(field):
        return float("-inf")
    margin = float("inf")
    for bump in bumps_of(field):
        if bump.amplitude != 0.0:
            margin = min(margin, subsphere_support_margin(bump.support_distance, subspheres, count))
    return margin


def precondition_node(state: ExperimentState) -> Dict[str, Any]:
    """check the disjointness margin between tangent subspheres and supp f.
    
    args:
        state: experiment state after the projection node
        
    returns:
        updated state dict; next_action is pass_arm when the margin holds,
        fail_arm otherwise (the pass arm is then reported as unmet)
    """
    logger.info("executing precondition node")
    
    updated_state = dict(state)
    updated_state["metadata"] = state.get("metadata", {})
    
    try:
        config = state["config"]
        field = state["field"]
        subspheres = tangent_subspheres(state["surface"], state["params"])
        margin = support_margin(field, subspheres, config.quad_nodes)
        met = margin >= config.disjointness_margin
        
        cap_height = state["report"]["cap_height"]
        bumps = [bump for bump in bumps_of(field) if bump.amplitude != 0.0]
        inside = (not _has_unbounded_support(field)) and all(bump.max_height() < cap_height for bump in bumps)
        
        report = dict(state["report"])
        report["precondition_met"] = met
        report["precondition_margin"] = margin if np.isfinite(margin) else None
        report["support_in_projection_set"] = inside
        report["c0_compatible"] = field.c0_compatible
        if not met:
            report["pass_arm"] = {"arm": "pass", "status": "precondition_unmet",
                                  "support_margin": margin if np.isfinite(margin) else None}
        
        updated_state["report"] = report
        updated_state["next_action"] = "pass_arm" if met else "fail_arm"
        
        logger.info(f"precondition node completed: margin={margin:.6f}, met={met}")
        
    except Exception as e:
        logger.error(f"precondition node error: {str(e)}", exc_info=True)
        updated_state["metadata"]["error"] = str(e)
        updated_state["metadata"]["error_node"] = "precondition"
        updated_state["next_action"] = "error"
    
    updated_state["metadata"]["nodes_executed"] = state.get("metadata", {}).get("nodes_executed", []) + ["precondition"]
    return updated_state
