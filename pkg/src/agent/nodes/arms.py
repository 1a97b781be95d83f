"""pass and fail arms of the vanishing experiment."""

import logging
from dataclasses import replace
from typing import Any, Dict, Optional

import numpy as np

from src.agent.nodes.precondition import support_margin, tangent_subspheres
from src.core.schemas import ExperimentState
from src.geometry.core import subsphere_nodes
from src.transforms.fields import SphereField, bumps_of
from src.transforms.spherical import VanishingReport, vanishing_data_check

logger = logging.getLogger(__name__)


def _finite(value: float) -> Optional[float]:
    return float(value) if np.isfinite(value) else None


def _center_of(field: SphereField) -> Optional[list]:
    bumps = bumps_of(field)
    return list(bumps[0].center) if bumps else None


def _arm_entry(arm: str, status: str, field: SphereField, margin: float, check: VanishingReport) -> Dict[str, Any]:
    return {
        "arm": arm,
        "status": status,
        "field_center": _center_of(field),
        "support_margin": _finite(margin),
        "max_value": check.max_value,
        "max_gradient": check.max_gradient,
        "evaluated": check.evaluated,
    }


def straddling_field(state: ExperimentState) -> Optional[SphereField]:
    """move the first cap bump onto the tangent subsphere of the middle U sample.
    
    the new center is the subsphere node nearest the old one, so the support
    straddles that subsphere. returns None when the field has no bumps.
    """
    bumps = [bump for bump in bumps_of(state["field"]) if bump.amplitude != 0.0]
    if not bumps or not state["params"]:
        return None
    bump = bumps[0]
    middle = state["params"][len(state["params"]) // 2]
    subsphere = tangent_subspheres(state["surface"], [middle])[0]
    nodes = subsphere_nodes(subsphere, state["config"].quad_nodes).points
    nearest = nodes[int(np.argmin(np.linalg.norm(nodes - np.asarray(bump.center), axis=-1)))]
    nearest = nearest / np.linalg.norm(nearest)
    return replace(bump, center=tuple(float(c) for c in nearest))


def pass_arm_node(state: ExperimentState) -> Dict[str, Any]:
    """vanishing check of the given field over the U samples; expected to vanish."""
    logger.info("executing pass arm node")
    
    updated_state = dict(state)
    updated_state["metadata"] = state.get("metadata", {})
    
    try:
        config = state["config"]
        field = state["field"]
        check = vanishing_data_check(field, state["surface"], state["params"], state["tol"], config)
        status = "vanished" if check.passed else "violated"
        margin = state["report"].get("precondition_margin")
        
        report = dict(state["report"])
        report["pass_arm"] = _arm_entry("pass", status, field, float("inf") if margin is None else margin, check)
        updated_state["report"] = report
        updated_state["next_action"] = "fail_arm"
        
        logger.info(f"pass arm completed: status={status}, max value={check.max_value:.3e}, "
                    f"max gradient={check.max_gradient:.3e}")
        
    except Exception as e:
        logger.error(f"pass arm error: {str(e)}", exc_info=True)
        updated_state["metadata"]["error"] = str(e)
        updated_state["metadata"]["error_node"] = "pass_arm"
        updated_state["next_action"] = "error"
    
    updated_state["metadata"]["nodes_executed"] = state.get("metadata", {}).get("nodes_executed", []) + ["pass_arm"]
    return updated_state


def fail_arm_node(state: ExperimentState) -> Dict[str, Any]:
    """vanishing check of a field whose support meets a tangent subsphere; expected to be violated."""
    logger.info("executing fail arm node")
    
    updated_state = dict(state)
    updated_state["metadata"] = state.get("metadata", {})
    
    try:
        config = state["config"]
        field = state.get("fail_field") or straddling_field(state)
        report = dict(state["report"])
        
        if field is None:
            logger.info("fail arm skipped: no cap bump to move and no fail field given")
            report["fail_arm"] = {"arm": "fail", "status": "skipped"}
        else:
            subspheres = tangent_subspheres(state["surface"], state["params"])
            margin = support_margin(field, subspheres, config.quad_nodes)
            check = vanishing_data_check(field, state["surface"], state["params"], state["tol"], config)
            status = "violated" if check.max_value > config.violation_threshold else "vanished"
            report["fail_arm"] = _arm_entry("fail", status, field, margin, check)
            logger.info(f"fail arm completed: status={status}, margin={margin:.6f}, "
                        f"max value={check.max_value:.3e}")
        
        updated_state["report"] = report
        updated_state["next_action"] = "report"
        
    except Exception as e:
        logger.error(f"fail arm error: {str(e)}", exc_info=True)
        updated_state["metadata"]["error"] = str(e)
        updated_state["metadata"]["error_node"] = "fail_arm"
        updated_state["next_action"] = "error"
    
    updated_state["metadata"]["nodes_executed"] = state.get("metadata", {}).get("nodes_executed", []) + ["fail_arm"]
    return updated_state
