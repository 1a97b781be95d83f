"""projection node: decompose the surface, compute the projection set and sample the upper component."""

import logging
from typing import Any, Dict

from src.core.schemas import ExperimentState
from src.geometry.surfaces import decompose, projection_set
from src.services.sampling_service import u_params

logger = logging.getLogger(__name__)


def projection_node(state: ExperimentState) -> Dict[str, Any]:
    """compute Sigma', the upper component, Pi_Sigma and the U samples.
    
    args:
        state: experiment state with surface and config
        
    returns:
        updated state dict with decomposition, params and report entries
    """
    logger.info("executing projection node")
    
    updated_state = dict(state)
    updated_state["metadata"] = state.get("metadata", {})
    
    try:
        config = state["config"]
        surface = state["surface"]
        decomposition = decompose(surface, config)
        cap = projection_set(surface, decomposition, config)
        params = u_params(decomposition, config)
        
        report = dict(state.get("report", {}))
        report["cap_height"] = cap.axis_height
        report["upper_component"] = list(decomposition.components[decomposition.upper_index])
        report["u_samples"] = len(params)
        
        updated_state["decomposition"] = decomposition
        updated_state["params"] = params
        updated_state["report"] = report
        updated_state["next_action"] = "precondition"
        
        logger.info(f"projection node completed: cap height={cap.axis_height:.6f}, u samples={len(params)}")
        
    except Exception as e:
        logger.error(f"projection node error: {str(e)}", exc_info=True)
        updated_state["metadata"]["error"] = str(e)
        updated_state["metadata"]["error_node"] = "projection"
        updated_state["next_action"] = "error"
    
    updated_state["metadata"]["nodes_executed"] = state.get("metadata", {}).get("nodes_executed", []) + ["projection"]
    return updated_state
