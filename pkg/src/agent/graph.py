"""langgraph definition: orchestrate the vanishing experiment nodes."""

import logging
from typing import Literal

from langgraph.graph import StateGraph, END

from src.core.schemas import ExperimentState
from src.agent.nodes.arms import fail_arm_node, pass_arm_node
from src.agent.nodes.precondition import precondition_node
from src.agent.nodes.projection import projection_node

logger = logging.getLogger(__name__)

PASS_ARM_OK = ("vanished", "precondition_unmet")
FAIL_ARM_OK = ("violated", "skipped")


def route_after_projection(state: ExperimentState) -> Literal["precondition", "error"]:
    """route decision after projection node.
    
    args:
        state: current experiment state
        
    returns:
        next node name based on error state
    """
    if state.get("next_action") == "error" or state.get("decomposition") is None:
        return "error"
    return "precondition"


def route_after_precondition(state: ExperimentState) -> Literal["pass_arm", "fail_arm", "error"]:
    """route decision after precondition node.
    
    the pass arm only runs when every tangent subsphere of the U samples keeps
    the disjointness margin from supp f. otherwise it is reported as unmet and
    the experiment goes straight to the fail arm.
    
    args:
        state: current experiment state
        
    returns:
        next node name
    """
    next_action = state.get("next_action")
    
    if next_action == "error":
        return "error"
    if state.get("report", {}).get("precondition_met"):
        return "pass_arm"
    return "fail_arm"


def route_after_arm(state: ExperimentState) -> Literal["next", "error"]:
    if state.get("next_action") == "error":
        return "error"
    return "next"


def report_node(state: ExperimentState) -> ExperimentState:
    """report node: decide whether both arms agree with the vanishing theorem.
    
    args:
        state: current experiment state
        
    returns:
        final state with report["consistent"] set
    """
    logger.info("executing report node")
    
    updated_state = dict(state)
    updated_state["next_action"] = "complete"
    updated_state["metadata"] = state.get("metadata", {})
    
    report = dict(state.get("report", {}))
    pass_status = (report.get("pass_arm") or {}).get("status")
    fail_status = (report.get("fail_arm") or {}).get("status")
    report["consistent"] = pass_status in PASS_ARM_OK and fail_status in FAIL_ARM_OK
    updated_state["report"] = report
    
    updated_state["metadata"]["nodes_executed"] = state.get("metadata", {}).get("nodes_executed", []) + ["report"]
    
    logger.info(f"report node completed: pass arm={pass_status}, fail arm={fail_status}, "
                f"consistent={report['consistent']}")
    return updated_state


def error_node(state: ExperimentState) -> ExperimentState:
    """error node: handle errors in the workflow.
    
    args:
        state: current experiment state with error metadata
        
    returns:
        state with error information
    """
    logger.error(f"error node executed: {state.get('metadata', {}).get('error', 'unknown error')}")
    
    updated_state = dict(state)
    updated_state["next_action"] = "error"
    updated_state["metadata"] = state.get("metadata", {})
    updated_state["metadata"]["error_node_executed"] = True
    updated_state["metadata"]["nodes_executed"] = state.get("metadata", {}).get("nodes_executed", []) + ["error"]
    
    return updated_state


# create the graph
def create_graph() -> StateGraph:
    """create and compile the experiment state graph.
    
    returns:
        compiled graph app
    """
    workflow = StateGraph(ExperimentState)
    
    workflow.add_node("projection", projection_node)
    workflow.add_node("precondition", precondition_node)
    workflow.add_node("pass_arm", pass_arm_node)
    workflow.add_node("fail_arm", fail_arm_node)
    workflow.add_node("report", report_node)
    workflow.add_node("error", error_node)
    
    workflow.set_entry_point("projection")
    
    workflow.add_conditional_edges(
        "projection",
        route_after_projection,
        {
            "precondition": "precondition",
            "error": "error",
        },
    )
    workflow.add_conditional_edges(
        "precondition",
        route_after_precondition,
        {
            "pass_arm": "pass_arm",
            "fail_arm": "fail_arm",
            "error": "error",
        },
    )
    workflow.add_conditional_edges(
        "pass_arm",
        route_after_arm,
        {
            "next": "fail_arm",
            "error": "error",
        },
    )
    workflow.add_conditional_edges(
        "fail_arm",
        route_after_arm,
        {
            "next": "report",
            "error": "error",
        },
    )
    workflow.add_edge("report", END)
    workflow.add_edge("error", END)
    
    app = workflow.compile()
    
    logger.info("experiment graph compiled successfully")
    return app


# create and export the graph app
app = create_graph()
