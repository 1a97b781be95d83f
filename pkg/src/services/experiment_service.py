"""experiment service: run the vanishing experiment graph and convert its state to a report."""

import logging
from typing import Optional

from src.agent.graph import app as graph_app
from src.core.config import Settings, settings
from src.core.errors import PreconditionUnmet
from src.core.schemas import ExperimentState, Theorem31Report
from src.geometry.surfaces import RevolutionSurface
from src.transforms.fields import SphereField

logger = logging.getLogger(__name__)


def theorem31_experiment(surface: RevolutionSurface, field: SphereField, fail_field: Optional[SphereField] = None,
                         config: Settings = settings, tol: Optional[float] = None,
                         require_precondition: bool = False) -> Theorem31Report:
    """projection set, disjointness precondition and both vanishing arms.
    
    args:
        surface: axially symmetric surface with nonempty Sigma'
        field: field expected to vanish (supp f inside Pi_Sigma)
        fail_field: field for the fail arm; defaults to the first bump moved onto a tangent subsphere
        config: settings
        tol: vanishing threshold, config.vanishing_tol when None
        require_precondition: raise instead of only reporting an unmet precondition
        
    returns:
        report; graph errors are carried in report.error
        
    raises:
        PreconditionUnmet: if require_precondition is set and the margin fails
    """
    initial_state: ExperimentState = {
        "surface": surface,
        "field": field,
        "fail_field": fail_field,
        "config": config,
        "tol": config.vanishing_tol if tol is None else tol,
        "decomposition": None,
        "params": [],
        "report": {},
        "metadata": {"nodes_executed": []},
        "next_action": None,
    }
    
    logger.info("invoking experiment graph")
    result = graph_app.invoke(initial_state)
    metadata = result.get("metadata", {})
    
    report = Theorem31Report(
        **result.get("report", {}),
        error=metadata.get("error"),
        nodes_executed=metadata.get("nodes_executed", []),
    )
    logger.info(f"experiment graph completed: next_action={result.get('next_action')}, consistent={report.consistent}")
    
    if require_precondition and report.precondition_met is False:
        raise PreconditionUnmet(f"disjointness margin {report.precondition_margin} "
                                f"below {config.disjointness_margin}")
    return report
