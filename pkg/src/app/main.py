"""fastapi application: verification suites, singularities and the vanishing experiment over http."""

import logging
from typing import Any, Callable, Dict, TypeVar

from fastapi import FastAPI, HTTPException

from src.core.config import settings
from src.core.errors import ConfigInvalid, EmptyBoundary, SpherexError
from src.core.schemas import SurfaceRequest, Theorem31Report, Theorem31Request, VerifyRequest, VerifySuiteResult
from src.geometry.surfaces import decompose, projection_set
from src.services.experiment_service import theorem31_experiment
from src.services.suite_service import run_suite

logger = logging.getLogger(__name__)

T = TypeVar("T")

# initialize fastapi app
app = FastAPI(
    title="spherex",
    description="spherical and spherical mean transforms on tangent subspheres of surfaces of revolution",
    version=settings.app_version,
)


def _guarded(name: str, call: Callable[[], T]) -> T:
    """run a request handler body, mapping library errors to http errors.

    raises:
        HTTPException: 422 for rejected configs, 400 for other library errors, 500 otherwise
    """
    try:
        return call()
    except ConfigInvalid as e:
        logger.warning(f"{name}: config rejected: {str(e)}")
        raise HTTPException(status_code=422, detail={"message": str(e), "diagnostics": e.diagnostics})
    except SpherexError as e:
        logger.warning(f"{name}: {type(e).__name__}: {str(e)}")
        raise HTTPException(status_code=400, detail=f"{type(e).__name__}: {str(e)}")
    except Exception as e:
        logger.error(f"error processing {name} request: {str(e)}", exc_info=True)
        raise HTTPException(status_code=500, detail=f"internal server error: {str(e)}")


@app.post("/verify", response_model=VerifySuiteResult, response_model_exclude_none=True)
def verify(request: VerifyRequest) -> VerifySuiteResult:
    """run one verification suite.

    args:
        request: suite name, optional surface and field configs, seed and tolerance overrides

    returns:
        suite result with every check
    """
    logger.info(f"received verify request: suite={request.suite}")

    def body() -> VerifySuiteResult:
        config = settings.with_overrides(seed=request.seed)
        surface = request.surface.build() if request.surface else None
        field = request.field.build() if request.field else None
        return run_suite(request.suite, surface, field, config, request.tol)

    return _guarded("verify", body)


@app.post("/singularities")
def singularities(request: SurfaceRequest) -> Dict[str, Any]:
    """singular parameters, components and projection set of a surface."""
    logger.info("received singularities request")

    def body() -> Dict[str, Any]:
        surface = request.surface.build()
        decomposition = decompose(surface, settings)
        payload = decomposition.model_dump()
        try:
            payload["cap_height"] = projection_set(surface, decomposition, settings).axis_height
        except EmptyBoundary:
            payload["cap_height"] = None
        return payload

    return _guarded("singularities", body)


@app.post("/theorem31", response_model=Theorem31Report)
def theorem31(request: Theorem31Request) -> Theorem31Report:
    """run the vanishing-data consistency experiment."""
    logger.info("received theorem31 request")

    def body() -> Theorem31Report:
        fail_field = request.fail_field.build() if request.fail_field else None
        return theorem31_experiment(request.surface.build(), request.field.build(), fail_field, settings, request.tol)

    return _guarded("theorem31", body)


@app.get("/health")
async def health_check() -> Dict[str, str]:
    """health check endpoint.

    returns:
        status information
    """
    return {
        "status": "healthy",
        "service": settings.app_name,
        "version": settings.app_version,
    }
