"""utility functions for config loading, number formatting and sweeps."""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Iterable, List, Type, TypeVar

import numpy as np
from pydantic import BaseModel, ValidationError

from src.core.errors import ConfigInvalid

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")
M = TypeVar("M", bound=BaseModel)


def format_float(value: float) -> str:
    """format a float with 17 significant digits and '.' as decimal separator.
    
    args:
        value: number to format
        
    returns:
        string representation that round-trips to the same double
    """
    return format(float(value), ".17g")


def _validation_diagnostics(error: ValidationError) -> List[str]:
    diagnostics = []
    for item in error.errors():
        loc = ".".join(str(part) for part in item.get("loc", ()))
        diagnostics.append(f"field '{loc}': {item.get('msg')}")
    return diagnostics


def parse_config(payload: Any, model: Type[M], source: str = "<inline>") -> M:
    """validate an already-decoded json payload against a pydantic model.
    
    raises:
        ConfigInvalid: with one diagnostic per failing field
    """
    try:
        return model.model_validate(payload)
    except ValidationError as e:
        raise ConfigInvalid(f"invalid config {source}", _validation_diagnostics(e)) from e


def load_json_config(path: str | Path, model: Type[M]) -> M:
    """load a json config file and validate it.
    
    args:
        path: path to the json file
        model: pydantic model describing the file
        
    returns:
        validated model instance
        
    raises:
        ConfigInvalid: if the file is missing, is not json (line/column
            diagnostics) or fails validation (field diagnostics)
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigInvalid(f"cannot read config {path}", [str(e)]) from e
    
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigInvalid(
            f"invalid json in {path}",
            [f"line {e.lineno}, column {e.colno}: {e.msg}"],
        ) from e
    
    logger.debug(f"loaded config {path} as {model.__name__}")
    return parse_config(payload, model, source=str(path))


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """deterministic generator for a seed and an optional stream index."""
    return np.random.default_rng([seed, *stream])


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: int = 0) -> List[R]:
    """map fn over items with a thread pool, preserving input order.
    
    args:
        fn: pure function applied to each item
        items: inputs
        threads: worker cap; 0 lets the executor decide, 1 runs inline
        
    returns:
        results in the order of items
    """
    items = list(items)
    if threads == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    
    with ThreadPoolExecutor(max_workers=threads or None) as executor:
        return list(executor.map(fn, items))

