"""Utility functions for the lambdamu workbench."""

import json
import sys
from pathlib import Path
from typing import Iterable, Type, TypeVar, Union

from pydantic import BaseModel, ValidationError

from lambdamu.exceptions import LambdaMuError

ModelT = TypeVar("ModelT", bound=BaseModel)

_PRIMED_LIMIT = 3

RECURSION_LIMIT = 20000


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    """Pick a name derived from ``base`` that is not in ``avoid``.

    Candidates are tried in a fixed order, first with up to three primes and then
    with numeric suffixes, so the choice is reproducible.

    Args:
        base: The name to derive from.
        avoid: Names that are already in scope.

    Returns:
        The first candidate not in ``avoid``.
    """
    taken = set(avoid)
    stem = base.rstrip("'")
    for primes in range(1, _PRIMED_LIMIT + 1):
        candidate = stem + "'" * primes
        if candidate not in taken:
            return candidate
    index = 1
    while f"{stem}{index}" in taken:
        index += 1
    return f"{stem}{index}"


def ensure_recursion_limit(limit: int = RECURSION_LIMIT) -> int:
    """Raise the interpreter recursion limit to at least ``limit``.

    Substitution and printing recurse over the term tree; deep μ-chains go past the
    default limit. The limit is never lowered.

    Returns:
        The limit now in force.
    """
    if sys.getrecursionlimit() < limit:
        sys.setrecursionlimit(limit)
    return sys.getrecursionlimit()


def load_model(path: Union[str, Path], model: Type[ModelT]) -> ModelT:
    """Read a JSON file into a pydantic model.

    Args:
        path: The file to read.
        model: The model class to validate against.

    Returns:
        The validated model.

    Raises:
        LambdaMuError: If the file is missing, is not JSON or does not validate.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
        return model.model_validate(json.loads(text))
    except OSError as e:
        raise LambdaMuError(f"Cannot read {path}: {str(e)}")
    except json.JSONDecodeError as e:
        raise LambdaMuError(f"{path} is not valid JSON: {str(e)}")
    except ValidationError as e:
        raise LambdaMuError(f"{path} does not match {model.__name__}: {str(e)}")


def dump_model(path: Union[str, Path], model: BaseModel) -> None:
    """Write a pydantic model to a JSON file.

    Args:
        path: The file to write.
        model: The model to serialize.
    """
    Path(path).write_text(model.model_dump_json(indent=2) + "\n", encoding="utf-8")
