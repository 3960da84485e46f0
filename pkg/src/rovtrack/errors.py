from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from pydantic import ValidationError


class InternalError(Exception):
    pass


class UserError(Exception):
    exit_code = 1


class ConfigError(UserError):
    exit_code = 2


class SimulationError(UserError):
    exit_code = 3

    def __init__(self, msg: str, time: float | None = None) -> None:
        super().__init__(msg)
        self.time = time


class SingularAttitudeError(SimulationError):
    pass


class NonFiniteStateError(SimulationError):
    pass


class OutOfHorizonError(SimulationError):
    pass


class OptimizationError(UserError):
    exit_code = 4


class AllCandidatesFailedError(OptimizationError):
    pass


class EmptyLogError(UserError):
    pass


class InvalidMembershipError(UserError):
    pass


class DegenerateAggregateError(UserError):
    pass


def validation_summary(exc: ValidationError) -> str:
    lines = []
    for error in exc.errors():
        location = ".".join(str(part) for part in error["loc"]) or "<root>"
        lines.append(f"  {location}: {error['msg']}")
    return "\n".join(lines)


def read_document(filepath: Path, what: str) -> dict[str, Any]:
    if not filepath.exists():
        msg = f"{what.capitalize()} file not found at {filepath}"
        raise ConfigError(msg)
    try:
        with filepath.open("r") as fp:
            document = json.load(fp)
    except json.JSONDecodeError as exc:
        msg = f"Malformed {what} file {filepath} (line {exc.lineno}, column {exc.colno}): {exc.msg}"
        raise ConfigError(msg) from exc
    if not isinstance(document, dict):
        msg = f"The {what} file {filepath} must contain a JSON object"
        raise ConfigError(msg)
    return document


def invalid_document(exc: ValidationError, filepath: Path, what: str) -> ConfigError:
    msg = f"Invalid {what} in {filepath}:\n{validation_summary(exc)}"
    return ConfigError(msg)
