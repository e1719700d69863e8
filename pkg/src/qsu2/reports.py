"""Verification report records shared by the modules and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field

SCHEMA_VERSION = 1


@dataclass
class CheckReport:
    check: str
    passed: bool
    parameters: dict = field(default_factory=dict)
    max_error: float | None = None
    checked: int | None = None
    witness: object = None
    details: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def as_dict(self) -> dict:
        out = {"check": self.check, "parameters": self.parameters, "status": self.status}
        if self.max_error is not None:
            out["max_error"] = self.max_error
        if self.checked is not None:
            out["checked"] = self.checked
        if self.witness is not None:
            out["witness"] = _jsonable(self.witness)
        if self.details:
            out["details"] = _jsonable(self.details)
        return out

    def __bool__(self):
        return self.passed


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    return str(obj)
