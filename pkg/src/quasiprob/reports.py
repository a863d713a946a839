from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    return value


@dataclass
class CheckReport:
    """Outcome of one property check: an overall verdict plus per-case rows."""

    name: str
    passed: bool
    cases: list[dict[str, Any]] = field(default_factory=list)
    params: dict[str, Any] = field(default_factory=dict)

    @property
    def failures(self) -> list[dict[str, Any]]:
        return [c for c in self.cases if not c.get("passed", True)]

    def to_dict(self) -> dict[str, Any]:
        return _jsonable({
            "check": self.name,
            "passed": self.passed,
            "n_cases": len(self.cases),
            "n_failed": len(self.failures),
            "params": self.params,
            "cases": self.cases,
        })

    def __bool__(self) -> bool:
        return self.passed
