"""Residual reports shared by every verification routine."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional


@dataclass
class CheckReport:
    """Named residuals plus a verdict.

    ``passed`` defaults to "every residual is within ``tol``"; callers with
    extra conditions (e.g. a lower bound on a singular value) pass it in.
    """

    check: str
    residuals: Dict[str, float]
    tol: float
    passed: Optional[bool] = None
    info: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.residuals = {k: float(v) for k, v in self.residuals.items()}
        if self.passed is None:
            self.passed = all(v <= self.tol for v in self.residuals.values())
        self.passed = bool(self.passed)

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    def __bool__(self):
        return self.passed

    def to_dict(self) -> dict:
        d = {"check": self.check, "residuals": dict(self.residuals),
             "pass": self.passed, "tol": self.tol}
        if self.info:
            d["info"] = _plain(self.info)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CheckReport":
        return cls(d["check"], d["residuals"], d["tol"], d["pass"], d.get("info", {}))


@dataclass
class SuiteReport:
    suite: str
    inputs_digest: str
    checks: List[CheckReport]
    seed: Optional[int] = None
    wall_clock: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        checks = sorted(self.checks, key=lambda c: c.check)
        return {
            "suite": self.suite,
            "inputs_digest": self.inputs_digest,
            "checks": [c.to_dict() for c in checks],
            "pass": self.passed,
            "seed": self.seed,
            "wall_clock": self.wall_clock,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "SuiteReport":
        return cls(d["suite"], d["inputs_digest"],
                   [CheckReport.from_dict(c) for c in d["checks"]],
                   d.get("seed"), d.get("wall_clock", 0.0))


def digest(*parts) -> str:
    h = hashlib.sha256()
    for p in parts:
        h.update(json.dumps(p, sort_keys=True, default=str).encode())
    return h.hexdigest()[:16]


def _plain(obj):
    """Make numpy scalars/arrays JSON friendly (complex -> [re, im])."""
    import numpy as np

    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj
