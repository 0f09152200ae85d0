"""Check and derivation reports with JSON and text serializations."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction


@dataclass(frozen=True)
class Counterexample:
    inputs: tuple
    residual: str


def jsonable(value):
    """Fractions become reduced strings; tuples become lists."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value


@dataclass
class CheckReport:
    check: str
    window: int
    counterexamples: list = field(default_factory=list)
    elapsed: float = 0.0  # seconds
    cases: int = 0
    details: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        return "pass" if not self.counterexamples else "fail"

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "check": self.check,
            "window": self.window,
            "status": self.status,
            "cases": self.cases,
            "counterexamples": [
                {"inputs": list(c.inputs), "residual": c.residual} for c in self.counterexamples
            ],
        }
        if self.details:
            out["result"] = jsonable(self.details)
        if timing:
            out["elapsed_ms"] = round(self.elapsed * 1000, 3)
        return out

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, ensure_ascii=False)

    def to_text(self, timing: bool = True) -> str:
        head = f"{self.check} (window {self.window}): {self.status.upper()}, {self.cases} cases"
        if timing:
            head += f", {self.elapsed * 1000:.1f} ms"
        lines = [head]
        for key, value in jsonable(self.details).items():
            lines.append(f"  {key}: {_text_value(value)}")
        for c in self.counterexamples:
            lines.append(f"  ! ({', '.join(c.inputs)}) -> {c.residual}")
        return "\n".join(lines)


def _text_value(value) -> str:
    if isinstance(value, list):
        return "[" + ", ".join(_text_value(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}: {_text_value(v)}" for k, v in value.items()) + "}"
    return str(value)
