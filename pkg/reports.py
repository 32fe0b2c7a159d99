#!/usr/bin/env python3
"""
Canonical analysis reports.

Every CLI command fills one Report. Rationals are stored as "p/q" strings,
so two runs on identical inputs serialize to identical bytes.
"""

import hashlib
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List

from pydantic import BaseModel, Field

from core_model import format_rational


def canonical(value: Any) -> Any:
    """Recursively turn rationals into strings and tuples into lists."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        raise TypeError(f"Reports carry exact values only, got float {value!r}")
    if isinstance(value, dict):
        return {str(k): canonical(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [canonical(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(canonical(v) for v in value)
    return str(value)


def file_digest(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class Report(BaseModel):
    """Inputs, verdicts, certificates and exact values of one analysis."""

    command: str
    inputs: Dict[str, str] = Field(default_factory=dict)
    verdicts: Dict[str, Any] = Field(default_factory=dict)
    certificates: Dict[str, Any] = Field(default_factory=dict)
    values: Dict[str, Any] = Field(default_factory=dict)
    checks: List[str] = Field(default_factory=list)

    def add_input(self, path: Path):
        self.inputs[Path(path).name] = file_digest(path)

    def verdict(self, key: str, value: Any):
        self.verdicts[key] = canonical(value)

    def certificate(self, key: str, value: Any):
        self.certificates[key] = canonical(value)

    def value(self, key: str, value: Any):
        self.values[key] = canonical(value)

    def checked(self, what: str, passed: bool):
        self.checks.append(f"{what}: {'pass' if passed else 'FAIL'}")

    @property
    def all_checks_passed(self) -> bool:
        return all(line.endswith(': pass') for line in self.checks)

    def to_json(self) -> str:
        return json.dumps(self.model_dump(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lines = [f"command: {self.command}"]
        for name in sorted(self.inputs):
            lines.append(f"input {name}: sha256 {self.inputs[name]}")
        for section in ('verdicts', 'values', 'certificates'):
            data = getattr(self, section)
            for key in sorted(data):
                lines.extend(_text_lines(key, data[key]))
        for line in self.checks:
            lines.append(f"verify {line}")
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        return self.to_json() if fmt == 'structured' else self.to_text()


def _text_lines(key: str, value: Any, indent: str = '') -> List[str]:
    if isinstance(value, dict):
        out = [f"{indent}{key}:"]
        for k in sorted(value):
            out.extend(_text_lines(k, value[k], indent + '  '))
        return out
    if isinstance(value, list) and value and all(isinstance(v, (dict, list)) for v in value):
        out = [f"{indent}{key}:"]
        for k, v in enumerate(value):
            out.extend(_text_lines(f"- {k}", v, indent + '  '))
        return out
    if isinstance(value, list):
        return [f"{indent}{key}: {', '.join(str(v) for v in value)}"]
    return [f"{indent}{key}: {value}"]
