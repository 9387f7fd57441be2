"""Machine-readable scenario reports with a human-readable mirror.

A report is one JSON document per run: the echoed configuration, one
record per check (each carrying the citation tag of the fact it
verifies), a dimensions table, per-phase wall-clock, and backend
provenance.  Dimensions and verdicts are deterministic given the
configuration and seed; timings are informational.
"""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional


@dataclass
class CheckRecord:
    name: str
    citation: str
    expected: str
    computed: str
    passed: bool
    observation_only: bool = False

    def as_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "citation": self.citation,
            "expected": self.expected,
            "computed": self.computed,
            "passed": self.passed,
            "observation_only": self.observation_only,
        }


@dataclass
class ExperimentReport:
    scenario: str
    config: Dict[str, Any]
    checks: List[CheckRecord] = field(default_factory=list)
    dimensions: Dict[str, int] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)
    backend: Dict[str, Any] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add_check(self, name: str, citation: str, expected: Any, computed: Any,
                  passed: bool, observation_only: bool = False) -> CheckRecord:
        record = CheckRecord(name, citation, str(expected), str(computed),
                             bool(passed), observation_only)
        self.checks.append(record)
        return record

    def add_observation(self, name: str, citation: str, computed: Any) -> CheckRecord:
        return self.add_check(name, citation, "(observation)", computed, True,
                              observation_only=True)

    def note(self, text: str) -> None:
        self.notes.append(text)

    @contextmanager
    def phase(self, name: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = round(time.perf_counter() - start, 3)

    # -- rendering ---------------------------------------------------------
    def as_dict(self) -> Dict[str, Any]:
        return {
            "scenario": self.scenario,
            "config": self.config,
            "passed": self.passed,
            "checks": [c.as_dict() for c in self.checks],
            "dimensions": dict(sorted(self.dimensions.items())),
            "timings": self.timings,
            "backend": self.backend,
            "notes": self.notes,
            "human_summary": self.to_text(),
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=False) + "\n"

    def to_text(self) -> str:
        lines = [f"scenario: {self.scenario}",
                 "config:   " + " ".join(f"{k}={v}" for k, v in self.config.items()
                                         if v is not None)]
        if self.checks:
            name_w = max(len(c.name) for c in self.checks)
            exp_w = max(len(c.expected) for c in self.checks)
            comp_w = max(len(c.computed) for c in self.checks)
            lines.append(f"{'check'.ljust(name_w)}  {'expected'.ljust(exp_w)}  "
                         f"{'computed'.ljust(comp_w)}  verdict")
            for c in self.checks:
                verdict = "obs " if c.observation_only else (
                    "pass" if c.passed else "FAIL")
                lines.append(f"{c.name.ljust(name_w)}  {c.expected.ljust(exp_w)}  "
                             f"{c.computed.ljust(comp_w)}  {verdict}")
        if self.dimensions:
            lines.append("dimensions: " + " ".join(
                f"{k}={v}" for k, v in sorted(self.dimensions.items())))
        for note in self.notes:
            lines.append(f"note: {note}")
        lines.append(f"result: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)

    def write(self, path: str) -> None:
        with open(path, "w") as handle:
            handle.write(self.to_json())
