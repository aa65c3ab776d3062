"""Validation reports: ordered findings with ERROR/WARNING severities."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum


class Severity(Enum):
    ERROR = "ERROR"
    WARNING = "WARNING"


@dataclass(frozen=True)
class Finding:
    rule_id: str
    severity: Severity
    locator: str
    message: str


@dataclass
class ValidationReport:
    resource_id: str
    findings: list[Finding] = field(default_factory=list)

    def add(self, rule_id: str, severity: Severity, locator: str, message: str) -> None:
        self.findings.append(Finding(rule_id, severity, locator, message))

    def finish(self) -> "ValidationReport":
        """Apply the canonical (rule id, locator) ordering."""
        self.findings.sort(key=lambda f: (f.rule_id, f.locator, f.message))
        return self

    @property
    def passed(self) -> bool:
        return not any(f.severity is Severity.ERROR for f in self.findings)

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity is Severity.ERROR]

    @property
    def warnings(self) -> list[Finding]:
        return [f for f in self.findings if f.severity is Severity.WARNING]

    def to_text(self) -> str:
        lines = [
            f"{f.rule_id}\t{f.severity.value}\t{f.locator}\t{f.message}"
            for f in self.findings
        ]
        return "\n".join(lines) + ("\n" if lines else "")

    def to_json(self) -> str:
        doc = {
            "resource_id": self.resource_id,
            "passed": self.passed,
            "findings": [
                {
                    "rule_id": f.rule_id,
                    "severity": f.severity.value,
                    "locator": f.locator,
                    "message": f.message,
                }
                for f in self.findings
            ],
        }
        return json.dumps(doc, sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_json(cls, text: str) -> "ValidationReport":
        doc = json.loads(text)
        report = cls(doc["resource_id"])
        for f in doc["findings"]:
            report.add(f["rule_id"], Severity(f["severity"]), f["locator"], f["message"])
        return report
