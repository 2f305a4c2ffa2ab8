"""Report structure emitted by the CLI: tables, derivations, assertions.

The structured form is JSON and round-trips exactly: parse(emit(report))
equals the original report. Every numeric claim in a report is produced by
one engine operation and carried as a string cell.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from .errors import ScenarioFormatError

__all__ = ["Assertion", "Report", "emit_structured", "parse_structured", "emit_text"]


@dataclass
class Assertion:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class Report:
    scenario_id: str
    tables: dict[str, list[dict[str, str]]] = field(default_factory=dict)
    derivation: list[str] = field(default_factory=list)
    assertions: list[Assertion] = field(default_factory=list)
    wall_time_s: float = 0.0

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)


def emit_structured(report: Report) -> str:
    return json.dumps(asdict(report), indent=2, sort_keys=True)


def parse_structured(text: str) -> Report:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"unreadable report JSON: {exc}", location=f"line {exc.lineno}")
    try:
        assertions = [Assertion(**a) for a in raw["assertions"]]
        return Report(
            scenario_id=raw["scenario_id"],
            tables=raw["tables"],
            derivation=raw["derivation"],
            assertions=assertions,
            wall_time_s=raw["wall_time_s"],
        )
    except (KeyError, TypeError) as exc:
        raise ScenarioFormatError(f"report document is missing fields: {exc}")


def emit_text(report: Report) -> str:
    lines = [f"=== {report.scenario_id} ==="]
    for title, rows in report.tables.items():
        lines.append(f"-- {title}")
        if rows:
            headers = list(rows[0].keys())
            lines.append("  " + "  ".join(headers))
            for row in rows:
                lines.append("  " + "  ".join(str(row.get(h, "")) for h in headers))
    if report.derivation:
        lines.append("-- derivation")
        lines.extend(f"  {step}" for step in report.derivation)
    lines.append("-- assertions")
    for a in report.assertions:
        mark = "PASS" if a.passed else "FAIL"
        suffix = f" ({a.detail})" if a.detail else ""
        lines.append(f"  [{mark}] {a.name}{suffix}")
    lines.append(f"-- wall time: {report.wall_time_s:.3f}s")
    return "\n".join(lines) + "\n"
