"""Deterministic machine-readable reports.

A report is a single JSON document: sorted keys, fixed separators, no
timestamps or machine identifiers, so identical scenario + version gives a
byte-identical file.  Schema (report_format 1):

    {
      "format_version": 1,
      "tool": {"name": "crystaframe", "version": ...},
      "scenario_sha256": hex digest of the scenario text,
      "parameters": {...},
      "results": [
        {"command": [...], "status": "pass" | "fail" | "finding",
         "data": {...}}            # command-specific payload
      ],
      "ledger": [[note, digits], ...],
      "exit_code": 0 | 1
    }
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

REPORT_FORMAT = 1
TOOL_VERSION = "0.1.0"


@dataclass
class Report:
    scenario_text: str = ""
    parameters: dict = field(default_factory=dict)
    results: list = field(default_factory=list)
    ledger: list = field(default_factory=list)

    def add(self, command, status: str, data: dict):
        assert status in ("pass", "fail", "finding")
        self.results.append(
            {"command": list(command), "status": status, "data": _plain(data)}
        )

    @property
    def failed(self) -> bool:
        return any(r["status"] == "fail" for r in self.results)

    def document(self) -> dict:
        return {
            "format_version": REPORT_FORMAT,
            "tool": {"name": "crystaframe", "version": TOOL_VERSION},
            "scenario_sha256": hashlib.sha256(self.scenario_text.encode()).hexdigest(),
            "parameters": _plain(self.parameters),
            "results": self.results,
            "ledger": _plain(self.ledger),
            "exit_code": 1 if self.failed else 0,
        }

    def to_json(self) -> str:
        return json.dumps(self.document(), sort_keys=True, separators=(",", ":")) + "\n"

    def human_lines(self):
        for r in self.results:
            cmd = " ".join(str(t) for t in r["command"])
            yield f"[{r['status'].upper():7s}] {cmd}"
            summary = r["data"].get("summary")
            if summary:
                yield f"          {summary}"


def _plain(obj):
    """Recursively convert tuples and other containers to JSON-stable forms."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    if isinstance(obj, (int, str, bool)) or obj is None:
        return obj
    if isinstance(obj, float):
        raise TypeError("floats are banned from reports: exactness only")
    return repr(obj)
