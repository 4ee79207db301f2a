"""Parse static-analyzer reports and fuse findings onto function spans.

Two report families are supported, each under its own tool tag:

``Tool.ANALYZER_A`` (semgrep-style), native export::

    {"results": [{"check_id": str, "path": str,
                  "start": {"line": int}, "end": {"line": int},
                  "extra": {"severity": "ERROR"|"WARNING"|"INFO"}}]}

``Tool.ANALYZER_B`` (sonar-style), native export::

    {"issues": [{"rule": str, "severity": "BLOCKER"|"CRITICAL"|"MAJOR"|
                 "MINOR"|"INFO", "component": "project:rel/path",
                 "line": int, "textRange": {"startLine": int,
                 "endLine": int}}]}

A SARIF 2.1 document (``runs`` with result ``locations`` carrying
``physicalLocation.artifactLocation.uri`` and ``region.startLine`` /
``endLine``) is accepted for either tool; severity comes from
``result.properties.severity`` when present, otherwise the SARIF ``level``
is mapped per tool (A: error->Error, warning->Warning, note->Info;
B: error->Critical, warning->Major, note->Minor).

A finding attaches to a function iff the normalized paths are equal and the
line ranges intersect; the function's label is binary no matter how many
findings hit it.
"""

from __future__ import annotations

import enum
import json
import logging
from dataclasses import dataclass, field

from .errors import ReportParseError
from .extraction import FunctionSpan, WarningRecord

logger = logging.getLogger(__name__)


class Tool(enum.Enum):
    ANALYZER_A = "analyzer_a"  # semgrep-style
    ANALYZER_B = "analyzer_b"  # sonar-style


TAXONOMY: dict[Tool, frozenset[str]] = {
    Tool.ANALYZER_A: frozenset({"Error", "Warning", "Info"}),
    Tool.ANALYZER_B: frozenset({"Blocker", "Critical", "Major", "Minor", "Info"}),
}

DEFAULT_QUALIFYING: dict[Tool, frozenset[str]] = {
    Tool.ANALYZER_A: frozenset({"Error"}),
    Tool.ANALYZER_B: frozenset({"Major", "Critical", "Blocker"}),
}

_SARIF_LEVEL_MAP: dict[Tool, dict[str, str]] = {
    Tool.ANALYZER_A: {"error": "Error", "warning": "Warning", "note": "Info"},
    Tool.ANALYZER_B: {"error": "Critical", "warning": "Major", "note": "Minor"},
}


@dataclass(frozen=True)
class Finding:
    tool: Tool
    rule_id: str
    severity: str
    path: str
    start_line: int
    end_line: int

    def __post_init__(self) -> None:
        if self.severity not in TAXONOMY[self.tool]:
            raise ReportParseError(
                f"unknown severity {self.severity!r} for {self.tool.value}"
            )
        if self.start_line > self.end_line:
            raise ReportParseError(
                f"start_line {self.start_line} > end_line {self.end_line}"
            )

    def to_dict(self) -> dict:
        return {
            "tool": self.tool.value,
            "rule_id": self.rule_id,
            "severity": self.severity,
            "path": self.path,
            "start_line": self.start_line,
            "end_line": self.end_line,
        }


@dataclass
class SeverityFilter:
    """Which severities make a function count as vulnerable, per tool."""

    qualifying: dict[Tool, frozenset[str]] = field(
        default_factory=lambda: dict(DEFAULT_QUALIFYING))

    def __post_init__(self) -> None:
        for tool, severities in self.qualifying.items():
            unknown = set(severities) - TAXONOMY[tool]
            if unknown:
                raise ValueError(
                    f"severities not in {tool.value} taxonomy: {sorted(unknown)}")

    def qualifies(self, finding: Finding) -> bool:
        return finding.severity in self.qualifying.get(finding.tool, frozenset())


@dataclass
class AnnotatedFunction:
    span: FunctionSpan
    counts: dict[str, int]
    vulnerable: bool

    def to_dict(self) -> dict:
        d = self.span.to_dict()
        d["counts"] = dict(sorted(self.counts.items()))
        d["vulnerable"] = self.vulnerable
        return d


def normalize_path(path: str, strip_prefix: str = "") -> str:
    path = path.replace("\\", "/")
    if strip_prefix:
        prefix = strip_prefix.replace("\\", "/").rstrip("/") + "/"
        if path.startswith(prefix):
            path = path[len(prefix):]
    while path.startswith("./"):
        path = path[2:]
    return path.lstrip("/")


def _normalize_severity(tool: Tool, raw: str) -> str:
    sev = raw.strip().capitalize()
    if sev not in TAXONOMY[tool]:
        raise ReportParseError(
            f"unknown severity {raw!r} for {tool.value} "
            f"(expected one of {sorted(TAXONOMY[tool])})")
    return sev


def parse_report(
    tool: Tool,
    raw: bytes,
    *,
    strict: bool = False,
    strip_prefix: str = "",
    warnings: list[WarningRecord] | None = None,
) -> list[Finding]:
    """Parse a tool's JSON results export into findings.

    Issues lacking a line range fall back to their single reported line;
    issues without any location are dropped with a warning, or raise when
    *strict*.
    """
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        offset = getattr(exc, "pos", getattr(exc, "start", "?"))
        raise ReportParseError(f"malformed JSON at byte offset {offset}: {exc}")

    if not isinstance(doc, dict):
        raise ReportParseError("report must be a JSON object")
    if "runs" in doc:
        rows = _iter_sarif(tool, doc)
    elif tool is Tool.ANALYZER_A:
        rows = _iter_semgrep_style(doc)
    else:
        rows = _iter_sonar_style(doc)

    findings = []
    for rule_id, severity, path, start, end in rows:
        if path is None or start is None:
            msg = f"issue {rule_id!r} has no usable location"
            if strict:
                raise ReportParseError(msg)
            logger.warning("%s; dropped", msg)
            if warnings is not None:
                warnings.append(WarningRecord(rule_id, msg))
            continue
        findings.append(Finding(
            tool=tool,
            rule_id=rule_id,
            severity=_normalize_severity(tool, severity),
            path=normalize_path(path, strip_prefix),
            start_line=int(start),
            end_line=int(end if end is not None else start),
        ))
    return findings


def _iter_semgrep_style(doc: dict):
    for res in doc.get("results", []):
        start = res.get("start") or {}
        end = res.get("end") or {}
        yield (
            res.get("check_id", ""),
            (res.get("extra") or {}).get("severity", ""),
            res.get("path"),
            start.get("line"),
            end.get("line") or start.get("line"),
        )


def _iter_sonar_style(doc: dict):
    for issue in doc.get("issues", []):
        component = issue.get("component")
        path = None
        if component:
            path = component.split(":", 1)[1] if ":" in component else component
        rng = issue.get("textRange") or {}
        start = rng.get("startLine", issue.get("line"))
        end = rng.get("endLine", start)
        yield (issue.get("rule", ""), issue.get("severity", ""), path, start, end)


def _iter_sarif(tool: Tool, doc: dict):
    level_map = _SARIF_LEVEL_MAP[tool]
    for run in doc.get("runs", []):
        for res in run.get("results", []):
            severity = (res.get("properties") or {}).get("severity")
            if severity is None:
                severity = level_map.get(res.get("level", ""), "")
            path = start = end = None
            locations = res.get("locations") or []
            if locations:
                phys = locations[0].get("physicalLocation") or {}
                path = (phys.get("artifactLocation") or {}).get("uri")
                region = phys.get("region") or {}
                start = region.get("startLine")
                end = region.get("endLine", start)
            yield (res.get("ruleId", ""), severity, path, start, end)


def overlaps(span: FunctionSpan, finding: Finding, strip_prefix: str = "") -> bool:
    return (
        normalize_path(span.source.path, strip_prefix) == finding.path
        and span.start_line <= finding.end_line
        and finding.start_line <= span.end_line
    )


def fuse_annotations(
    functions: list[FunctionSpan],
    findings: list[Finding],
    severity_filter: SeverityFilter | None = None,
    *,
    strip_prefix: str = "",
    orphans: list[Finding] | None = None,
) -> list[AnnotatedFunction]:
    """Attach findings to functions by path + line-range overlap.

    Counts record every attached finding by severity, qualifying or not;
    the vulnerable flag is set iff at least one qualifying finding attached.
    A finding overlapping k functions attaches to all k; findings attaching
    to none are appended to *orphans* when given.
    """
    severity_filter = severity_filter or SeverityFilter()
    by_path: dict[str, list[tuple[int, FunctionSpan]]] = {}
    for idx, span in enumerate(functions):
        key = normalize_path(span.source.path, strip_prefix)
        by_path.setdefault(key, []).append((idx, span))

    counts: list[dict[str, int]] = [{} for _ in functions]
    vulnerable = [False] * len(functions)
    for finding in findings:
        hit_any = False
        for idx, span in by_path.get(finding.path, ()):
            if span.start_line <= finding.end_line and finding.start_line <= span.end_line:
                hit_any = True
                counts[idx][finding.severity] = counts[idx].get(finding.severity, 0) + 1
                if severity_filter.qualifies(finding):
                    vulnerable[idx] = True
        if not hit_any and orphans is not None:
            orphans.append(finding)
    return [
        AnnotatedFunction(span=span, counts=counts[idx], vulnerable=vulnerable[idx])
        for idx, span in enumerate(functions)
    ]
