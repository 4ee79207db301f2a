"""Diff-driven review: flag vulnerable functions touched by a change set.

The flow parses a unified diff into changed new-file lines, extracts
functions from the source-branch checkout for each touched file, keeps the
spans overlapping a changed line, scores them in one batch, and renders a
machine payload plus a human comment.  The checkout is never mutated.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .annotation import normalize_path
from .errors import DiffParseError
from .extraction import (
    ExtractionConfig,
    FunctionSpan,
    SourceFile,
    WarningRecord,
    extract_functions,
)
from .scoring import ScoreItem, ScoreRequest, Scorer, score_batch

DEFAULT_THRESHOLD = 0.5

_HUNK_RE = re.compile(r"^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@")


@dataclass
class ChangedLines:
    """Per-file sets of 1-based line numbers changed in the new version."""

    files: dict[str, set[int]] = field(default_factory=dict)

    def add(self, path: str, line: int) -> None:
        self.files.setdefault(path, set()).add(max(1, line))

    def to_dict(self) -> dict:
        return {path: sorted(lines) for path, lines in sorted(self.files.items())}


@dataclass
class ReviewFinding:
    path: str
    name: str | None
    start_line: int
    end_line: int
    score: float
    flagged: bool
    threshold: float

    def to_dict(self) -> dict:
        return {
            "path": self.path,
            "name": self.name,
            "start_line": self.start_line,
            "end_line": self.end_line,
            "score": self.score,
            "flagged": self.flagged,
            "threshold": self.threshold,
        }


def _strip_diff_path(raw: str) -> str | None:
    raw = raw.strip()
    if raw.startswith('"') and raw.endswith('"') and len(raw) >= 2:
        raw = raw[1:-1]
    if raw == "/dev/null":
        return None
    if raw.startswith("a/") or raw.startswith("b/"):
        raw = raw[2:]
    return normalize_path(raw)


def parse_unified_diff(text: str) -> ChangedLines:
    """Map a unified diff to changed new-file lines per file.

    Added lines record their new-file line number; a hunk that only deletes
    records the hunk's new-file anchor so shrunken code is still reviewed.
    Renames follow the new path.  A malformed hunk header raises
    DiffParseError with its line number.
    """
    changes = ChangedLines()
    path: str | None = None
    old_left = new_left = 0
    new_pos = 0
    hunk_added: list[int] = []
    hunk_deleted = 0
    hunk_anchor = 0
    in_hunk = False

    def close_hunk() -> None:
        nonlocal in_hunk
        if in_hunk and path is not None:
            for added_line in hunk_added:
                changes.add(path, added_line)
            if not hunk_added and hunk_deleted:
                changes.add(path, hunk_anchor)
        in_hunk = False

    for lineno, line in enumerate(text.splitlines(), start=1):
        if in_hunk and (old_left > 0 or new_left > 0):
            if line.startswith("+"):
                hunk_added.append(new_pos)
                new_pos += 1
                new_left -= 1
            elif line.startswith("-"):
                hunk_deleted += 1
                old_left -= 1
            elif line.startswith("\\"):
                pass  # "\ No newline at end of file"
            else:  # context line (including empty)
                new_pos += 1
                old_left -= 1
                new_left -= 1
            continue
        if in_hunk:
            close_hunk()
        if line.startswith("diff --git"):
            path = None
            continue
        if line.startswith("rename to "):
            path = _strip_diff_path(line[len("rename to "):])
            continue
        if line.startswith("+++ "):
            path = _strip_diff_path(line[4:])
            continue
        if line.startswith("@@"):
            m = _HUNK_RE.match(line)
            if not m:
                raise DiffParseError(f"malformed hunk header: {line!r}", lineno)
            old_left = int(m.group(2)) if m.group(2) is not None else 1
            new_pos = int(m.group(3))
            new_left = int(m.group(4)) if m.group(4) is not None else 1
            hunk_added = []
            hunk_deleted = 0
            hunk_anchor = new_pos
            in_hunk = True
            continue
    close_hunk()
    return changes


def changed_functions(
    tree: str | Path,
    changes: ChangedLines,
    cfg: ExtractionConfig | None = None,
    *,
    warnings: list[WarningRecord] | None = None,
) -> list[FunctionSpan]:
    """Extract functions from changed files and keep overlapping spans."""
    tree = Path(tree)
    cfg = cfg or ExtractionConfig()
    selected: list[FunctionSpan] = []
    for path in sorted(changes.files):
        lines = changes.files[path]
        file_path = tree / path
        if not file_path.is_file():
            if warnings is not None:
                warnings.append(WarningRecord(path, "changed file missing from tree"))
            continue
        source = SourceFile(
            repo_url="", commit_id="", path=path,
            content=file_path.read_bytes().decode("utf-8", errors="replace"),
        )
        for span in extract_functions(source, cfg, errors=warnings):
            if any(span.start_line <= ln <= span.end_line for ln in lines):
                selected.append(span)
    return selected


def run_review(
    tree: str | Path,
    diff_text: str,
    scorer: Scorer,
    threshold: float = DEFAULT_THRESHOLD,
    cfg: ExtractionConfig | None = None,
    *,
    warnings: list[WarningRecord] | None = None,
) -> list[ReviewFinding]:
    """Full review flow: diff -> changed functions -> scores -> findings."""
    changes = parse_unified_diff(diff_text)
    spans = changed_functions(tree, changes, cfg, warnings=warnings)
    if not spans:
        return []
    request = ScoreRequest(items=[
        ScoreItem(id=str(i), text=span.body) for i, span in enumerate(spans)
    ])
    response = score_batch(scorer, request)
    by_id = {item.id: item.p_vulnerable for item in response.items}
    findings = [
        ReviewFinding(
            path=span.source.path,
            name=span.name,
            start_line=span.start_line,
            end_line=span.end_line,
            score=by_id[str(i)],
            flagged=by_id[str(i)] >= threshold,
            threshold=threshold,
        )
        for i, span in enumerate(spans)
    ]
    findings.sort(key=lambda f: (f.path, f.start_line))
    return findings


def render_review(findings: list[ReviewFinding]) -> tuple[str, str]:
    """Render findings as (JSON payload, markdown comment).

    Ordering is stable by (path, start_line); reruns over identical inputs
    produce byte-identical output.
    """
    ordered = sorted(findings, key=lambda f: (f.path, f.start_line))
    payload = json.dumps([f.to_dict() for f in ordered],
                         indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    flagged = [f for f in ordered if f.flagged]
    lines = ["## Vulnerability review", ""]
    if not findings:
        lines += ["No changed functions to review.", ""]
    elif not flagged:
        lines += [f"No flagged functions ({len(ordered)} reviewed).", ""]
    else:
        threshold = flagged[0].threshold
        lines += [
            f"{len(flagged)} of {len(ordered)} changed function(s) flagged "
            f"at threshold {threshold:g}.",
            "",
        ]
        for f in flagged:
            name = f"`{f.name}`" if f.name else "(anonymous)"
            lines += [
                f"### {name} in `{f.path}` (lines {f.start_line}-{f.end_line})",
                "",
                f"- score: {f.score:.4f}",
                f"- threshold: {f.threshold:g}",
                "",
            ]
    return payload, "\n".join(lines)
