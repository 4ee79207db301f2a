from __future__ import annotations

import json

import pytest

from vulnpipe.errors import DiffParseError
from vulnpipe.extraction import ExtractionConfig, WarningRecord, extract_directory
from vulnpipe.review import (
    ReviewFinding,
    changed_functions,
    parse_unified_diff,
    render_review,
    run_review,
)
from vulnpipe.scoring import StubScorer


# ----------------------------------------------------------------- diff parse

def test_empty_diff():
    assert parse_unified_diff("").files == {}


def test_single_hunk_added_line():
    diff = """--- a/file.php
+++ b/file.php
@@ -1,3 +1,4 @@
 line one
+inserted
 line two
 line three
"""
    assert parse_unified_diff(diff).files == {"file.php": {2}}


def test_modification_records_new_line():
    diff = """--- a/f.php
+++ b/f.php
@@ -4,3 +4,3 @@
 ctx
-old body
+new body
 ctx
"""
    assert parse_unified_diff(diff).files == {"f.php": {5}}


def test_deleted_only_hunk_anchors_to_new_position():
    diff = """--- a/f.php
+++ b/f.php
@@ -10,3 +9,1 @@
 keep
-gone one
-gone two
"""
    assert parse_unified_diff(diff).files == {"f.php": {9}}


def test_two_file_diff_hand_annotated(fixtures_dir):
    diff = (fixtures_dir / "pr.diff").read_text()
    changes = parse_unified_diff(diff)
    # hand-traced from the fixture hunks
    assert changes.to_dict() == {"src/auth.php": [5, 6, 7], "util.php": [9, 10]}


def test_rename_follows_new_path():
    diff = """diff --git a/old/name.php b/new/name.php
similarity index 90%
rename from old/name.php
rename to new/name.php
--- a/old/name.php
+++ b/new/name.php
@@ -1,2 +1,3 @@
 <?php
+echo 1;
"""
    assert parse_unified_diff(diff).files == {"new/name.php": {2}}


def test_deleted_file_is_ignored():
    diff = """--- a/gone.php
+++ /dev/null
@@ -1,3 +0,0 @@
-<?php
-function f() {}
-
"""
    assert parse_unified_diff(diff).files == {}


def test_malformed_hunk_header_reports_line_number():
    diff = "--- a/f.php\n+++ b/f.php\n@@ bogus @@\n"
    with pytest.raises(DiffParseError, match="line 3"):
        parse_unified_diff(diff)


def test_hunk_header_without_counts():
    diff = "--- a/f.php\n+++ b/f.php\n@@ -3 +7 @@\n-x\n+y\n"
    assert parse_unified_diff(diff).files == {"f.php": {7}}


def test_no_newline_marker_ignored():
    diff = """--- a/f.php
+++ b/f.php
@@ -1,1 +1,1 @@
-old
+new
\\ No newline at end of file
"""
    assert parse_unified_diff(diff).files == {"f.php": {1}}


# ---------------------------------------------------------- changed functions

def test_change_inside_one_function_selects_it(toyrepo):
    from vulnpipe.review import ChangedLines
    changes = ChangedLines(files={"src/auth.php": {13}})  # inside start()
    spans = changed_functions(toyrepo, changes)
    assert [s.name for s in spans] == ["start"]


def test_change_between_functions_selects_nothing(toyrepo):
    from vulnpipe.review import ChangedLines
    changes = ChangedLines(files={"src/auth.php": {10}})  # blank line between
    assert changed_functions(toyrepo, changes) == []


def test_missing_file_warns_and_continues(toyrepo):
    from vulnpipe.review import ChangedLines
    warnings: list[WarningRecord] = []
    changes = ChangedLines(files={"not/there.php": {1}, "util.php": {9}})
    spans = changed_functions(toyrepo, changes, warnings=warnings)
    assert [s.name for s in spans] == ["run_query"]
    assert warnings[0].path == "not/there.php"


def test_selection_matches_overlap_oracle(toyrepo, fixtures_dir):
    diff = (fixtures_dir / "pr.diff").read_text()
    changes = parse_unified_diff(diff)
    selected = changed_functions(toyrepo, changes)
    all_spans = extract_directory(toyrepo)
    expected = [
        (s.source.path, s.name) for s in all_spans
        if any(s.start_line <= ln <= s.end_line
               for ln in changes.files.get(s.source.path, ()))
    ]
    assert [(s.source.path, s.name) for s in selected] == expected
    assert expected == [("src/auth.php", "check_password"), ("util.php", "run_query")]


# ------------------------------------------------------------------ run/render

def test_no_changed_functions_yields_empty(toyrepo):
    assert run_review(toyrepo, "", StubScorer()) == []


def test_single_changed_function_flagged(toyrepo):
    diff = """--- a/util.php
+++ b/util.php
@@ -9,2 +9,2 @@
-    $code = 'return ' . $expr . ';';
+    $code = 'return ' . trim($expr) . ';';
     return eval($code);
"""
    findings = run_review(toyrepo, diff, StubScorer(), threshold=0.5)
    assert len(findings) == 1
    f = findings[0]
    assert f.name == "run_query" and f.flagged and f.score == 0.95
    assert f.threshold == 0.5


def test_threshold_is_inclusive(toyrepo, fixtures_dir):
    diff = (fixtures_dir / "pr.diff").read_text()
    findings = run_review(toyrepo, diff, StubScorer(), threshold=0.95)
    flagged = [f for f in findings if f.flagged]
    assert [f.name for f in flagged] == ["run_query"]


def test_run_review_does_not_mutate_checkout(toyrepo, fixtures_dir):
    before = {p: p.read_bytes() for p in sorted(toyrepo.rglob("*.php"))}
    run_review(toyrepo, (fixtures_dir / "pr.diff").read_text(), StubScorer())
    after = {p: p.read_bytes() for p in sorted(toyrepo.rglob("*.php"))}
    assert before == after


def test_render_empty_findings():
    payload, md = render_review([])
    assert payload == "[]\n"
    assert "No changed functions" in md


def test_render_unflagged_stanza():
    f = ReviewFinding(path="a.php", name="f", start_line=1, end_line=3,
                      score=0.1, flagged=False, threshold=0.5)
    payload, md = render_review([f])
    assert "No flagged functions (1 reviewed)" in md


def test_render_orders_by_path_then_line():
    findings = [
        ReviewFinding(path="b.php", name="late", start_line=30, end_line=40,
                      score=0.9, flagged=True, threshold=0.5),
        ReviewFinding(path="b.php", name="early", start_line=2, end_line=9,
                      score=0.8, flagged=True, threshold=0.5),
        ReviewFinding(path="a.php", name="first", start_line=50, end_line=60,
                      score=0.7, flagged=True, threshold=0.5),
    ]
    payload, md = render_review(findings)
    names = [d["name"] for d in json.loads(payload)]
    assert names == ["first", "early", "late"]
    assert md.index("`first`") < md.index("`early`") < md.index("`late`")


def test_review_golden_outputs(toyrepo, fixtures_dir):
    diff = (fixtures_dir / "pr.diff").read_text()
    findings = run_review(toyrepo, diff, StubScorer(), 0.5)
    payload, md = render_review(findings)
    assert payload == (fixtures_dir / "golden" / "review_payload.json").read_text()
    assert md == (fixtures_dir / "golden" / "review_comment.md").read_text()


def test_review_payload_stable_across_runs(toyrepo, fixtures_dir):
    diff = (fixtures_dir / "pr.diff").read_text()
    first = render_review(run_review(toyrepo, diff, StubScorer(), 0.5))
    second = render_review(run_review(toyrepo, diff, StubScorer(), 0.5))
    assert first == second


def test_extraction_config_respected(toyrepo):
    from vulnpipe.review import ChangedLines
    cfg = ExtractionConfig(include_methods=False)
    changes = ChangedLines(files={"src/auth.php": {13}})
    assert changed_functions(toyrepo, changes, cfg) == []
