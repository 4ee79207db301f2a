from __future__ import annotations

import json

import pytest

from model_service import load_class_weights, load_csv_corpus, load_jsonl_corpus
from model_service.data import LabeledCorpus


def test_jsonl_corpus_loads_bodies_and_labels(tmp_path):
    path = tmp_path / "annotated.jsonl"
    rows = [
        {"repo_url": "u", "commit_id": "c", "path": "a.php", "name": "f",
         "start_line": 1, "end_line": 3, "start_byte": 0, "end_byte": 10,
         "body": "function f() { eval($x); }", "counts": {"Error": 1},
         "vulnerable": True},
        {"repo_url": "u", "commit_id": "c", "path": "b.php", "name": "g",
         "start_line": 5, "end_line": 7, "start_byte": 0, "end_byte": 10,
         "body": "function g() { return 1; }", "counts": {},
         "vulnerable": False},
    ]
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
    corpus = load_jsonl_corpus(path)
    assert corpus.labels == [1, 0]
    assert "eval" in corpus.texts[0]
    assert corpus.class_counts() == (1, 1)


def test_jsonl_missing_label_rejected(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text(json.dumps({"body": "x"}) + "\n")
    with pytest.raises(ValueError, match="vulnerable"):
        load_jsonl_corpus(path)


def test_csv_join_recovers_text(tmp_path):
    csv_path = tmp_path / "data.csv"
    csv_path.write_text(
        "url,commit_id,file_path,start_line,end_line,"
        "Major,Critical,Blocker,Error,vulnerable\r\n"
        "u,c,a.php,1,3,0,0,0,1,1\r\n"
        "u,c,b.php,5,7,0,0,0,0,0\r\n")
    bodies = tmp_path / "fns.jsonl"
    bodies.write_text("\n".join([
        json.dumps({"repo_url": "u", "commit_id": "c", "path": "a.php",
                    "start_line": 1, "body": "function f() { eval($x); }"}),
        json.dumps({"repo_url": "u", "commit_id": "c", "path": "b.php",
                    "start_line": 5, "body": "function g() {}"}),
    ]) + "\n")
    corpus = load_csv_corpus(csv_path, bodies)
    assert corpus.labels == [1, 0]
    assert corpus.texts[1] == "function g() {}"


def test_csv_join_missing_body_rejected(tmp_path):
    csv_path = tmp_path / "data.csv"
    csv_path.write_text(
        "url,commit_id,file_path,start_line,end_line,"
        "Major,Critical,Blocker,Error,vulnerable\r\n"
        "u,c,a.php,1,3,0,0,0,1,1\r\n")
    bodies = tmp_path / "fns.jsonl"
    bodies.write_text("")
    with pytest.raises(ValueError, match="no body"):
        load_csv_corpus(csv_path, bodies)


def test_csv_header_checked(tmp_path):
    csv_path = tmp_path / "data.csv"
    csv_path.write_text("wrong,header\r\n")
    bodies = tmp_path / "empty.jsonl"
    bodies.write_text("")
    with pytest.raises(ValueError, match="header"):
        load_csv_corpus(csv_path, bodies)


def test_class_weights_round_trip(tmp_path):
    path = tmp_path / "weights.json"
    path.write_text(json.dumps({
        "strategy": "WLF", "seed": 0,
        "weight_vulnerable": 5.0, "weight_nonvulnerable": 0.5555555555555556}))
    assert load_class_weights(path) == (5.0, 0.5555555555555556)


def test_class_weights_validation(tmp_path):
    path = tmp_path / "weights.json"
    path.write_text(json.dumps({"weight_vulnerable": 5.0}))
    with pytest.raises(ValueError, match="weight_nonvulnerable"):
        load_class_weights(path)
    path.write_text(json.dumps({"weight_vulnerable": -1,
                                "weight_nonvulnerable": 2}))
    with pytest.raises(ValueError, match="positive"):
        load_class_weights(path)


def test_corpus_alignment_checked():
    with pytest.raises(ValueError):
        LabeledCorpus(["a"], [1, 0])


def test_class_weights_reject_non_wlf_manifest(tmp_path):
    path = tmp_path / "weights.json"
    path.write_text(json.dumps({"strategy": "URSC", "weight_vulnerable": 1.0,
                                "weight_nonvulnerable": 1.0}))
    with pytest.raises(ValueError, match="not WLF"):
        load_class_weights(path)
