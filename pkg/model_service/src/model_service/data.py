"""Loaders for the pipeline's external data formats.

This service deliberately does not import the pipeline package; it consumes
its documented file formats instead:

- functions / annotated-functions JSON Lines: one object per line carrying
  at least ``body`` and, for labeled rows, ``vulnerable``;
- the dataset CSV (header ``url,commit_id,file_path,start_line,end_line,
  Major,Critical,Blocker,Error,vulnerable``), which holds identification
  fields but no text and is therefore joined against a bodies JSONL;
- the class-weights JSON written by the balancing step
  (``weight_vulnerable`` / ``weight_nonvulnerable``).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

CSV_HEADER = ["url", "commit_id", "file_path", "start_line", "end_line",
              "Major", "Critical", "Blocker", "Error", "vulnerable"]


@dataclass
class LabeledCorpus:
    texts: list[str]
    labels: list[int]

    def __post_init__(self) -> None:
        if len(self.texts) != len(self.labels):
            raise ValueError("texts and labels must align")

    def __len__(self) -> int:
        return len(self.texts)

    def class_counts(self) -> tuple[int, int]:
        pos = sum(self.labels)
        return pos, len(self.labels) - pos


def load_jsonl_corpus(path: str | Path) -> LabeledCorpus:
    """Load (body, vulnerable) pairs from an annotated-functions JSONL."""
    texts, labels = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            if "body" not in row:
                raise ValueError(f"{path}:{lineno}: row has no 'body'")
            if "vulnerable" not in row:
                raise ValueError(f"{path}:{lineno}: row has no 'vulnerable'")
            texts.append(row["body"])
            labels.append(1 if row["vulnerable"] else 0)
    return LabeledCorpus(texts, labels)


def _body_key(row: dict) -> tuple:
    return (row.get("repo_url", row.get("url", "")), row.get("commit_id", ""),
            row.get("path", row.get("file_path", "")), int(row["start_line"]))


def load_csv_corpus(csv_path: str | Path, bodies_jsonl: str | Path) -> LabeledCorpus:
    """Join the dataset CSV with a functions JSONL to recover text + label."""
    bodies: dict[tuple, str] = {}
    with open(bodies_jsonl, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            bodies[_body_key(row)] = row["body"]

    texts, labels = [], []
    with open(csv_path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header: {header}")
        for row in reader:
            key = (row[0], row[1], row[2], int(row[3]))
            if key not in bodies:
                raise ValueError(f"no body for record {key}")
            texts.append(bodies[key])
            labels.append(int(row[9]))
    return LabeledCorpus(texts, labels)


def load_class_weights(path: str | Path) -> tuple[float, float]:
    """Read (weight_vulnerable, weight_nonvulnerable) from a weights JSON.

    Weights only exist under the weighted-loss strategy, so a manifest
    declaring any other strategy is rejected.
    """
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    strategy = doc.get("strategy")
    if strategy is not None and strategy != "WLF":
        raise ValueError(f"weights JSON declares strategy {strategy!r}, not WLF")
    try:
        w_pos = float(doc["weight_vulnerable"])
        w_neg = float(doc["weight_nonvulnerable"])
    except KeyError as exc:
        raise ValueError(f"weights JSON is missing {exc}")
    if w_pos <= 0 or w_neg <= 0:
        raise ValueError("class weights must be positive")
    return w_pos, w_neg
