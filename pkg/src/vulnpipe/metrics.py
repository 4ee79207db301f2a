"""Confusion counts, precision/recall/F1, and the cross-domain matrix.

Positive class is vulnerable (1).  Zero-division conventions keep every
table cell total: precision is 0 when TP+FP=0, recall is 0 when TP+FN=0,
and F1 is 0 when P+R=0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DataError

CellId = tuple[str, str, str]  # (trained_on, tested_on, strategy)


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricsReport:
    precision: float
    recall: float
    f1: float
    counts: ConfusionCounts
    cell: CellId | None = None

    def to_dict(self) -> dict:
        d = {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "counts": {"tp": self.counts.tp, "fp": self.counts.fp,
                       "fn": self.counts.fn, "tn": self.counts.tn},
        }
        if self.cell is not None:
            d["trained_on"], d["tested_on"], d["strategy"] = self.cell
        return d


def confusion(labels: Sequence[int], predictions: Sequence[int]) -> ConfusionCounts:
    if len(labels) != len(predictions):
        raise DataError(f"length mismatch: {len(labels)} labels vs "
                        f"{len(predictions)} predictions")
    if not labels:
        raise DataError("cannot evaluate empty label vectors")
    tp = fp = fn = tn = 0
    for y, p in zip(labels, predictions):
        if y not in (0, 1) or p not in (0, 1):
            raise DataError(f"labels and predictions must be 0/1, got ({y}, {p})")
        if y == 1 and p == 1:
            tp += 1
        elif y == 0 and p == 1:
            fp += 1
        elif y == 1 and p == 0:
            fn += 1
        else:
            tn += 1
    return ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn)


def prf(counts: ConfusionCounts, cell: CellId | None = None) -> MetricsReport:
    precision = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp else 0.0
    recall = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return MetricsReport(precision=precision, recall=recall, f1=f1,
                         counts=counts, cell=cell)


def cross_domain_matrix(
    cells: Sequence[tuple[str, str, str, Sequence[int], Sequence[int]]],
) -> list[MetricsReport]:
    """One MetricsReport per (trained_on, tested_on, strategy) cell."""
    seen: set[CellId] = set()
    reports = []
    for trained_on, tested_on, strategy, labels, predictions in cells:
        cell: CellId = (trained_on, tested_on, strategy)
        if cell in seen:
            raise DataError(f"duplicate cell id: {cell}")
        seen.add(cell)
        reports.append(prf(confusion(labels, predictions), cell=cell))
    return reports


def matrix_to_dict(reports: Sequence[MetricsReport]) -> dict:
    return {"cells": [r.to_dict() for r in reports]}


def matrix_to_table(reports: Sequence[MetricsReport]) -> str:
    """Human-readable table, grouped by the fine-tuning dataset."""
    if not reports:
        return "(no cells)\n"
    header = f"{'trained_on':<14} {'tested_on':<14} {'strategy':<10} " \
             f"{'precision':>9} {'recall':>9} {'f1':>9}"
    lines = [header, "-" * len(header)]
    last_group = None
    for r in sorted(reports, key=lambda r: r.cell or ("", "", "")):
        trained_on, tested_on, strategy = r.cell or ("-", "-", "-")
        if last_group is not None and trained_on != last_group:
            lines.append("")
        last_group = trained_on
        lines.append(
            f"{trained_on:<14} {tested_on:<14} {strategy:<10} "
            f"{r.precision:>9.4f} {r.recall:>9.4f} {r.f1:>9.4f}")
    return "\n".join(lines) + "\n"
