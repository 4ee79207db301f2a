"""Dataset materialization: CSV schema, seeded splits, class balancing.

The CSV schema keeps exactly what is needed to trace a function back to its
source plus the per-severity annotation counts::

    url,commit_id,file_path,start_line,end_line,Major,Critical,Blocker,Error,vulnerable

Splits are an 80/10/10 partition by default; records are sorted on their
identification tuple before the seeded shuffle so CSV row order can never
change an assignment.  Balancing applies to training partitions only.
"""

from __future__ import annotations

import csv
import enum
import io
import math
import random
from dataclasses import dataclass, field

from .annotation import AnnotatedFunction
from .errors import DataError

CSV_COLUMNS = ("url", "commit_id", "file_path", "start_line", "end_line",
               "Major", "Critical", "Blocker", "Error", "vulnerable")

COUNT_COLUMNS = ("Major", "Critical", "Blocker", "Error")

DEFAULT_RATIOS = (0.8, 0.1, 0.1)
MIN_SPLIT_SIZE = 10


class Split(enum.Enum):
    TRAIN = "train"
    VAL = "val"
    TEST = "test"


@dataclass
class DatasetRecord:
    url: str
    commit_id: str
    file_path: str
    start_line: int
    end_line: int
    major: int = 0
    critical: int = 0
    blocker: int = 0
    error: int = 0
    vulnerable: int = 0

    @property
    def key(self) -> tuple:
        """Identification tuple, sufficient to re-extract the function."""
        return (self.url, self.commit_id, self.file_path,
                self.start_line, self.end_line)

    @property
    def qualifying_total(self) -> int:
        return self.major + self.critical + self.blocker + self.error


def from_annotated(functions: list[AnnotatedFunction]) -> list[DatasetRecord]:
    """Convert fused annotations to dataset records (four count columns)."""
    records = []
    for fn in functions:
        span = fn.span
        records.append(DatasetRecord(
            url=span.source.repo_url,
            commit_id=span.source.commit_id,
            file_path=span.source.path,
            start_line=span.start_line,
            end_line=span.end_line,
            major=fn.counts.get("Major", 0),
            critical=fn.counts.get("Critical", 0),
            blocker=fn.counts.get("Blocker", 0),
            error=fn.counts.get("Error", 0),
            vulnerable=1 if fn.vulnerable else 0,
        ))
    return records


def write_csv(records: list[DatasetRecord]) -> bytes:
    # RFC 4180 line endings; with QUOTE_MINIMAL that also forces quoting of
    # fields containing bare \r or \n, which keeps round-trips byte-exact
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow([r.url, r.commit_id, r.file_path, r.start_line,
                         r.end_line, r.major, r.critical, r.blocker,
                         r.error, r.vulnerable])
    return buf.getvalue().encode("utf-8")


def read_csv(data: bytes) -> list[DatasetRecord]:
    reader = csv.reader(io.StringIO(data.decode("utf-8"), newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("empty CSV: missing header row")
    if tuple(header) != CSV_COLUMNS:
        for got, want in zip(header, CSV_COLUMNS):
            if got != want:
                raise DataError(f"CSV schema mismatch: expected column "
                                f"{want!r}, found {got!r}")
        raise DataError(f"CSV schema mismatch: expected {len(CSV_COLUMNS)} "
                        f"columns, found {len(header)}")
    records = []
    for row in reader:
        if len(row) != len(CSV_COLUMNS):
            raise DataError(f"row {len(records) + 2}: expected "
                            f"{len(CSV_COLUMNS)} fields, found {len(row)}")
        try:
            records.append(DatasetRecord(
                url=row[0], commit_id=row[1], file_path=row[2],
                start_line=int(row[3]), end_line=int(row[4]),
                major=int(row[5]), critical=int(row[6]), blocker=int(row[7]),
                error=int(row[8]), vulnerable=int(row[9]),
            ))
        except ValueError as exc:
            raise DataError(f"row {len(records) + 2}: {exc}")
    return records


@dataclass
class SplitAssignment:
    seed: int
    ratios: tuple[float, float, float]
    assignment: dict[tuple, Split]

    def records_for(self, records: list[DatasetRecord], split: Split) -> list[DatasetRecord]:
        return [r for r in records if self.assignment[r.key] is split]

    def to_dict(self) -> dict:
        splits: dict[str, list[list]] = {s.value: [] for s in Split}
        for key in sorted(self.assignment):
            splits[self.assignment[key].value].append(list(key))
        return {"seed": self.seed, "ratios": list(self.ratios), "splits": splits}


def split(
    records: list[DatasetRecord],
    ratios: tuple[float, float, float] = DEFAULT_RATIOS,
    seed: int = 0,
) -> SplitAssignment:
    """Seeded train/val/test partition.

    Sorts on the identification tuple, shuffles under the seed, and cuts at
    floor(train), floor(val), remainder-to-test boundaries.
    """
    n = len(records)
    if n < MIN_SPLIT_SIZE:
        raise DataError(f"need at least {MIN_SPLIT_SIZE} records to split, got {n}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise DataError(f"ratios must sum to 1, got {sum(ratios)}")
    keys = sorted(r.key for r in records)
    for a, b in zip(keys, keys[1:]):
        if a == b:
            raise DataError(f"duplicate identification tuple: {a}")
    rng = random.Random(seed)
    rng.shuffle(keys)
    n_train = math.floor(ratios[0] * n)
    n_val = math.floor(ratios[1] * n)
    assignment: dict[tuple, Split] = {}
    for pos, key in enumerate(keys):
        if pos < n_train:
            assignment[key] = Split.TRAIN
        elif pos < n_train + n_val:
            assignment[key] = Split.VAL
        else:
            assignment[key] = Split.TEST
    return SplitAssignment(seed=seed, ratios=tuple(ratios), assignment=assignment)


class BalanceKind(enum.Enum):
    NB = "NB"      # no balancing
    USC = "USC"    # undersample both classes to a global constant
    URSC = "URSC"  # undersample to this set's smaller class
    WLF = "WLF"    # weighted loss, natural distribution kept


@dataclass
class BalanceStrategy:
    kind: BalanceKind
    global_min: int | None = None  # USC only

    def __post_init__(self) -> None:
        if self.kind is BalanceKind.USC:
            if self.global_min is None or self.global_min < 1:
                raise ValueError("USC requires global_min >= 1")
        elif self.global_min is not None:
            raise ValueError(f"global_min only applies to USC, not {self.kind.value}")

    @classmethod
    def parse(cls, text: str, global_min: int | None = None) -> "BalanceStrategy":
        kind = BalanceKind(text.strip().upper())
        return cls(kind, global_min if kind is BalanceKind.USC else None)


@dataclass
class ClassWeights:
    """Inverse-class-frequency loss weights: w_c = N_total / (2 * N_c)."""

    weight_vulnerable: float
    weight_nonvulnerable: float

    def to_dict(self) -> dict:
        return {
            "weight_vulnerable": self.weight_vulnerable,
            "weight_nonvulnerable": self.weight_nonvulnerable,
        }


def balance(
    train: list[DatasetRecord],
    strategy: BalanceStrategy,
    seed: int = 0,
) -> list[DatasetRecord] | ClassWeights:
    """Apply a balancing strategy to a training partition.

    NB returns the records unchanged; USC/URSC subsample both classes
    (uniform, seeded, original order preserved); WLF returns loss weights
    and leaves the records alone.  Never use on val/test partitions.
    """
    if strategy.kind is BalanceKind.NB:
        return list(train)
    pos_idx = [i for i, r in enumerate(train) if r.vulnerable == 1]
    neg_idx = [i for i, r in enumerate(train) if r.vulnerable != 1]
    if not pos_idx or not neg_idx:
        missing = "vulnerable" if not pos_idx else "non-vulnerable"
        raise DataError(f"{strategy.kind.value} needs both classes; "
                        f"training set has no {missing} records")
    if strategy.kind is BalanceKind.WLF:
        total = len(train)
        return ClassWeights(
            weight_vulnerable=total / (2 * len(pos_idx)),
            weight_nonvulnerable=total / (2 * len(neg_idx)),
        )
    if strategy.kind is BalanceKind.USC:
        target = strategy.global_min or 0
        if len(pos_idx) < target or len(neg_idx) < target:
            raise DataError(
                f"USC global_min={target} exceeds a class size "
                f"(vulnerable={len(pos_idx)}, non-vulnerable={len(neg_idx)})")
    else:  # URSC
        target = min(len(pos_idx), len(neg_idx))
    rng = random.Random(seed)

    def sample(indices: list[int]) -> list[int]:
        return indices if len(indices) == target else rng.sample(indices, target)

    keep = sorted(sample(pos_idx) + sample(neg_idx))
    return [train[i] for i in keep]


@dataclass
class QualityCheck:
    attribute: str
    passed: bool
    offenders: list[dict] = field(default_factory=list)
    note: str = ""


@dataclass
class QualityReport:
    checks: list[QualityCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [
                {"attribute": c.attribute, "passed": c.passed,
                 "offenders": c.offenders, "note": c.note}
                for c in self.checks
            ],
        }


def dataset_quality_report(records: list[DatasetRecord]) -> QualityReport:
    """Report-only checks over the dataset quality attributes.

    Uniqueness: no duplicate (url, commit, path, start_line) tuples.
    Completeness: identification fields present, sane line ranges (url and
    commit may legitimately be empty for local or redacted trees).
    Consistency (accuracy proxy): label agrees with the qualifying counts.
    """
    def offender(i: int, r: DatasetRecord) -> dict:
        return {"row": i, "key": list(r.key)}

    seen: dict[tuple, int] = {}
    dup = []
    for i, r in enumerate(records):
        short = (r.url, r.commit_id, r.file_path, r.start_line)
        if short in seen:
            dup.append(offender(i, r))
        else:
            seen[short] = i

    incomplete = [offender(i, r) for i, r in enumerate(records)
                  if not r.file_path or r.start_line < 1 or r.end_line < r.start_line]

    inconsistent = [offender(i, r) for i, r in enumerate(records)
                    if (r.vulnerable == 1) != (r.qualifying_total >= 1)
                    or r.vulnerable not in (0, 1)
                    or min(r.major, r.critical, r.blocker, r.error) < 0]

    checks = [
        QualityCheck("uniqueness", not dup, dup),
        QualityCheck("completeness", not incomplete, incomplete),
        QualityCheck("consistency", not inconsistent, inconsistent),
        QualityCheck("accuracy", not inconsistent, inconsistent,
                     note="proxied by label/count consistency"),
    ]
    return QualityReport(checks)
