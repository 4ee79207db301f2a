"""Corpus-wide duplicate removal.

Two-stage filter: a sliding-window pass proposes candidate pairs (cheap,
hash-indexed, collisions confirmed by direct window comparison), then a
Jaccard check over token *sets* decides removal.  The sweep keeps the first
occurrence in corpus order, so the same corpus order always yields the same
report.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .extraction import FunctionSpan

DEFAULT_WINDOW_SIZE = 30
DEFAULT_JACCARD_THRESHOLD = 0.99


@dataclass
class DedupConfig:
    window_size: int = DEFAULT_WINDOW_SIZE
    jaccard_threshold: float = DEFAULT_JACCARD_THRESHOLD

    def __post_init__(self) -> None:
        if self.window_size < 1:
            raise ValueError("window_size must be >= 1")
        if not 0.0 <= self.jaccard_threshold <= 1.0:
            raise ValueError("jaccard_threshold must be in [0, 1]")


@dataclass
class DedupReport:
    kept: list[FunctionSpan]
    removed: list[tuple[FunctionSpan, FunctionSpan]]  # (removed, retained)
    pair_count_examined: int
    kept_indices: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        def ref(span: FunctionSpan) -> dict:
            return {
                "repo_url": span.source.repo_url,
                "commit_id": span.source.commit_id,
                "path": span.source.path,
                "start_line": span.start_line,
            }

        return {
            "pair_count_examined": self.pair_count_examined,
            "kept": [ref(s) for s in self.kept],
            "removed": [
                {"removed": ref(r), "retained": ref(k)}
                for r, k in self.removed
            ],
        }


def jaccard(a: FunctionSpan, b: FunctionSpan) -> float:
    """Jaccard index of the two spans' token sets; both empty -> 1.0."""
    sa, sb = set(a.tokens), set(b.tokens)
    if not sa and not sb:
        return 1.0
    return len(sa & sb) / len(sa | sb)


def window_candidates(
    corpus: Sequence[FunctionSpan], cfg: DedupConfig | None = None
) -> set[tuple[int, int]]:
    """Index pairs (i < j) sharing at least one identical token window.

    Functions shorter than the window size produce no candidates.  Hash
    buckets are confirmed by direct window comparison, so collisions cannot
    create candidates.
    """
    cfg = cfg or DedupConfig()
    w = cfg.window_size
    buckets: dict[int, list[tuple[int, int]]] = {}
    for idx, span in enumerate(corpus):
        toks = span.tokens
        for pos in range(len(toks) - w + 1):
            buckets.setdefault(hash(toks[pos:pos + w]), []).append((idx, pos))
    pairs: set[tuple[int, int]] = set()
    for entries in buckets.values():
        if len(entries) < 2:
            continue
        # group bucket entries by actual window content
        groups: dict[tuple[str, ...], set[int]] = {}
        for idx, pos in entries:
            window = corpus[idx].tokens[pos:pos + w]
            groups.setdefault(window, set()).add(idx)
        for members in groups.values():
            ordered = sorted(members)
            for a in range(len(ordered)):
                for b in range(a + 1, len(ordered)):
                    pairs.add((ordered[a], ordered[b]))
    return pairs


def dedup_corpus(
    corpus: Sequence[FunctionSpan], cfg: DedupConfig | None = None
) -> DedupReport:
    """Remove duplicates, keeping the first span in corpus order.

    A span is removed iff it is a window candidate with an earlier *kept*
    span and its Jaccard index with that span meets the threshold; the
    earliest such kept span is the retained representative.
    """
    cfg = cfg or DedupConfig()
    candidates = window_candidates(corpus, cfg)
    partners: dict[int, list[int]] = {}
    for i, j in candidates:
        partners.setdefault(j, []).append(i)

    kept_indices: list[int] = []
    kept_set: set[int] = set()
    removed: list[tuple[FunctionSpan, FunctionSpan]] = []
    for j in range(len(corpus)):
        representative = None
        for i in sorted(partners.get(j, ())):
            if i in kept_set and jaccard(corpus[i], corpus[j]) >= cfg.jaccard_threshold:
                representative = i
                break
        if representative is None:
            kept_indices.append(j)
            kept_set.add(j)
        else:
            removed.append((corpus[j], corpus[representative]))
    return DedupReport(
        kept=[corpus[i] for i in kept_indices],
        removed=removed,
        pair_count_examined=len(candidates),
        kept_indices=kept_indices,
    )
