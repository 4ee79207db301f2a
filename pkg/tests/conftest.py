from __future__ import annotations

import random
from pathlib import Path

import pytest

from vulnpipe.extraction import FunctionSpan, SourceFile

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def toyrepo() -> Path:
    return FIXTURES / "toyrepo"


def span_from_tokens(tokens, path="f.php", name="f", start_line=1):
    """Build a span whose token sequence is exactly *tokens*.

    Bodies are space-joined identifiers/numbers, which the lexer returns
    verbatim one token each.
    """
    body = " ".join(tokens) if tokens else " "
    return FunctionSpan(
        source=SourceFile(repo_url="r", commit_id="c", path=path, content=""),
        name=name,
        start_line=start_line,
        end_line=start_line,
        start_byte=0,
        end_byte=len(body.encode("utf-8")),
        body=body,
    )


def make_span(path, start_line, end_line, name=None, repo_url="r", commit_id="c"):
    """Positional-only span for overlap tests; body content is irrelevant."""
    return FunctionSpan(
        source=SourceFile(repo_url=repo_url, commit_id=commit_id, path=path, content=""),
        name=name or f"fn_{path.replace('/', '_')}_{start_line}",
        start_line=start_line,
        end_line=end_line,
        start_byte=(start_line - 1) * 10,
        end_byte=end_line * 10,
        body=f"function x{start_line}() {{ return {start_line}; }}",
    )


def synth_dedup_corpus(rng: random.Random, n=200, clone_pairs=5, near_pairs=5):
    """Corpus of unique-token functions with planted clone and near-miss pairs.

    Each base function uses a private token namespace, so only planted
    pairs can share windows.  Clones are byte-identical (Jaccard 1.0).
    Near misses copy the original but replace its last 1-2 (distinct)
    tokens with fresh ones: for lengths 40..80 that pins the set Jaccard
    to (L-k)/(L+k) in [0.9048, 0.9753] while still sharing a >=38-token
    window, so they are candidates that must survive the 0.99 gate.

    Returns (corpus, expected_removed) where expected_removed maps the
    corpus index of each planted clone copy to its original's index.
    """
    n_base = n - clone_pairs - near_pairs
    token_lists = []
    for i in range(n_base):
        length = rng.randint(40, 80)
        token_lists.append([f"f{i}_t{j}" for j in range(length)])

    entries = [("base", i, token_lists[i]) for i in range(n_base)]
    originals = rng.sample(range(n_base), clone_pairs + near_pairs)
    for k, orig in enumerate(originals[:clone_pairs]):
        entries.append(("clone", orig, list(token_lists[orig])))
    for k, orig in enumerate(originals[clone_pairs:]):
        base = token_lists[orig]
        replaced = rng.randint(1, 2)
        near = base[:-replaced] + [f"n{orig}_{j}" for j in range(replaced)]
        entries.append(("near", orig, near))

    rng.shuffle(entries)
    corpus = []
    position = {}
    for idx, (kind, orig, tokens) in enumerate(entries):
        corpus.append(span_from_tokens(
            tokens, path=f"p{idx}.php", name=f"fn{idx}", start_line=idx + 1))
        if kind == "base":
            position[orig] = idx

    expected_removed = {}
    seen_clone_of = {}
    for idx, (kind, orig, _tokens) in enumerate(entries):
        if kind != "clone":
            continue
        base_pos = position[orig]
        first, second = min(base_pos, idx), max(base_pos, idx)
        # keep-first: the later of the pair is removed in favor of the earlier
        expected_removed[second] = first
        seen_clone_of[orig] = idx
    return corpus, expected_removed


def token_windows(span: FunctionSpan, w: int) -> set:
    toks = span.tokens
    return {toks[i:i + w] for i in range(len(toks) - w + 1)}


def oracle_dedup(corpus, cfg):
    """Brute-force keep-first sweep over all ordered pairs."""
    from vulnpipe.dedup import jaccard

    wins = [token_windows(s, cfg.window_size) for s in corpus]
    kept, removed = [], []
    for j in range(len(corpus)):
        representative = None
        for i in kept:
            if wins[i] & wins[j] and jaccard(corpus[i], corpus[j]) >= cfg.jaccard_threshold:
                representative = i
                break
        if representative is None:
            kept.append(j)
        else:
            removed.append((j, representative))
    return kept, removed


def synth_fusion_case(rng: random.Random, n_functions=100, n_findings=50):
    """Random spans and findings over a handful of shared file paths."""
    from vulnpipe.annotation import TAXONOMY, Finding, Tool

    paths = [f"src/m{k}.php" for k in range(6)]
    functions = []
    for i in range(n_functions):
        start = rng.randint(1, 400)
        functions.append(make_span(
            rng.choice(paths), start, start + rng.randint(0, 30),
            name=f"fn{i}"))
    findings = []
    for i in range(n_findings):
        tool = rng.choice([Tool.ANALYZER_A, Tool.ANALYZER_B])
        severity = rng.choice(sorted(TAXONOMY[tool]))
        start = rng.randint(1, 430)
        findings.append(Finding(
            tool=tool, rule_id=f"rule{i}", severity=severity,
            path=rng.choice(paths), start_line=start,
            end_line=start + rng.randint(0, 5)))
    return functions, findings


def oracle_fuse(functions, findings, severity_filter):
    """All-pairs overlap oracle for annotation fusion."""
    counts = [dict() for _ in functions]
    vulnerable = [False] * len(functions)
    for f in findings:
        for i, span in enumerate(functions):
            if span.source.path == f.path and \
                    span.start_line <= f.end_line and f.start_line <= span.end_line:
                counts[i][f.severity] = counts[i].get(f.severity, 0) + 1
                if f.severity in severity_filter.qualifying.get(f.tool, frozenset()):
                    vulnerable[i] = True
    return counts, vulnerable
