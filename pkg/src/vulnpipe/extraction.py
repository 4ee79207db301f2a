"""Enumerate source files and extract function spans from PHP code.

A span covers one top-level function-like declaration: free functions and
class/trait/enum methods by default.  Nested closures stay part of the
enclosing span so each analyzer-mappable region is one function; switches on
:class:`ExtractionConfig` open up anonymous and nested extraction.

Extraction is deterministic and pure per file, so callers may parallelize
over files as long as results are merged back in path order.
"""

from __future__ import annotations

import fnmatch
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

from . import phplex
from .phplex import IDENT, LexToken

logger = logging.getLogger(__name__)

DEFAULT_EXTENSIONS = ("php",)
DEFAULT_IGNORE_GLOBS = ("vendor/*", "node_modules/*", ".git/*")

_MODIFIERS = {"public", "protected", "private", "static", "abstract",
              "final", "readonly"}
_CLASS_OPENERS = {"class", "interface", "trait", "enum"}
# tokens after which 'function' is a name or import, not a declaration
_NOT_A_DECL_AFTER = {"use", "::", "->", "?->", "new"}


@dataclass
class ExtractionConfig:
    extensions: tuple[str, ...] = DEFAULT_EXTENSIONS
    ignore_globs: tuple[str, ...] = DEFAULT_IGNORE_GLOBS
    include_methods: bool = True
    include_anonymous: bool = False
    include_nested: bool = False


@dataclass
class SourceFile:
    """One file of a repository checkout.

    ``commit_id`` may be empty for plain local trees.  ``content`` is the
    replacement-decoded text; byte offsets elsewhere refer to its UTF-8
    encoding (identical to the on-disk bytes for valid UTF-8 files).
    """

    repo_url: str
    commit_id: str
    path: str
    content: str

    def __post_init__(self) -> None:
        if not self.path or Path(self.path).is_absolute():
            raise ValueError(f"path must be non-empty and relative: {self.path!r}")


@dataclass
class FunctionSpan:
    """An extracted function with provenance and its token sequence.

    Lines are 1-based inclusive; ``body`` equals the UTF-8 content slice
    ``[start_byte, end_byte)``; ``tokens`` is recomputed from ``body`` so it
    is always a pure function of it.
    """

    source: SourceFile
    name: str | None
    start_line: int
    end_line: int
    start_byte: int
    end_byte: int
    body: str
    tokens: tuple[str, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.start_line > self.end_line:
            raise ValueError("start_line must be <= end_line")
        if self.start_byte >= self.end_byte:
            raise ValueError("start_byte must be < end_byte")
        self.tokens = tuple(phplex.tokenize(self.body))

    def to_dict(self) -> dict:
        return {
            "repo_url": self.source.repo_url,
            "commit_id": self.source.commit_id,
            "path": self.source.path,
            "name": self.name,
            "start_line": self.start_line,
            "end_line": self.end_line,
            "start_byte": self.start_byte,
            "end_byte": self.end_byte,
            "body": self.body,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FunctionSpan":
        source = SourceFile(
            repo_url=d.get("repo_url", ""),
            commit_id=d.get("commit_id", ""),
            path=d["path"],
            content="",
        )
        return cls(
            source=source,
            name=d.get("name"),
            start_line=d["start_line"],
            end_line=d["end_line"],
            start_byte=d["start_byte"],
            end_byte=d["end_byte"],
            body=d["body"],
        )


@dataclass
class WarningRecord:
    path: str
    reason: str


def enumerate_files(
    root: str | Path,
    extensions: set[str] | tuple[str, ...] = DEFAULT_EXTENSIONS,
    *,
    ignore_globs: tuple[str, ...] = DEFAULT_IGNORE_GLOBS,
    repo_url: str = "",
    commit_id: str = "",
    warnings: list[WarningRecord] | None = None,
) -> list[SourceFile]:
    """List matching files under *root* in lexicographic path order.

    Globs are fnmatch patterns tested against the relative POSIX path.
    Unreadable files are skipped with a warning record; an unreadable root
    raises OSError.
    """
    root = Path(root)
    if not root.is_dir():
        raise NotADirectoryError(f"root is not a readable directory: {root}")
    exts = {e.lstrip(".").lower() for e in extensions}
    rel_paths = []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames.sort()
        for fname in filenames:
            rel = (Path(dirpath) / fname).relative_to(root).as_posix()
            if fname.rsplit(".", 1)[-1].lower() not in exts or "." not in fname:
                continue
            if any(fnmatch.fnmatch(rel, g) for g in ignore_globs):
                continue
            rel_paths.append(rel)
    files = []
    for rel in sorted(rel_paths):
        try:
            raw = (root / rel).read_bytes()
        except OSError as exc:
            logger.warning("skipping unreadable file %s: %s", rel, exc)
            if warnings is not None:
                warnings.append(WarningRecord(rel, str(exc)))
            continue
        files.append(SourceFile(
            repo_url=repo_url,
            commit_id=commit_id,
            path=rel,
            content=raw.decode("utf-8", errors="replace"),
        ))
    return files


@dataclass
class _FuncDecl:
    name: str | None
    decl_start: int  # token index of first modifier or 'function'
    nested: bool
    member: bool


def _parse_function_header(
    toks: list[LexToken], i: int
) -> tuple[_FuncDecl | None, int] | None:
    """Parse a function header at token *i* ('function').

    Returns (decl, body_open_index) for a function with a body,
    (None, resume_index) for a bodyless declaration, or None when the
    header does not parse (treat as a non-declaration).
    """
    n = len(toks)
    k = i + 1
    if k < n and toks[k].text == "&":
        k += 1
    name = None
    if k < n and toks[k].kind == IDENT:
        name = toks[k].text
        k += 1
    if k >= n or toks[k].text != "(":
        return None
    depth = 0
    while k < n:
        t = toks[k].text
        if t == "(":
            depth += 1
        elif t == ")":
            depth -= 1
        elif depth == 0:
            if t == "{":
                break
            if t == ";":
                return None, k + 1
            if t == "}":
                return None
        k += 1
    if k >= n:
        return None
    decl_start = i
    while decl_start > 0 and toks[decl_start - 1].kind == IDENT \
            and toks[decl_start - 1].text.lower() in _MODIFIERS:
        decl_start -= 1
    return _FuncDecl(name, decl_start, nested=False, member=False), k


def _scan_functions(
    toks: list[LexToken], cfg: ExtractionConfig
) -> list[tuple[int, int, str | None]]:
    """Single-pass scan for (start_token, end_token, name) triples."""
    out = []
    stack: list[tuple[str, _FuncDecl | None]] = []
    pending: tuple[str, _FuncDecl | None] | None = None
    prev: str | None = None
    i = 0
    n = len(toks)
    while i < n:
        t = toks[i]
        text = t.text
        if t.kind == IDENT:
            low = text.lower()
            if low == "function" and (prev is None or prev.lower() not in _NOT_A_DECL_AFTER):
                parsed = _parse_function_header(toks, i)
                if parsed is not None:
                    decl, idx = parsed
                    if decl is None:  # bodyless: abstract/interface signature
                        i = idx
                        prev = ";"
                        continue
                    decl.nested = any(kind == "function" for kind, _ in stack)
                    decl.member = bool(stack) and stack[-1][0] == "class"
                    pending = ("function", decl)
                    i = idx  # the '{' of the body
                    prev = None
                    continue
            elif low in _CLASS_OPENERS and prev not in ("::", "->", "?->"):
                # interface/trait/enum need a name; 'class' may be anonymous
                if low == "class" or (i + 1 < n and toks[i + 1].kind == IDENT):
                    pending = ("class", None)
        elif text == "{":
            stack.append(pending if pending is not None else ("block", None))
            pending = None
        elif text == "}":
            if stack:
                kind, decl = stack.pop()
                if kind == "function" and decl is not None and _wanted(decl, cfg):
                    out.append((decl.decl_start, i, decl.name))
        elif text == ";":
            pending = None
        prev = text
        i += 1
    out.sort(key=lambda item: toks[item[0]].start_byte)
    return out


def _wanted(decl: _FuncDecl, cfg: ExtractionConfig) -> bool:
    if decl.nested and not cfg.include_nested:
        return False
    if decl.name is None and not cfg.include_anonymous:
        return False
    if decl.member and decl.name is not None and not cfg.include_methods:
        return False
    return True


def extract_functions(
    file: SourceFile,
    cfg: ExtractionConfig | None = None,
    *,
    errors: list[WarningRecord] | None = None,
) -> list[FunctionSpan]:
    """Extract function spans from *file*, ordered by start byte.

    Parse trouble is tolerated token-by-token; only an internal failure
    yields a file-level error record and an empty result.
    """
    cfg = cfg or ExtractionConfig()
    data = file.content.encode("utf-8")
    try:
        toks = phplex.lex_bytes(data, start_in_php=False)
        raw = _scan_functions(toks, cfg)
        spans = []
        for start_idx, end_idx, name in raw:
            start_tok, end_tok = toks[start_idx], toks[end_idx]
            spans.append(FunctionSpan(
                source=file,
                name=name,
                start_line=start_tok.start_line,
                end_line=end_tok.end_line,
                start_byte=start_tok.start_byte,
                end_byte=end_tok.end_byte,
                body=data[start_tok.start_byte:end_tok.end_byte].decode(
                    "utf-8", errors="replace"),
            ))
        return spans
    except Exception as exc:  # catastrophic: record and move on
        logger.error("extraction failed for %s: %s", file.path, exc)
        if errors is not None:
            errors.append(WarningRecord(file.path, str(exc)))
        return []


def extract_directory(
    root: str | Path,
    cfg: ExtractionConfig | None = None,
    *,
    repo_url: str = "",
    commit_id: str = "",
    warnings: list[WarningRecord] | None = None,
) -> list[FunctionSpan]:
    """enumerate_files + extract_functions over a checkout, in path order."""
    cfg = cfg or ExtractionConfig()
    spans = []
    for f in enumerate_files(
        root, cfg.extensions, ignore_globs=cfg.ignore_globs,
        repo_url=repo_url, commit_id=commit_id, warnings=warnings,
    ):
        spans.extend(extract_functions(f, cfg, errors=warnings))
    return spans
