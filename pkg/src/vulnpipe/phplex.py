"""Total lexer for PHP source text.

Every byte sequence lexes to a token stream: malformed input degrades to
``UNKNOWN`` single-byte tokens instead of raising.  Comments and whitespace
are dropped; string literals (including heredoc/nowdoc) are kept verbatim as
single tokens, which is what makes downstream brace matching safe — braces
inside strings never reach the scanner.

The lexer operates on bytes so token offsets are byte offsets.  PHP files are
HTML documents with embedded code, so file-level lexing starts in HTML mode
and enters PHP mode at ``<?php`` / ``<?=`` / ``<?``; function bodies are
lexed starting directly in PHP mode.
"""

from __future__ import annotations

from dataclasses import dataclass

HTML = "html"
OPEN_TAG = "open_tag"
CLOSE_TAG = "close_tag"
IDENT = "ident"
VARIABLE = "variable"
NUMBER = "number"
STRING = "string"
OP = "op"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class LexToken:
    kind: str
    text: str
    start_byte: int
    end_byte: int
    start_line: int
    end_line: int


_WS = b" \t\r\n\x0b\x0c"
_DIGITS = b"0123456789"
_HEX = b"0123456789abcdefABCDEF_"

# Longest-match first. '?>' (close tag) and '<<<' (heredoc) are handled
# before this table is consulted.
_OPS3 = ("===", "!==", "<=>", "**=", "<<=", ">>=", "...", "??=", "?->")
_OPS2 = ("==", "!=", "<>", "<=", ">=", "&&", "||", "++", "--", "+=", "-=",
         "*=", "/=", ".=", "%=", "&=", "|=", "^=", "->", "=>", "::", "<<",
         ">>", "**", "??", "?:")
_OPS1 = set("+-*/%=<>!&|^~.,;:?()[]{}@$\\")


def _is_ident_start(b: int) -> bool:
    return b == 0x5F or 0x41 <= b <= 0x5A or 0x61 <= b <= 0x7A or b >= 0x80


def _is_ident_char(b: int) -> bool:
    return _is_ident_start(b) or 0x30 <= b <= 0x39


class _Lexer:
    def __init__(self, data: bytes, in_php: bool):
        self.data = data
        self.i = 0
        self.line = 1
        self.in_php = in_php
        self.tokens: list[LexToken] = []

    def run(self) -> list[LexToken]:
        n = len(self.data)
        while self.i < n:
            if self.in_php:
                self._lex_php()
            else:
                self._lex_html()
        return self.tokens

    # -- emit helpers ------------------------------------------------------

    def _emit(self, kind: str, start: int, end: int, start_line: int) -> None:
        text = self.data[start:end].decode("utf-8", errors="replace")
        self.tokens.append(
            LexToken(kind, text, start, end, start_line, self.line)
        )

    def _advance(self, end: int) -> None:
        """Move to *end*, counting newlines along the way."""
        self.line += self.data.count(b"\n", self.i, end)
        self.i = end

    # -- HTML mode ---------------------------------------------------------

    def _lex_html(self) -> None:
        data = self.data
        k = data.find(b"<?", self.i)
        if k == -1:
            k = len(data)
        if k > self.i:
            start, start_line = self.i, self.line
            self._advance(k)
            # whitespace-only HTML runs are dropped like any whitespace
            if data[start:k].strip(_WS):
                self._emit(HTML, start, k, start_line)
        if self.i >= len(data):
            return
        start, start_line = self.i, self.line
        if data[self.i:self.i + 5].lower() == b"<?php" and (
            self.i + 5 >= len(data) or not _is_ident_char(data[self.i + 5])
        ):
            end = self.i + 5
        elif data[self.i:self.i + 3] == b"<?=":
            end = self.i + 3
        else:
            end = self.i + 2
        self._advance(end)
        self._emit(OPEN_TAG, start, end, start_line)
        self.in_php = True

    # -- PHP mode ----------------------------------------------------------

    def _lex_php(self) -> None:
        data = self.data
        n = len(data)
        c = data[self.i]

        if c in _WS:
            j = self.i
            while j < n and data[j] in _WS:
                j += 1
            self._advance(j)
            return

        start, start_line = self.i, self.line

        # close tag
        if c == 0x3F and data[self.i:self.i + 2] == b"?>":
            self._advance(self.i + 2)
            self._emit(CLOSE_TAG, start, self.i, start_line)
            self.in_php = False
            return

        # comments
        if c == 0x2F and data[self.i:self.i + 2] == b"//":
            self._skip_line_comment()
            return
        if c == 0x2F and data[self.i:self.i + 2] == b"/*":
            end = data.find(b"*/", self.i + 2)
            end = n if end == -1 else end + 2
            self._advance(end)
            return
        if c == 0x23:  # '#'
            if data[self.i:self.i + 2] == b"#[":  # attribute, not a comment
                self._advance(self.i + 2)
                self._emit(OP, start, self.i, start_line)
                return
            self._skip_line_comment()
            return

        # strings
        if c == 0x27:  # single quote
            self._lex_quoted(b"'", escape_all=False)
            return
        if c in (0x22, 0x60):  # double quote, backtick
            self._lex_quoted(bytes([c]), escape_all=True)
            return
        if c == 0x3C and data[self.i:self.i + 3] == b"<<<":
            if self._lex_heredoc():
                return
            self._advance(self.i + 3)
            self._emit(OP, start, self.i, start_line)
            return

        # numbers
        if c in _DIGITS or (
            c == 0x2E and data[self.i + 1:self.i + 2].isdigit()
        ):
            self._lex_number()
            return

        # variables
        if c == 0x24 and self.i + 1 < n and _is_ident_start(data[self.i + 1]):
            j = self.i + 2
            while j < n and _is_ident_char(data[j]):
                j += 1
            self._advance(j)
            self._emit(VARIABLE, start, self.i, start_line)
            return

        # identifiers / keywords
        if _is_ident_start(c):
            j = self.i + 1
            while j < n and _is_ident_char(data[j]):
                j += 1
            self._advance(j)
            self._emit(IDENT, start, self.i, start_line)
            return

        # operators, longest match
        head3 = data[self.i:self.i + 3].decode("ascii", errors="replace")
        if head3 in _OPS3:
            self._advance(self.i + 3)
            self._emit(OP, start, self.i, start_line)
            return
        head2 = data[self.i:self.i + 2].decode("ascii", errors="replace")
        if head2 in _OPS2:
            self._advance(self.i + 2)
            self._emit(OP, start, self.i, start_line)
            return
        ch = chr(c)
        self._advance(self.i + 1)
        self._emit(OP if ch in _OPS1 else UNKNOWN, start, self.i, start_line)

    def _skip_line_comment(self) -> None:
        # one-line comments end at newline or at a close tag ('?>' is
        # processed by PHP even inside a // comment)
        data = self.data
        j = self.i
        n = len(data)
        while j < n and data[j] != 0x0A and data[j:j + 2] != b"?>":
            j += 1
        self._advance(j)

    def _lex_quoted(self, quote: bytes, escape_all: bool) -> None:
        data = self.data
        n = len(data)
        start, start_line = self.i, self.line
        j = self.i + 1
        while j < n:
            b = data[j:j + 1]
            if b == b"\\" and j + 1 < n:
                j += 2
                continue
            if b == quote:
                j += 1
                break
            j += 1
        self._advance(j)
        self._emit(STRING, start, self.i, start_line)

    def _lex_heredoc(self) -> bool:
        """Lex a heredoc/nowdoc starting at '<<<'. Returns False if the
        header is malformed (caller falls back to operator tokens)."""
        data = self.data
        n = len(data)
        start, start_line = self.i, self.line
        j = self.i + 3
        while j < n and data[j] in b" \t":
            j += 1
        quote = b""
        if j < n and data[j] in b"'\"":
            quote = data[j:j + 1]
            j += 1
        if j >= n or not _is_ident_start(data[j]):
            return False
        id_start = j
        while j < n and _is_ident_char(data[j]):
            j += 1
        ident = data[id_start:j]
        if quote:
            if data[j:j + 1] != quote:
                return False
            j += 1
        if data[j:j + 1] == b"\r":
            j += 1
        if data[j:j + 1] != b"\n":
            return False
        j += 1
        # scan lines for the closing identifier (flexible indentation)
        while j < n:
            k = j
            while k < n and data[k] in b" \t":
                k += 1
            if data[k:k + len(ident)] == ident and (
                k + len(ident) >= n or not _is_ident_char(data[k + len(ident)])
            ):
                j = k + len(ident)
                break
            nl = data.find(b"\n", j)
            if nl == -1:
                j = n
                break
            j = nl + 1
        self._advance(j)
        self._emit(STRING, start, self.i, start_line)
        return True

    def _lex_number(self) -> None:
        data = self.data
        n = len(data)
        start, start_line = self.i, self.line
        j = self.i
        prefix = data[j:j + 2].lower()
        if prefix in (b"0x", b"0b", b"0o") and j + 2 < n and data[j + 2] in _HEX:
            j += 2
            while j < n and data[j] in _HEX:
                j += 1
        else:
            while j < n and (data[j] in _DIGITS or data[j] == 0x5F):
                j += 1
            # a trailing dot is part of the float, as in PHP's DNUM rule
            if data[j:j + 1] == b"." and data[j + 1:j + 2] != b".":
                j += 1
                while j < n and (data[j] in _DIGITS or data[j] == 0x5F):
                    j += 1
            if data[j:j + 1].lower() == b"e":
                k = j + 1
                if data[k:k + 1] in b"+-":
                    k += 1
                if data[k:k + 1].isdigit():
                    j = k
                    while j < n and data[j] in _DIGITS:
                        j += 1
        self._advance(j)
        self._emit(NUMBER, start, self.i, start_line)


def lex_bytes(data: bytes, start_in_php: bool = False) -> list[LexToken]:
    """Lex raw bytes into significant tokens (no comments, no whitespace)."""
    return _Lexer(data, start_in_php).run()


def tokenize(body: str) -> list[str]:
    """Tokenize a function body (PHP code, no leading open tag).

    Deterministic; comments and whitespace are excluded; identifiers and
    literals are kept verbatim.
    """
    return [t.text for t in lex_bytes(body.encode("utf-8"), start_in_php=True)]
