from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vulnpipe.phplex import lex_bytes, tokenize


def test_hand_tokenized_statement():
    assert tokenize("return $a + 1;") == ["return", "$a", "+", "1", ";"]


def test_empty_body():
    assert tokenize("") == []


def test_tokenize_is_deterministic():
    body = "$x = foo($y, 2); // note\nreturn $x ?: null;"
    assert tokenize(body) == tokenize(body)


def test_comments_and_whitespace_excluded():
    body = "$a = 1; // line\n/* block\n comment */ $b = 2; # hash\n$c = 3;"
    assert tokenize(body) == ["$a", "=", "1", ";", "$b", "=", "2", ";",
                              "$c", "=", "3", ";"]


@pytest.mark.parametrize("body,expected", [
    ("$s = 'it''s';", ["$s", "=", "'it'", "'s'", ";"]),
    (r"$s = 'it\'s ok';", ["$s", "=", r"'it\'s ok'", ";"]),
    ('$s = "a {$b[1]} c";', ["$s", "=", '"a {$b[1]} c"', ";"]),
    ('$s = "esc \\" quote";', ["$s", "=", '"esc \\" quote"', ";"]),
    ("$out = `ls -la`;", ["$out", "=", "`ls -la`", ";"]),
])
def test_string_literals_are_single_verbatim_tokens(body, expected):
    assert tokenize(body) == expected


def test_heredoc_is_one_token_including_braces():
    body = "$q = <<<SQL\nselect { '}' } from t\nSQL;\n$y = 1;"
    toks = tokenize(body)
    assert toks[2].startswith("<<<SQL") and toks[2].endswith("SQL")
    assert toks[3:] == [";", "$y", "=", "1", ";"]


def test_nowdoc_quoted_identifier():
    body = "$q = <<<'TXT'\nno $interp here\nTXT;"
    toks = tokenize(body)
    assert "$interp" in toks[2]
    assert toks[3] == ";"


@pytest.mark.parametrize("literal", ["0x1F", "0b1010", "1_000_000", "1.5e3",
                                     ".5", "007", "1.", "2e10"])
def test_number_literals_kept_verbatim(literal):
    toks = tokenize(f"$n = {literal};")
    assert toks[2] == literal, toks


def test_operators_longest_match():
    assert tokenize("$a === $b") == ["$a", "===", "$b"]
    assert tokenize("$a <=> $b") == ["$a", "<=>", "$b"]
    assert tokenize("$o?->m()") == ["$o", "?->", "m", "(", ")"]
    assert tokenize("$a ??= 1;") == ["$a", "??=", "1", ";"]
    assert tokenize("$a == $b = $c") == ["$a", "==", "$b", "=", "$c"]


def test_attribute_is_not_a_comment():
    toks = tokenize("#[Route('/x')]\nfunction f() {}")
    assert toks[:2] == ["#[", "Route"]
    assert "function" in toks


def test_line_comment_ends_at_close_tag():
    toks = tokenize("// c ?> out")
    assert toks[0] == "?>"
    assert toks[1].strip() == "out"


def test_close_tag_switches_to_html_and_back():
    toks = tokenize("echo 1; ?><b>x</b><?php echo 2;")
    assert toks == ["echo", "1", ";", "?>", "<b>x</b>", "<?php", "echo", "2", ";"]


def test_variable_variables():
    assert tokenize("$$name = 1;") == ["$", "$name", "=", "1", ";"]


def test_file_mode_starts_in_html():
    toks = lex_bytes(b"<html>\n<?php $x = 1; ?>\n</html>", start_in_php=False)
    kinds = [t.kind for t in toks]
    assert kinds[0] == "html"
    assert kinds[1] == "open_tag"
    assert [t.text for t in toks if t.kind == "variable"] == ["$x"]


def test_byte_offsets_are_slice_faithful():
    data = "<?php\n$s = 'café'; // utf8\nfunction f() { return 1; }\n".encode()
    for tok in lex_bytes(data):
        assert data[tok.start_byte:tok.end_byte].decode("utf-8") == tok.text


def test_multiline_token_line_numbers():
    data = b"<?php\n$q = <<<T\nl1\nl2\nT;\n$z = 1;\n"
    toks = lex_bytes(data)
    heredoc = next(t for t in toks if t.text.startswith("<<<"))
    assert (heredoc.start_line, heredoc.end_line) == (2, 5)
    z = next(t for t in toks if t.text == "$z")
    assert z.start_line == 6


def test_unterminated_string_reaches_eof_without_error():
    toks = tokenize("$s = 'never closed")
    assert toks[-1] == "'never closed"


@given(st.text(max_size=300))
@settings(max_examples=200, deadline=None)
def test_lexer_is_total_and_deterministic(body):
    first = tokenize(body)
    assert first == tokenize(body)
    for tok in first:
        assert tok  # no empty token texts


@given(st.binary(max_size=300))
@settings(max_examples=100, deadline=None)
def test_lexer_is_total_on_arbitrary_bytes(data):
    toks = lex_bytes(data, start_in_php=True)
    last = 0
    for t in toks:
        assert t.start_byte >= last
        assert t.end_byte > t.start_byte
        last = t.end_byte
