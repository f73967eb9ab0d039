import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plsim.lexer import (
    BlockComment,
    CharClass,
    LexerSpec,
    LexerSpecError,
    StringRule,
    TokenKind,
    builtin_spec,
    builtin_spec_names,
    parse_spec,
    strip_comments,
    tokenize,
)

from lexer_cases import CASES, KIND, UNTERMINATED_SOURCES


def check_reconstruction(source, tokens):
    """Tokens tile all non-whitespace bytes; gaps are pure whitespace."""
    pos = 0
    for t in tokens:
        assert t.start >= pos, "spans must be non-overlapping and increasing"
        assert t.end > t.start
        assert source[t.start:t.end] == t.lexeme
        assert source[pos:t.start].isspace() or pos == t.start
        pos = t.end
    assert source[pos:].isspace() or pos == len(source)
    rebuilt = []
    prev = 0
    for t in tokens:
        rebuilt.append(source[prev:t.start])
        rebuilt.append(t.lexeme)
        prev = t.end
    rebuilt.append(source[prev:])
    assert "".join(rebuilt) == source


@pytest.mark.parametrize("spec_name,source,expected", CASES,
                         ids=[f"{c[0]}-{i}" for i, c in enumerate(CASES)])
def test_snippet_suite(spec_name, source, expected):
    spec = builtin_spec(spec_name)
    diagnostics = []
    tokens = tokenize(source, spec, diagnostics)
    got = [(t.lexeme, t.kind.value) for t in tokens]
    assert got == [(lex, KIND[k]) for lex, k in expected]
    check_reconstruction(source, tokens)
    if (spec_name, source) in UNTERMINATED_SOURCES:
        assert diagnostics


def test_at_least_eight_builtin_specs():
    assert len(builtin_spec_names()) >= 8
    covered = {name for name, _, _ in CASES}
    assert len(covered) >= 8


def test_empty_source():
    assert tokenize("", builtin_spec("c")) == []


def test_line_numbers():
    tokens = tokenize("a\nb\n  c", builtin_spec("c"))
    assert [t.line for t in tokens] == [1, 2, 3]


def test_strip_comments_idempotent_and_order_preserving():
    spec = builtin_spec("c")
    tokens = tokenize("a /* x */ b // y", spec)
    stripped = strip_comments(tokens)
    assert [t.lexeme for t in stripped] == ["a", "b"]
    assert strip_comments(stripped) == stripped
    assert strip_comments([]) == []


def test_all_comment_input_strips_to_empty():
    tokens = tokenize("// one\n/* two */", builtin_spec("c"))
    assert all(t.kind is TokenKind.COMMENT for t in tokens)
    assert strip_comments(tokens) == []


def test_tokenize_is_pure():
    spec = builtin_spec("python")
    src = "def f():\n    return 1  # done"
    assert tokenize(src, spec) == tokenize(src, spec)


def test_unterminated_string_extends_to_eof():
    diagnostics = []
    tokens = tokenize('x = "open', builtin_spec("c"), diagnostics)
    assert tokens[-1].kind is TokenKind.STRING
    assert tokens[-1].lexeme == '"open'
    assert diagnostics


def test_case_folding():
    spec = builtin_spec("cobol")
    assert not spec.case_sensitive
    assert spec.fold("MOVE") == "move"
    assert builtin_spec("c").fold("Move") == "Move"


def test_ambiguous_comment_prefixes_rejected():
    with pytest.raises(LexerSpecError):
        LexerSpec(language="bad", line_comments=("/", "//"))


def test_parse_spec_roundtrip_fields():
    spec = parse_spec(
        "language = toy\n"
        "case_sensitive = false\n"
        "line_comment = --\n"
        "block_comment = {- -} nest\n"
        "string = \" \" none\n"
        "operator = + - = ( )\n"
    )
    assert spec.language == "toy"
    assert not spec.case_sensitive
    assert spec.line_comments == ("--",)
    assert spec.block_comments == (BlockComment("{-", "-}", True),)
    assert spec.strings == (StringRule('"', '"', None),)
    tokens = tokenize("a -- note\n{- x {- y -} z -} b", spec)
    assert [(t.lexeme, t.kind.value) for t in tokens] == [
        ("a", "IDENTIFIER"), ("-- note", "COMMENT"),
        ("{- x {- y -} z -}", "COMMENT"), ("b", "IDENTIFIER"),
    ]


def test_charclass_ranges():
    cc = CharClass("a-cx_-")
    for ch in "abcx_-":
        assert ch in cc
    assert "d" not in cc


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet=st.characters(codec="ascii"), max_size=120))
def test_reconstruction_random_text(source):
    for name in ("c", "python", "lisp"):
        tokens = tokenize(source, builtin_spec(name))
        check_reconstruction(source, tokens)
