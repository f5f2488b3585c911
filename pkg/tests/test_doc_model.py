import pytest
from hypothesis import given, strategies as st

from tgsa.doc_model import (
    Token,
    TokenizeError,
    TokenKind,
    make_stream,
    render,
    terms,
    tokenize,
    validate_stream,
)
from tgsa.oracle import random_document

from conftest import DOC2


def shape(stream):
    out = []
    for t in stream:
        if t.kind is TokenKind.TEXT:
            out.append(("Text", t.content, t.ordinal))
        else:
            out.append((t.kind.name, t.name, t.ordinal))
    return out


def test_milestone_transcription():
    s = tokenize('<r sID="r"/><a sID="a"/>hi<a eID="a"/><r eID="r"/>')
    assert shape(s) == [
        ("START", "r", 1), ("START", "a", 2), ("Text", "hi", 3), ("END", "a", 4), ("END", "r", 5),
    ]
    assert [t.node_id for t in s if t.is_tag] == ["r", "a", "a", "r"]


def test_doc2_token_positions():
    s = tokenize(DOC2)
    assert len(s) == 9
    pos = {}
    for t in s:
        if t.is_tag:
            pos.setdefault(t.node_id, []).append(t.ordinal)
    assert pos == {"r": [1, 9], "a": [2, 6], "b": [4, 8]}


def test_nested_transcription():
    s = tokenize("<r><a></a></r>", "nested")
    assert shape(s) == [("START", "r", 1), ("START", "a", 2), ("END", "a", 3), ("END", "r", 4)]
    ids = [t.node_id for t in s]
    assert ids[0] == ids[3] and ids[1] == ids[2] and ids[0] != ids[1]


def test_whitespace_runs():
    text = '<r sID="r"/>\n  <a sID="a"/> x <a eID="a"/>\n<r eID="r"/>'
    assert [t.content for t in tokenize(text) if t.kind is TokenKind.TEXT] == [" x "]
    kept = tokenize(text, keep_whitespace=True)
    assert [t.content for t in kept if t.kind is TokenKind.TEXT] == ["\n  ", " x ", "\n"]
    assert [t.ordinal for t in kept] == list(range(1, 8))


@pytest.mark.parametrize(
    "text, fmt, fragment",
    [
        ('<r sID="r"/><a sID=a/><r eID="r"/>', "milestone", "malformed tag"),
        ('<r sID="r"/><a/><r eID="r"/>', "milestone", "malformed tag"),
        ("<r><a></r></a>", "nested", "does not match"),
        ("<r></r></r>", "nested", "no open element"),
        ('<r sID="r"/><a eID="a"/><r eID="r"/>', "milestone", "no preceding sID"),
    ],
)
def test_tokenize_errors(text, fmt, fragment):
    with pytest.raises(TokenizeError, match=fragment):
        tokenize(text, fmt)


def test_error_position():
    with pytest.raises(TokenizeError) as info:
        tokenize('<r sID="r"/>\nabc <oops<r eID="r"/>')
    assert (info.value.line, info.value.column) == (2, 5)
    assert info.value.offset == 17


def test_unknown_format():
    with pytest.raises(ValueError):
        tokenize("<r></r>", "lmnl")


def test_validate_ok():
    assert validate_stream(tokenize(DOC2)).ok
    assert str(validate_stream(tokenize(DOC2))) == "ok"


def test_validate_unclosed():
    s = tokenize('<r sID="r"/><a sID="a"/><b sID="b"/><a eID="a"/><r eID="r"/>')
    report = validate_stream(s)
    assert not report.ok
    assert "unclosed node b" in str(report)


def test_validate_multiple_roots():
    s = tokenize("<a></a><b></b>", "nested")
    report = validate_stream(s)
    assert "multiple-roots" in report.codes()
    assert "multiple roots" in str(report)


def test_validate_text_outside_root():
    s = tokenize("<a>x</a>tail", "nested")
    assert "outside-root" in validate_stream(s).codes()


def test_validate_duplicate_id_and_empty():
    s = tokenize('<r sID="r"/><a sID="a"/><a eID="a"/><a sID="a"/><r eID="r"/>')
    assert "duplicate-id" in validate_stream(s).codes()
    assert "empty" in validate_stream(tokenize("")).codes()


def test_validate_end_before_start():
    toks = [
        Token(TokenKind.START, 1, "r", "r"),
        Token(TokenKind.END, 2, "a", "a"),
        Token(TokenKind.START, 3, "a", "a"),
        Token(TokenKind.END, 4, "r", "r"),
    ]
    codes = validate_stream(make_stream(toks)).codes()
    assert "end-before-start" in codes


def test_validate_root_closed_early():
    s = tokenize('<r sID="r"/><a sID="a"/><r eID="r"/><a eID="a"/>')
    assert "outside-root" in validate_stream(s).codes()


def test_terms_casefold():
    assert terms("The  END\tof") == ["the", "end", "of"]


def test_render_round_trip():
    for seed in range(20):
        s = random_document(seed, 30, 0.4)
        again = tokenize(render(s))
        assert again.tokens == s.tokens
        assert again.source_digest == s.source_digest


def test_render_nested_rejects_interleave():
    with pytest.raises(ValueError):
        render(tokenize(DOC2), "nested")


@given(st.integers(0, 10_000), st.integers(1, 25))
def test_nested_output_is_valid_and_deterministic(seed, n):
    s = random_document(seed, n, 0.0)
    text = render(s, "nested")
    a, b = tokenize(text, "nested"), tokenize(text, "nested")
    assert a == b
    assert validate_stream(a).ok
    # every end tag closes the most recent open node
    stack = []
    for t in a:
        if t.kind is TokenKind.START:
            stack.append(t.node_id)
        elif t.kind is TokenKind.END:
            assert stack.pop() == t.node_id


@given(st.integers(0, 10_000), st.integers(1, 40), st.floats(0, 1))
def test_start_and_end_ids_match(seed, n, p):
    s = random_document(seed, n, p)
    starts = sorted(t.node_id for t in s if t.kind is TokenKind.START)
    ends = sorted(t.node_id for t in s if t.kind is TokenKind.END)
    assert starts == ends
    assert [t.ordinal for t in s] == list(range(1, len(s) + 1))
