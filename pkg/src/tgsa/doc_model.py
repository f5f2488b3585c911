"""Tokenizing in-line annotated documents into ordered physical units.

Two dialects are understood:

* ``milestone``: empty tags ``<name sID="id"/>`` and ``<name eID="id"/>`` mark
  the start and end of a region, so regions may interleave freely.
* ``nested``: ordinary ``<name>`` / ``</name>`` pairs, matched with a stack.

Every token (tags and text runs alike) receives a 1-based ordinal from one
shared counter. Those ordinals are the pre/post positions used by the index.
"""

from __future__ import annotations

import enum
import hashlib
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence


class TokenKind(enum.Enum):
    START = "StartTag"
    END = "EndTag"
    TEXT = "Text"


@dataclass(frozen=True, slots=True)
class Token:
    kind: TokenKind
    ordinal: int
    name: str | None = None
    node_id: str | None = None
    content: str | None = None

    @property
    def is_tag(self) -> bool:
        return self.kind is not TokenKind.TEXT

    def __repr__(self) -> str:
        if self.kind is TokenKind.TEXT:
            return f"Text({self.content!r} @{self.ordinal})"
        tag = "Start" if self.kind is TokenKind.START else "End"
        return f"{tag}({self.name}:{self.node_id} @{self.ordinal})"


@dataclass(frozen=True)
class TokenStream:
    tokens: tuple[Token, ...]
    source_digest: str

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    def __getitem__(self, i: int) -> Token:
        return self.tokens[i]


class TokenizeError(ValueError):
    """Raised for input the tokenizer cannot read.

    ``offset`` is the character offset of the offending markup, ``line`` and
    ``column`` are 1-based.
    """

    def __init__(self, message: str, offset: int, text: str):
        self.offset = offset
        self.line = text.count("\n", 0, offset) + 1
        self.column = offset - (text.rfind("\n", 0, offset) + 1) + 1
        super().__init__(f"{message} (line {self.line}, column {self.column})")


@dataclass(frozen=True, slots=True)
class Violation:
    code: str
    message: str
    ordinal: int | None = None

    def __str__(self) -> str:
        where = f"@{self.ordinal}: " if self.ordinal is not None else ""
        return f"[{self.code}] {where}{self.message}"


@dataclass
class ValidationReport:
    """Outcome of a validation pass; empty ``violations`` means ok."""

    subject: str
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code: str, message: str, ordinal: int | None = None) -> None:
        self.violations.append(Violation(code, message, ordinal))

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(str(v) for v in self.violations)


FORMATS = ("milestone", "nested")

_NAME = r"[A-Za-z0-9_.-]+"
_MILESTONE_TAG = re.compile(rf'<({_NAME}) (sID|eID)="({_NAME})"/>')
_NESTED_TAG = re.compile(rf"<(/?)({_NAME})>")


def digest_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def tokenize(
    input_text: str, format: str = "milestone", keep_whitespace: bool = False
) -> TokenStream:
    """Split ``input_text`` into a :class:`TokenStream`.

    Raises :class:`TokenizeError` on malformed tags, on a nested end tag that
    does not match the innermost open element, and on a milestone ``eID``
    that was never opened.
    """
    if format == "milestone":
        pattern = _MILESTONE_TAG
    elif format == "nested":
        pattern = _NESTED_TAG
    else:
        raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")

    tokens: list[Token] = []
    stack: list[tuple[str, str]] = []
    seen_starts: set[str] = set()
    synthetic = 0
    pos = 0
    n = len(input_text)

    def emit_text(chunk: str) -> None:
        if not chunk:
            return
        if not keep_whitespace and chunk.isspace():
            return
        tokens.append(Token(TokenKind.TEXT, len(tokens) + 1, content=chunk))

    while pos < n:
        lt = input_text.find("<", pos)
        if lt < 0:
            emit_text(input_text[pos:])
            break
        emit_text(input_text[pos:lt])
        m = pattern.match(input_text, lt)
        if m is None:
            raise TokenizeError("malformed tag", lt, input_text)
        ordinal = len(tokens) + 1
        if format == "milestone":
            name, attr, node_id = m.groups()
            if attr == "sID":
                seen_starts.add(node_id)
                tokens.append(Token(TokenKind.START, ordinal, name, node_id))
            else:
                if node_id not in seen_starts:
                    raise TokenizeError(
                        f"eID {node_id!r} has no preceding sID", lt, input_text
                    )
                tokens.append(Token(TokenKind.END, ordinal, name, node_id))
        else:
            slash, name = m.groups()
            if not slash:
                synthetic += 1
                node_id = f"{name}#{synthetic}"
                stack.append((name, node_id))
                tokens.append(Token(TokenKind.START, ordinal, name, node_id))
            else:
                if not stack:
                    raise TokenizeError(
                        f"end tag </{name}> with no open element", lt, input_text
                    )
                top_name, node_id = stack[-1]
                if top_name != name:
                    raise TokenizeError(
                        f"end tag </{name}> does not match open <{top_name}>",
                        lt,
                        input_text,
                    )
                stack.pop()
                tokens.append(Token(TokenKind.END, ordinal, name, node_id))
        pos = m.end()

    return TokenStream(tuple(tokens), digest_text(input_text))


def make_stream(tokens: Iterable[Token], source_digest: str | None = None) -> TokenStream:
    """Wrap pre-built tokens; the digest defaults to that of the milestone rendering."""
    toks = tuple(tokens)
    if source_digest is None:
        source_digest = digest_text(render(toks, "milestone"))
    return TokenStream(toks, source_digest)


def render(tokens: Sequence[Token] | TokenStream, format: str = "milestone") -> str:
    """Serialize tokens back to markup text.

    ``nested`` rendering only works for streams without interleaved elements.
    """
    parts: list[str] = []
    open_names: list[str] = []
    for tok in tokens:
        if tok.kind is TokenKind.TEXT:
            parts.append(tok.content or "")
        elif format == "milestone":
            attr = "sID" if tok.kind is TokenKind.START else "eID"
            parts.append(f'<{tok.name} {attr}="{tok.node_id}"/>')
        elif format == "nested":
            if tok.kind is TokenKind.START:
                open_names.append(tok.node_id or "")
                parts.append(f"<{tok.name}>")
            else:
                if not open_names or open_names[-1] != tok.node_id:
                    raise ValueError(
                        f"cannot render interleaved element {tok.node_id!r} as nested markup"
                    )
                open_names.pop()
                parts.append(f"</{tok.name}>")
        else:
            raise ValueError(f"unknown format {format!r}")
    return "".join(parts)


def terms(content: str) -> list[str]:
    """Index terms of a text run: whitespace split, case-folded."""
    return [t.casefold() for t in content.split()]


def validate_stream(stream: TokenStream) -> ValidationReport:
    report = ValidationReport("stream")
    tokens = stream.tokens
    if not tokens:
        report.add("empty", "empty stream")
        return report

    for i, tok in enumerate(tokens, start=1):
        if tok.ordinal != i:
            report.add("ordinal", f"expected ordinal {i}, found {tok.ordinal}", tok.ordinal)
            break

    first = tokens[0]
    if first.kind is not TokenKind.START:
        report.add("outside-root", "stream does not begin with a start tag", first.ordinal)

    started: dict[str, Token] = {}
    ended: set[str] = set()
    open_count = 0
    roots = 0
    for tok in tokens:
        if tok.kind is TokenKind.TEXT:
            if open_count == 0:
                report.add("outside-root", "text outside the root element", tok.ordinal)
            continue
        nid = tok.node_id
        if nid is None:
            report.add("missing-id", "tag without node id", tok.ordinal)
            continue
        if tok.kind is TokenKind.START:
            if nid in started:
                report.add("duplicate-id", f"duplicate node_id {nid}", tok.ordinal)
                continue
            if open_count == 0:
                roots += 1
                if roots > 1:
                    report.add("multiple-roots", f"multiple roots: {nid}", tok.ordinal)
            started[nid] = tok
            open_count += 1
        else:
            if nid not in started:
                report.add("end-before-start", f"end tag before start tag for {nid}", tok.ordinal)
                continue
            if nid in ended:
                report.add("duplicate-end", f"duplicate end tag for {nid}", tok.ordinal)
                continue
            if started[nid].name != tok.name:
                report.add(
                    "name-mismatch",
                    f"node {nid} opened as {started[nid].name} but closed as {tok.name}",
                    tok.ordinal,
                )
            ended.add(nid)
            open_count -= 1

    for nid, tok in started.items():
        if nid not in ended:
            report.add("unclosed", f"unclosed node {nid}", tok.ordinal)

    if first.kind is TokenKind.START and first.node_id is not None:
        last = tokens[-1]
        if not (last.kind is TokenKind.END and last.node_id == first.node_id):
            if roots <= 1 and "unclosed" not in report.codes():
                report.add(
                    "outside-root",
                    f"last token does not close root {first.node_id}",
                    last.ordinal,
                )
    return report
