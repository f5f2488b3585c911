"""Brute-force ground truth for TGSA graphs.

Everything here is computed from token ordinals alone, with exhaustive
pairwise comparisons, and never calls into the streaming construction.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .doc_model import Token, TokenKind, TokenStream, make_stream
from .graph import Arc, ArcLabel, TgsaGraph, Vertex, VertexKind, text_vertex_id


class Span(NamedTuple):
    id: str
    name: str
    start: int
    end: int
    is_text: bool = False


@dataclass(frozen=True)
class SpanTable:
    spans: tuple[Span, ...]

    def __len__(self) -> int:
        return len(self.spans)

    def __iter__(self):
        return iter(self.spans)

    def by_id(self) -> dict[str, Span]:
        return {s.id: s for s in self.spans}

    def root(self) -> Span:
        elements = [s for s in self.spans if not s.is_text]
        return min(elements, key=lambda s: s.start)


def spans(stream: TokenStream) -> SpanTable:
    starts: dict[str, Token] = {}
    out: list[Span] = []
    for tok in stream.tokens:
        if tok.kind is TokenKind.START:
            starts[tok.node_id] = tok
        elif tok.kind is TokenKind.END:
            s = starts[tok.node_id]
            out.append(Span(tok.node_id, s.name, s.ordinal, tok.ordinal))
        else:
            out.append(Span(text_vertex_id(tok.ordinal), tok.content, tok.ordinal, tok.ordinal, True))
    out.sort(key=lambda s: s.start)
    return SpanTable(tuple(out))


class Relations(NamedTuple):
    overlap_pairs: frozenset[tuple[str, str]]
    containment_pairs: frozenset[tuple[str, str]]
    immediate_containment_pairs: frozenset[tuple[str, str]]


def _matrices(table: SpanTable):
    s = np.array([sp.start for sp in table.spans], dtype=np.int64)
    e = np.array([sp.end for sp in table.spans], dtype=np.int64)
    elem = np.array([not sp.is_text for sp in table.spans], dtype=bool)
    # contain[i, j]: span i strictly encloses span j (text spans have s == e)
    contain = (s[:, None] < s[None, :]) & (e[None, :] < e[:, None])
    # overlap[i, j]: element i starts first and the two interleave
    overlap = (
        (s[:, None] < s[None, :])
        & (s[None, :] < e[:, None])
        & (e[:, None] < e[None, :])
        & elem[:, None]
        & elem[None, :]
    )
    # between[i, j]: some k with i encloses k and k encloses j
    c = contain.astype(np.int64)
    between = (c @ c) > 0
    immediate = contain & ~between
    return contain, overlap, immediate


def _pairs(table: SpanTable, mask: np.ndarray) -> frozenset[tuple[str, str]]:
    ids = [sp.id for sp in table.spans]
    rows, cols = np.nonzero(mask)
    return frozenset((ids[i], ids[j]) for i, j in zip(rows.tolist(), cols.tolist()))


def reference_relations(table: SpanTable) -> Relations:
    contain, overlap, immediate = _matrices(table)
    return Relations(_pairs(table, overlap), _pairs(table, contain), _pairs(table, immediate))


def reference_graph(table: SpanTable, digest: str = "") -> TgsaGraph:
    rel = reference_relations(table)
    vertices = [
        Vertex(sp.id, VertexKind.TEXT if sp.is_text else VertexKind.ELEMENT, sp.name, sp.start, sp.end)
        for sp in table.spans
    ]
    arcs = [Arc(a, ArcLabel.PC, b) for a, b in rel.immediate_containment_pairs]
    arcs += [Arc(a, ArcLabel.O, b) for a, b in rel.overlap_pairs]
    return TgsaGraph.from_arcs(vertices, arcs, table.root().id, digest)


WORDS = ("could", "be", "increased", "the", "end", "of", "one", "paragraph", "and", "start")


def random_document(
    seed: int,
    n_elements: int = 20,
    overlap_probability: float = 0.3,
    max_depth: int = 12,
    name_alphabet: Sequence[str] = ("a", "b", "c", "d", "e"),
    text_probability: float = 0.3,
) -> TokenStream:
    """Generate a random single-root overlap-only document.

    ``n_elements`` counts the root. Whenever an element is closed, with
    probability ``overlap_probability`` a random open non-latest element is
    closed instead of the latest one, which produces an interleave. At most
    ``max_depth`` elements are open at once.
    """
    if n_elements < 1:
        raise ValueError("n_elements must be >= 1")
    if not 0.0 <= overlap_probability <= 1.0:
        raise ValueError("overlap_probability must lie in [0, 1]")
    if not 0.0 <= text_probability < 1.0:
        raise ValueError("text_probability must lie in [0, 1)")
    if max_depth < 1 or (max_depth < 2 and n_elements > 1):
        raise ValueError("max_depth must leave room below the root")
    if not name_alphabet:
        raise ValueError("name_alphabet must not be empty")

    rng = random.Random(seed)
    tokens: list[Token] = []
    opened: list[tuple[str, str]] = []  # (name, id) in open order
    count = 0
    last_was_text = False

    def push(kind: TokenKind, **kw) -> None:
        tokens.append(Token(kind, len(tokens) + 1, **kw))

    def maybe_text() -> None:
        nonlocal last_was_text
        if not last_was_text and rng.random() < text_probability:
            words = rng.choices(WORDS, k=rng.randint(1, 3))
            push(TokenKind.TEXT, content=" ".join(words))
            last_was_text = True

    def open_element(name: str) -> None:
        nonlocal count, last_was_text
        count += 1
        node_id = f"{name}-{count}"
        opened.append((name, node_id))
        push(TokenKind.START, name=name, node_id=node_id)
        last_was_text = False

    def close_element(i: int) -> None:
        nonlocal last_was_text
        name, node_id = opened.pop(i)
        push(TokenKind.END, name=name, node_id=node_id)
        last_was_text = False

    open_element(rng.choice(name_alphabet))
    while count < n_elements:
        maybe_text()
        can_open = len(opened) < max_depth
        if can_open and (len(opened) == 1 or rng.random() < 0.55):
            open_element(rng.choice(name_alphabet))
        else:
            _close_one(rng, opened, overlap_probability, close_element)
    while len(opened) > 1:
        maybe_text()
        _close_one(rng, opened, overlap_probability, close_element)
    maybe_text()
    close_element(0)
    return make_stream(tokens)


def _close_one(rng: random.Random, opened, overlap_probability: float, close) -> None:
    # the root (position 0) is never closed early
    if len(opened) > 2 and rng.random() < overlap_probability:
        close(rng.randrange(1, len(opened) - 1))
    else:
        close(len(opened) - 1)
