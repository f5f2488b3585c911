"""Pre/post interval index over a TGSA graph.

Each element is labelled with the ordinals of its start and end tags plus
the start ordinals of all its parents. Interval arithmetic then answers
overlap and ancestor questions, and the stored parents answer parent-child
questions, without touching the graph.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from . import _kernels
from .doc_model import TokenKind, TokenStream, terms
from .graph import TgsaGraph, VertexKind


class IndexFormatError(ValueError):
    pass


class DigestMismatchError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class ElementEntry:
    name: str
    start: int
    end: int
    parents: tuple[int, ...] = ()

    def record(self) -> tuple[str, int, int]:
        return (self.name, self.start, self.end)


@dataclass(frozen=True)
class ElementIndex:
    """Element name -> entries sorted by start."""

    postings: Mapping[str, tuple[ElementEntry, ...]]
    digest: str
    _arrays: dict = field(default_factory=dict, compare=False, repr=False)

    def names(self) -> list[str]:
        return sorted(self.postings)

    def __len__(self) -> int:
        return sum(map(len, self.postings.values()))

    def entries(self) -> list[ElementEntry]:
        out = [e for lst in self.postings.values() for e in lst]
        out.sort(key=lambda e: e.start)
        return out

    def by_start(self, start: int) -> ElementEntry:
        table = self._arrays.get("by_start")
        if table is None:
            table = {e.start: e for lst in self.postings.values() for e in lst}
            self._arrays["by_start"] = table
        try:
            return table[start]
        except KeyError:
            raise KeyError(f"no element starts at ordinal {start}") from None

    def arrays(self, name: str | None = None) -> tuple[tuple[ElementEntry, ...], np.ndarray, np.ndarray]:
        """Entries plus int64 start/end arrays, for one name or all elements."""
        key = ("name", name)
        cached = self._arrays.get(key)
        if cached is None:
            entries = tuple(self.entries()) if name is None else self.postings.get(name, ())
            starts = np.fromiter((e.start for e in entries), dtype=np.int64, count=len(entries))
            ends = np.fromiter((e.end for e in entries), dtype=np.int64, count=len(entries))
            cached = (entries, starts, ends)
            self._arrays[key] = cached
        return cached


@dataclass(frozen=True)
class TextIndex:
    """Case-folded term -> ascending ordinals of the text tokens holding it."""

    postings: Mapping[str, tuple[int, ...]]
    digest: str

    def __len__(self) -> int:
        return len(self.postings)


def build_indexes(stream: TokenStream, graph: TgsaGraph) -> tuple[ElementIndex, TextIndex]:
    if stream.source_digest != graph.digest:
        raise DigestMismatchError(
            f"stream digest {stream.source_digest[:12]} does not match graph digest {graph.digest[:12]}"
        )
    vs = graph._vertices
    parent_lists = graph._parent_lists()
    grouped: dict[str, list[ElementEntry]] = {}
    for i, v in enumerate(vs):
        if v.kind is not VertexKind.ELEMENT:
            continue
        parents = tuple(sorted(vs[p].start for p in parent_lists[i]))
        grouped.setdefault(v.name, []).append(ElementEntry(v.name, v.start, v.end, parents))
    elements = ElementIndex({k: tuple(grouped[k]) for k in sorted(grouped)}, graph.digest)

    text: dict[str, list[int]] = {}
    for tok in stream.tokens:
        if tok.kind is TokenKind.TEXT:
            for term in dict.fromkeys(terms(tok.content or "")):
                text.setdefault(term, []).append(tok.ordinal)
    return elements, TextIndex({k: tuple(text[k]) for k in sorted(text)}, graph.digest)


def check_digest(elements: ElementIndex, text: TextIndex, graph: TgsaGraph) -> None:
    for idx in (elements, text):
        if idx.digest != graph.digest:
            raise DigestMismatchError(
                f"index digest {idx.digest[:12]} does not match graph digest {graph.digest[:12]}"
            )


# ---------------------------------------------------------------------------
# structural predicates


def overlaps(a: ElementEntry, b: ElementEntry, literal: bool = False) -> bool:
    """``a`` starts first and the two spans interleave.

    ``literal=True`` drops the ``b.start < a.end`` clause, which makes
    disjoint spans in document order count as overlapping too.
    """
    if literal:
        return a.start < b.start and a.end < b.end
    return a.start < b.start < a.end < b.end


def is_ancestor(a: ElementEntry, b: ElementEntry) -> bool:
    return a.start < b.start and b.end < a.end


def is_parent(a: ElementEntry, b: ElementEntry) -> bool:
    return a.start in b.parents


# ---------------------------------------------------------------------------
# queries


def elements_named(index: ElementIndex, name: str) -> list[ElementEntry]:
    return list(index.postings.get(name, ()))


def term_positions(index: TextIndex, term: str) -> list[int]:
    return list(index.postings.get(term.casefold(), ()))


def elements_containing(index: ElementIndex, ordinal: int) -> list[ElementEntry]:
    entries, starts, ends = index.arrays()
    return [entries[i] for i in _kernels.stab(starts, ends, np.int64(ordinal))]


def _pair_list(ia, ib, left, right, flip=False):
    if flip:
        return [(right[j], left[i]) for i, j in zip(ia.tolist(), ib.tolist())]
    return [(left[i], right[j]) for i, j in zip(ia.tolist(), ib.tolist())]


def overlapping_pairs(
    index: ElementIndex, name_a: str, name_b: str, literal: bool = False
) -> list[tuple[ElementEntry, ElementEntry]]:
    """Pairs ``(a, b)`` of ``name_a``/``name_b`` entries that overlap in either order."""
    a, a_s, a_e = index.arrays(name_a)
    b, b_s, b_e = index.arrays(name_b)
    join = _kernels.literal_pairs if literal else _kernels.interleave_pairs
    pairs = _pair_list(*join(a_s, a_e, b_s, b_e), a, b)
    pairs += _pair_list(*join(b_s, b_e, a_s, a_e), b, a, flip=True)
    return _sorted_unique(pairs)


def containment_pairs(
    index: ElementIndex, name_a: str, name_b: str
) -> list[tuple[ElementEntry, ElementEntry]]:
    """Pairs ``(a, b)`` where one span encloses the other."""
    a, a_s, a_e = index.arrays(name_a)
    b, b_s, b_e = index.arrays(name_b)
    pairs = _pair_list(*_kernels.contain_pairs(a_s, a_e, b_s, b_e), a, b)
    pairs += _pair_list(*_kernels.contain_pairs(b_s, b_e, a_s, a_e), b, a, flip=True)
    return _sorted_unique(pairs)


def intersecting_pairs(
    index: ElementIndex, name_a: str, name_b: str
) -> list[tuple[ElementEntry, ElementEntry]]:
    """Pairs sharing part of the document: overlapping or nested, either way round."""
    return _sorted_unique(overlapping_pairs(index, name_a, name_b) + containment_pairs(index, name_a, name_b))


def _sorted_unique(pairs):
    return sorted(set(pairs), key=lambda p: (p[0].start, p[1].start))


def exclusive_elements(index: ElementIndex, name_a: str, name_b: str) -> list[ElementEntry]:
    """``name_a`` entries that overlap no ``name_b`` entry."""
    a, a_s, a_e = index.arrays(name_a)
    _, b_s, b_e = index.arrays(name_b)
    if not len(a):
        return []
    if not len(b_s):
        return list(a)
    hit = _kernels.interleaves_any(a_s, a_e, b_s, b_e)
    return [e for e, h in zip(a, hit.tolist()) if not h]


def ancestors_of(index: ElementIndex, entry: ElementEntry) -> list[ElementEntry]:
    return [e for e in elements_containing(index, entry.start) if is_ancestor(e, entry)]


def parents_of(index: ElementIndex, entry: ElementEntry) -> list[ElementEntry]:
    return [index.by_start(p) for p in entry.parents]


# ---------------------------------------------------------------------------
# persistence


def _dumps(record: dict) -> str:
    return json.dumps(record, ensure_ascii=False, separators=(",", ":"))


def dumps_index(elements: ElementIndex, text: TextIndex) -> str:
    if elements.digest != text.digest:
        raise DigestMismatchError("element and text indexes come from different documents")
    lines = [_dumps({
        "record": "header",
        "digest": elements.digest,
        "element_count": len(elements),
        "text_term_count": len(text),
    })]
    for name in sorted(elements.postings):
        for e in elements.postings[name]:
            lines.append(_dumps({
                "record": "element", "name": e.name, "start": e.start,
                "end": e.end, "parents": list(e.parents),
            }))
    for term in sorted(text.postings):
        lines.append(_dumps({"record": "term", "term": term, "positions": list(text.postings[term])}))
    return "\n".join(lines) + "\n"


def loads_index(data: str) -> tuple[ElementIndex, TextIndex]:
    lines = [ln for ln in data.split("\n") if ln]
    if not lines:
        raise IndexFormatError("empty index file")
    try:
        records = [json.loads(ln) for ln in lines]
    except json.JSONDecodeError as exc:
        raise IndexFormatError(f"malformed index record: {exc}") from None
    header = records[0]
    if not isinstance(header, dict) or header.get("record") != "header":
        raise IndexFormatError("missing header record")
    grouped: dict[str, list[ElementEntry]] = {}
    text: dict[str, tuple[int, ...]] = {}
    try:
        digest = str(header["digest"])
        for r in records[1:]:
            kind = r["record"]
            if kind == "element":
                e = ElementEntry(str(r["name"]), int(r["start"]), int(r["end"]), tuple(int(p) for p in r["parents"]))
                grouped.setdefault(e.name, []).append(e)
            elif kind == "term":
                text[str(r["term"])] = tuple(int(p) for p in r["positions"])
            else:
                raise IndexFormatError(f"unknown record type {kind!r}")
        n_elements = int(header["element_count"])
        n_terms = int(header["text_term_count"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, IndexFormatError):
            raise
        raise IndexFormatError(f"malformed index record: {exc!r}") from None
    if sum(map(len, grouped.values())) != n_elements or len(text) != n_terms:
        raise IndexFormatError("record counts do not match header (truncated file?)")
    for lst in grouped.values():
        lst.sort(key=lambda e: e.start)
    return (
        ElementIndex({k: tuple(grouped[k]) for k in sorted(grouped)}, digest),
        TextIndex({k: text[k] for k in sorted(text)}, digest),
    )


def save_index(elements: ElementIndex, text: TextIndex, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fp:
        fp.write(dumps_index(elements, text))


def load_index(path) -> tuple[ElementIndex, TextIndex]:
    with open(path, encoding="utf-8") as fp:
        return loads_index(fp.read())


class Corpus:
    """Indexes for several documents, keyed by document digest."""

    def __init__(self) -> None:
        self.documents: dict[str, tuple[ElementIndex, TextIndex]] = {}

    def add(self, stream: TokenStream, graph: TgsaGraph) -> str:
        self.documents[graph.digest] = build_indexes(stream, graph)
        return graph.digest

    def __getitem__(self, digest: str) -> tuple[ElementIndex, TextIndex]:
        return self.documents[digest]

    def __len__(self) -> int:
        return len(self.documents)

    def overlapping_pairs(self, name_a: str, name_b: str) -> dict[str, list]:
        return {
            d: overlapping_pairs(el, name_a, name_b)
            for d, (el, _) in self.documents.items()
        }


def entries_as_records(entries: Iterable[ElementEntry]) -> list[dict]:
    return [{"name": e.name, "start": e.start, "end": e.end} for e in entries]
