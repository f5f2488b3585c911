"""The two-relational TGSA graph and its streaming construction.

Vertices are elements and text nodes. Arcs carry one of two labels:
``P-C`` (parent-child, the only label that forms paths) and ``O``
(order-directed overlap, from the earlier-starting element to the later one).
"""

from __future__ import annotations

import enum
import gc
import json
from collections import deque
from contextlib import contextmanager
from typing import IO, Iterable, NamedTuple

from .doc_model import TokenKind, TokenStream, ValidationReport, validate_stream


class VertexKind(enum.Enum):
    ELEMENT = "Element"
    TEXT = "TextNode"


class ArcLabel(enum.Enum):
    PC = "P-C"
    O = "O"


class Vertex(NamedTuple):
    id: str
    kind: VertexKind
    name: str
    start: int
    end: int

    @property
    def is_element(self) -> bool:
        return self.kind is VertexKind.ELEMENT


class Arc(NamedTuple):
    source: str
    label: ArcLabel
    target: str


class InvalidStreamError(ValueError):
    def __init__(self, report: ValidationReport):
        self.report = report
        super().__init__(f"invalid token stream:\n{report}")


class ConstructionError(RuntimeError):
    """Internal inconsistency during construction; a bug, never bad input."""


class GraphFormatError(ValueError):
    pass


def text_vertex_id(ordinal: int) -> str:
    return f"text@{ordinal}"


# shared child list of text vertices, which never gain children
_LEAF: tuple[int, ...] = ()

# reachability bitsets are only materialized below this size
_CLOSURE_LIMIT = 20_000


class TgsaGraph:
    """Immutable TGSA graph.

    Vertices are kept sorted by start ordinal; adjacency is stored as lists of
    vertex positions. Accessors take and return vertex ids.
    """

    __slots__ = (
        "_vertices", "_index", "_children", "_osucc", "_root", "digest",
        "_parents", "_opred", "_arcs", "_closure", "_forward",
    )

    def __init__(
        self,
        vertices: list[Vertex],
        children: list[list[int]],
        osucc: dict[int, list[int]],
        root: int,
        digest: str = "",
        index: dict[str, int] | None = None,
    ):
        self._vertices = vertices
        # id -> position; built on first lookup unless the caller has one
        if index is not None and len(index) != len(vertices):
            raise ValueError("duplicate vertex ids")
        self._index = index
        self._children = children
        self._osucc = osucc
        self._root = root
        self.digest = digest
        self._parents: list[list[int]] | None = None
        self._opred: dict[int, list[int]] | None = None
        self._arcs: frozenset[Arc] | None = None
        self._closure: list[int] | None = None
        self._forward: bool | None = None

    # -- building from explicit arcs ------------------------------------
    @classmethod
    def from_arcs(
        cls,
        vertices: Iterable[Vertex],
        arcs: Iterable[Arc | tuple[str, ArcLabel | str, str]],
        root: str,
        digest: str = "",
    ) -> "TgsaGraph":
        """Assemble a graph from arbitrary arcs (no semantic checks)."""
        verts = sorted(vertices, key=lambda v: (v.start, v.end))
        index = {v.id: i for i, v in enumerate(verts)}
        children: list[list[int]] = [[] for _ in verts]
        osucc: dict[int, list[int]] = {}
        seen: set[tuple[str, ArcLabel, str]] = set()
        for src, label, dst in arcs:
            label = ArcLabel(label)
            if (src, label, dst) in seen:
                continue
            seen.add((src, label, dst))
            try:
                s, d = index[src], index[dst]
            except KeyError as exc:
                raise ValueError(f"arc references unknown vertex {exc.args[0]!r}") from None
            if label is ArcLabel.PC:
                children[s].append(d)
            else:
                osucc.setdefault(s, []).append(d)
        if root not in index:
            raise ValueError(f"unknown root {root!r}")
        for lst in children:
            lst.sort()
        for lst in osucc.values():
            lst.sort()
        return cls(verts, children, osucc, index[root], digest, index)

    def with_arcs(self, add: Iterable[Arc] = (), remove: Iterable[Arc] = ()) -> "TgsaGraph":
        gone = {Arc(s, ArcLabel(l), t) for s, l, t in remove}
        arcs = [a for a in self.arcs if a not in gone]
        arcs.extend(Arc(s, ArcLabel(l), t) for s, l, t in add)
        return TgsaGraph.from_arcs(self._vertices, arcs, self.root, self.digest)

    # -- basic views ------------------------------------------------------
    @property
    def root(self) -> str:
        return self._vertices[self._root].id

    @property
    def vertices(self) -> tuple[Vertex, ...]:
        return tuple(self._vertices)

    def elements(self) -> list[Vertex]:
        return [v for v in self._vertices if v.kind is VertexKind.ELEMENT]

    def __len__(self) -> int:
        return len(self._vertices)

    def __contains__(self, vid: str) -> bool:
        return vid in self._id_index()

    def vertex(self, vid: str) -> Vertex:
        return self._vertices[self._pos(vid)]

    def _id_index(self) -> dict[str, int]:
        if self._index is None:
            index = {v.id: i for i, v in enumerate(self._vertices)}
            if len(index) != len(self._vertices):
                raise ValueError("duplicate vertex ids")
            self._index = index
        return self._index

    def _pos(self, vid: str) -> int:
        try:
            return self._id_index()[vid]
        except KeyError:
            raise KeyError(f"unknown vertex {vid!r}") from None

    def _ids(self, positions: Iterable[int]) -> frozenset[str]:
        vs = self._vertices
        return frozenset(vs[i].id for i in positions)

    @property
    def arcs(self) -> frozenset[Arc]:
        if self._arcs is None:
            vs = self._vertices
            out = [
                Arc(vs[s].id, ArcLabel.PC, vs[d].id)
                for s, kids in enumerate(self._children)
                for d in kids
            ]
            out.extend(
                Arc(vs[s].id, ArcLabel.O, vs[d].id)
                for s, succ in self._osucc.items()
                for d in succ
            )
            self._arcs = frozenset(out)
        return self._arcs

    def pc_pairs(self) -> set[tuple[str, str]]:
        return {(a.source, a.target) for a in self.arcs if a.label is ArcLabel.PC}

    def o_pairs(self) -> set[tuple[str, str]]:
        return {(a.source, a.target) for a in self.arcs if a.label is ArcLabel.O}

    def arc_count(self) -> int:
        return sum(map(len, self._children)) + sum(map(len, self._osucc.values()))

    def has_arc(self, source: str, label: ArcLabel | str, target: str) -> bool:
        s, t = self._pos(source), self._pos(target)
        if ArcLabel(label) is ArcLabel.PC:
            return t in self._children[s]
        return t in self._osucc.get(s, ())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TgsaGraph):
            return NotImplemented
        return (
            self._vertices == other._vertices
            and self.root == other.root
            and self.arcs == other.arcs
        )

    def __repr__(self) -> str:
        return f"TgsaGraph(vertices={len(self)}, arcs={self.arc_count()}, root={self.root!r})"

    # -- accessors --------------------------------------------------------
    def _parent_lists(self) -> list[list[int]]:
        if self._parents is None:
            parents: list[list[int]] = [[] for _ in self._vertices]
            for s, kids in enumerate(self._children):
                for d in kids:
                    parents[d].append(s)
            self._parents = parents
        return self._parents

    def _opred_lists(self) -> dict[int, list[int]]:
        if self._opred is None:
            pred: dict[int, list[int]] = {}
            for s, succ in self._osucc.items():
                for d in succ:
                    pred.setdefault(d, []).append(s)
            self._opred = pred
        return self._opred

    def children(self, vid: str) -> frozenset[str]:
        return self._ids(self._children[self._pos(vid)])

    def parents(self, vid: str) -> frozenset[str]:
        return self._ids(self._parent_lists()[self._pos(vid)])

    def overlap_successors(self, vid: str) -> frozenset[str]:
        return self._ids(self._osucc.get(self._pos(vid), ()))

    def overlap_predecessors(self, vid: str) -> frozenset[str]:
        return self._ids(self._opred_lists().get(self._pos(vid), ()))

    def _reach(self, start: int, adjacency) -> set[int]:
        seen: set[int] = set()
        todo = list(adjacency(start))
        while todo:
            i = todo.pop()
            if i in seen:
                continue
            seen.add(i)
            todo.extend(adjacency(i))
        return seen

    def descendants(self, vid: str) -> frozenset[str]:
        kids = self._children
        return self._ids(self._reach(self._pos(vid), kids.__getitem__))

    def ancestors(self, vid: str) -> frozenset[str]:
        parents = self._parent_lists()
        return self._ids(self._reach(self._pos(vid), parents.__getitem__))

    def _is_forward(self) -> bool:
        if self._forward is None:
            self._forward = all(
                d > s for s, kids in enumerate(self._children) for d in kids
            )
        return self._forward

    def _reachability(self) -> list[int] | None:
        """Per-vertex descendant bitsets, bit k of entry i meaning i+k is reachable."""
        if self._closure is None:
            if len(self._vertices) > _CLOSURE_LIMIT or not self._is_forward():
                return None
            rel = [0] * len(self._vertices)
            for i in range(len(self._vertices) - 1, -1, -1):
                r = 0
                for c in self._children[i]:
                    r |= (1 | rel[c]) << (c - i)
                rel[i] = r
            self._closure = rel
        return self._closure

    def path_exists(self, u: str, v: str) -> bool:
        """True iff a non-empty chain of P-C arcs leads from ``u`` to ``v``."""
        s, t = self._pos(u), self._pos(v)
        if s == t:
            return False
        closure = self._reachability()
        if closure is not None:
            return t > s and bool((closure[s] >> (t - s)) & 1)
        forward = self._is_forward()
        seen: set[int] = set()
        todo = [s]
        while todo:
            i = todo.pop()
            for c in self._children[i]:
                if c == t:
                    return True
                if c in seen or (forward and c > t):
                    continue
                seen.add(c)
                todo.append(c)
        return False


# ---------------------------------------------------------------------------
# construction


class OpenEntry:
    """An element whose end tag has not been read yet."""

    __slots__ = ("vertex", "current_parent", "D", "start", "name")

    def __init__(
        self, vertex: int, current_parent: int | None, start: int = 0, name: str | None = None
    ):
        self.vertex = vertex
        self.current_parent = current_parent
        self.D: set[int] | None = None
        self.start = start
        self.name = name

    def __repr__(self) -> str:
        return f"OpenEntry({self.vertex}, parent={self.current_parent}, D={self.D})"


class Reparent(NamedTuple):
    closing: str
    node: str
    old_parent: str
    new_parent: str


class ChildAdopted(NamedTuple):
    closing: str
    child: str
    via: str
    preceding: tuple[str, ...]


class ConstructionLog:
    """Event log filled in by :func:`construct` when passed in."""

    def __init__(self) -> None:
        self.events: list[Reparent | ChildAdopted] = []

    def adopted(self) -> list[ChildAdopted]:
        return [e for e in self.events if isinstance(e, ChildAdopted)]

    def reparented(self) -> list[Reparent]:
        return [e for e in self.events if isinstance(e, Reparent)]


class _Builder:
    def __init__(self, log: ConstructionLog | None):
        self.ids: list[str] = []
        # filled in when a vertex is complete: text at once, elements at their end tag
        self.vertices: list[Vertex | None] = []
        self.children: list[list[int]] = []
        self.osucc: dict[int, list[int]] = {}
        self.position: dict[str, int] = {}
        self.open: list[OpenEntry] = []
        self.log = log

    def _remove_pc(self, source: int, target: int) -> None:
        try:
            self.children[source].remove(target)
        except ValueError:
            raise ConstructionError(
                f"expected arc ({self.ids[source]}, P-C, {self.ids[target]}) is missing"
            ) from None

    def close_overlapping(self, i: int) -> None:
        """End tag for the open entry at list position ``i`` (not the latest)."""
        L = self.open
        closing = L[i]
        n = closing.vertex
        later = L[i + 1:]
        x = later[0]
        if x.current_parent != n:
            raise ConstructionError(
                f"{self.ids[x.vertex]} is not a child of closing {self.ids[n]}"
            )
        self._remove_pc(n, x.vertex)
        new_parent = closing.current_parent
        if new_parent is None:
            raise ConstructionError(f"root {self.ids[n]} cannot overlap")
        self.children[new_parent].append(x.vertex)
        x.current_parent = new_parent
        if self.log is not None:
            ids = self.ids
            self.log.events.append(
                Reparent(ids[n], ids[x.vertex], ids[n], ids[new_parent])
            )
        later_vertices = {e.vertex for e in later}
        succ = self.osucc.setdefault(n, [])
        for y in later:
            succ.append(y.vertex)
            self.add_parent_child_relation(i, y, later_vertices)
        del L[i]

    def add_parent_child_relation(
        self, i: int, y: OpenEntry, later_vertices: set[int]
    ) -> None:
        """Give the closing entry ``L[i]`` the children of open ``y`` it lacks.

        Children still open after the closer are overlap targets and are
        skipped, as are children already reachable through the closer (its D
        set). Each adopted child is recorded in the D set of every entry
        preceding the closer.
        """
        L = self.open
        closing = L[i]
        n = closing.vertex
        D = closing.D
        for c in list(self.children[y.vertex]):
            if c in later_vertices:
                continue
            if D is not None and c in D:
                continue
            self.children[n].append(c)
            for a in L[:i]:
                if a.D is None:
                    a.D = set()
                a.D.add(c)
            if self.log is not None:
                ids = self.ids
                self.log.events.append(
                    ChildAdopted(ids[n], ids[c], ids[y.vertex], tuple(ids[a.vertex] for a in L[:i]))
                )

    def finish(self, digest: str) -> TgsaGraph:
        for kids in self.children:
            if len(kids) > 1:
                kids.sort()
        for succ in self.osucc.values():
            succ.sort()
        osucc = {k: v for k, v in self.osucc.items() if v}
        return TgsaGraph(self.vertices, self.children, osucc, 0, digest)


@contextmanager
def _gc_paused():
    # construction allocates no reference cycles; collector passes over the
    # growing heap would make the build superlinear
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was_enabled:
            gc.enable()


def construct(stream: TokenStream, log: ConstructionLog | None = None) -> TgsaGraph:
    """Build the TGSA graph from a token stream in one pass.

    The stream is validated first; :class:`InvalidStreamError` carries the
    report. Pass a :class:`ConstructionLog` to record re-parenting and
    overlap-adoption events.
    """
    with _gc_paused():
        return _construct(stream, log)


def _reject(stream: TokenStream, problem: str):
    """Raise for a stream the single-pass checks refused."""
    report = validate_stream(stream)
    if not report.ok:
        raise InvalidStreamError(report)
    # valid as a stream but not as a graph, e.g. an element id shaped like a text id
    raise ConstructionError(problem)


def _construct(stream: TokenStream, log: ConstructionLog | None) -> TgsaGraph:
    # Well-formedness is checked inline; any anomaly defers to validate_stream
    # for the full report, so a second pass over the tokens is only paid on
    # invalid input.
    b = _Builder(log)
    ids, vertices, children, position, L = b.ids, b.vertices, b.children, b.position, b.open
    ELEMENT, TEXT = VertexKind.ELEMENT, VertexKind.TEXT
    START, END = TokenKind.START, TokenKind.END
    expected = 0
    text_shaped: list[str] = []  # element ids that could clash with text vertex ids

    for tok in stream.tokens:
        expected += 1
        if tok.ordinal != expected:
            _reject(stream, "bad ordinal")
        kind = tok.kind
        if kind is START:
            nid = tok.node_id
            if nid is None or nid in position or (not L and ids):
                _reject(stream, f"cannot open {nid}")
            if nid.startswith("text@"):
                text_shaped.append(nid)
            v = len(ids)
            ids.append(nid)
            vertices.append(None)
            children.append([])
            position[nid] = v
            if L:
                parent = L[-1].vertex
                children[parent].append(v)
                L.append(OpenEntry(v, parent, tok.ordinal, tok.name))
            else:
                L.append(OpenEntry(v, None, tok.ordinal, tok.name))
        elif kind is END:
            v = position.get(tok.node_id)
            if v is None or vertices[v] is not None or not L:
                _reject(stream, f"cannot close {tok.node_id}")
            if L[-1].vertex == v:
                entry = L[-1]
                i = -1
            else:
                for i in range(len(L) - 2, -1, -1):
                    if L[i].vertex == v:
                        break
                else:
                    _reject(stream, f"{tok.node_id} is not open")
                if i == 0:
                    _reject(stream, "root closed before its descendants")
                entry = L[i]
            if entry.name != tok.name:
                _reject(stream, f"{tok.node_id} closed under another name")
            if i == -1:
                L.pop()
            else:
                b.close_overlapping(i)
            vertices[v] = Vertex(tok.node_id, ELEMENT, tok.name, entry.start, tok.ordinal)
        else:
            if not L:
                _reject(stream, "text outside the root")
            v = len(ids)
            vid = f"text@{tok.ordinal}"  # text_vertex_id, inlined
            ids.append(vid)
            vertices.append(Vertex(vid, TEXT, tok.content, tok.ordinal, tok.ordinal))
            children.append(_LEAF)
            children[L[-1].vertex].append(v)

    if L or not ids:
        _reject(stream, "open elements remain after the last token")
    if text_shaped:
        taken = {v.id for v in vertices if v.kind is TEXT}
        for nid in text_shaped:
            if nid in taken:
                _reject(stream, f"vertex id {nid} is taken")
    return b.finish(stream.source_digest)


def path_exists(graph: TgsaGraph, u: str, v: str) -> bool:
    return graph.path_exists(u, v)


def check_adoption_paths(graph: TgsaGraph, log: ConstructionLog) -> list[str]:
    """Every entry preceding a closer that adopted ``c`` must reach ``c`` indirectly."""
    problems = []
    for ev in log.adopted():
        for a in ev.preceding:
            if not graph.path_exists(a, ev.child):
                problems.append(f"{a} has no path to {ev.child} (adopted by {ev.closing})")
            elif graph.has_arc(a, ArcLabel.PC, ev.child):
                problems.append(f"{a} reaches {ev.child} by a direct arc, not an indirect path")
    return problems


def check_single_parent(log: ConstructionLog) -> list[str]:
    """Re-parenting must always replace the closing node as the single open parent."""
    problems = []
    for ev in log.reparented():
        if ev.old_parent != ev.closing:
            problems.append(
                f"{ev.node} re-parented from {ev.old_parent} while closing {ev.closing}"
            )
        if ev.new_parent in (ev.node, ev.closing):
            problems.append(f"{ev.node} re-parented to {ev.new_parent}")
    return problems


# ---------------------------------------------------------------------------
# validation


def _sweep(vertices: list[Vertex]):
    """Yield (vertex, containers, overlappers-before) in start order.

    ``containers`` holds active elements whose span strictly encloses the
    vertex, in start order; ``overlappers`` holds elements that start before
    and end inside the vertex.
    """
    active: list[Vertex] = []
    for v in vertices:
        s = v.start
        active = [a for a in active if a.end > s]
        containers = [a for a in active if a.end > v.end]
        overlappers = [a for a in active if a.end < v.end] if v.is_element else []
        yield v, containers, overlappers
        if v.is_element:
            active.append(v)


def _immediate(containers: list[Vertex]) -> list[Vertex]:
    out = []
    min_end = None
    for a in reversed(containers):
        if min_end is None or a.end < min_end:
            out.append(a)
            min_end = a.end
    return out


def validate_tgsa(graph: TgsaGraph) -> ValidationReport:
    """Check the graph against the TGSA definition and report every violation.

    Codes ``item1`` .. ``item5`` follow the five conditions: acyclic and
    connected; a unique root; P-C arcs are exactly immediate span containment;
    O arcs are exactly order-directed interleaving; no P-C arc shortcuts an
    indirect path.
    """
    report = ValidationReport("tgsa")
    vs = graph._vertices
    n = len(vs)
    if n == 0:
        report.add("item1", "graph has no vertices")
        return report
    children = graph._children
    osucc = graph._osucc

    for v in vs:
        if v.start > v.end or (v.is_element and v.start == v.end):
            report.add("vertex", f"vertex {v.id} has invalid span ({v.start},{v.end})", v.start)

    # item 1: no loops, acyclic, connected
    indeg = [0] * n
    undirected: list[list[int]] = [[] for _ in range(n)]
    out_all: list[list[int]] = [list(children[i]) + list(osucc.get(i, ())) for i in range(n)]
    for s in range(n):
        for d in out_all[s]:
            if d == s:
                report.add("item1", f"self-loop on {vs[s].id}", vs[s].start)
            indeg[d] += 1
            undirected[s].append(d)
            undirected[d].append(s)
    deg = list(indeg)
    ready = deque(i for i in range(n) if deg[i] == 0)
    visited = 0
    while ready:
        i = ready.popleft()
        visited += 1
        for d in out_all[i]:
            deg[d] -= 1
            if deg[d] == 0:
                ready.append(d)
    if visited != n:
        report.add("item1", f"graph contains a cycle ({n - visited} vertices on or behind cycles)")
    seen = {graph._root}
    todo = [graph._root]
    while todo:
        i = todo.pop()
        for j in undirected[i]:
            if j not in seen:
                seen.add(j)
                todo.append(j)
    if len(seen) != n:
        missing = sorted(vs[i].id for i in range(n) if i not in seen)
        report.add("item1", f"graph is not connected; unreachable: {', '.join(missing[:10])}")

    # item 2: unique root
    roots = [i for i in range(n) if indeg[i] == 0]
    if roots != [graph._root]:
        names = ", ".join(vs[i].id for i in roots) or "none"
        report.add("item2", f"expected sole root {graph.root}; vertices without incoming arcs: {names}")

    # items 3 and 4 against span semantics
    pos = graph._id_index()
    expected_pc: set[tuple[int, int]] = set()
    expected_o: set[tuple[int, int]] = set()
    contains: set[tuple[int, int]] = set()
    for v, containers, overlappers in _sweep(vs):
        j = pos[v.id]
        for a in containers:
            contains.add((pos[a.id], j))
        for a in _immediate(containers):
            expected_pc.add((pos[a.id], j))
        for a in overlappers:
            expected_o.add((pos[a.id], j))

    actual_pc = {(s, d) for s in range(n) for d in children[s]}
    for s, d in sorted(actual_pc - expected_pc):
        if (s, d) in contains and _indirect(children, s, d):
            continue  # reported under item 5
        report.add(
            "item3",
            f"P-C arc ({vs[s].id}, {vs[d].id}) is not an immediate containment",
            vs[s].start,
        )
    for s, d in sorted(expected_pc - actual_pc):
        report.add("item3", f"missing P-C arc ({vs[s].id}, {vs[d].id})", vs[s].start)

    actual_o = {(s, d) for s, succ in osucc.items() for d in succ}
    for s, d in sorted(actual_o - expected_o):
        report.add(
            "item4",
            f"O arc ({vs[s].id}, {vs[d].id}) is not a preceding-and-overlapping pair",
            vs[s].start,
        )
    for s, d in sorted(expected_o - actual_o):
        report.add("item4", f"missing O arc ({vs[s].id}, {vs[d].id})", vs[s].start)

    # item 5: a shortcut arc needs its target to have a second parent on the path
    parents = graph._parent_lists()
    for d in range(n):
        ps = parents[d]
        if len(ps) < 2:
            continue
        for s in ps:
            if any(p != s and graph.path_exists(vs[s].id, vs[p].id) for p in ps):
                report.add(
                    "item5",
                    f"P-C arc ({vs[s].id}, {vs[d].id}) shortcuts an indirect path",
                    vs[s].start,
                )
    return report


def _indirect(children: list[list[int]], s: int, d: int) -> bool:
    seen: set[int] = set()
    todo = [c for c in children[s] if c != d]
    while todo:
        i = todo.pop()
        if i == d:
            return True
        if i in seen:
            continue
        seen.add(i)
        todo.extend(children[i])
    return False


# ---------------------------------------------------------------------------
# export


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def to_dot(graph: TgsaGraph, name: str = "tgsa") -> str:
    """Graphviz rendering: P-C arcs solid, O arcs dashed."""
    lines = [f"digraph {name} {{", "  node [shape=box];"]
    for v in graph._vertices:
        if v.is_element:
            lines.append(f"  {_dot_quote(v.id)} [label={_dot_quote(f'{v.name} ({v.start},{v.end})')}];")
        else:
            lines.append(f"  {_dot_quote(v.id)} [label={_dot_quote(v.name)}, shape=plaintext];")
    for a in _sorted_arcs(graph):
        style = "solid" if a.label is ArcLabel.PC else "dashed"
        lines.append(f"  {_dot_quote(a.source)} -> {_dot_quote(a.target)} [style={style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _sorted_arcs(graph: TgsaGraph) -> list[Arc]:
    vs = graph._vertices
    out = []
    for s, kids in enumerate(graph._children):
        for d in kids:
            out.append((vs[s].start, ArcLabel.PC.value, vs[d].start, Arc(vs[s].id, ArcLabel.PC, vs[d].id)))
    for s, succ in graph._osucc.items():
        for d in succ:
            out.append((vs[s].start, ArcLabel.O.value, vs[d].start, Arc(vs[s].id, ArcLabel.O, vs[d].id)))
    out.sort(key=lambda t: t[:3])
    return [t[3] for t in out]


def _dumps(record: dict) -> str:
    return json.dumps(record, ensure_ascii=False, separators=(",", ":"))


def dump_graph(graph: TgsaGraph, fp: IO[str]) -> None:
    """Write line-delimited JSON: header, vertices by start, arcs by (from, label, to)."""
    fp.write(_dumps({
        "record": "graph",
        "root": graph.root,
        "digest": graph.digest,
        "vertices": len(graph),
        "arcs": graph.arc_count(),
    }) + "\n")
    for v in graph._vertices:
        fp.write(_dumps({
            "record": "vertex", "id": v.id, "kind": v.kind.value,
            "name": v.name, "start": v.start, "end": v.end,
        }) + "\n")
    for a in _sorted_arcs(graph):
        fp.write(_dumps({"record": "arc", "from": a.source, "label": a.label.value, "to": a.target}) + "\n")


def dumps_graph(graph: TgsaGraph) -> str:
    import io

    buf = io.StringIO()
    dump_graph(graph, buf)
    return buf.getvalue()


def loads_graph(text: str) -> TgsaGraph:
    lines = text.splitlines()
    if not lines:
        raise GraphFormatError("empty graph file")
    try:
        records = [json.loads(line) for line in lines if line.strip()]
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"malformed graph record: {exc}") from None
    header = records[0]
    if not isinstance(header, dict) or header.get("record") != "graph":
        raise GraphFormatError("missing graph header record")
    vertices = []
    arcs = []
    try:
        for r in records[1:]:
            kind = r.get("record")
            if kind == "vertex":
                vertices.append(Vertex(r["id"], VertexKind(r["kind"]), r["name"], int(r["start"]), int(r["end"])))
            elif kind == "arc":
                arcs.append(Arc(r["from"], ArcLabel(r["label"]), r["to"]))
            else:
                raise GraphFormatError(f"unknown record type {kind!r}")
    except (KeyError, ValueError, AttributeError, TypeError) as exc:
        if isinstance(exc, GraphFormatError):
            raise
        raise GraphFormatError(f"malformed graph record: {exc!r}") from None
    if len(vertices) != header.get("vertices") or len(arcs) != header.get("arcs"):
        raise GraphFormatError("record counts do not match header (truncated file?)")
    try:
        return TgsaGraph.from_arcs(vertices, arcs, header["root"], header.get("digest", ""))
    except (KeyError, ValueError) as exc:
        raise GraphFormatError(str(exc)) from None


def load_graph(path) -> TgsaGraph:
    with open(path, encoding="utf-8") as fp:
        return loads_graph(fp.read())
