import itertools

import pytest
from hypothesis import given, settings, strategies as st

from tgsa.doc_model import tokenize, validate_stream
from tgsa.graph import ArcLabel, construct, validate_tgsa
from tgsa.oracle import Span, SpanTable, random_document, reference_graph, reference_relations, spans

from conftest import text_id


def test_doc2_spans(doc2):
    table = spans(doc2)
    got = {s.id: (s.start, s.end) for s in table}
    assert got == {
        "r": (1, 9), "a": (2, 6), "b": (4, 8),
        text_id(3): (3, 3), text_id(5): (5, 5), text_id(7): (7, 7),
    }
    assert table.root().id == "r"


def test_doc1_spans_are_nested(doc1):
    table = [s for s in spans(doc1) if not s.is_text]
    for x, y in itertools.combinations(table, 2):
        inner, outer = sorted((x, y), key=lambda s: s.end - s.start)
        nested = outer.start < inner.start and inner.end < outer.end
        disjoint = x.end < y.start or y.end < x.start
        assert nested or disjoint


def test_single_element():
    table = spans(tokenize("<r></r>", "nested"))
    assert [(s.start, s.end) for s in table] == [(1, 2)]
    g = reference_graph(table)
    assert g.arcs == frozenset()
    assert validate_tgsa(g).ok


def test_doc3_relations(doc3):
    rel = reference_relations(spans(doc3))
    assert rel.overlap_pairs == {("a", "b"), ("b", "c")}
    assert ("a", "c") not in rel.overlap_pairs


def test_doc2_immediate_containment(doc2):
    rel = reference_relations(spans(doc2))
    t2 = text_id(5)
    assert {("a", t2), ("b", t2)} <= rel.immediate_containment_pairs
    assert ("r", t2) not in rel.immediate_containment_pairs
    assert ("r", t2) in rel.containment_pairs


def test_doc1_no_overlap(doc1):
    assert reference_relations(spans(doc1)).overlap_pairs == frozenset()


def test_reference_matches_construct(doc2, doc3):
    for s in (doc2, doc3):
        assert reference_graph(spans(s)).arcs == construct(s).arcs


def test_interleave_chain_validates():
    # five elements, each interleaving the next
    text = (
        '<r sID="r"/><e1 sID="1"/><e2 sID="2"/><e1 eID="1"/><e3 sID="3"/><e2 eID="2"/>'
        '<e4 sID="4"/><e3 eID="3"/><e5 sID="5"/><e4 eID="4"/><e5 eID="5"/><r eID="r"/>'
    )
    g = reference_graph(spans(tokenize(text)))
    assert validate_tgsa(g).ok
    assert g.o_pairs() == {("1", "2"), ("2", "3"), ("3", "4"), ("4", "5")}


def brute_immediate(table):
    """Triple loop over spans, independent of the matrix formulation."""
    def contains(a, b):
        return a.start < b.start and b.end < a.end

    spans_ = list(table)
    out = set()
    for a in spans_:
        for b in spans_:
            if contains(a, b) and not any(contains(a, c) and contains(c, b) for c in spans_):
                out.add((a.id, b.id))
    return out


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 25), st.sampled_from([0.0, 0.3, 0.7, 1.0]))
def test_relations_match_triple_loop(seed, n, p):
    table = spans(random_document(seed, n, p))
    rel = reference_relations(table)
    assert rel.immediate_containment_pairs == brute_immediate(table)
    # irreflexive and directed by document order
    by_id = table.by_id()
    for a, b in rel.overlap_pairs:
        assert a != b and by_id[a].start < by_id[b].start
        assert (b, a) not in rel.overlap_pairs
    # containment is transitive; immediate containment is its reduction
    cont = rel.containment_pairs
    for a, b in cont:
        for c in (y for x, y in cont if x == b):
            assert (a, c) in cont
    assert rel.immediate_containment_pairs <= cont


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 30), st.floats(0, 1))
def test_reference_graph_validates(seed, n, p):
    assert validate_tgsa(reference_graph(spans(random_document(seed, n, p)))).ok


def test_generator_deterministic_and_valid():
    a = random_document(42, 50, 0.3)
    b = random_document(42, 50, 0.3)
    assert a == b
    assert a != random_document(43, 50, 0.3)
    assert validate_stream(a).ok


def test_generator_element_count():
    for n in (1, 2, 17):
        s = random_document(n, n, 0.5)
        assert sum(t.kind.name == "START" for t in s) == n


def test_generator_hierarchical_yields_tree():
    for seed in range(30):
        g = construct(random_document(seed, 60, 0.0))
        assert g.o_pairs() == set()
        parents = [0] * len(g)
        for a in g.arcs:
            parents[[v.id for v in g.vertices].index(a.target)] += 1
        assert parents[0] == 0 and all(p == 1 for p in parents[1:])


def test_generator_text_free_and_alphabet():
    s = random_document(1, 30, 0.4, text_probability=0.0, name_alphabet=("x",))
    assert all(t.is_tag for t in s)
    assert {t.name for t in s} == {"x"}


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n_elements": 0},
        {"overlap_probability": 1.5},
        {"text_probability": 1.0},
        {"max_depth": 0},
        {"n_elements": 2, "max_depth": 1},
        {"name_alphabet": ()},
    ],
)
def test_generator_rejects_bad_parameters(kwargs):
    with pytest.raises(ValueError):
        random_document(0, **kwargs)


def test_span_table_root():
    table = SpanTable((Span("r", "r", 1, 4), Span("a", "a", 2, 3)))
    assert table.root().id == "r"
    assert reference_graph(table).pc_pairs() == {("r", "a")}
    assert all(a.label is ArcLabel.PC for a in reference_graph(table).arcs)
