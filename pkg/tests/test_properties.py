"""Invariants checked on generated documents."""

import itertools
from dataclasses import replace

from hypothesis import given, settings, strategies as st

from tgsa.doc_model import make_stream, render, tokenize, validate_stream
from tgsa.graph import (
    ArcLabel,
    ConstructionError,
    ConstructionLog,
    InvalidStreamError,
    check_adoption_paths,
    check_single_parent,
    construct,
    dumps_graph,
    loads_graph,
    validate_tgsa,
)
from tgsa.index import (
    build_indexes,
    dumps_index,
    elements_containing,
    is_ancestor,
    is_parent,
    loads_index,
    overlaps,
    term_positions,
)
from tgsa.oracle import random_document, reference_graph, spans

documents = st.builds(
    random_document,
    seed=st.integers(0, 10**6),
    n_elements=st.integers(1, 60),
    overlap_probability=st.sampled_from([0.0, 0.1, 0.3, 0.5, 0.9, 1.0]),
    max_depth=st.integers(2, 12),
    text_probability=st.sampled_from([0.0, 0.3, 0.6]),
)

common = settings(max_examples=150, deadline=None)


@common
@given(documents)
def test_construct_matches_reference(stream):
    assert construct(stream).arcs == reference_graph(spans(stream)).arcs


@common
@given(documents)
def test_constructed_graph_is_well_formed(stream):
    report = validate_tgsa(construct(stream))
    assert report.ok, str(report)


@common
@given(documents)
def test_predicates_agree_with_graph(stream):
    graph = construct(stream)
    elements, _ = build_indexes(stream, graph)
    ids = {(v.start, v.end): v.id for v in graph.elements()}
    for a, b in itertools.permutations(elements.entries(), 2):
        u, v = ids[a.start, a.end], ids[b.start, b.end]
        assert overlaps(a, b) == graph.has_arc(u, ArcLabel.O, v)
        assert is_ancestor(a, b) == graph.path_exists(u, v)
        assert is_parent(a, b) == graph.has_arc(u, ArcLabel.PC, v)


@common
@given(st.integers(0, 10**6), st.integers(1, 80), st.integers(2, 12))
def test_hierarchical_documents_give_trees(seed, n, depth):
    graph = construct(random_document(seed, n, 0.0, depth))
    assert graph.o_pairs() == set()
    ids = [v.id for v in graph.vertices]
    assert [len(graph.parents(i)) for i in ids] == [0] + [1] * (len(ids) - 1)


@common
@given(documents)
def test_log_invariants(stream):
    log = ConstructionLog()
    graph = construct(stream, log)
    assert check_adoption_paths(graph, log) == []
    assert check_single_parent(log) == []


@common
@given(documents)
def test_construct_is_deterministic(stream):
    a, b = construct(stream), construct(stream)
    assert dumps_graph(a) == dumps_graph(b)
    assert loads_graph(dumps_graph(a)) == a


@common
@given(documents)
def test_render_round_trip(stream):
    assert validate_stream(stream).ok
    for fmt in ("milestone",):
        again = tokenize(render(stream, fmt), fmt)
        assert [(t.kind, t.name, t.node_id, t.content) for t in again] == [
            (t.kind, t.name, t.node_id, t.content) for t in stream
        ]


@common
@given(documents)
def test_index_is_complete(stream):
    graph = construct(stream)
    elements, texts = build_indexes(stream, graph)
    assert len(elements) == sum(1 for _ in graph.elements())
    element_spans = sorted((v.start, v.end) for v in graph.elements())
    assert sorted((e.start, e.end) for e in elements.entries()) == element_spans
    for v in graph.vertices:
        if v.is_element:
            continue
        for term in v.name.split():
            assert v.start in term_positions(texts, term)
        holders = {(e.start, e.end) for e in elements_containing(elements, v.start)}
        expected = {(graph.vertex(a).start, graph.vertex(a).end) for a in graph.ancestors(v.id)}
        assert holders == expected


@settings(max_examples=60, deadline=None)
@given(documents)
def test_index_round_trip(stream):
    el, tx = build_indexes(stream, construct(stream))
    text = dumps_index(el, tx)
    el2, tx2 = loads_index(text)
    assert (el2, tx2) == (el, tx)
    assert dumps_index(el2, tx2) == text


def _mutate(stream, data):
    toks = list(stream.tokens)
    op = data.draw(st.sampled_from(["drop", "swap", "dup", "rename", "reid", "shift"]))
    i = data.draw(st.integers(0, len(toks) - 1))
    j = data.draw(st.integers(0, len(toks) - 1))
    t = toks[i]
    if op == "drop":
        del toks[i]
    elif op == "swap":
        toks[i], toks[j] = toks[j], toks[i]
    elif op == "dup":
        toks.insert(j, t)
    elif op == "rename" and t.is_tag:
        toks[i] = replace(t, name=t.name + "x")
    elif op == "reid" and t.is_tag:
        toks[i] = replace(t, node_id=toks[j].node_id or "text@1")
    elif op == "shift":
        toks[i] = replace(t, ordinal=t.ordinal + 1)
        return make_stream(toks)
    return make_stream(replace(t, ordinal=k) for k, t in enumerate(toks, 1))


@settings(max_examples=300, deadline=None)
@given(documents, st.data())
def test_construct_rejects_exactly_invalid_streams(stream, data):
    mutated = _mutate(stream, data)
    report = validate_stream(mutated)
    try:
        graph = construct(mutated)
    except InvalidStreamError as exc:
        assert not report.ok
        assert exc.report.codes() == report.codes()
    except ConstructionError:
        # only element ids shaped like text ids get here
        assert report.ok
        assert any(t.is_tag and t.node_id.startswith("text@") for t in mutated)
    else:
        assert report.ok
        assert graph.arcs == reference_graph(spans(mutated)).arcs
