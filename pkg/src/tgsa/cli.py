"""Command-line front end.

Exit status: 0 success, 1 validation failure, 2 usage error, 3 I/O error.
Set ``TGSA_LOG`` (e.g. ``INFO`` or ``DEBUG``) for diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import __version__
from .doc_model import FORMATS, TokenizeError, tokenize, validate_stream
from .graph import (
    ConstructionError,
    GraphFormatError,
    InvalidStreamError,
    construct,
    dumps_graph,
    loads_graph,
    to_dot,
    validate_tgsa,
)
from .index import (
    DigestMismatchError,
    IndexFormatError,
    ancestors_of,
    build_indexes,
    check_digest,
    dumps_index,
    elements_containing,
    entries_as_records,
    exclusive_elements,
    intersecting_pairs,
    load_index,
    overlapping_pairs,
    parents_of,
    term_positions,
)

log = logging.getLogger("tgsa")

EXIT_OK, EXIT_INVALID, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, message: str, status: int):
        super().__init__(message)
        self.status = status


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fp:
            return fp.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from None


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fp:
            fp.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc}", EXIT_IO) from None


def _looks_like_graph(text: str) -> bool:
    return text.lstrip().startswith("{")


def _stream(text: str, args):
    try:
        stream = tokenize(text, args.format, args.keep_ws)
    except TokenizeError as exc:
        raise CliError(str(exc), EXIT_INVALID) from None
    log.info("tokenized %d tokens (digest %s)", len(stream), stream.source_digest[:12])
    return stream


def _build(stream):
    try:
        graph = construct(stream)
    except (InvalidStreamError, ConstructionError) as exc:
        raise CliError(str(exc), EXIT_INVALID) from None
    log.info("constructed %r", graph)
    return graph


def _graph_from(text: str, args):
    if _looks_like_graph(text):
        try:
            return loads_graph(text)
        except GraphFormatError as exc:
            raise CliError(f"bad graph file: {exc}", EXIT_INVALID) from None
    return _build(_stream(text, args))


def cmd_build(args) -> int:
    graph = _build(_stream(_read(args.input), args))
    _write(dumps_graph(graph), args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    text = _read(args.input)
    if _looks_like_graph(text):
        try:
            graph = loads_graph(text)
        except GraphFormatError as exc:
            print(f"bad graph file: {exc}", file=sys.stderr)
            return EXIT_INVALID
    else:
        stream = _stream(text, args)
        report = validate_stream(stream)
        if not report.ok:
            _write(str(report) + "\n", args.out)
            return EXIT_INVALID
        graph = _build(stream)
    report = validate_tgsa(graph)
    _write(str(report) + "\n", args.out)
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_index(args) -> int:
    stream = _stream(_read(args.input), args)
    elements, text = build_indexes(stream, _build(stream))
    _write(dumps_index(elements, text), args.out)
    return EXIT_OK


def _pair_lines(pairs) -> str:
    return "".join(json.dumps(entries_as_records(p), separators=(",", ":")) + "\n" for p in pairs)


def _entry_lines(entries) -> str:
    return "".join(json.dumps(r, separators=(",", ":")) + "\n" for r in entries_as_records(entries))


def cmd_query(args) -> int:
    stream = _stream(_read(args.input), args)
    graph = _build(stream)
    if args.index:
        try:
            elements, text = load_index(args.index)
            check_digest(elements, text, graph)
        except OSError as exc:
            raise CliError(f"cannot read {args.index}: {exc}", EXIT_IO) from None
        except (IndexFormatError, DigestMismatchError) as exc:
            raise CliError(f"bad index {args.index}: {exc}", EXIT_INVALID) from None
    else:
        elements, text = build_indexes(stream, graph)

    q = args.query
    if q == "overlapping":
        out = _pair_lines(overlapping_pairs(elements, args.name_a, args.name_b, literal=args.compat_property1))
    elif q == "intersecting":
        out = _pair_lines(intersecting_pairs(elements, args.name_a, args.name_b))
    elif q == "exclusive":
        out = _entry_lines(exclusive_elements(elements, args.name_a, args.name_b))
    elif q in ("ancestors", "parents"):
        if args.node_id not in graph:
            raise CliError(f"unknown node id {args.node_id!r}", EXIT_USAGE)
        vertex = graph.vertex(args.node_id)
        if not vertex.is_element:
            raise CliError(f"{args.node_id!r} is a text node", EXIT_USAGE)
        entry = elements.by_start(vertex.start)
        found = ancestors_of(elements, entry) if q == "ancestors" else parents_of(elements, entry)
        out = _entry_lines(sorted(found, key=lambda e: e.start))
    else:  # containing-term
        hits = {}
        for pos in term_positions(text, args.term):
            for e in elements_containing(elements, pos):
                hits[e.start] = e
        out = _entry_lines(hits[k] for k in sorted(hits))
    _write(out, args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    from .doc_model import render
    from .oracle import random_document

    names = [n for n in args.names.split(",") if n]
    try:
        stream = random_document(
            args.seed, args.elements, args.overlap_prob, args.max_depth, names, args.text_prob
        )
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    _write(render(stream, "milestone") + "\n", args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    from .bench import format_table, run_benchmark

    rows = run_benchmark(args.sizes, args.seed, args.overlap_prob, args.repeat)
    _write(format_table(rows) + "\n", args.out)
    return EXIT_OK


def cmd_export_dot(args) -> int:
    _write(to_dot(_graph_from(_read(args.input), args)), args.out)
    return EXIT_OK


def _probability(value: str) -> float:
    p = float(value)
    if not 0.0 <= p <= 1.0:
        raise argparse.ArgumentTypeError("must lie in [0, 1]")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tgsa", description="TGSA graphs and pre/post indexes for overlapping markup.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    doc = argparse.ArgumentParser(add_help=False)
    doc.add_argument("--format", choices=FORMATS, default="milestone", help="input markup dialect")
    doc.add_argument("--keep-ws", action="store_true", help="keep whitespace-only text runs")
    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("--out", metavar="PATH", help="output file (default stdout)")

    sub = parser.add_subparsers(dest="verb", required=True, metavar="VERB")

    p = sub.add_parser("build", parents=[doc, out], help="document -> graph records")
    p.add_argument("input", nargs="?", default="-")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("validate", parents=[doc, out], help="check a graph file or document")
    p.add_argument("input", nargs="?", default="-")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("index", parents=[doc, out], help="document -> element and text index records")
    p.add_argument("input", nargs="?", default="-")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("query", parents=[doc, out], help="structural queries over a document")
    p.add_argument("--input", default="-", help="document to query (default stdin)")
    p.add_argument("--index", metavar="PATH", help="prebuilt index file for the same document")
    p.add_argument("--compat-property1", action="store_true",
                   help="overlap test without the interleaving clause (also matches disjoint spans)")
    qs = p.add_subparsers(dest="query", required=True, metavar="QUERY")
    for name, text in (
        ("overlapping", "pairs of name A and name B entries that overlap"),
        ("intersecting", "pairs that overlap or nest"),
        ("exclusive", "name A entries overlapping no name B entry"),
    ):
        q = qs.add_parser(name, help=text)
        q.add_argument("name_a")
        q.add_argument("name_b")
    for name in ("ancestors", "parents"):
        q = qs.add_parser(name, help=f"{name} of an element by node id")
        q.add_argument("node_id")
    q = qs.add_parser("containing-term", help="elements enclosing a term")
    q.add_argument("term")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("gen", parents=[out], help="random milestone document")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--elements", type=int, default=20)
    p.add_argument("--overlap-prob", type=_probability, default=0.3)
    p.add_argument("--text-prob", type=float, default=0.3)
    p.add_argument("--max-depth", type=int, default=12)
    p.add_argument("--names", default="a,b,c,d,e", help="comma separated element names")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", parents=[out], help="timing table over generated sizes")
    p.add_argument("--sizes", type=int, nargs="+", default=[10_000, 100_000])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--overlap-prob", type=_probability, default=0.0)
    p.add_argument("--repeat", type=int, default=3)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("export-dot", parents=[doc, out], help="graph file or document -> DOT")
    p.add_argument("input", nargs="?", default="-")
    p.set_defaults(func=cmd_export_dot)
    return parser


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("TGSA_LOG", "").upper()
    if level:
        if level.isdigit():
            level = int(level)
        elif not isinstance(logging.getLevelName(level), int):
            level = "DEBUG"
        logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"tgsa {args.verb}: {exc}", file=sys.stderr)
        return exc.status


if __name__ == "__main__":
    sys.exit(main())
