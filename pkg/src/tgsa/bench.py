"""Timing helpers shared by the ``bench`` command and ``benchmarks/``."""

from __future__ import annotations

import time
from dataclasses import dataclass

from . import _kernels
from .doc_model import TokenStream
from .graph import construct
from .index import build_indexes
from .oracle import random_document


def sized_document(
    n_tokens: int, seed: int = 0, overlap_probability: float = 0.0, max_depth: int = 12
) -> TokenStream:
    """A random document with roughly ``n_tokens`` tokens (within about 1%)."""
    pilot = random_document(seed, 2000, overlap_probability, max_depth)
    per_element = len(pilot) / 2000
    n_elements = max(1, round(n_tokens / per_element))
    return random_document(seed, n_elements, overlap_probability, max_depth)


def time_call(fn, *args, repeat: int = 1) -> float:
    """Best-of-``repeat`` wall time in seconds."""
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


@dataclass
class BenchRow:
    tokens: int
    elements: int
    construct_s: float
    index_s: float
    join_s: dict[str, float]


def run_benchmark(
    sizes=(10_000, 100_000), seed: int = 0, overlap_probability: float = 0.0, repeat: int = 3
) -> list[BenchRow]:
    rows = []
    for size in sizes:
        stream = sized_document(size, seed, overlap_probability)
        graph = construct(stream)
        t_construct = time_call(construct, stream, repeat=repeat)
        t_index = time_call(build_indexes, stream, graph, repeat=repeat)
        elements, _ = build_indexes(stream, graph)
        names = elements.names()
        a, b = names[0], names[-1]
        _, a_s, a_e = elements.arrays(a)
        _, b_s, b_e = elements.arrays(b)
        joins = {}
        for impl, fns in _kernels.IMPLEMENTATIONS.items():
            fn = fns["interleave_pairs"]
            fn(a_s[:2], a_e[:2], b_s, b_e)  # compile outside the timing
            joins[impl] = time_call(
                lambda: (fn(a_s, a_e, b_s, b_e), fn(b_s, b_e, a_s, a_e),
                         fns["contain_pairs"](a_s, a_e, b_s, b_e)),
                repeat=repeat,
            )
        rows.append(BenchRow(len(stream), len(elements), t_construct, t_index, joins))
    return rows


def format_table(rows: list[BenchRow]) -> str:
    impls = sorted({k for r in rows for k in r.join_s})
    head = ["tokens", "elements", "construct_s", "us_per_token", "index_s"] + [f"join_{k}_s" for k in impls]
    lines = ["\t".join(head)]
    for r in rows:
        cells = [
            str(r.tokens), str(r.elements), f"{r.construct_s:.4f}",
            f"{1e6 * r.construct_s / r.tokens:.3f}", f"{r.index_s:.4f}",
        ] + [f"{r.join_s.get(k, float('nan')):.5f}" for k in impls]
        lines.append("\t".join(cells))
    return "\n".join(lines)
