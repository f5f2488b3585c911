"""Time the interval join kernels, numba against numpy.

    python benchmarks/bench_kernels.py --sizes 10000 100000 1000000

Element intervals come from generated documents, so the spans are realistic
(mostly nested, some interleaving). Results are checked for agreement before
timing. The literal two-clause join returns a quadratic number of pairs, so
it only runs up to ``--literal-limit`` tokens.
"""

import argparse

import numpy as np

from tgsa import _kernels
from tgsa.bench import sized_document, time_call
from tgsa.graph import construct
from tgsa.index import build_indexes


def operands(n_tokens, seed, overlap_probability):
    stream = sized_document(n_tokens, seed, overlap_probability)
    elements, _ = build_indexes(stream, construct(stream))
    names = elements.names()
    _, a_s, a_e = elements.arrays(names[0])
    _, b_s, b_e = elements.arrays(names[1])
    _, all_s, all_e = elements.arrays()
    return (a_s, a_e, b_s, b_e), (all_s, all_e)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[10_000, 100_000, 1_000_000])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--overlap-prob", type=float, default=0.3)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--literal-limit", type=int, default=100_000)
    args = ap.parse_args()

    impls = sorted(_kernels.IMPLEMENTATIONS)
    kernels = ["interleave_pairs", "contain_pairs", "literal_pairs", "interleaves_any", "stab"]
    print("tokens\tkernel\t" + "\t".join(f"{k}_ms" for k in impls) + "\tspeedup")
    for size in args.sizes:
        pair_args, (all_s, all_e) = operands(size, args.seed, args.overlap_prob)
        probe = np.int64(all_e[0] // 2)
        for kernel in kernels:
            if kernel == "literal_pairs" and size > args.literal_limit:
                continue
            call_args = (all_s, all_e, probe) if kernel == "stab" else pair_args
            results, times = [], {}
            for impl in impls:
                fn = _kernels.IMPLEMENTATIONS[impl][kernel]
                results.append(fn(*call_args))  # also triggers compilation
                times[impl] = time_call(fn, *call_args, repeat=args.repeat)
            for other in results[1:]:
                if isinstance(other, tuple):
                    assert all(np.array_equal(np.sort(x), np.sort(y)) for x, y in zip(results[0], other))
                else:
                    assert np.array_equal(results[0], other)
            speedup = times["numpy"] / times["numba"] if "numba" in times else float("nan")
            cells = "\t".join(f"{1e3 * times[k]:.3f}" for k in impls)
            print(f"{size}\t{kernel}\t{cells}\t{speedup:.1f}x")


if __name__ == "__main__":
    main()
