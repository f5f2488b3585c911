"""Interval join kernels behind the structural index.

Each kernel works on int64 ``starts``/``ends`` arrays, with the right-hand
side sorted by start. Two implementations exist: numba-compiled loops and a
vectorized numpy path. Set ``TGSA_USE_NUMBA=0`` to force numpy; numpy is
also used when numba cannot be imported.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_flag = os.environ.get("TGSA_USE_NUMBA", "1").strip().lower()
NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and _flag not in ("0", "false", "no", "off")

_EMPTY = np.empty(0, dtype=np.int64)


# ---------------------------------------------------------------------------
# numpy


def _candidates_np(a_s, b_s, lo_bound, hi_bound):
    """Expand, for each left row, the right rows whose start lies in (lo, hi)."""
    lo = np.searchsorted(b_s, lo_bound, side="right")
    hi = np.searchsorted(b_s, hi_bound, side="left")
    counts = np.maximum(hi - lo, 0)
    total = int(counts.sum())
    if total == 0:
        return _EMPTY, _EMPTY
    ia = np.repeat(np.arange(len(a_s), dtype=np.int64), counts)
    offsets = np.cumsum(counts) - counts
    ib = lo[ia] + (np.arange(total, dtype=np.int64) - offsets[ia])
    return ia, ib


def interleave_pairs_np(a_s, a_e, b_s, b_e):
    ia, ib = _candidates_np(a_s, b_s, a_s, a_e)
    keep = b_e[ib] > a_e[ia]
    return ia[keep], ib[keep]


def literal_pairs_np(a_s, a_e, b_s, b_e):
    ia, ib = _candidates_np(a_s, b_s, a_s, np.full_like(a_s, np.iinfo(np.int64).max))
    keep = b_e[ib] > a_e[ia]
    return ia[keep], ib[keep]


def contain_pairs_np(a_s, a_e, b_s, b_e):
    ia, ib = _candidates_np(a_s, b_s, a_s, a_e)
    keep = b_e[ib] < a_e[ia]
    return ia[keep], ib[keep]


def stab_np(starts, ends, pos):
    return np.nonzero((starts < pos) & (pos < ends))[0].astype(np.int64)


def interleaves_any_np(a_s, a_e, b_s, b_e):
    """Mask over left rows that interleave at least one right row, either order."""
    hit = np.zeros(len(a_s), dtype=np.bool_)
    ia, _ = interleave_pairs_np(a_s, a_e, b_s, b_e)
    hit[ia] = True
    order = np.argsort(a_s, kind="stable")
    jb, ja = interleave_pairs_np(b_s, b_e, a_s[order], a_e[order])
    hit[order[ja]] = True
    return hit


# ---------------------------------------------------------------------------
# numba

if NUMBA_AVAILABLE:

    @numba.njit(cache=True)
    def _lower(arr, x):
        # first index with arr[i] > x
        lo, hi = 0, arr.shape[0]
        while lo < hi:
            mid = (lo + hi) >> 1
            if arr[mid] <= x:
                lo = mid + 1
            else:
                hi = mid
        return lo

    @numba.njit(cache=True)
    def _gallop(arr, x, start):
        # first index >= start with arr[i] > x, probing 1, 2, 4, ... ahead
        n = arr.shape[0]
        if start >= n or arr[start] > x:
            return start
        step = 1
        lo = start
        hi = start + 1
        while hi < n and arr[hi] <= x:
            lo = hi
            step <<= 1
            hi = lo + step
        if hi > n:
            hi = n
        while lo < hi:
            mid = (lo + hi) >> 1
            if arr[mid] <= x:
                lo = mid + 1
            else:
                hi = mid
        return lo

    def _make_pairs_nb(mode):
        # mode 0: interleave, 1: containment, 2: literal precedes-and-ends-before.
        # ``mode`` is a closure constant, so each kernel compiles without the
        # branches of the other two.
        @numba.njit(cache=True)
        def kernel(a_s, a_e, b_s, b_e):
            n = a_s.shape[0]
            m = b_s.shape[0]
            lo = np.empty(n, dtype=np.int64)
            hi = np.empty(n, dtype=np.int64)
            total = 0
            prev_s = a_s[0] if n else 0
            cur = 0
            for i in range(n):
                # left starts usually ascend, so the bound only moves forward
                if a_s[i] < prev_s:
                    cur = 0
                prev_s = a_s[i]
                cur = _gallop(b_s, a_s[i], cur)
                lo[i] = cur
                hi[i] = m if mode == 2 else _gallop(b_s, a_e[i] - 1, cur)
                total += hi[i] - lo[i]
            # candidates bound the output, so one allocation suffices
            ia = np.empty(total, dtype=np.int64)
            ib = np.empty(total, dtype=np.int64)
            k = 0
            for i in range(n):
                e = a_e[i]
                # branch-free: always write, advance only on a match
                for j in range(lo[i], hi[i]):
                    ia[k] = i
                    ib[k] = j
                    if mode == 1:
                        k += b_e[j] < e
                    else:
                        k += b_e[j] > e
            return ia[:k], ib[:k]

        return kernel

    interleave_pairs_nb = _make_pairs_nb(0)
    contain_pairs_nb = _make_pairs_nb(1)
    literal_pairs_nb = _make_pairs_nb(2)

    @numba.njit(cache=True)
    def stab_nb(starts, ends, pos):
        out = np.empty(starts.shape[0], dtype=np.int64)
        k = 0
        for i in range(starts.shape[0]):
            if starts[i] < pos and pos < ends[i]:
                out[k] = i
                k += 1
        return out[:k]

    @numba.njit(cache=True)
    def _mark_interleaves(a_s, a_e, b_s, b_e, hit, index):
        # set hit[index[i]] for left rows i that start first and interleave a right row
        m = b_s.shape[0]
        cur = 0
        for i in range(a_s.shape[0]):
            e = a_e[i]
            if i and a_s[i] < a_s[i - 1]:
                cur = 0
            cur = _gallop(b_s, a_s[i], cur)
            j = cur
            while j < m and b_s[j] < e:
                if b_e[j] > e:
                    hit[index[i]] = True
                    break
                j += 1

    def interleaves_any_nb(a_s, a_e, b_s, b_e):
        hit = np.zeros(len(a_s), dtype=np.bool_)
        _mark_interleaves(a_s, a_e, b_s, b_e, hit, np.arange(len(a_s), dtype=np.int64))
        order = np.argsort(a_s, kind="stable")
        # right rows that start first: mark the left rows they interleave
        _mark_any_left(b_s, b_e, a_s[order], a_e[order], hit, order)
        return hit

    @numba.njit(cache=True)
    def _mark_any_left(b_s, b_e, a_s, a_e, hit, order):
        n = a_s.shape[0]
        cur = 0
        for j in range(b_s.shape[0]):
            e = b_e[j]
            if j and b_s[j] < b_s[j - 1]:
                cur = 0
            cur = _gallop(a_s, b_s[j], cur)
            i = cur
            while i < n and a_s[i] < e:
                if a_e[i] > e:
                    hit[order[i]] = True
                i += 1


IMPLEMENTATIONS: dict[str, dict[str, object]] = {
    "numpy": {
        "interleave_pairs": interleave_pairs_np,
        "contain_pairs": contain_pairs_np,
        "literal_pairs": literal_pairs_np,
        "stab": stab_np,
        "interleaves_any": interleaves_any_np,
    },
}
if NUMBA_AVAILABLE:
    IMPLEMENTATIONS["numba"] = {
        "interleave_pairs": interleave_pairs_nb,
        "contain_pairs": contain_pairs_nb,
        "literal_pairs": literal_pairs_nb,
        "stab": stab_nb,
        "interleaves_any": interleaves_any_nb,
    }

ACTIVE = "numba" if USE_NUMBA else "numpy"
_active = IMPLEMENTATIONS[ACTIVE]

interleave_pairs = _active["interleave_pairs"]
contain_pairs = _active["contain_pairs"]
literal_pairs = _active["literal_pairs"]
stab = _active["stab"]
interleaves_any = _active["interleaves_any"]
