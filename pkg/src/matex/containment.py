"""Exact pattern containment and interval-minor containment.

``A`` contains ``P`` when there are strictly increasing index maps, one per
axis, sending every 1-entry of ``P`` onto a 1-entry of ``A``. The search
places the 1-entries of ``P`` one at a time and keeps every partial axis
map extendable: an unmapped pattern index must still have room between
its mapped neighbours.
"""

from __future__ import annotations

from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from .tensor import Coord, Tensor01, TensorError


class ContainmentError(ValueError):
    pass


@dataclass(frozen=True)
class Embedding:
    """Per-axis strictly increasing 1-based index maps of a copy of ``P`` in ``A``."""

    maps: tuple[tuple[int, ...], ...]

    def image(self, coord: Sequence[int]) -> Coord:
        return tuple(m[c - 1] for m, c in zip(self.maps, coord))

    def to_dict(self) -> dict:
        return {"maps": [list(m) for m in self.maps]}


@dataclass(frozen=True)
class IntervalSystem:
    """Per-axis lists of disjoint increasing intervals ``(start, end)``, 1-based inclusive."""

    intervals: tuple[tuple[tuple[int, int], ...], ...]

    def to_dict(self) -> dict:
        return {"intervals": [[list(w) for w in axis] for axis in self.intervals]}


def _check_dims(A: Tensor01, P: Tensor01) -> None:
    if A.d != P.d:
        raise ContainmentError(f"dimension mismatch: host is {A.d}-dimensional, pattern {P.d}-dimensional")


class _Matcher:
    """Backtracking search for a copy of a fixed pattern in a set of host 1-entries."""

    def __init__(self, dims_A: Sequence[int], P: Tensor01) -> None:
        self.dims_A = tuple(dims_A)
        self.dims_P = P.dims
        self.d = P.d
        self.pat = P.ones()
        self.maps: list[list[int]] = [[0] * k for k in self.dims_P]

    def _range(self, a: int, i: int) -> tuple[int, int]:
        m = self.maps[a]
        if m[i]:
            return m[i], m[i]
        k, n = self.dims_P[a], self.dims_A[a]
        lo, hi = i + 1, n - (k - 1 - i)
        for j in range(i - 1, -1, -1):
            if m[j]:
                lo = max(lo, m[j] + i - j)
                break
        for j in range(i + 1, k):
            if m[j]:
                hi = min(hi, m[j] - (j - i))
                break
        return lo, hi

    def fits(self) -> bool:
        return all(k <= n for k, n in zip(self.dims_P, self.dims_A))

    def run(self, host: list[Coord], host_set: set[Coord], order: list[Coord]) -> bool:
        return self._step(host, host_set, order, 0)

    def _step(self, host: list[Coord], host_set: set[Coord], order: list[Coord], pos: int) -> bool:
        if pos == len(order):
            return True
        p = order[pos]
        ranges = []
        span = 1
        for a in range(self.d):
            lo, hi = self._range(a, p[a] - 1)
            if lo > hi:
                return False
            ranges.append((lo, hi))
            span *= hi - lo + 1
        if span <= len(host):
            cands = (c for c in product(*(range(lo, hi + 1) for lo, hi in ranges)) if c in host_set)
        else:
            cands = (c for c in host if all(lo <= x <= hi for x, (lo, hi) in zip(c, ranges)))
        for c in cands:
            newly = [a for a in range(self.d) if not self.maps[a][p[a] - 1]]
            for a in newly:
                self.maps[a][p[a] - 1] = c[a]
            if self._step(host, host_set, order, pos + 1):
                return True
            for a in newly:
                self.maps[a][p[a] - 1] = 0
        return False

    def reset(self) -> None:
        for m in self.maps:
            m[:] = [0] * len(m)

    def anchored(self, host: list[Coord], host_set: set[Coord], c: Coord, only_last: bool = False) -> bool:
        """Is there a copy using host cell ``c``? ``c`` must already be in ``host_set``."""
        if not self.fits():
            return False
        choices = self.pat[-1:] if only_last else self.pat
        for p in choices:
            self.reset()
            ok = True
            for a in range(self.d):
                lo, hi = self._range(a, p[a] - 1)
                if not lo <= c[a] <= hi:
                    ok = False
                    break
                self.maps[a][p[a] - 1] = c[a]
            if not ok:
                continue
            rest = [q for q in reversed(self.pat) if q != p]
            if self._step(host, host_set, rest, 0):
                self.reset()
                return True
        self.reset()
        return False


def contains(A: Tensor01, P: Tensor01) -> bool:
    """Whether ``A`` contains ``P`` (some submatrix dominates ``P``)."""
    _check_dims(A, P)
    if P.ones_count() == 0:
        raise ContainmentError("pattern has no 1-entries")
    if any(k > n for k, n in zip(P.dims, A.dims)) or A.ones_count() < P.ones_count():
        return False
    host = A.ones()
    m = _Matcher(A.dims, P)
    return m.run(host, set(host), m.pat)


def find_embedding(A: Tensor01, P: Tensor01) -> Embedding | None:
    """Lexicographically least embedding of ``P`` into ``A``, or None."""
    for emb in enumerate_copies(A, P, limit=1):
        return emb
    return None


def enumerate_copies(A: Tensor01, P: Tensor01, limit: int | None = None) -> list[Embedding]:
    """Embeddings of ``P`` in ``A`` ordered lexicographically by (axis-1 map, axis-2 map, ...)."""
    _check_dims(A, P)
    if limit is not None and limit < 1:
        raise ContainmentError("limit must be >= 1")
    return list(_iter_copies(A, P, limit))


def _iter_copies(A: Tensor01, P: Tensor01, limit: int | None) -> Iterator[Embedding]:
    if any(k > n for k, n in zip(P.dims, A.dims)):
        return
    d = A.d
    host = A.ones()
    prefixes = [{c[: a + 1] for c in host} for a in range(d)]
    pat = P.ones()
    chosen: list[tuple[int, ...]] = []
    found = 0

    def rec(a: int) -> Iterator[Embedding]:
        nonlocal found
        if a == d:
            found += 1
            yield Embedding(tuple(chosen))
            return
        for comb in combinations(range(1, A.dims[a] + 1), P.dims[a]):
            chosen.append(comb)
            pre = prefixes[a]
            if all(tuple(chosen[b][p[b] - 1] for b in range(a + 1)) in pre for p in pat):
                yield from rec(a + 1)
                if limit is not None and found >= limit:
                    chosen.pop()
                    return
            chosen.pop()

    yield from rec(0)


def would_create_copy(A: Tensor01, P: Tensor01, c: Sequence[int]) -> bool:
    """Whether setting cell ``c`` of ``A`` to 1 creates a copy of ``P``.

    Requires ``A(c) = 0`` and ``A`` avoiding ``P``; only embeddings whose
    image contains ``c`` are searched.
    """
    _check_dims(A, P)
    c = tuple(int(x) for x in c)
    if A.get(c):
        raise ContainmentError(f"cell {c} is already 1")
    if P.ones_count() == 0:
        raise ContainmentError("pattern has no 1-entries")
    if contains(A, P):
        raise ContainmentError("host already contains the pattern")
    host = A.ones() + [c]
    return _Matcher(A.dims, P).anchored(host, set(host), c)


def _compositions(n: int, k: int) -> Iterator[tuple[tuple[int, int], ...]]:
    """Partitions of 1..n into k consecutive nonempty runs, in lexicographic order of cut points."""
    for cuts in combinations(range(2, n + 1), k - 1):
        bounds = (1, *cuts, n + 1)
        yield tuple((bounds[i], bounds[i + 1] - 1) for i in range(k))


def _interval_search(arr: np.ndarray, B: Tensor01) -> tuple | None:
    d = arr.ndim
    pat = [tuple(i - 1 for i in p) for p in B.ones()]
    chosen: list[tuple[tuple[int, int], ...]] = []

    def rec(a: int, cur: np.ndarray) -> bool:
        if a == d:
            return True
        for runs in _compositions(arr.shape[a], B.dims[a]):
            nxt = np.logical_or.reduceat(cur, [lo - 1 for lo, _ in runs], axis=a)
            # every 1 of B needs a nonempty block over the axes contracted so far
            red = nxt.any(axis=tuple(range(a + 1, d))) if a + 1 < d else nxt
            if all(red[p[: a + 1]] for p in pat):
                chosen.append(runs)
                if rec(a + 1, nxt):
                    return True
                chosen.pop()
        return False

    if rec(0, arr):
        return tuple(chosen)
    return None


def find_interval_system(A: Tensor01, B: Tensor01) -> IntervalSystem | None:
    """Lexicographically least interval system witnessing ``B`` as an interval minor of ``A``.

    Intervals may be enlarged without breaking a witness, so it is enough to
    search partitions of each axis into consecutive nonempty runs.
    """
    _check_dims(A, B)
    if any(k > n for k, n in zip(B.dims, A.dims)):
        return None
    if B.ones_count() == 0:
        return IntervalSystem(tuple(next(_compositions(n, k)) for n, k in zip(A.dims, B.dims)))
    if A.ones_count() == 0:
        return None
    found = _interval_search(A.array, B)
    return None if found is None else IntervalSystem(found)


def contains_interval_minor(A: Tensor01, B: Tensor01) -> bool:
    return find_interval_system(A, B) is not None


def check_embedding(A: Tensor01, P: Tensor01, emb: Embedding) -> bool:
    """Independent validation of an embedding witness."""
    if len(emb.maps) != A.d:
        return False
    for m, k, n in zip(emb.maps, P.dims, A.dims):
        if len(m) != k or any(not 1 <= x <= n for x in m):
            return False
        if any(m[i] >= m[i + 1] for i in range(k - 1)):
            return False
    return all(A.get(emb.image(p)) for p in P.ones())


def check_interval_system(A: Tensor01, B: Tensor01, system: IntervalSystem) -> bool:
    """Independent validation of an interval-minor witness."""
    if len(system.intervals) != A.d:
        return False
    for runs, k, n in zip(system.intervals, B.dims, A.dims):
        if len(runs) != k:
            return False
        prev = 0
        for lo, hi in runs:
            if lo <= prev or hi < lo or hi > n:
                return False
            prev = hi
    arr = A.array
    for p in B.ones():
        sl = tuple(slice(system.intervals[a][p[a] - 1][0] - 1, system.intervals[a][p[a] - 1][1]) for a in range(A.d))
        if not arr[sl].any():
            return False
    return True


__all__ = [
    "ContainmentError",
    "Embedding",
    "IntervalSystem",
    "TensorError",
    "check_embedding",
    "check_interval_system",
    "contains",
    "contains_interval_minor",
    "enumerate_copies",
    "find_embedding",
    "find_interval_system",
    "would_create_copy",
]
