"""Pattern families and explicit avoiding constructions.

Randomized generators take an explicit integer seed and draw from numpy's
PCG64 bit generator (``numpy.random.default_rng``); streams for
independent sub-tasks are split with ``SeedSequence.spawn``.
"""

from __future__ import annotations

import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import permutations, product
from typing import Any

import numpy as np

from .containment import contains, contains_interval_minor, find_embedding
from .tensor import Coord, Tensor01, TensorError, kronecker


class PatternError(ValueError):
    pass


class Kind(str, Enum):
    PERMUTATION = "permutation"
    ALL_ONES = "all_ones"
    BLOCK_PERMUTATION = "block_permutation"
    TUPLE_PERMUTATION = "tuple_permutation"
    CUSTOM = "custom"


@dataclass(frozen=True)
class PatternSpec:
    tensor: Tensor01
    kind: Kind = Kind.CUSTOM
    k_vec: tuple[int, ...] | None = None
    tuple_axis: int | None = None
    tuple_arity: int | None = None
    generator: Tensor01 | None = None

    @property
    def canonical_hash(self) -> str:
        return self.tensor.canonical_hash()

    @property
    def d(self) -> int:
        return self.tensor.d

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind.value, **self.tensor.to_dict()}
        if self.k_vec is not None:
            out["k_vec"] = list(self.k_vec)
        if self.tuple_axis is not None:
            out["tuple_axis"] = self.tuple_axis
            out["tuple_arity"] = self.tuple_arity
        return out


def classify(T: Tensor01) -> PatternSpec:
    """Wrap an arbitrary tensor, recognising permutation and all-ones patterns."""
    if is_permutation(T):
        return PatternSpec(T, Kind.PERMUTATION)
    if T.ones_count() == T.size:
        return PatternSpec(T, Kind.ALL_ONES, k_vec=T.dims)
    return PatternSpec(T, Kind.CUSTOM)


def is_permutation(T: Tensor01) -> bool:
    """Every cross section along every axis holds exactly one 1."""
    k = T.dims[0]
    if any(n != k for n in T.dims):
        return False
    arr = T.array
    for a in range(T.d):
        other = tuple(b for b in range(T.d) if b != a)
        counts = arr.sum(axis=other) if other else arr.astype(int)
        if not np.all(counts == 1):
            return False
    return True


@dataclass
class ConstructionReport:
    output: Tensor01
    target: PatternSpec
    avoided: bool
    seed: int | None = None
    params: dict[str, Any] = field(default_factory=dict)
    deletion_steps: int | None = None
    rectangle_count: int | None = None
    flags: list[str] = field(default_factory=list)

    @property
    def ones(self) -> int:
        return self.output.ones_count()

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "ones": self.ones,
            "avoided": self.avoided,
            "seed": self.seed,
            "params": self.params,
        }
        if self.deletion_steps is not None:
            out["deletion_steps"] = self.deletion_steps
        if self.rectangle_count is not None:
            out["rectangle_count"] = self.rectangle_count
        if self.flags:
            out["flags"] = list(self.flags)
        return out


def identity_permutation(k: int, d: int) -> PatternSpec:
    if k < 1 or d < 1:
        raise PatternError("need k >= 1 and d >= 1")
    T = Tensor01.from_ones((k,) * d, [(i,) * d for i in range(1, k + 1)])
    return PatternSpec(T, Kind.PERMUTATION)


def permutation_from_maps(maps: Sequence[Sequence[int]], k: int | None = None) -> PatternSpec:
    """Permutation matrix with ones at ``(i, s2(i), ..., sd(i))``.

    Each map is a 1-based bijection of ``1..k`` given as its value list.
    With no maps the result is the 1-dimensional all-ones vector of length ``k``.
    """
    if not maps:
        if k is None:
            raise PatternError("k is required when no maps are given")
        return PatternSpec(Tensor01.full((k,)), Kind.PERMUTATION)
    k = len(maps[0]) if k is None else k
    for sigma in maps:
        if len(sigma) != k or sorted(sigma) != list(range(1, k + 1)):
            raise PatternError(f"{list(sigma)} is not a bijection of 1..{k}")
    d = len(maps) + 1
    ones = [(i, *(sigma[i - 1] for sigma in maps)) for i in range(1, k + 1)]
    return PatternSpec(Tensor01.from_ones((k,) * d, ones), Kind.PERMUTATION)


def random_permutation(k: int, d: int, seed: int) -> PatternSpec:
    if k < 1 or d < 1:
        raise PatternError("need k >= 1 and d >= 1")
    rng = np.random.default_rng(seed)
    maps = [[int(x) + 1 for x in rng.permutation(k)] for _ in range(d - 1)]
    return permutation_from_maps(maps, k=k)


def all_permutations(k: int, d: int) -> Iterator[PatternSpec]:
    """Every d-dimensional k x ... x k permutation matrix, (k!)^(d-1) of them."""
    perms = [list(p) for p in permutations(range(1, k + 1))]
    for maps in product(perms, repeat=d - 1):
        yield permutation_from_maps(list(maps), k=k)


def all_ones(k_vec: Sequence[int]) -> PatternSpec:
    k_vec = tuple(int(k) for k in k_vec)
    if any(k < 1 for k in k_vec):
        raise PatternError(f"extents must be >= 1, got {k_vec}")
    return PatternSpec(Tensor01.full(k_vec), Kind.ALL_ONES, k_vec=k_vec)


def block_permutation(P: PatternSpec | Tensor01, k_vec: Sequence[int]) -> PatternSpec:
    """``P`` Kronecker the all-ones block; tagged as a tuple permutation when one extent exceeds 1."""
    base = P.tensor if isinstance(P, PatternSpec) else P
    if not is_permutation(base):
        raise PatternError("block permutations need a permutation generator")
    k_vec = tuple(int(k) for k in k_vec)
    if len(k_vec) != base.d:
        raise PatternError(f"k_vec {k_vec} does not match dimension {base.d}")
    T = kronecker(base, all_ones(k_vec).tensor)
    big = [a for a, k in enumerate(k_vec) if k > 1]
    if not big:
        return PatternSpec(T, Kind.PERMUTATION, generator=base)
    if len(big) == 1:
        a = big[0]
        return PatternSpec(
            T, Kind.TUPLE_PERMUTATION, k_vec=k_vec, tuple_axis=a + 1, tuple_arity=k_vec[a], generator=base
        )
    return PatternSpec(T, Kind.BLOCK_PERMUTATION, k_vec=k_vec, generator=base)


def tuple_permutation(P: PatternSpec | Tensor01, j: int, axis: int = 1) -> PatternSpec:
    base = P.tensor if isinstance(P, PatternSpec) else P
    k_vec = [1] * base.d
    k_vec[axis - 1] = j
    return block_permutation(base, k_vec)


def tuple_family(k: int, d: int, j: int, axes: Sequence[int] = (1,)) -> list[PatternSpec]:
    """j-tuple permutation matrices generated by every k x ... x k permutation."""
    return [tuple_permutation(P, j, axis) for axis in axes for P in all_permutations(k, d)]


def lex_first_one(T: Tensor01) -> Coord:
    ones = T.ones()
    if not ones:
        raise PatternError("tensor has no 1-entries")
    return ones[0]


def corner_construction(P: PatternSpec | Tensor01, n: int, entry: Sequence[int] | None = None) -> ConstructionReport:
    """n x ... x n matrix avoiding the permutation ``P``: all ones outside a box anchored at ``entry``.

    Cells with ``entry_l <= j_l <= n - k + entry_l`` on every axis are 0;
    the box has ``(n - k + 1)^d`` cells.
    """
    spec = P if isinstance(P, PatternSpec) else classify(P)
    T = spec.tensor
    if not is_permutation(T):
        raise PatternError("corner construction needs a permutation matrix")
    k, d = T.dims[0], T.d
    if n < k - 1:
        raise PatternError(f"need n >= k - 1, got n={n}, k={k}")
    entry = lex_first_one(T) if entry is None else tuple(int(i) for i in entry)
    if len(entry) != d or not all(1 <= i <= k for i in entry) or not T.get(entry):
        raise PatternError(f"{tuple(entry)} is not a 1-entry of the pattern")
    arr = np.ones((n,) * d, dtype=bool)
    if n - k + 1 > 0:
        arr[tuple(slice(i - 1, n - k + i) for i in entry)] = False
    A = Tensor01(arr)
    return ConstructionReport(
        output=A,
        target=spec,
        avoided=not contains(A, T),
        params={"n": n, "k": k, "d": d, "entry": list(entry)},
    )


def beta(k_vec: Sequence[int]) -> Fraction:
    prod = math.prod(k_vec)
    if prod <= 1:
        raise PatternError("beta is undefined unless some k exceeds 1")
    return Fraction(sum(k_vec) - len(k_vec), prod - 1)


def delete_copies(A: Tensor01, P: Tensor01) -> tuple[Tensor01, int]:
    """Clear one 1-entry per copy until ``A`` avoids ``P``; returns the result and the number of deletions.

    Each step takes the lexicographically first copy and clears the image of
    the lexicographically smallest 1-entry of ``P``.
    """
    first_one = lex_first_one(P)
    arr = A.array.copy()
    steps = 0
    while True:
        emb = find_embedding(A, P)
        if emb is None:
            return A, steps
        arr[tuple(x - 1 for x in emb.image(first_one))] = False
        A = Tensor01(arr)
        steps += 1


def deletion_construction(k_vec: Sequence[int], n: int, seed: int, p: float | None = None) -> ConstructionReport:
    """Random matrix with density ``n**-beta`` cleaned of every copy of the all-ones block.

    Copies are removed one at a time: find the lexicographically first copy
    and clear its lexicographically smallest 1-entry.
    """
    k_vec = tuple(int(k) for k in k_vec)
    b = beta(k_vec)
    if n < max(k_vec):
        raise PatternError(f"need n >= max(k_vec), got n={n}")
    d = len(k_vec)
    flags = []
    if p is None:
        p = float(n ** (-b.numerator / b.denominator))
    else:
        flags.append("non-paper density override")
    rng = np.random.default_rng(seed)
    arr = rng.random((n,) * d) < p
    initial = int(arr.sum())
    R = all_ones(k_vec)
    A, steps = delete_copies(Tensor01(arr), R.tensor)
    return ConstructionReport(
        output=A,
        target=R,
        avoided=not contains(A, R.tensor),
        seed=seed,
        params={"k_vec": list(k_vec), "n": n, "p": p, "beta": str(b), "initial_ones": initial},
        deletion_steps=steps,
        flags=flags,
    )


def greedy_avoider(dims: Sequence[int], P: PatternSpec | Tensor01, seed: int) -> ConstructionReport:
    """Visit cells in a random order and keep each 1 that creates no copy of ``P``.

    The result is a maximal avoider: every 0 would create a copy.
    """
    from .containment import _Matcher

    T = P.tensor if isinstance(P, PatternSpec) else P
    spec = P if isinstance(P, PatternSpec) else classify(P)
    dims = tuple(int(n) for n in dims)
    if len(dims) != T.d:
        raise PatternError(f"shape {dims} does not match pattern dimension {T.d}")
    rng = np.random.default_rng(seed)
    cells = list(product(*(range(1, n + 1) for n in dims)))
    order = rng.permutation(len(cells))
    matcher = _Matcher(dims, T)
    host: list[Coord] = []
    host_set: set[Coord] = set()
    for i in order:
        c = cells[int(i)]
        host.append(c)
        host_set.add(c)
        if matcher.anchored(host, host_set, c):
            host.pop()
            host_set.discard(c)
    A = Tensor01.from_ones(dims, host)
    return ConstructionReport(A, spec, not contains(A, T), seed=seed, params={"dims": list(dims)})


def antidiagonal_multiplier(s: int, d: int, flip: Sequence[int] = ()) -> Tensor01:
    """s x ... x s matrix with ones where the coordinates sum to ``s + d - 1``.

    Axes listed in ``flip`` (1-based) are reversed, which moves the anchor
    corner for patterns whose corner 1-entry sits at the far end of those axes.
    """
    if s < 1 or d < 1:
        raise PatternError("need s >= 1 and d >= 1")
    flip = {int(a) for a in flip}
    ones = []
    for c in product(range(1, s + 1), repeat=d):
        if sum(c) == s + d - 1:
            ones.append(tuple(s + 1 - x if a + 1 in flip else x for a, x in enumerate(c)))
    return Tensor01.from_ones((s,) * d, ones)


def corner_ones(T: Tensor01) -> list[Coord]:
    """1-entries whose every coordinate is 1 or the extent of its axis."""
    return [c for c in T.ones() if all(x in (1, n) for x, n in zip(c, T.dims))]


def enumerate_dyadic_intervals(N: int) -> list[tuple[int, int]]:
    """All dyadic intervals inside ``1..N`` as ``(start, length)``, shortest first."""
    if N < 1 or N & (N - 1):
        raise PatternError(f"N={N} is not a power of 2")
    out = []
    length = 1
    while length <= N:
        out.extend((s, length) for s in range(1, N + 1, length))
        length *= 2
    return out


@dataclass(frozen=True)
class DyadicParams:
    r: int
    d: int
    seed: int
    q: float | None = None
    ell: int | None = None

    @property
    def N(self) -> int:
        return 1 << self.r

    def resolved_q(self) -> float:
        return math.log(2) / (2 * self.r ** (self.d - 1)) if self.q is None else self.q

    def resolved_ell(self) -> int:
        return 20 * self.r if self.ell is None else self.ell

    def flags(self) -> list[str]:
        out = []
        if self.q is not None:
            out.append("non-paper q override")
        if self.ell is not None:
            out.append("non-paper ell override")
        return out


def sampled_rectangles(params: DyadicParams) -> list[tuple[tuple[int, int], ...]]:
    """Dyadic hyper-rectangles drawn independently with probability q, as per-axis ``(start, length)``."""
    intervals = enumerate_dyadic_intervals(params.N)
    rng = np.random.default_rng(params.seed)
    picks = rng.random(len(intervals) ** params.d) < params.resolved_q()
    return [box for box, hit in zip(product(intervals, repeat=params.d), picks) if hit]


def dyadic_construction(params: DyadicParams, check_minor: bool = True) -> ConstructionReport:
    """Ones exactly at lattice points covered by no sampled dyadic hyper-rectangle.

    The avoidance verdict is against the all-ones ``ell x ... x ell`` matrix
    as an interval minor; with ``ell > N`` it holds trivially.
    """
    if params.r < 0 or params.d < 1:
        raise PatternError("need r >= 0 and d >= 1")
    q = params.resolved_q()
    if not 0 < q < 1:
        raise PatternError(f"q={q} must lie in (0, 1)")
    N, d = params.N, params.d
    rects = sampled_rectangles(params)
    arr = np.ones((N,) * d, dtype=bool)
    for box in rects:
        arr[tuple(slice(s - 1, s - 1 + length) for s, length in box)] = False
    A = Tensor01(arr)
    ell = params.resolved_ell()
    R = all_ones((ell,) * d)
    flags = params.flags()
    if ell > N:
        avoided = True
    elif check_minor:
        avoided = not contains_interval_minor(A, R.tensor)
    else:
        avoided = False
        flags.append("avoidance not checked")
    return ConstructionReport(
        output=A,
        target=R,
        avoided=avoided,
        seed=params.seed,
        params={"r": params.r, "d": d, "N": N, "q": q, "ell": ell},
        rectangle_count=len(rects),
        flags=flags,
    )


def interval_rich_permutation(ell: int, d: int, seed: int | None = None) -> PatternSpec:
    """Permutation of edge ``ell**d`` with one 1 in each block of edge ``ell**(d-1)``.

    Such a matrix contains the all-ones ``ell x ... x ell`` matrix as an
    interval minor (take the block grid) and has its 1 in block (1,...,1)
    at the corner (1,...,1). Offsets inside each block are random bijections
    when ``seed`` is given.
    """
    if ell < 1 or d < 2:
        raise PatternError("need ell >= 1 and d >= 2")
    rng = None if seed is None else np.random.default_rng(seed)
    m = ell ** (d - 1)
    # offs[a][b] maps the other block coordinates (encoded in base ell) to an offset on axis a
    offs = []
    for _ in range(d):
        per_b = []
        for b in range(ell):
            sigma = np.arange(m)
            if rng is not None:
                sigma = rng.permutation(m)
                if b == 0:
                    zero = int(np.flatnonzero(sigma == 0)[0])
                    sigma[zero], sigma[0] = sigma[0], 0
            per_b.append(sigma)
        offs.append(per_b)
    ones = []
    for block in product(range(ell), repeat=d):
        coord = []
        for a in range(d):
            rest = [block[b] for b in range(d) if b != a]
            code = 0
            for x in rest:
                code = code * ell + x
            coord.append(block[a] * m + int(offs[a][block[a]][code]) + 1)
        ones.append(tuple(coord))
    k = ell * m
    return PatternSpec(Tensor01.from_ones((k,) * d, ones), Kind.PERMUTATION)


__all__ = [
    "ConstructionReport",
    "DyadicParams",
    "Kind",
    "PatternError",
    "PatternSpec",
    "TensorError",
    "all_ones",
    "all_permutations",
    "antidiagonal_multiplier",
    "beta",
    "block_permutation",
    "classify",
    "corner_construction",
    "corner_ones",
    "delete_copies",
    "deletion_construction",
    "dyadic_construction",
    "enumerate_dyadic_intervals",
    "greedy_avoider",
    "identity_permutation",
    "interval_rich_permutation",
    "is_permutation",
    "permutation_from_maps",
    "random_permutation",
    "sampled_rectangles",
    "tuple_family",
    "tuple_permutation",
]
