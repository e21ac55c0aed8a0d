"""Exact extremal values by branch and bound.

Cells are decided one at a time, trying 1 before 0. For the ``ones``
objective cells go in lexicographic order. Every set cell is then the
lexicographically largest 1 so far, and since embeddings preserve
lexicographic order a new copy must send the pattern's last 1-entry onto it.
The bound adds the ones already placed to the exact optima of the smaller
shapes made of the trailing axis-1 cross sections. Those optima are solved
first and memoized.

For ``heavy_rows`` (count axis-1 lines holding at least ``s`` ones) cells
go line by line. The bound counts lines that can still reach ``s``.

The first solution the search finds with the optimal value is returned
as the witness. Under 1-before-0 branching that is the optimal matrix
whose sorted list of 1-coordinates is lexicographically least, whatever
incumbent seeded the search.
"""

from __future__ import annotations

import logging
import math
import time
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from typing import Any

import numpy as np

from .containment import _interval_search, _Matcher, contains, contains_interval_minor
from .patterns import PatternSpec, classify, corner_construction, is_permutation
from .tensor import Coord, Tensor01

log = logging.getLogger(__name__)

MAX_SOLVE_CELLS = 40


class SolveError(ValueError):
    pass


class Predicate(str, Enum):
    CONTAINMENT = "containment"
    INTERVAL_MINOR = "interval_minor"


class Objective(str, Enum):
    ONES = "ones"
    HEAVY_ROWS = "heavy_rows"


@dataclass(frozen=True)
class SolveTask:
    dims: tuple[int, ...]
    pattern: PatternSpec
    predicate: Predicate = Predicate.CONTAINMENT
    objective: Objective = Objective.ONES
    threshold: int | None = None
    time_budget: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "dims", tuple(int(n) for n in self.dims))
        object.__setattr__(self, "predicate", Predicate(self.predicate))
        object.__setattr__(self, "objective", Objective(self.objective))
        if isinstance(self.pattern, Tensor01):
            object.__setattr__(self, "pattern", classify(self.pattern))
        if len(self.dims) != self.pattern.d:
            raise SolveError(f"shape {self.dims} does not match pattern dimension {self.pattern.d}")
        if any(n < 1 for n in self.dims):
            raise SolveError(f"bad shape {self.dims}")
        if self.objective is Objective.HEAVY_ROWS:
            if self.threshold is None or not 1 <= self.threshold <= self.dims[0]:
                raise SolveError(f"heavy-row threshold must lie in 1..{self.dims[0]}")

    @property
    def key(self) -> tuple:
        return (self.pattern.canonical_hash, self.dims, self.predicate.value, self.objective.value, self.threshold)


@dataclass
class SolveResult:
    task: SolveTask
    optimum: int
    witness: Tensor01
    proved_optimal: bool
    nodes: int = 0
    wall_time: float = 0.0
    source: str = "search"

    def to_dict(self) -> dict[str, Any]:
        return {
            "optimum": self.optimum,
            "proved_optimal": self.proved_optimal,
            "provenance": "exact-solver" if self.proved_optimal else "measured",
            "dims": list(self.task.dims),
            "predicate": self.task.predicate.value,
            "objective": self.task.objective.value,
            "threshold": self.task.threshold,
            "pattern_hash": self.task.pattern.canonical_hash,
            "nodes": self.nodes,
            "witness": self.witness.to_dict(),
        }


def avoids(A: Tensor01, P: Tensor01, predicate: Predicate | str) -> bool:
    if Predicate(predicate) is Predicate.CONTAINMENT:
        return not contains(A, P)
    return not contains_interval_minor(A, P)


def heavy_row_count(A: Tensor01, s: int) -> int:
    """Number of axis-1 lines with at least ``s`` ones."""
    return int(np.count_nonzero(A.array.sum(axis=0) >= s))


def objective_value(A: Tensor01, task: SolveTask) -> int:
    if task.objective is Objective.ONES:
        return A.ones_count()
    return heavy_row_count(A, task.threshold)


class _Budget(Exception):
    pass


def _cell_order(task: SolveTask) -> list[Coord]:
    if task.objective is Objective.ONES:
        return list(product(*(range(1, n + 1) for n in task.dims)))
    t, rest = task.dims[0], task.dims[1:]
    return [(i, *line) for line in product(*(range(1, n + 1) for n in rest)) for i in range(1, t + 1)]


def cross_section_seed(dims: Sequence[int], P: Tensor01) -> Tensor01 | None:
    """All ones on one cross section, along an axis where the pattern's 1-entries differ."""
    ones = P.ones()
    if len(ones) < 2:
        return None
    best = None
    for a in range(len(dims)):
        if len({c[a] for c in ones}) < 2:
            continue
        size = math.prod(dims) // dims[a]
        if best is None or size > best[0]:
            best = (size, a)
    if best is None:
        return None
    arr = np.zeros(tuple(dims), dtype=bool)
    idx: list[Any] = [slice(None)] * len(dims)
    idx[best[1]] = 0
    arr[tuple(idx)] = True
    return Tensor01(arr)


def lower_bound_seed(task: SolveTask) -> Tensor01:
    """Best verified avoiding matrix among cheap constructions, used as the first incumbent."""
    P = task.pattern.tensor
    dims = task.dims
    cands: list[Tensor01] = []
    if task.objective is Objective.ONES:
        cs = cross_section_seed(dims, P)
        if cs is not None:
            cands.append(cs)
        k = P.dims[0]
        if is_permutation(P) and len(set(dims)) == 1 and dims[0] >= k - 1:
            cands.append(corner_construction(P, dims[0]).output)
    cands.append(greedy(task))
    best = Tensor01.zeros(dims)
    best_val = -1
    for A in cands:
        if not avoids(A, P, task.predicate):
            continue
        v = objective_value(A, task)
        if v > best_val:
            best, best_val = A, v
    return best


_MEMO: dict[tuple, SolveResult] = {}


def clear_memo() -> None:
    _MEMO.clear()


def _check_task(task: SolveTask) -> None:
    if task.pattern.tensor.ones_count() == 0:
        raise SolveError("pattern has no 1-entries; every matrix contains it")
    if math.prod(task.dims) > MAX_SOLVE_CELLS:
        raise SolveError(f"shape {task.dims} exceeds the desk-scale cap of {MAX_SOLVE_CELLS} cells")


def solve(task: SolveTask, cache: Any = None) -> SolveResult:
    """Exact optimum of ``task`` with a witness.

    When ``time_budget`` runs out the best matrix found so far is returned
    with ``proved_optimal=False``. Results are re-verified before return.
    ``cache`` is an optional store with ``get(task)`` / ``put(result)``.
    """
    _check_task(task)
    if task.key in _MEMO and _MEMO[task.key].proved_optimal:
        hit = _MEMO[task.key]
        if cache is not None and cache.get(task) is None:
            cache.put(hit)
        return hit
    if cache is not None:
        hit = cache.get(task)
        if hit is not None:
            _MEMO[task.key] = hit
            return hit
    start = time.monotonic()
    result = _solve(task, start)
    result.wall_time = time.monotonic() - start
    P = task.pattern.tensor
    if not avoids(result.witness, P, task.predicate) or objective_value(result.witness, task) != result.optimum:
        raise AssertionError(f"solver produced an invalid witness for {task}")
    if result.proved_optimal:
        _MEMO[task.key] = result
        if cache is not None:
            cache.put(result)
    return result


def _deadline(task: SolveTask, start: float) -> float | None:
    return None if task.time_budget is None else start + task.time_budget


def _solve(task: SolveTask, start: float) -> SolveResult:
    P = task.pattern.tensor
    dims = task.dims
    total = math.prod(dims)
    if P.ones_count() == 1:
        # a single 1 anywhere is a copy (it fits whenever the pattern fits)
        if all(k <= n for k, n in zip(P.dims, dims)):
            return SolveResult(task, 0, Tensor01.zeros(dims), True, source="trivial")
    if any(k > n for k, n in zip(P.dims, dims)):
        W = Tensor01.full(dims)
        return SolveResult(task, objective_value(W, task), W, True, source="trivial")
    if task.objective is Objective.ONES:
        return _search_ones(task, start)
    return _search_heavy(task, start)


def _sub_bounds(task: SolveTask, start: float) -> list[int]:
    """``rows[m]``: exact optimum on the first ``m`` axis-1 cross sections, or the cell count if unsolved."""
    n1, rest = task.dims[0], task.dims[1:]
    slice_cells = math.prod(rest)
    rows = [0]
    deadline = _deadline(task, start)
    for m in range(1, n1):
        budget = None if deadline is None else max(deadline - time.monotonic(), 0.0)
        sub = SolveTask((m, *rest), task.pattern, task.predicate, task.objective, None, budget)
        res = solve(sub)
        rows.append(res.optimum if res.proved_optimal else m * slice_cells)
    rows.append(n1 * slice_cells)
    return rows


class _Search:
    """Partial matrix in search order with exact dead-cell tracking.

    A future cell is dead when setting it would create a copy given the
    ones placed so far. Ones are only added along a branch, so a dead cell
    stays dead until the search backtracks past the 1 that killed it.
    """

    def __init__(self, task: SolveTask) -> None:
        self.task = task
        self.P = task.pattern.tensor
        self.cells = _cell_order(task)
        self.ncell = len(self.cells)
        self.arr = np.zeros(task.dims, dtype=bool)
        self.host: list[Coord] = []
        self.host_set: set[Coord] = set()
        self.matcher = _Matcher(task.dims, self.P)
        self.lex = task.objective is Objective.ONES
        self.minor = task.predicate is Predicate.INTERVAL_MINOR
        self.dead = [False] * self.ncell
        # cells are grouped into consecutive runs of equal length (slices or lines)
        self.group_len = self.ncell // task.dims[0] if self.lex else task.dims[0]
        self.group_dead = [0] * (self.ncell // self.group_len)

    def _creates(self, c: Coord) -> bool:
        idx = tuple(x - 1 for x in c)
        self.arr[idx] = True
        if self.minor:
            bad = _interval_search(self.arr, self.P) is not None
        else:
            self.host.append(c)
            self.host_set.add(c)
            bad = self.matcher.anchored(self.host, self.host_set, c, only_last=self.lex)
            self.host.pop()
            self.host_set.discard(c)
        self.arr[idx] = False
        return bad

    def mark_dead(self, start: int) -> None:
        for j in range(start, self.ncell):
            if self._creates(self.cells[j]):
                self.dead[j] = True
                self.group_dead[j // self.group_len] += 1

    def place(self, i: int) -> list[int]:
        """Set cell ``i`` (known live) and kill the later cells it makes illegal."""
        c = self.cells[i]
        self.arr[tuple(x - 1 for x in c)] = True
        self.host.append(c)
        self.host_set.add(c)
        killed = []
        for j in range(i + 1, self.ncell):
            if not self.dead[j] and self._creates(self.cells[j]):
                self.dead[j] = True
                self.group_dead[j // self.group_len] += 1
                killed.append(j)
        return killed

    def remove(self, i: int, killed: list[int]) -> None:
        c = self.cells[i]
        self.arr[tuple(x - 1 for x in c)] = False
        self.host.pop()
        self.host_set.discard(c)
        for j in killed:
            self.dead[j] = False
            self.group_dead[j // self.group_len] -= 1

    def live_in(self, lo: int, hi: int) -> int:
        return sum(1 for j in range(lo, hi) if not self.dead[j])

    def tensor(self) -> Tensor01:
        return Tensor01(self.arr)


def greedy(task: SolveTask) -> Tensor01:
    """Add cells in search order whenever that keeps the matrix avoiding."""
    sr = _Search(task)
    for c in sr.cells:
        if not sr._creates(c):
            sr.arr[tuple(x - 1 for x in c)] = True
            sr.host.append(c)
            sr.host_set.add(c)
    return sr.tensor()


def _search_ones(task: SolveTask, start: float) -> SolveResult:
    dims = task.dims
    n1 = dims[0]
    rows = _sub_bounds(task, start)
    deadline = _deadline(task, start)
    sr = _Search(task)
    ncell, S = sr.ncell, sr.group_len
    sr.mark_dead(0)

    seed = lower_bound_seed(task)
    best_val = seed.ones_count() - 1
    best: Tensor01 = seed
    found = False
    slice_ones = [0] * (n1 + 1)
    nodes = 0
    ones = 0

    def bound(idx: int) -> int:
        i1 = idx // S + 1
        cur = slice_ones[i1]
        tail = min(sr.live_in(idx, i1 * S), rows[1] - cur)
        below = sum(min(S - sr.group_dead[r], rows[1]) for r in range(i1, n1))
        rem = tail + min(below, rows[n1 - i1])
        placed = 0
        for w in range(1, i1 + 1):
            placed += slice_ones[i1 - w + 1]
            rem = min(rem, rows[n1 - i1 + w] - placed)
        return ones + rem

    def rec(idx: int) -> None:
        nonlocal best_val, best, found, nodes, ones
        nodes += 1
        if deadline is not None and nodes % 1024 == 0 and time.monotonic() > deadline:
            raise _Budget
        if idx == ncell:
            if ones > best_val:
                best_val, best, found = ones, sr.tensor(), True
            return
        if bound(idx) <= best_val:
            return
        if not sr.dead[idx]:
            c = sr.cells[idx]
            killed = sr.place(idx)
            ones += 1
            slice_ones[c[0]] += 1
            rec(idx + 1)
            ones -= 1
            slice_ones[c[0]] -= 1
            sr.remove(idx, killed)
        rec(idx + 1)

    proved = True
    try:
        rec(0)
    except _Budget:
        proved = False
    if not found:
        best_val, best = seed.ones_count(), seed
    return SolveResult(task, best_val, best, proved, nodes=nodes)


def _search_heavy(task: SolveTask, start: float) -> SolveResult:
    s = task.threshold
    deadline = _deadline(task, start)
    sr = _Search(task)
    ncell, t = sr.ncell, sr.group_len
    nlines = ncell // t
    sr.mark_dead(0)

    seed = lower_bound_seed(task)
    best_val = heavy_row_count(seed, s) - 1
    best: Tensor01 = seed
    found = False
    nodes = 0
    heavy = 0
    line_ones = 0

    def rec(idx: int) -> None:
        nonlocal best_val, best, found, nodes, heavy, line_ones
        nodes += 1
        if deadline is not None and nodes % 1024 == 0 and time.monotonic() > deadline:
            raise _Budget
        if idx == ncell:
            if heavy > best_val:
                best_val, best, found = heavy, sr.tensor(), True
            return
        li, pos = divmod(idx, t)
        reachable = 1 if line_ones + sr.live_in(idx, (li + 1) * t) >= s else 0
        later = sum(1 for r in range(li + 1, nlines) if t - sr.group_dead[r] >= s)
        if heavy + reachable + later <= best_val:
            return
        last = pos == t - 1
        for bit in (1, 0):
            if bit:
                if sr.dead[idx]:
                    continue
                killed = sr.place(idx)
                line_ones += 1
            saved = line_ones
            bump = 1 if last and line_ones >= s else 0
            heavy += bump
            if last:
                line_ones = 0
            rec(idx + 1)
            line_ones = saved
            heavy -= bump
            if bit:
                line_ones -= 1
                sr.remove(idx, killed)

    proved = True
    try:
        rec(0)
    except _Budget:
        proved = False
    if not found:
        best_val, best = heavy_row_count(seed, s), seed
    return SolveResult(task, best_val, best, proved, nodes=nodes)


def solve_many(tasks: Sequence[SolveTask], cache: Any = None, workers: int = 1) -> list[SolveResult]:
    """Solve independent tasks, optionally across processes; output order follows ``tasks``."""
    if workers < 1:
        raise SolveError("workers must be >= 1")
    for task in tasks:
        _check_task(task)
    results: list[SolveResult | None] = [None] * len(tasks)
    todo = []
    for i, task in enumerate(tasks):
        hit = _MEMO.get(task.key)
        if hit is None and cache is not None:
            hit = cache.get(task)
        if hit is not None and hit.proved_optimal:
            results[i] = hit
        else:
            todo.append(i)
    if workers > 1 and len(todo) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            solved = list(pool.map(solve, [tasks[i] for i in todo]))
        for i, res in zip(todo, solved):
            if not avoids(res.witness, tasks[i].pattern.tensor, tasks[i].predicate):
                raise AssertionError(f"worker returned an invalid witness for {tasks[i]}")
            results[i] = res
            if res.proved_optimal:
                _MEMO[tasks[i].key] = res
                if cache is not None:
                    cache.put(res)
    else:
        for i in todo:
            results[i] = solve(tasks[i], cache=cache)
    return results  # type: ignore[return-value]


@dataclass
class FamilyResult:
    value: int
    argmax: PatternSpec
    results: list[SolveResult] = field(default_factory=list)

    @property
    def proved_optimal(self) -> bool:
        return all(r.proved_optimal for r in self.results)


def solve_family_max(
    family: Iterable[PatternSpec],
    dims: Sequence[int],
    predicate: Predicate | str = Predicate.CONTAINMENT,
    objective: Objective | str = Objective.ONES,
    threshold: int | None = None,
    time_budget: float | None = None,
    cache: Any = None,
    workers: int = 1,
) -> FamilyResult:
    """Maximum of the extremal value over a family of patterns.

    With ``workers > 1`` members missing from the cache are solved in worker
    processes; results come back in family order, so the output is the same.
    """
    tasks = [SolveTask(tuple(dims), P, predicate, objective, threshold, time_budget) for P in family]
    results = solve_many(tasks, cache=cache, workers=workers)
    if not results:
        raise SolveError("empty pattern family")
    top = max(results, key=lambda r: r.optimum)
    return FamilyResult(top.optimum, top.task.pattern, results)


def f(n: int, P: PatternSpec | Tensor01, d: int | None = None, **kw: Any) -> int:
    """Shorthand for the exact value of the extremal function on the n x ... x n cube."""
    spec = P if isinstance(P, PatternSpec) else classify(P)
    d = spec.d if d is None else d
    res = solve(SolveTask((n,) * d, spec, **kw))
    if not res.proved_optimal:
        raise SolveError(f"f({n}) not proved within budget")
    return res.optimum


def m(n: int, B: PatternSpec | Tensor01, d: int | None = None, **kw: Any) -> int:
    """Exact interval-minor extremal value on the n x ... x n cube."""
    return f(n, B, d, predicate=Predicate.INTERVAL_MINOR, **kw)


def heavy_rows_value(k_vec: Sequence[int], n: int, t: int, s: int, **kw: Any) -> SolveResult:
    """Most axis-1 lines with at least ``s`` ones in a t x n x ... x n matrix avoiding
    the all-ones ``k_vec`` block as an interval minor."""
    from .patterns import all_ones

    d = len(k_vec)
    task = SolveTask((t,) + (n,) * (d - 1), all_ones(k_vec), Predicate.INTERVAL_MINOR, Objective.HEAVY_ROWS, s, **kw)
    return solve(task)
