"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line (visible even under output
capture). Run directly with ``python tests/test_acceptance.py`` for the
summary lines alone.
"""

from __future__ import annotations

import sys
import time
from fractions import Fraction
from itertools import product
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from matex.bounds import Regime, check_liminf_floor, check_super_homogeneity, exponents, limit_sequence  # noqa: E402
from matex.containment import (  # noqa: E402
    check_interval_system,
    contains,
    contains_interval_minor,
    find_interval_system,
    would_create_copy,
)
from matex.extremal import SolveTask, clear_memo, f, m, solve  # noqa: E402
from matex.patterns import (  # noqa: E402
    DyadicParams,
    all_ones,
    all_permutations,
    corner_construction,
    delete_copies,
    deletion_construction,
    dyadic_construction,
    enumerate_dyadic_intervals,
    greedy_avoider,
    identity_permutation,
    permutation_from_maps,
    random_permutation,
    sampled_rectangles,
    tuple_permutation,
)
from matex.structure import build_Q  # noqa: E402
from matex.tensor import Tensor01, reverse_axis  # noqa: E402
from matex.verify import random_corner_permutation  # noqa: E402

from oracles import contains_brute, random_tensor, zarankiewicz_brute  # noqa: E402

R22 = all_ones((2, 2))


def report(number: int, title: str, ok: bool, detail: str, capsys=None) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {title} | {detail}"
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    else:
        print(line)


# each criterion returns (ok, detail)


def criterion_1() -> tuple[bool, str]:
    clear_memo()
    start = time.monotonic()
    cases = [((n,), 2, 2, n * n - (n - 1) ** 2) for n in range(1, 7)]
    cases += [((n,), 3, 2, n * n - (n - 2) ** 2) for n in range(3, 7)]
    cases += [((2,), 2, 3, 7)]
    bad = []
    for (n,), k, d, want in cases:
        got = f(n, identity_permutation(k, d))
        if got != want:
            bad.append((n, k, d, got, want))
    main = time.monotonic() - start
    t = time.monotonic()
    stretch = solve(SolveTask((3, 3, 3), identity_permutation(2, 3)))
    stretch_time = time.monotonic() - t
    ok = not bad and main < 60 and stretch.proved_optimal and stretch.optimum == 19 and stretch_time < 600
    return ok, f"{len(cases)} values exact in {main:.1f}s; stretch d=3 n=3 -> {stretch.optimum} in {stretch_time:.2f}s; mismatches {bad}"


def criterion_2() -> tuple[bool, str]:
    vals = [f(n, R22) for n in range(2, 6)]
    t = time.monotonic()
    oracle = [zarankiewicz_brute(n) for n in range(2, 5)]
    oracle_time = time.monotonic() - t
    ok = vals == [3, 6, 9, 12] and oracle == vals[:3] and oracle_time < 300
    return ok, f"solver {vals}, exhaustive oracle n<=4 {oracle} in {oracle_time:.2f}s"


def criterion_3() -> tuple[bool, str]:
    rng = np.random.default_rng(2024)
    corner_fail = 0
    for _ in range(60):
        d = int(rng.integers(2, 4))
        k = int(rng.integers(1, 5))
        n = int(rng.integers(max(k - 1, 1), 9))
        P = random_permutation(k, d, int(rng.integers(1 << 31)))
        rep = corner_construction(P, n)
        if not (rep.ones == n**d - (n - k + 1) ** d and not contains(rep.output, P.tensor)):
            corner_fail += 1
    del_fail = 0
    for seed in range(100):
        n = 2 + seed % 15
        rep = deletion_construction((2, 2), n, seed)
        if contains(rep.output, R22.tensor):
            del_fail += 1
    ok = corner_fail == 0 and del_fail == 0
    return ok, f"corner failures {corner_fail}/60, deletion failures {del_fail}/100"


def _double_host_instance(rng: np.random.Generator) -> tuple:
    d = int(rng.integers(2, 4))
    k = int(rng.integers(2, 4)) if d == 2 else 2
    gen = random_permutation(k, d, int(rng.integers(1 << 31)))
    P = tuple_permutation(gen, 2)
    n = int(rng.integers(2, 6)) if d == 2 else int(rng.integers(2, 5))
    dims = (k * n,) * d
    source = ("corner", "deletion", "greedy")[int(rng.integers(0, 3))]
    if source == "corner":
        A = corner_construction(gen, k * n).output
    elif source == "deletion":
        A, _ = delete_copies(random_tensor(rng, dims, rng.uniform(0.1, 0.5)), P.tensor)
    else:
        A = greedy_avoider(dims, P, int(rng.integers(1 << 31))).output
    return P, A, k, source


def criterion_4() -> tuple[bool, str]:
    rng = np.random.default_rng(33)
    fails, sources, big_q = 0, {"corner": 0, "deletion": 0, "greedy": 0}, 0
    for _ in range(120):
        P, A, k, source = _double_host_instance(rng)
        assert not contains(A, P.tensor)
        sources[source] += 1
        Q = build_Q(A, k)
        # instances where Q is at least as large as P along every axis are the informative ones
        big_q += all(q >= p for q, p in zip(Q.dims, P.tensor.dims))
        if contains(Q, P.tensor):
            fails += 1
    return fails == 0, f"120 instances {sources}, {big_q} with Q large enough to hold P, failures {fails}"


def criterion_5() -> tuple[bool, str]:
    rng = np.random.default_rng(46)
    fails = 0
    for _ in range(50):
        d = int(rng.integers(2, 4))
        k = int(rng.integers(2, 4)) if d == 2 else 2
        P = random_corner_permutation(rng, k, d)
        n = int(rng.integers(1, 6)) if d == 2 else int(rng.integers(1, 4))
        s = int(rng.integers(1, 4))
        N = solve(SolveTask((n,) * d, P)).witness
        if not check_super_homogeneity(P, n, s, witness=N)["product_avoids"]:
            fails += 1
    pairs, ineq_fail = 0, []
    pats = [identity_permutation(2, 2), permutation_from_maps([[2, 1]]), identity_permutation(3, 2)]
    pats += [random_corner_permutation(np.random.default_rng(i), 3, 2) for i in range(3)]
    for P in pats:
        for n in range(1, 7):
            for s in range(2, 7):
                if s * n > 6:
                    continue
                rep = check_super_homogeneity(P, n, s)
                pairs += 1
                if not rep["inequality_holds"]:
                    ineq_fail.append((n, s, rep["f_n"], rep["f_sn"]))
    rep = check_super_homogeneity(identity_permutation(2, 2), 2, 2)
    example = rep["f_n"] == 3 and rep["f_sn"] == 7 and rep["bound"] == "6"
    ok = fails == 0 and not ineq_fail and example
    return ok, f"M(x)N avoids P on 50/50 exact witnesses (failures {fails}); inequality on {pairs} certified pairs, failures {ineq_fail}; example 6 <= 7: {example}"


def criterion_6() -> tuple[bool, str]:
    rows, bad = [], []
    for gen in all_permutations(2, 2):
        for n in range(1, 6):
            f2 = f(n, tuple_permutation(gen, 2))
            f3 = f(n, tuple_permutation(gen, 3))
            rows.append((n, f2, f3))
            if not f2 <= f3 <= 2 * f2:
                bad.append((n, f2, f3))
    return not bad, f"{len(rows)} (n, f(P2), f(P3)) triples, e.g. {rows[4]}; violations {bad}"


def criterion_7() -> tuple[bool, str]:
    I4 = identity_permutation(4, 2).tensor
    P2413 = permutation_from_maps([[2, 4, 1, 3]]).tensor
    a = not contains_interval_minor(I4, R22.tensor)
    w = find_interval_system(P2413, R22.tensor)
    b = w is not None and check_interval_system(P2413, R22.tensor, w)
    ms = [m(n, R22) for n in range(1, 5)]
    dom = all(f(n, P) <= m(n, R22) for n in range(1, 5) for P in all_permutations(2, 2))
    ok = a and b and dom
    return ok, f"I4 avoids R22 minor: {a}; perm 2413 has witness {w.intervals if w else None}; m(n,R22) n=1..4 = {ms}; f <= m: {dom}"


def criterion_8() -> tuple[bool, str]:
    t = time.monotonic()
    ones = [deletion_construction((2, 2), 16, seed).ones for seed in range(50)]
    elapsed = time.monotonic() - t
    mean = sum(ones) / len(ones)
    return mean >= 10 and elapsed < 60, f"mean surviving ones {mean:.2f} over 50 seeds (min {min(ones)}, max {max(ones)}) in {elapsed:.1f}s"


def criterion_9() -> tuple[bool, str]:
    est = limit_sequence(identity_permutation(2, 2), 2, 5)
    ratios = [r for _, r in est.samples]
    want = [Fraction(1), Fraction(3, 2), Fraction(5, 3), Fraction(7, 4), Fraction(9, 5)]
    floor = check_liminf_floor(identity_permutation(2, 2), 2, 5)["floor"]
    ok = ratios == want and est.increasing and all(r < 2 for r in ratios) and floor == Fraction(9, 5)
    return ok, f"ratios {[str(r) for r in ratios]}, floor {floor}"


def criterion_10() -> tuple[bool, str]:
    counts_ok = True
    for r in range(0, 5):
        N = 1 << r
        ivs = enumerate_dyadic_intervals(N)
        counts_ok &= len(ivs) == 2 * N - 1
        counts_ok &= all(sum(1 for s, ln in ivs if s <= x < s + ln) == r + 1 for x in range(1, N + 1))
    audit_fail = 0
    for seed in range(100):
        r = 1 + seed % 4
        params = DyadicParams(r, 2, seed, q=0.08, ell=3)
        rep = dyadic_construction(params)
        rects = sampled_rectangles(params)
        covered = any(
            all(s <= x < s + ln for x, (s, ln) in zip(c, box)) for c in rep.output.ones() for box in rects
        )
        if covered or rep.rectangle_count != len(rects):
            audit_fail += 1
    return counts_ok and audit_fail == 0, f"interval counts and r+1 coverage for r<=4: {counts_ok}; coverage audit failures {audit_fail}/100"


def criterion_11() -> tuple[bool, str]:
    start = time.monotonic()
    rng = np.random.default_rng(11)
    results = {}

    fails = 0
    for _ in range(60):
        A = random_tensor(rng, (5, 5), 0.3)
        P = random_permutation(3, 2, int(rng.integers(1 << 31))).tensor
        B = Tensor01(A.array | (rng.random((5, 5)) < 0.2))
        fails += contains(A, P) and not contains(B, P)
    results["monotonicity"] = fails

    fails = 0
    for _ in range(60):
        A = random_tensor(rng, (4, 4, 3), 0.4)
        P = random_permutation(2, 3, int(rng.integers(1 << 31))).tensor
        axis = int(rng.integers(1, 4))
        fails += contains(A, P) != contains(reverse_axis(A, axis), reverse_axis(P, axis))
    results["reversal"] = fails

    fails = 0
    anti = permutation_from_maps([[2, 1]]).tensor
    for _ in range(60):
        A, _ = delete_copies(random_tensor(rng, (4, 4), rng.uniform(0.1, 0.6)), anti)
        for c in product(range(1, 5), repeat=2):
            if not A.get(c):
                fails += would_create_copy(A, anti, c) != contains_brute(A.set(c, 1), anti)
    results["would_create_copy"] = fails

    fails = 0
    for _ in range(60):
        k = (int(rng.integers(1, 3)), int(rng.integers(2, 3)))
        cells = list(product(range(1, k[0] + 1), range(1, k[1] + 1)))
        pick = rng.choice(len(cells), size=int(rng.integers(2, len(cells) + 1)), replace=False)
        P = Tensor01.from_ones(k, [cells[i] for i in pick])
        n = int(rng.integers(1, 5))
        v = f(n, P)
        fails += not n <= v <= n * n
    results["ones_sandwich"] = fails

    fails = cases = 0
    for d in range(1, 5):
        for k_vec in product(range(1, 5), repeat=d):
            if all(k == 1 for k in k_vec):
                continue
            cases += 1
            e = exponents(k_vec)
            single = sum(1 for k in k_vec if k > 1) == 1
            if single:
                fails += not (e.regime is Regime.TUPLE and e.alpha == e.beta == 1)
            else:
                fails += not (e.regime is Regime.STRICT and 0 < e.alpha < e.beta < 1)
    results[f"regimes({cases})"] = fails

    elapsed = time.monotonic() - start
    ok = all(v == 0 for v in results.values()) and elapsed < 600
    return ok, f"failures per suite {results} in {elapsed:.1f}s"


CRITERIA = {
    1: ("identity exactness", criterion_1),
    2: ("Zarankiewicz values", criterion_2),
    3: ("construction soundness", criterion_3),
    4: ("Q avoids P", criterion_4),
    5: ("super-homogeneity", criterion_5),
    6: ("tuple sandwich", criterion_6),
    7: ("interval minors", criterion_7),
    8: ("deletion statistics", criterion_8),
    9: ("limit floor", criterion_9),
    10: ("dyadic pipeline", criterion_10),
    11: ("property suites", criterion_11),
}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    title, fn = CRITERIA[number]
    ok, detail = fn()
    report(number, title, ok, detail, capsys)
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for number, (title, fn) in sorted(CRITERIA.items()):
        ok, detail = fn()
        report(number, title, ok, detail)
        failed += not ok
    sys.exit(1 if failed else 0)
