"""Randomized verification suites, one per checked inequality or construction.

Each suite draws its instances from a seeded numpy generator and returns a
summary with per-trial failures. A trial whose quantities are beyond desk
scale counts as not evaluable, never as a pass.
"""

from __future__ import annotations

from collections.abc import Callable
from fractions import Fraction
from typing import Any

import numpy as np

from .bounds import check_heavy_row_recursion, check_liminf_floor, check_super_homogeneity
from .containment import contains
from .extremal import SolveTask, solve
from .patterns import (
    PatternSpec,
    corner_construction,
    corner_ones,
    deletion_construction,
    greedy_avoider,
    random_permutation,
    tuple_permutation,
)
from .structure import audit_lemma_counts, build_Q

LEMMAS = ("Q", "counts", "homo", "liminf", "heavy-recursion", "corner", "deletion")


def _int(rng: np.random.Generator, lo: int, hi: int) -> int:
    return int(rng.integers(lo, hi + 1))


def _seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**31))


def random_corner_permutation(rng: np.random.Generator, k: int, d: int) -> PatternSpec:
    while True:
        P = random_permutation(k, d, _seed(rng))
        if corner_ones(P.tensor):
            return P


def double_instance(rng: np.random.Generator) -> tuple[PatternSpec, Any, int, str]:
    """A double permutation and a host that avoids it, sized so that Q can be large enough to matter."""
    d = _int(rng, 2, 3)
    k = _int(rng, 2, 3) if d == 2 else 2
    gen = random_permutation(k, d, _seed(rng))
    P = tuple_permutation(gen, 2)
    n = _int(rng, 2, 5) if d == 2 else _int(rng, 2, 4)
    if rng.random() < 0.3:
        A = corner_construction(gen, k * n).output
        source = "corner"
    else:
        A = greedy_avoider((k * n,) * d, P, _seed(rng)).output
        source = "greedy"
    return P, A, k, source


def _trial_Q(rng: np.random.Generator) -> dict[str, Any]:
    P, A, k, source = double_instance(rng)
    if contains(A, P.tensor):
        return {"ok": False, "why": "host contains P", "source": source}
    Q = build_Q(A, k)
    return {"ok": not contains(Q, P.tensor), "k": k, "dims": list(A.dims), "q_ones": Q.ones_count(), "source": source}


def _trial_counts(rng: np.random.Generator) -> dict[str, Any]:
    d = _int(rng, 2, 3)
    n = _int(rng, 1, 5) if d == 2 else _int(rng, 1, 3)
    gen = random_permutation(2, d, _seed(rng))
    P = tuple_permutation(gen, 2)
    A = greedy_avoider((2 * n,) * d, P, _seed(rng)).output
    rep = audit_lemma_counts(A, P, 2)
    out = {"ok": rep["passed"], "n": n, "d": d, "ones": rep["ones"]}
    if any(c.get("holds") is None for c in rep["checks"]):
        out["evaluable"] = False
    return out


def _trial_homo(rng: np.random.Generator) -> dict[str, Any]:
    d = _int(rng, 2, 3)
    k = _int(rng, 2, 4)
    P = random_corner_permutation(rng, k, d)
    n = _int(rng, max(k - 1, 1), 6 if d == 2 else 4)
    s = _int(rng, 1, 3)
    N = corner_construction(P, n).output
    rep = check_super_homogeneity(P, n, s, witness=N)
    return {"ok": rep["product_avoids"], "k": k, "d": d, "n": n, "s": s}


def _trial_liminf(rng: np.random.Generator) -> dict[str, Any]:
    k = _int(rng, 2, 3)
    P = random_corner_permutation(rng, k, 2)
    m = _int(rng, 1, 3)
    s = _int(rng, 1, max(1, 5 // m))
    rep = check_liminf_floor(P, 2, m)
    res = solve(SolveTask((s * m, s * m), P))
    # f(sm) / (sm)^(d-1) must sit at or above the floor certified by f(m)
    ratio = Fraction(res.optimum, s * m)
    return {"ok": ratio >= rep["floor"], "m": m, "s": s, "floor": str(rep["floor"]), "ratio": str(ratio)}


def _trial_heavy(rng: np.random.Generator) -> dict[str, Any]:
    k_vec = ((2, 1), (2, 2), (3, 1), (3, 2), (2, 3))[_int(rng, 0, 4)]
    n = _int(rng, 1, 3)
    t = _int(rng, 1, 3)
    s = _int(rng, 1, 3)
    rep = check_heavy_row_recursion(k_vec, n, t, s)
    out = {"ok": rep["holds"] is not False, "k_vec": list(k_vec), "n": n, "t": t, "s": s}
    if rep["holds"] is None:
        out["evaluable"] = False
    return out


def _trial_corner(rng: np.random.Generator) -> dict[str, Any]:
    d = _int(rng, 2, 3)
    k = _int(rng, 2, 4)
    P = random_permutation(k, d, _seed(rng))
    n = _int(rng, k - 1, 8)
    rep = corner_construction(P, n)
    formula = n**d - (n - k + 1) ** d
    return {"ok": rep.avoided and rep.ones == formula, "k": k, "d": d, "n": n, "ones": rep.ones}


def _trial_deletion(rng: np.random.Generator) -> dict[str, Any]:
    n = _int(rng, 2, 16)
    seed = _seed(rng)
    rep = deletion_construction((2, 2), n, seed)
    return {"ok": rep.avoided, "n": n, "seed": seed, "ones": rep.ones}


_TRIALS: dict[str, Callable[[np.random.Generator], dict[str, Any]]] = {
    "Q": _trial_Q,
    "counts": _trial_counts,
    "homo": _trial_homo,
    "liminf": _trial_liminf,
    "heavy-recursion": _trial_heavy,
    "corner": _trial_corner,
    "deletion": _trial_deletion,
}


def run_suite(lemma: str, trials: int, seed: int) -> dict[str, Any]:
    if lemma not in _TRIALS:
        raise ValueError(f"unknown lemma {lemma!r}; choose from {', '.join(LEMMAS)}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    streams = np.random.SeedSequence(seed).spawn(trials)
    passed = failed = skipped = 0
    failures = []
    for i, ss in enumerate(streams):
        res = _TRIALS[lemma](np.random.default_rng(ss))
        if res.get("evaluable") is False and res["ok"]:
            skipped += 1
        elif res["ok"]:
            passed += 1
        else:
            failed += 1
            failures.append({"trial": i, **res})
    return {
        "lemma": lemma,
        "trials": trials,
        "seed": seed,
        "passed": passed,
        "failed": failed,
        "not_evaluable": skipped,
        "failures": failures[:10],
        "ok": failed == 0,
    }


__all__ = ["LEMMAS", "double_instance", "random_corner_permutation", "run_suite"]
