"""Command-line front end: ``matex {solve,check,construct,audit,verify,sweep,cache}``.

Exit codes: 0 success, 1 a "contains" verdict or a failed check, 2 usage
or input error, 3 solver budget exhausted before optimality was proved.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from collections.abc import Sequence
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import __version__
from .bounds import BoundsError
from .cache import ResultCache
from .containment import ContainmentError, find_embedding, find_interval_system
from .extremal import MAX_SOLVE_CELLS, Objective, Predicate, SolveError, SolveTask, solve, solve_many
from .patterns import (
    DyadicParams,
    PatternError,
    all_ones,
    antidiagonal_multiplier,
    classify,
    corner_construction,
    deletion_construction,
    dyadic_construction,
    greedy_avoider,
    identity_permutation,
    interval_rich_permutation,
    random_permutation,
    tuple_permutation,
)
from .structure import AuditError, audit_lemma_counts
from .tensor import Tensor01, TensorError, tensor_from_dict

EXIT_OK, EXIT_CONTAINS, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _json_default(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, Tensor01):
        return obj.to_dict()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, default=_json_default)


def read_tensor(path: str, what: str) -> Tensor01:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"{what}: cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what}: malformed JSON in {path}: {exc}") from None
    try:
        return tensor_from_dict(data)
    except TensorError as exc:
        raise UsageError(f"{what}: {path}: {exc}") from None


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _emit(args: argparse.Namespace, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _stamp(args: argparse.Namespace, out: dict[str, Any]) -> dict[str, Any]:
    if not getattr(args, "no_timestamp", False):
        out["timestamp"] = datetime.now(timezone.utc).isoformat()
    return out


def _cache(args: argparse.Namespace) -> ResultCache | None:
    if getattr(args, "no_cache", False):
        return None
    return ResultCache(args.cache, timestamps=not args.no_timestamp)


def _csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _task(args: argparse.Namespace, P: Tensor01, n: int) -> SolveTask:
    predicate = Predicate(args.predicate.replace("-", "_"))
    objective = Objective(args.objective.replace("-", "_"))
    d = P.d
    if objective is Objective.HEAVY_ROWS:
        if args.s is None:
            raise UsageError("--objective heavy-rows needs --s")
        t = args.t if args.t is not None else n
        dims = (t,) + (n,) * (d - 1)
    else:
        dims = (n,) * d
    return SolveTask(dims, classify(P), predicate, objective, args.s, args.budget)


def cmd_solve(args: argparse.Namespace) -> int:
    P = read_tensor(args.pattern, "--pattern")
    task = _task(args, P, args.n)
    start = time.monotonic()
    res = solve(task, cache=_cache(args))
    out = res.to_dict()
    out["n"] = args.n
    if not args.no_timestamp:
        out["wall_time"] = round(time.monotonic() - start, 6)
    _stamp(args, out)
    if args.emit == "csv":
        _emit(
            args,
            _csv(
                ["n", "dims", "optimum", "proved_optimal", "provenance"],
                [[args.n, "x".join(map(str, task.dims)), res.optimum, res.proved_optimal, out["provenance"]]],
            ),
        )
    else:
        _emit(args, dumps(out))
    return EXIT_OK if res.proved_optimal else EXIT_BUDGET


def cmd_check(args: argparse.Namespace) -> int:
    A = read_tensor(args.a, "--a")
    P = read_tensor(args.p, "--p")
    if A.d != P.d:
        raise UsageError(f"dimension mismatch: --a is {A.d}-dimensional, --p is {P.d}-dimensional")
    if args.interval_minor:
        wit = find_interval_system(A, P)
    else:
        if P.ones_count() == 0:
            raise UsageError("--p has no 1-entries")
        wit = find_embedding(A, P)
    out: dict[str, Any] = {
        "contains": wit is not None,
        "predicate": "interval_minor" if args.interval_minor else "containment",
    }
    if args.witness:
        out["witness"] = None if wit is None else wit.to_dict()
    _emit(args, dumps(out))
    return EXIT_CONTAINS if wit is not None else EXIT_OK


def _need(args: argparse.Namespace, *names: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"construct {args.kind} needs {', '.join(missing)}")


def cmd_construct(args: argparse.Namespace) -> int:
    kind = args.kind
    report: dict[str, Any]
    if kind == "corner":
        _need(args, "pattern", "n")
        rep = corner_construction(read_tensor(args.pattern, "--pattern"), args.n, args.entry)
        T, report = rep.output, rep.to_dict()
    elif kind == "deletion":
        _need(args, "k_vec", "n", "seed")
        rep = deletion_construction(args.k_vec, args.n, args.seed, args.p)
        T, report = rep.output, rep.to_dict()
    elif kind == "dyadic":
        _need(args, "r", "d", "seed")
        rep = dyadic_construction(DyadicParams(args.r, args.d, args.seed, args.q, args.ell))
        T, report = rep.output, rep.to_dict()
    elif kind == "greedy":
        _need(args, "pattern", "n", "seed")
        P = read_tensor(args.pattern, "--pattern")
        rep = greedy_avoider((args.n,) * P.d, P, args.seed)
        T, report = rep.output, rep.to_dict()
    elif kind == "multiplier":
        _need(args, "s", "d")
        T = antidiagonal_multiplier(args.s, args.d, args.flip or ())
        report = {"ones": T.ones_count(), "avoided": None, "seed": None, "params": {"s": args.s, "d": args.d}}
    else:
        if kind == "identity":
            _need(args, "k", "d")
            spec = identity_permutation(args.k, args.d)
        elif kind == "permutation":
            _need(args, "k", "d", "seed")
            spec = random_permutation(args.k, args.d, args.seed)
        elif kind == "all-ones":
            _need(args, "k_vec")
            spec = all_ones(args.k_vec)
        elif kind == "tuple":
            _need(args, "pattern", "j")
            spec = tuple_permutation(read_tensor(args.pattern, "--pattern"), args.j, args.axis)
        else:
            _need(args, "ell", "d")
            spec = interval_rich_permutation(args.ell, args.d, args.seed)
        T = spec.tensor
        params = {k: v for k, v in vars(args).items() if k in ("k", "d", "k_vec", "j", "ell") and v is not None}
        if kind == "tuple":
            params["axis"] = args.axis
        report = {"ones": T.ones_count(), "avoided": None, "seed": args.seed, "params": params, "kind": spec.kind.value}
    if args.out:
        Path(args.out).write_text(T.to_json() + "\n", encoding="utf-8")
        sys.stdout.write(dumps({"report": report}) + "\n")
    else:
        sys.stdout.write(dumps({"tensor": T.to_dict(), "report": report}) + "\n")
    if report.get("avoided") is False:
        return EXIT_CONTAINS
    return EXIT_OK


def cmd_audit(args: argparse.Namespace) -> int:
    A = read_tensor(args.a, "--a")
    P = read_tensor(args.p, "--p")
    from .patterns import block_permutation

    k = args.k
    gen = Tensor01(P.array[::2]) if P.dims[0] % 2 == 0 else None
    try:
        spec = block_permutation(gen, (2,) + (1,) * (P.d - 1)) if gen is not None else classify(P)
    except PatternError:
        spec = classify(P)
    rep = audit_lemma_counts(A, spec, k, args.budget)
    _emit(args, dumps(rep))
    return EXIT_OK if rep["passed"] else EXIT_CONTAINS


def cmd_verify(args: argparse.Namespace) -> int:
    from .verify import run_suite

    rep = run_suite(args.lemma, args.trials, args.seed)
    _emit(args, dumps(rep))
    return EXIT_OK if rep["ok"] else EXIT_CONTAINS


def cmd_sweep(args: argparse.Namespace) -> int:
    P = read_tensor(args.pattern, "--pattern")
    d = P.d
    ns = [n for n in range(1, args.n_max + 1) if n**d <= MAX_SOLVE_CELLS]
    skipped = [n for n in range(1, args.n_max + 1) if n not in ns]
    tasks = [_task(args, P, n) for n in ns]
    results = solve_many(tasks, cache=_cache(args), workers=args.threads)
    rows = []
    for n, res in zip(ns, results):
        ratio = Fraction(res.optimum, n ** (d - 1))
        prov = "exact-solver" if res.proved_optimal else "measured"
        rows.append({"n": n, "f": res.optimum, "ratio": ratio, "ratio_float": float(ratio), "provenance": prov})
    if args.emit == "csv":
        header = ["n", "f", "f/n^(d-1)", "f/n^(d-1) float", "provenance"]
        text = _csv(header, [[r["n"], r["f"], str(r["ratio"]), f"{r['ratio_float']:.6f}", r["provenance"]] for r in rows])
    else:
        text = dumps(_stamp(args, {"d": d, "rows": rows, "skipped": skipped}))
    _emit(args, text)
    if skipped:
        sys.stderr.write(f"skipped n={skipped}: beyond the {MAX_SOLVE_CELLS}-cell solver cap\n")
    return EXIT_OK if all(r.proved_optimal for r in results) else EXIT_BUDGET


def cmd_cache(args: argparse.Namespace) -> int:
    store = ResultCache(args.cache)
    if args.action == "path":
        _emit(args, dumps({"path": str(store.path)}))
    elif args.action == "clear":
        _emit(args, dumps({"path": str(store.path), "removed": store.clear()}))
    else:
        recs = [r.to_dict() for r in store.records()]
        for r in recs:
            r.pop("witness")
        _emit(args, "".join(dumps(r) + "\n" for r in recs) or "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="matex", description="Pattern avoidance in d-dimensional 0-1 matrices.")
    parser.add_argument("--version", action="version", version=f"matex {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the main artifact to this path instead of stdout")
    common.add_argument("--no-timestamp", action="store_true", help="omit timestamps and timings for reproducible output")
    common.add_argument("--threads", type=int, default=1, help="worker processes for independent solves (default 1)")

    solving = argparse.ArgumentParser(add_help=False)
    solving.add_argument("--predicate", choices=["containment", "interval-minor"], default="containment")
    solving.add_argument("--objective", choices=["ones", "heavy-rows"], default="ones")
    solving.add_argument("--s", type=int, help="heavy-row threshold")
    solving.add_argument("--t", type=int, help="axis-1 extent for heavy-row tasks (default n)")
    solving.add_argument("--budget", type=float, help="time budget in seconds per solve")
    solving.add_argument("--cache", help="JSONL cache path (default $MATEX_CACHE or ~/.cache/matex/results.jsonl)")
    solving.add_argument("--no-cache", action="store_true")

    p = sub.add_parser("solve", parents=[common, solving], help="exact extremal value with a witness")
    p.add_argument("--pattern", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--emit", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", parents=[common], help="does A contain P?")
    p.add_argument("--a", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--interval-minor", action="store_true")
    p.add_argument("--witness", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("construct", parents=[common], help="explicit matrices and avoiding constructions")
    p.add_argument(
        "kind",
        choices=[
            "corner",
            "deletion",
            "dyadic",
            "greedy",
            "multiplier",
            "identity",
            "permutation",
            "all-ones",
            "tuple",
            "interval-rich",
        ],
    )
    p.add_argument("--pattern")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--k-vec", type=_ints)
    p.add_argument("--seed", type=int)
    p.add_argument("--p", type=float, help="density override for deletion (flagged in the report)")
    p.add_argument("--r", type=int)
    p.add_argument("--q", type=float)
    p.add_argument("--ell", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--j", type=int)
    p.add_argument("--axis", type=int, default=1)
    p.add_argument("--entry", type=_ints)
    p.add_argument("--flip", type=_ints)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("audit", parents=[common], help="chunk decomposition counts against their bounds")
    p.add_argument("--a", required=True)
    p.add_argument("--p", required=True, help="double permutation along axis 1")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--budget", type=float)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("verify", parents=[common], help="randomized verification suites")
    p.add_argument("--lemma", required=True, choices=["Q", "counts", "homo", "liminf", "heavy-recursion", "corner", "deletion"])
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", parents=[common, solving], help="f(n) and f(n)/n^(d-1) for n = 1..n-max")
    p.add_argument("--pattern", required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--emit", choices=["json", "csv"], default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("cache", parents=[common], help="inspect or clear the result cache")
    p.add_argument("action", choices=["list", "clear", "path"])
    p.add_argument("--cache")
    p.set_defaults(func=cmd_cache)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "threads", 1) < 1:
        sys.stderr.write("matex: --threads must be >= 1\n")
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"matex: {exc}\n")
    except (TensorError, PatternError, SolveError, ContainmentError, AuditError, BoundsError, ValueError, OSError) as exc:
        sys.stderr.write(f"matex {args.command}: {exc}\n")
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
