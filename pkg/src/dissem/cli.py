"""Command-line front end.

Artifacts go to ``--out`` (``-`` for stdout).  A one-line human summary goes
to stdout, or to stderr when the artifact itself is written to stdout.

Exit codes: 0 success, 1 a verification failed, 2 bad usage or input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .adversary import (
    HEURISTICS,
    greedy_adversary,
    lower_bound_value,
    verify_upper_bound,
    worst_case_time,
)
from .constructions import lower_bound_sequence, verify_lower_bound
from .dissemination import dissemination_time, node_times, run, trace_to_csv, trace_to_dict, winners
from .errors import CapacityError, HorizonError, ValidationError
from .graphs import ClassKind, describe, enumerate_class, graph_to_dict, read_sequence, sequence_to_dot, to_dot
from .graphs.io import sequence_to_lines
from .properties import PROPERTIES, run_suite
from .validation import parse_n_range

VERIFY_TARGETS = (
    "lower-bound",
    "chain-bound",
    "undirected-chain-bound",
    "k-leaves-bound",
    "inner-nodes-bound",
    "nlogn-cap",
    "lemma1",
    "lemma2",
)

FORMATS = {
    "simulate": ("json", "csv", "dot"),
    "search": ("json",),
    "construct": ("json", "dot"),
    "verify": ("json",),
    "enumerate": ("json", "dot"),
    "properties": ("json",),
}


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _emit(args, text: str, summary: str) -> None:
    """Write the artifact and the summary to their destinations."""
    if args.out == "-":
        sys.stdout.write(text)
        if summary:
            print(summary, file=sys.stderr)
        return
    if args.out:
        Path(args.out).write_text(text)
    if summary:
        print(summary)


def _threads() -> int:
    raw = os.environ.get("DISSEM_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"DISSEM_THREADS must be an integer, got {raw!r}") from None


def _kind(args) -> str:
    if args.graph_class is None:
        raise UsageError("--class is required")
    return args.graph_class


def _require_n(args) -> int:
    if args.n is None:
        raise UsageError("--n is required")
    try:
        return int(args.n)
    except ValueError:
        raise UsageError(f"--n must be a single integer here, got {args.n!r}") from None


# -- simulate ----------------------------------------------------------------


def _fmt_time(label, t, reason):
    if t.is_finite:
        return f"{label} = {t.value}"
    return f"{label} ≥ {t.horizon + 1} ({reason})"


def cmd_simulate(args) -> int:
    seq = read_sequence(args.file)
    trace = run(seq, args.horizon)
    b = dissemination_time(trace)
    if b.is_finite:
        lines = [f"B = {b.value}; winners = {{{','.join(map(str, sorted(winners(trace))))}}}"]
    else:
        lines = [_fmt_time("B", b, "horizon reached")]
    for p, t in node_times(trace).items():
        lines.append(_fmt_time(f"B({p})", t, f"not reached by round {trace.last_round}"))
    if args.format == "csv":
        text = trace_to_csv(trace)
    elif args.format == "dot":
        text = sequence_to_dot(seq.prefix(trace.last_round) if trace.last_round else seq)
    else:
        text = _dump(trace_to_dict(trace))
    _emit(args, text, "\n".join(lines))
    return 0


# -- search ------------------------------------------------------------------


def cmd_search(args) -> int:
    desc = describe(_kind(args), _require_n(args), args.leaves)
    if args.heuristic:
        result = greedy_adversary(desc, args.heuristic, args.cap, args.seed)
    else:
        result = worst_case_time(desc, args.cap, args.canonicalize)
    if args.out and args.out != "-":
        cert = Path(args.out).with_suffix(".certificate.jsonl")
        cert.write_text("\n".join(sequence_to_lines(result.certificate)) + "\n")
    label = "lower_bound" if args.heuristic else "worst_case"
    _emit(args, _dump(result.to_dict()), f"{desc.name} n={desc.n}: {label} = {result.worst_case}")
    return 0


# -- construct ---------------------------------------------------------------


def cmd_construct(args) -> int:
    n = _require_n(args)
    lb = lower_bound_sequence(n)
    seq = lb.to_sequence()
    if args.format == "dot":
        text = sequence_to_dot(seq.prefix(lb.length))
    else:
        text = "\n".join(sequence_to_lines(seq)) + "\n"
    phases = ", ".join(f"G{k + 1}: {lo}..{hi}" for k, (lo, hi) in enumerate(lb.phases))
    _emit(args, text, f"lower-bound sequence n={n}: {lb.length} rounds ({phases})")
    return 0


# -- verify ------------------------------------------------------------------


def _bound_entry(kind, n, formula, m=None, canonicalize=False):
    desc = describe(kind, n, m)
    rep = verify_upper_bound(desc, formula, canonicalize=canonicalize)
    return rep.to_dict(), rep.passed


def verify_one(target: str, n: int, leaves=None, seed=0, traces=1000, canonicalize=False) -> dict:
    """Run one verification target at one n; returns a JSON-ready entry."""
    if target == "lower-bound":
        rep = verify_lower_bound(n)
        return {"n": n, **rep.to_dict()}
    if target == "chain-bound":
        d, ok = _bound_entry(ClassKind.DIRECTED_CHAINS, n, "chain", canonicalize=canonicalize)
        return {"n": n, **d, "passed": ok and d["tight"]}
    if target == "undirected-chain-bound":
        d, ok = _bound_entry(ClassKind.UNDIRECTED_CHAINS, n, "undirected-chain", canonicalize=canonicalize)
        return {"n": n, **d, "passed": ok and d["tight"]}
    if target in ("k-leaves-bound", "inner-nodes-bound"):
        formula = "k-leaves" if target == "k-leaves-bound" else "inner-nodes"
        ms = [leaves] if leaves is not None else list(range(1, n)) if n > 1 else []
        rows = []
        for m in ms:
            d, ok = _bound_entry(ClassKind.ROOTED_TREES_WITH_LEAVES, n, formula, m, canonicalize)
            rows.append({"m": m, **d})
        return {"n": n, "by_leaves": rows, "passed": all(r["passed"] for r in rows)}
    if target == "nlogn-cap":
        d, ok = _bound_entry(ClassKind.ROOTED_TREES, n, "nlogn", canonicalize=canonicalize)
        lower = lower_bound_value(n) if n >= 2 else 0
        value = d["value"]
        low_ok = isinstance(value, int) and value >= lower
        return {"n": n, **d, "lower_bound": lower, "passed": ok and low_ok}
    if target in ("lemma1", "lemma2"):
        res = run_suite(seed=seed, traces=traces, n_max=n, only=[target])
        return {"n_max": n, "seed": seed, **res.to_dict()}
    raise UsageError(f"unknown verify target {target!r}")


def _verify_star(job):
    return verify_one(*job)


def cmd_verify(args) -> int:
    if args.n is None:
        raise UsageError("--n is required (an integer, a range like 4..16, or a list)")
    ns = parse_n_range(args.n)
    jobs = [(args.target, n, args.leaves, args.seed, args.traces, args.canonicalize) for n in ns]
    threads = min(_threads(), len(jobs))
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(_verify_star, jobs))
    else:
        results = [verify_one(*job) for job in jobs]
    passed = all(r["passed"] for r in results)
    report = {"target": args.target, "results": results, "passed": passed}
    failed = [r.get("n", r.get("n_max")) for r in results if not r["passed"]]
    summary = f"verify {args.target}: " + ("all pass" if passed else f"FAILED for n in {failed}")
    _emit(args, _dump(report), summary)
    return 0 if passed else 1


# -- enumerate ---------------------------------------------------------------


def cmd_enumerate(args) -> int:
    desc = describe(_kind(args), _require_n(args), args.leaves)
    graphs = list(enumerate_class(desc))
    if args.format == "dot":
        text = "".join(to_dot(g, f"G{k}") for k, g in enumerate(graphs, 1))
    else:
        text = "".join(json.dumps(graph_to_dict(g)) + "\n" for g in graphs)
    _emit(args, text, f"{desc.name} n={desc.n}: {len(graphs)} graphs")
    return 0


# -- properties --------------------------------------------------------------


def cmd_properties(args) -> int:
    n_max = _require_n(args) if args.n is not None else 8
    res = run_suite(seed=args.seed, traces=args.traces, n_max=n_max, only=args.only)
    summary = "\n".join(
        f"{p}: {'pass' if not v['failures'] else 'FAIL'} ({v['traces']} traces)"
        for p, v in res.to_dict()["properties"].items()
    )
    _emit(args, _dump(res.to_dict()), summary)
    return 0 if res.passed else 1


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", help="node count (verify also takes ranges such as 4..16)")
    common.add_argument("--class", dest="graph_class", help="graph class, e.g. rooted-trees, directed-chains")
    common.add_argument("--leaves", type=int, help="leaf count for rooted-trees-leaves")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--horizon", type=int)
    common.add_argument("--cap", help="search depth cap: an integer, 'pigeonhole' or 'nlogn'")
    common.add_argument("--canonicalize", action="store_true", help="merge relabeling-equivalent states")
    common.add_argument("--format", choices=("json", "csv", "dot"), default="json")
    common.add_argument("--out", help="artifact path, '-' for stdout")

    parser = argparse.ArgumentParser(prog="dissem", description="Dissemination in dynamic networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="simulate a JSONL graph sequence")
    p.add_argument("file")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("search", parents=[common], help="worst-case time of a class")
    p.add_argument("--heuristic", choices=HEURISTICS, help="use a greedy adversary instead of exact search")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("construct", parents=[common], help="emit the lower-bound sequence")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", parents=[common], help="check a bound or property family over a range of n")
    p.add_argument("target", choices=VERIFY_TARGETS)
    p.add_argument("--traces", type=int, default=1000, help="random traces for the lemma1/lemma2 targets")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("enumerate", parents=[common], help="list every graph of a class")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("properties", parents=[common], help="randomized property suite")
    p.add_argument("--traces", type=int, default=1000)
    p.add_argument("--only", action="append", choices=PROPERTIES)
    p.set_defaults(func=cmd_properties)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format not in FORMATS[args.command]:
        parser.error(f"{args.command} supports --format {', '.join(FORMATS[args.command])}")
    try:
        return args.func(args)
    except (UsageError, ValidationError, CapacityError, HorizonError, OSError) as exc:
        print(f"dissem {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
