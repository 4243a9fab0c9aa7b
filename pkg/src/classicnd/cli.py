"""Command-line front end: check, normalize, eta, suite, gen.

Exit codes: 0 on success, 1 when a check or suite fails, 2 on usage, parse
or IO errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from pathlib import Path
from typing import Iterator, TextIO

from .generate import DEFAULT_TYPE_POOL, GenConfig, MAX_DEPTH, enumerate_typed, sample_typed
from .grammar import ParseError, parse_context, parse_term, parse_type, print_term
from .reduction import (
    DEFAULT_FUEL, ENGINE, STRATEGIES, ConfluenceError, FuelExhausted, NotStronglyNormalizing,
    normalize, step,
)
from .suites import SUITES, reports_json, run_all
from .typecheck import Contexts, Judgement, TypeCheckError, check, infer

OK, FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    """Bad input detected before any real work starts."""


def _contexts(gamma: str | None, delta: str | None) -> Contexts:
    return Contexts(parse_context(gamma or ""), parse_context(delta or ""))


def _term_source(args) -> str:
    if args.term is not None and args.file is not None:
        raise UsageError("give either --term or a file, not both")
    if args.term is not None:
        return args.term
    if args.file is not None:
        return Path(args.file).read_text(encoding="utf-8")
    raise UsageError("a term is required (--term or a file)")


# ---------------------------------------------------------------------------
# check


def _corpus_lines(path: str) -> Iterator[tuple[int, dict]]:
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            if line.strip():
                try:
                    yield n, json.loads(line)
                except json.JSONDecodeError as exc:
                    raise UsageError(f"line {n}: invalid JSON: {exc}") from exc


def _verdict(ctx: Contexts, term_src: str, type_src: str | None) -> tuple[bool, str]:
    term = parse_term(term_src)
    try:
        if type_src is None:
            return True, str(Judgement(ctx, term, infer(ctx, term)))
        return True, str(check(ctx, term, parse_type(type_src)))
    except TypeCheckError as exc:
        return False, str(exc)


def cmd_check(args, out: TextIO) -> int:
    if args.file is not None:
        if args.term is not None:
            raise UsageError("give either --term or a corpus file, not both")
        mismatches = total = 0
        for n, rec in _corpus_lines(args.file):
            try:
                ctx = Contexts({k: parse_type(v) for k, v in rec.get("ctx_gamma", {}).items()},
                               {k: parse_type(v) for k, v in rec.get("ctx_delta", {}).items()})
                expect = rec.get("expect", "well-typed")
                if expect not in ("well-typed", "ill-typed"):
                    raise UsageError(f"line {n}: unknown expectation {expect!r}")
                typed, detail = _verdict(ctx, rec["term"], rec.get("type"))
            except KeyError as exc:
                raise UsageError(f"line {n}: missing field {exc}") from exc
            except ParseError as exc:
                raise UsageError(f"line {n}: {exc}") from exc
            total += 1
            got = "well-typed" if typed else "ill-typed"
            if got == expect:
                print(f"line {n}: pass", file=out)
            else:
                mismatches += 1
                print(f"line {n}: FAIL expected {expect}, got {got}: {detail}", file=out)
        print(f"{total - mismatches}/{total} lines pass", file=out)
        return FAILED if mismatches else OK
    if args.term is None:
        raise UsageError("a corpus file or --term is required")
    typed, detail = _verdict(_contexts(args.gamma, args.delta), args.term, args.type)
    want = args.expect == "well-typed"
    print(("pass: " if typed == want else "FAIL: ") + detail, file=out)
    return OK if typed == want else FAILED


# ---------------------------------------------------------------------------
# normalize / eta


def cmd_normalize(args, out: TextIO) -> int:
    term = parse_term(_term_source(args))
    if args.gamma or args.delta:
        infer(_contexts(args.gamma, args.delta), term)
    try:
        nf, trace = normalize(term, args.strategy, args.seed, args.fuel)
    except (FuelExhausted, ConfluenceError, NotStronglyNormalizing) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAILED
    if args.trace:
        t = term
        for s in trace:
            t = step(t, s)
            print(f"{s} : {print_term(t)}", file=out)
    print(print_term(nf), file=out)
    return OK


def cmd_eta(args, out: TextIO) -> int:
    term = parse_term(_term_source(args))
    res = ENGINE.is_sn(term, args.fuel)
    if not res:
        print(f"not shown strongly normalizing ({res.reason})", file=out)
        return FAILED
    root = ENGINE.explore(term, args.fuel)
    nodes = ENGINE.reachable(root)
    edges = sum(len(ENGINE.succ[k]) for k in nodes)
    print(f"eta {res.eta}", file=out)
    print(f"graph nodes {res.graph_size}", file=out)
    print(f"graph edges {edges}", file=out)
    print(f"normal forms {len(ENGINE.summarize(root).normal_forms)}", file=out)
    return OK


# ---------------------------------------------------------------------------
# suite / gen


def _config(args) -> GenConfig:
    try:
        return GenConfig(max_size=args.max_size, seed=args.seed, sample_count=args.samples,
                         sample_max_size=args.sample_max_size, depth=getattr(args, "depth", 2),
                         fuel=getattr(args, "fuel", DEFAULT_FUEL),
                         lemma_instances=getattr(args, "lemma_instances", 2000),
                         type_pool=DEFAULT_TYPE_POOL)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_suite(args, out: TextIO) -> int:
    cfg = _config(args)
    names = SUITES if args.name == "all" else (args.name,)
    reports = run_all(cfg, names)
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.suite_name}: {status} cases={r.cases_run} failures={len(r.failures)} "
              f"({r.runtime_millis} ms)", file=out)
        for f in r.failures[:5]:
            print(f"  {f.reason}: {f.minimized or f.term}", file=out)
    if args.out:
        Path(args.out).write_text(reports_json(reports, cfg, timing=not args.no_timing) + "\n",
                                  encoding="utf-8")
    return OK if all(r.passed for r in reports) else FAILED


def _corpus_record(j, expect: str = "well-typed", ty=None) -> str:
    return json.dumps({
        "ctx_gamma": {k: v.text for k, v in j.ctx.gamma.items()},
        "ctx_delta": {k: v.text for k, v in j.ctx.delta.items()},
        "term": print_term(j.term),
        "type": (ty or j.type).text,
        "expect": expect,
    })


def cmd_gen(args, out: TextIO) -> int:
    cfg = _config(args)
    hist: Counter = Counter()
    lines = []
    pool = cfg.type_pool
    for source in (enumerate_typed(cfg), sample_typed(cfg)):
        for j in source:
            hist[j.term.size] += 1
            lines.append(_corpus_record(j))
            if args.mutants:
                # the next pool type is a wrong claim since typing is unique
                wrong = pool[(pool.index(j.type) + 1) % len(pool)] if j.type in pool else pool[0]
                if wrong != j.type:
                    lines.append(_corpus_record(j, "ill-typed", wrong))
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    print("size histogram:", file=sys.stderr)
    for size in sorted(hist):
        print(f"  {size:3d} {hist[size]}", file=sys.stderr)
    return OK


# ---------------------------------------------------------------------------
# argument parsing


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="classicnd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def contexts(p):
        p.add_argument("--gamma", help='lambda-context, e.g. "x:P, f:P -> Q"')
        p.add_argument("--delta", help='mu-context, e.g. "a:P"')

    p = sub.add_parser("check", help="type-check a corpus file or a single term")
    p.add_argument("file", nargs="?", help="JSON-lines corpus")
    p.add_argument("--term")
    p.add_argument("--type")
    p.add_argument("--expect", choices=("well-typed", "ill-typed"), default="well-typed")
    contexts(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("normalize", help="reduce a term to normal form")
    p.add_argument("file", nargs="?", help="file holding the term")
    p.add_argument("--term")
    p.add_argument("--strategy", choices=STRATEGIES, default="leftmost-outermost")
    p.add_argument("--seed", type=_non_negative, default=0)
    p.add_argument("--trace", action="store_true", help="print every step")
    p.add_argument("--fuel", type=_positive, default=DEFAULT_FUEL)
    contexts(p)
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("eta", help="longest reduction length and graph statistics")
    p.add_argument("file", nargs="?", help="file holding the term")
    p.add_argument("--term")
    p.add_argument("--fuel", type=_positive, default=DEFAULT_FUEL)
    p.set_defaults(func=cmd_eta)

    def gen_flags(p):
        p.add_argument("--max-size", type=_positive, default=8)
        p.add_argument("--samples", type=_non_negative, default=10_000)
        p.add_argument("--sample-max-size", type=_positive, default=20)
        p.add_argument("--seed", type=_non_negative, default=42)

    p = sub.add_parser("suite", help="run property suites")
    p.add_argument("--name", choices=("all",) + SUITES, default="all")
    gen_flags(p)
    p.add_argument("--depth", type=_non_negative, default=2, help=f"battery depth (<= {MAX_DEPTH})")
    p.add_argument("--fuel", type=_positive, default=DEFAULT_FUEL)
    p.add_argument("--lemma-instances", type=_non_negative, default=2000)
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--no-timing", action="store_true", help="omit runtimes from the JSON report")
    p.set_defaults(func=cmd_suite)

    p = sub.add_parser("gen", help="write a JSON-lines corpus")
    gen_flags(p)
    p.add_argument("--mutants", action="store_true", help="add an ill-typed variant of each line")
    p.add_argument("--out", help="output file (default: standard output)")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: list[str] | None = None, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE
    try:
        return args.func(args, out)
    except (UsageError, ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except TypeCheckError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAILED


def run():
    sys.exit(main())
