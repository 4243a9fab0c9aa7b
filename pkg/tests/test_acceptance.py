"""Acceptance criteria 1-8 at the default configuration.

The two full ``suite --name all`` runs happen once per module in fresh
interpreters; criteria 2-6 read their report, criterion 8 compares the bytes.
Each test records one PASS/FAIL line that is printed after the run.
"""
import json
import subprocess
import sys
import time

import pytest

from classicnd.candidates import battery, member_test
from classicnd.generate import DEFAULT_TYPE_POOL, GenConfig
from classicnd.grammar import parse_term, parse_type
from classicnd.reduction import FAMILIES, is_sn
from classicnd.suites import corpus
from classicnd.syntax import Mu, Var, is_nice
from classicnd.typecheck import TypeCheckError, infer

from oracle import oracle_type

pytestmark = pytest.mark.slow

CFG = GenConfig()
ENUMERATED = 91_395
TOTAL = ENUMERATED + CFG.sample_count
LEMMA_SUITES = ("substitution_lemma", "nice_preservation", "int_lemma", "delta_lemma")
SR_LIMIT_SECONDS = 300


def cli(*args):
    start = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "classicnd", *args],
                          capture_output=True, text=True, check=False)
    return proc, time.perf_counter() - start


@pytest.fixture(scope="module")
def full_runs(tmp_path_factory):
    base = tmp_path_factory.mktemp("reports")
    outs = []
    for i in (1, 2):
        path = base / f"run{i}.json"
        proc, seconds = cli("suite", "--name", "all", "--seed", "42", "--no-timing",
                            "--out", str(path))
        outs.append((proc, seconds, path.read_bytes()))
    return outs


@pytest.fixture(scope="module")
def report(full_runs):
    doc = json.loads(full_runs[0][2])
    return {s["suiteName"]: s for s in doc["suites"]}


def record(lines, n, title, ok, detail):
    line = f"criterion {n} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    lines[n] = line
    print(line)
    assert ok, line


def test_criterion_1_subject_reduction(acceptance_lines, tmp_path):
    path = tmp_path / "sr.json"
    proc, seconds = cli("suite", "--name", "subject_reduction", "--out", str(path))
    [suite] = json.loads(path.read_text(encoding="utf-8"))["suites"]
    ok = (proc.returncode == 0 and suite["casesRun"] == TOTAL and not suite["failures"]
          and seconds <= SR_LIMIT_SECONDS)
    record(acceptance_lines, 1, "subject reduction", ok,
           f"{suite['casesRun']} judgements, {len(suite['failures'])} failures, "
           f"{seconds:.1f}s wall (limit {SR_LIMIT_SECONDS}s)")


def test_criterion_2_strong_normalization(acceptance_lines, report):
    suite = report["strong_normalization"]
    cov = suite["coverage"]
    ok = (suite["casesRun"] == TOTAL and not suite["failures"]
          and all(cov.get(f, 0) > 0 for f in FAMILIES))
    record(acceptance_lines, 2, "strong normalization", ok,
           f"{suite['casesRun']} terms SN, {len(suite['failures'])} failures, coverage "
           + ", ".join(f"{f}={cov.get(f, 0)}" for f in FAMILIES))


def test_criterion_3_confluence(acceptance_lines, report):
    suite = report["confluence"]
    ok = suite["casesRun"] == TOTAL and not suite["failures"]
    record(acceptance_lines, 3, "confluence", ok,
           f"{suite['casesRun']} reduction graphs with one normal form, "
           f"{len(suite['failures'])} failures")


def test_criterion_4_lemma_suites(acceptance_lines, report):
    problems = []
    for name in LEMMA_SUITES:
        suite = report[name]
        if suite["failures"]:
            problems.append(f"{name} has {len(suite['failures'])} failures")
        if suite["coverage"].get("instances", 0) < 2000:
            problems.append(f"{name} ran {suite['coverage'].get('instances', 0)} instances")
    cov = report["int_lemma"]["coverage"]
    missing = [f"item{i}" for i in range(1, 6) if cov.get(f"item{i}", 0) == 0]
    if missing:
        problems.append("int_lemma never exercised " + ", ".join(missing))
    if cov.get("composition") != cov.get("instances"):
        problems.append("composition identity not checked on every int_lemma instance")
    detail = "; ".join(problems) or ", ".join(
        f"{n}={report[n]['coverage']['instances']}" for n in LEMMA_SUITES) + (
        f" instances, composition on {cov['composition']}")
    record(acceptance_lines, 4, "lemma suites", not problems, detail)


def test_criterion_5_candidates(acceptance_lines, report):
    problems = []
    for ty in DEFAULT_TYPE_POOL:
        for d in range(3):
            b = battery(ty, d)
            if () not in b.seqs:
                problems.append(f"empty sequence missing from battery({ty}, {d})")
            if not b.keys() <= battery(ty, d + 1).keys():
                problems.append(f"battery({ty}, {d}) not included in depth {d + 1}")
            if not all(is_nice(s) and all(is_sn(e) for e in s) for s in b.seqs):
                problems.append(f"battery({ty}, {d}) has a non-nice or non-SN sequence")
            for name in ("x", "r", "y9"):
                if not member_test(Var(name), ty, d):
                    problems.append(f"variable {name} fails at {ty}, depth {d}")
            for u in (parse_term("z"), parse_term("(\\q:bot. q) z")):
                if not member_test(Mu("a", ty, u), ty, d):
                    problems.append(f"mu a.{u} fails at {ty}, depth {d}")
    suite = report["candidate_closure"]
    if suite["failures"]:
        problems.append(f"candidate_closure has {len(suite['failures'])} failures")
    detail = "; ".join(problems[:3]) or (
        f"{len(DEFAULT_TYPE_POOL)} pool types x depths 0-2, candidate_closure "
        f"{suite['casesRun']} cases, 0 failures")
    record(acceptance_lines, 5, "candidates", not problems, detail)


def test_criterion_6_adequation(acceptance_lines, report):
    suite = report["adequation"]
    remark = member_test(parse_term("\\z:bot. mu a:P. z"), parse_type("bot -> P"), 2)
    ok = suite["casesRun"] == TOTAL and not suite["failures"] and remark
    record(acceptance_lines, 6, "adequation", ok,
           f"{suite['casesRun']} judgements ({ENUMERATED} enumerated) at depth 2, "
           f"{len(suite['failures'])} failures; \\z:bot. mu a:P. z at bot -> P: "
           f"{'member' if remark else 'NOT member'}")


def _infer_or_none(ctx, t):
    try:
        return infer(ctx, t)
    except TypeCheckError:
        return None


def test_criterion_7_oracle(acceptance_lines):
    enumerated, sampled = corpus(CFG)
    contexts = sorted({str(j.ctx): j.ctx for j in enumerated}.items())
    checked = disagreements = 0
    for j in enumerated + sampled:
        # the judgement's own context, then a rotating foreign one
        foreign = contexts[checked % len(contexts)][1]
        for ctx in (j.ctx, foreign):
            checked += 1
            if oracle_type(ctx.gamma, ctx.delta, j.term) != _infer_or_none(ctx, j.term):
                disagreements += 1
    ok = len(enumerated) == ENUMERATED and disagreements == 0
    record(acceptance_lines, 7, "oracle cross-check", ok,
           f"{checked} term/context pairs from {len(enumerated) + len(sampled)} judgements, "
           f"{disagreements} disagreements")


def test_criterion_8_determinism(acceptance_lines, full_runs):
    (p1, s1, b1), (p2, s2, b2) = full_runs
    ok = p1.returncode == 0 and p2.returncode == 0 and b1 == b2
    record(acceptance_lines, 8, "determinism", ok,
           f"two 'suite --name all' runs ({s1:.0f}s, {s2:.0f}s), exit codes "
           f"{p1.returncode}/{p2.returncode}, reports {'identical' if b1 == b2 else 'DIFFER'} "
           f"({len(b1)} bytes)")
