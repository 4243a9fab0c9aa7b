"""Property suites, one per metatheoretic result, run over generated inputs.

Judgement suites iterate over the exhaustive corpus followed by the random
sample. Lemma suites draw ``cfg.lemma_instances`` typed instances from a
generator seeded with ``cfg.seed`` and the suite name, so each suite is
reproducible on its own.
"""
from __future__ import annotations

import json
import random
import time
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Iterator

from .candidates import BOT_POOL, CANDIDATE_VAR, battery, member_test
from .candidates import adequation_check
from .generate import (
    GenConfig, GenerationStuck, Sampler, enumerate_typed, enumeration_contexts, sample_typed,
)
from .grammar import print_seq, print_term
from .reduction import (
    ENGINE, FAMILIES, FuelExhausted, NotStronglyNormalizing, eterm_reducts, one_steps,
    reducts, replace_at,
)
from .syntax import (
    BOT, PROJ1, PROJ2, App, Arg, Arrow, Case, Inl, Inr, Lam, Mu, Or, Pair, Term, Type,
    Var, alpha_eq, alpha_key, apply_seq, fresh, is_good, is_nice, struct_subst, struct_subst_seq, subst,
)
from .typecheck import (
    Contexts, Judgement, TypeCheckError, check, infer, seq_type, typed_subterms,
)

SUITES = (
    "subject_reduction", "confluence", "strong_normalization", "substitution_lemma",
    "nice_preservation", "int_lemma", "delta_lemma", "candidate_closure", "mu_N", "adequation",
)

CONTEXT_SCHEME = ("{x1:T1, x2:T2 ; a1:S} drawn from the type pool: unbounded contexts make "
                  "exhaustive enumeration explode")

SHRINK_ROUNDS = 200


class CoverageError(AssertionError):
    """A suite ran without exercising every redex family."""


@dataclass
class Failure:
    term: str
    judgement: str
    minimized: str
    reason: str

    def to_dict(self) -> dict:
        return {"term": self.term, "judgement": self.judgement,
                "minimized": self.minimized, "reason": self.reason}


@dataclass
class SuiteReport:
    suite_name: str
    cases_run: int = 0
    failures: list[Failure] = field(default_factory=list)
    coverage: Counter = field(default_factory=Counter)
    runtime_millis: int = 0

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "suiteName": self.suite_name,
            "passed": self.passed,
            "casesRun": self.cases_run,
            "failures": [f.to_dict() for f in self.failures],
            "coverage": {k: self.coverage[k] for k in sorted(self.coverage)},
        }
        if timing:
            out["runtimeMillis"] = self.runtime_millis
        return out


def config_dict(cfg: GenConfig) -> dict:
    return {
        "maxSize": cfg.max_size, "seed": cfg.seed, "sampleCount": cfg.sample_count,
        "sampleMaxSize": cfg.sample_max_size, "typePool": [t.text for t in cfg.type_pool],
        "depth": cfg.depth, "fuel": cfg.fuel, "lemmaInstances": cfg.lemma_instances,
    }


def reports_json(reports: Iterable[SuiteReport], cfg: GenConfig, timing: bool = True) -> str:
    doc = {
        "config": config_dict(cfg),
        "contextScheme": CONTEXT_SCHEME,
        "suites": [r.to_dict(timing) for r in reports],
    }
    return json.dumps(doc, indent=2)


# ---------------------------------------------------------------------------
# Corpus


@lru_cache(maxsize=4)
def _corpus(max_size, seed, sample_count, type_pool, sample_max_size):
    cfg = GenConfig(max_size=max_size, seed=seed, sample_count=sample_count,
                    type_pool=type_pool, sample_max_size=sample_max_size)
    return tuple(enumerate_typed(cfg)), tuple(sample_typed(cfg))


def corpus(cfg: GenConfig) -> tuple[tuple[Judgement, ...], tuple[Judgement, ...]]:
    """The exhaustive judgements and the sampled ones for ``cfg`` (cached)."""
    return _corpus(cfg.max_size, cfg.seed, cfg.sample_count, cfg.type_pool, cfg.sample_max_size)


def _all_judgements(cfg: GenConfig) -> Iterator[Judgement]:
    enumerated, sampled = corpus(cfg)
    yield from enumerated
    yield from sampled


# ---------------------------------------------------------------------------
# Shrinking


def _replacements(ctx: Contexts, sub: Term, ty: Type) -> Iterator[Term]:
    for x in sorted(x for x, a in ctx.gamma.items() if a == ty):
        yield Var(x)
    for _, _, inner, inner_ty in typed_subterms(ctx, sub):
        if inner is not sub and inner_ty == ty:
            yield inner


def shrink(j: Judgement, fails: Callable[[Judgement], bool]) -> Judgement:
    """Greedily replace subterms by smaller ones of the same type while ``fails`` holds.

    Candidates are context variables of the subterm's type and its own
    same-typed subterms; every accepted step re-checks the whole judgement.
    """
    current = j
    for _ in range(SHRINK_ROUNDS):
        nxt = _shrink_step(current, fails)
        if nxt is None:
            break
        current = nxt
    return current


def _shrink_step(j: Judgement, fails) -> Judgement | None:
    for path, ctx, sub, ty in list(typed_subterms(j.ctx, j.term)):
        for cand in _replacements(ctx, sub, ty):
            if cand.size >= sub.size:
                continue
            try:
                nj = check(j.ctx, replace_at(j.term, path, cand), j.type)
            except TypeCheckError:
                continue
            if fails(nj):
                return nj
    return None


def _guard(prop: Callable[[Judgement], str | None], j: Judgement) -> str | None:
    try:
        return prop(j)
    except (FuelExhausted, NotStronglyNormalizing, TypeCheckError) as exc:
        return f"{type(exc).__name__}: {exc}"


def _run_judgements(report: SuiteReport, judgements: Iterable[Judgement],
                    prop: Callable[[Judgement], str | None]):
    for j in judgements:
        report.cases_run += 1
        reason = _guard(prop, j)
        if reason is None:
            continue
        small = shrink(j, lambda nj: _guard(prop, nj) is not None)
        report.failures.append(Failure(print_term(j.term), str(j), str(small), reason))


def _record(report: SuiteReport, ok: bool, what: str, term: Term | str, reason: str):
    report.cases_run += 1
    if not ok:
        text = term if isinstance(term, str) else print_term(term)
        report.failures.append(Failure(text, what, text, reason))


# ---------------------------------------------------------------------------
# Judgement suites


def _subject_reduction(cfg: GenConfig, report: SuiteReport):
    def prop(j: Judgement, cov: Counter | None = None) -> str | None:
        for path, kind, r in one_steps(j.term):
            if cov is not None:
                cov[kind.family] += 1
            ty = infer(j.ctx, r)
            if ty != j.type:
                return f"{kind.value} step at {path} changes the type to {ty}"
        return None

    _run_judgements(report, _all_judgements(cfg), lambda j: prop(j, report.coverage))


def _graph_kinds(t: Term, fuel: int) -> frozenset:
    return ENGINE.summarize(ENGINE.explore(t, fuel)).kinds


def _strong_normalization(cfg: GenConfig, report: SuiteReport):
    def prop(j: Judgement) -> str | None:
        res = ENGINE.is_sn(j.term, cfg.fuel, with_size=False)
        if not res:
            return f"not shown SN ({res.reason})"
        for kind in {k.family for k in _graph_kinds(j.term, cfg.fuel)}:
            report.coverage[kind] += 1
        for _, kind, r in one_steps(j.term):
            if ENGINE.eta(j.term, cfg.fuel) < ENGINE.eta(r, cfg.fuel) + 1:
                return f"eta does not decrease along a {kind.value} step"
        return None

    _run_judgements(report, _all_judgements(cfg), prop)
    missing = [f for f in FAMILIES if report.coverage[f] == 0]
    if missing:
        err = CoverageError(f"no case exercised {', '.join(missing)}")
        report.failures.append(Failure("", "", "", f"CoverageError: {err}"))


def _confluence(cfg: GenConfig, report: SuiteReport):
    def prop(j: Judgement) -> str | None:
        nfs = ENGINE.normal_forms(j.term, cfg.fuel)
        if len(nfs) != 1:
            return f"{len(nfs)} normal forms: " + " ; ".join(print_term(t) for t in nfs)
        for kind in {k.family for k in _graph_kinds(j.term, cfg.fuel)}:
            report.coverage[kind] += 1
        return None

    _run_judgements(report, _all_judgements(cfg), prop)


def _reachable_terms(t: Term) -> list[Term]:
    seen = {alpha_key(t): t}
    todo = [t]
    while todo:
        for r in reducts(todo.pop()):
            k = alpha_key(r)
            if k not in seen:
                seen[k] = r
                todo.append(r)
    return [seen[k] for k in sorted(seen)]


def _candidate_closure(cfg: GenConfig, report: SuiteReport):
    depths = range(cfg.depth + 1)
    for ty in cfg.type_pool:
        for d in depths:
            b = battery(ty, d)
            what = f"battery({ty}, {d})"
            report.coverage["battery"] += 1
            _record(report, () in b.seqs, what, "()", "empty sequence missing")
            for seq in b.seqs:
                _record(report, is_nice(seq), what, print_seq(seq), "sequence is not nice")
                for e in seq:
                    _record(report, bool(ENGINE.is_sn(e, cfg.fuel, with_size=False)), what,
                            print_seq((e,)), "element not SN")
            if d + 1 in depths:
                _record(report, b.keys() <= battery(ty, d + 1).keys(), what, "()",
                        "battery not included in the next depth")
            for name in (CANDIDATE_VAR, "x1", "y"):
                report.coverage["variables"] += 1
                _record(report, member_test(Var(name), ty, d, cfg.fuel), f"{name} in {ty}",
                        name, "variable fails the member test")

    def prop(j: Judgement) -> str | None:
        if not member_test(j.term, j.type, cfg.depth, cfg.fuel):
            return None
        for r in _reachable_terms(j.term):
            report.coverage["reducts"] += 1
            if not member_test(r, j.type, cfg.depth, cfg.fuel):
                return f"reduct {print_term(r)} fails the member test"
        return None

    _run_judgements(report, _all_judgements(cfg), prop)


def _mu_n(cfg: GenConfig, report: SuiteReport):
    enumerated, sampled = corpus(cfg)
    bodies = list(BOT_POOL) + [j.term for j in enumerated + sampled if j.type == BOT]
    for d in range(cfg.depth + 1):
        for ty in cfg.type_pool:
            for u in bodies:
                t = Mu(fresh("m", u.fmv), ty, u)
                report.coverage[f"depth{d}"] += 1
                _record(report, member_test(t, ty, d, cfg.fuel), f"{ty} depth {d}", t,
                        "mu-abstraction over an SN term fails the member test")


def _adequation(cfg: GenConfig, report: SuiteReport):
    def prop(j: Judgement) -> str | None:
        report.coverage["open" if j.term.fv or j.term.fmv else "closed"] += 1
        if adequation_check(j, cfg.depth, cfg.fuel):
            return None
        return f"an adequation instance fails the member test at depth {cfg.depth}"

    _run_judgements(report, _all_judgements(cfg), prop)


# ---------------------------------------------------------------------------
# Lemma suites


class _Draws:
    """Seeded source of typed pieces for lemma instances."""

    TRIES = 500

    def __init__(self, cfg: GenConfig, name: str):
        self.rng = random.Random(f"{cfg.seed}/{name}")
        self.sampler = Sampler(cfg.type_pool, self.rng)
        self.contexts = enumeration_contexts(cfg.type_pool)
        self.pool = cfg.type_pool
        self.fuel = cfg.fuel

    def retry(self, build: Callable[[], object]):
        """Call ``build`` until it completes; each call re-draws its own choices."""
        for _ in range(self.TRIES):
            try:
                return build()
            except GenerationStuck:
                continue
        raise GenerationStuck("lemma instance")

    def context(self) -> Contexts:
        return self.rng.choice(self.contexts)

    def type(self) -> Type:
        return self.rng.choice(self.pool)

    def term(self, ctx: Contexts, goal: Type, hi: int = 8) -> Term:
        return self.sampler.term(ctx, goal, self.rng.randint(1, hi))

    def redex_term(self, ctx: Contexts, goal: Type) -> Term:
        t = self.term(ctx, goal, 10)
        if not one_steps(t):
            raise GenerationStuck(goal)
        return t

    def seq(self, ctx: Contexts, ty: Type, max_len: int = 3, min_len: int = 0,
            hi: int = 6) -> tuple[tuple, Type]:
        seq, res = self.sampler.seq(ctx, ty, self.rng.randint(1, hi), max_len=max_len)
        if len(seq) < min_len:
            raise GenerationStuck(ty)
        return tuple(seq), res

    def reducible_seq(self, ctx: Contexts, ty: Type) -> tuple:
        """A typed nice sequence in which one argument or case branch has a redex."""
        seq, _ = self.seq(ctx, ty, max_len=4, min_len=1)
        slots = []
        for i, e in enumerate(seq):
            match ty, e:
                case Arrow(dom, _), Arg():
                    slots.append((i, lambda dom=dom: Arg(self.redex_term(ctx, dom))))
                case Or(left, _), Case(ann, x, _, y, right):
                    slots.append((i, lambda left=left, ann=ann, x=x, y=y, right=right: Case(
                        ann, x, self.redex_term(_extend(ctx, {x: left}), ann), y, right)))
            ty = seq_type(ty, (e,))
        if not slots:
            raise GenerationStuck(ty)
        i, make = self.rng.choice(slots)
        return seq[:i] + (self.retry(make),) + seq[i + 1:]

    def sn(self, t) -> bool:
        return bool(ENGINE.is_sn(t, self.fuel, with_size=False))


def _extend(ctx: Contexts, gamma: dict | None = None, delta: dict | None = None) -> Contexts:
    return Contexts({**ctx.gamma, **(gamma or {})}, {**ctx.delta, **(delta or {})})


def _one_step(a: Term, b: Term) -> bool:
    return any(alpha_eq(r, b) for r in reducts(a))


def _substitution_lemma(cfg: GenConfig, report: SuiteReport):
    draw = _Draws(cfg, report.suite_name)

    def build():
        def inhabited():
            base, b = draw.context(), draw.type()
            return base, b, draw.term(base, b)

        base, b, w = draw.retry(inhabited)
        ctx = _extend(base, {"y1": b}, {"m1": Arrow(b, draw.type())})
        u1 = draw.retry(lambda: draw.redex_term(ctx, draw.type()))
        u2 = draw.retry(lambda: draw.redex_term(_extend(base, {"y1": b}), b))
        t = draw.retry(lambda: draw.term(ctx, draw.type()))
        return u1, u2, t, w

    for _ in range(cfg.lemma_instances):
        u1, u2, t, w = draw.retry(build)
        r1 = draw.rng.choice(reducts(u1))
        r2 = draw.rng.choice(reducts(u2))
        eps = Arg(w)
        report.coverage["instances"] += 1
        _record(report, _one_step(subst(u1, "y1", w), subst(r1, "y1", w)), "item 1 (lambda)",
                u1, "substitution does not commute with the step")
        _record(report, _one_step(struct_subst(u1, "m1", eps), struct_subst(r1, "m1", eps)),
                "item 1 (mu)", u1, "structural substitution does not commute with the step")
        _record(report, ENGINE.reaches(subst(t, "y1", u2), subst(t, "y1", r2), cfg.fuel),
                "item 2 (lambda)", t, "no reduction path after substituting a reduct")
        _record(report, ENGINE.reaches(struct_subst_seq(t, "m1", (Arg(u2),)),
                                       struct_subst_seq(t, "m1", (Arg(r2),)), cfg.fuel),
                "item 2 (mu)", t, "no reduction path after structurally substituting a reduct")


def _nice_preservation(cfg: GenConfig, report: SuiteReport):
    draw = _Draws(cfg, report.suite_name)
    for _ in range(cfg.lemma_instances):
        seq = draw.retry(lambda: draw.reducible_seq(draw.context(), draw.type()))
        text = print_seq(seq)
        report.coverage["instances"] += 1
        _record(report, is_nice(seq), "generated", text, "generated sequence is not nice")
        _record(report, not is_good(seq) or is_nice(seq), "good implies nice", text,
                "good sequence is not nice")
        for i, e in enumerate(seq):
            for e2 in eterm_reducts(e):
                report.coverage["reducts"] += 1
                changed = seq[:i] + (e2,) + seq[i + 1:]
                _record(report, is_nice(changed), f"reduct at {i}", print_seq(changed),
                        "reduct sequence is not nice")


def _int_lemma(cfg: GenConfig, report: SuiteReport):
    draw = _Draws(cfg, report.suite_name)
    sn = draw.sn

    def build():
        def inhabited():
            ctx, ty = draw.context(), draw.type()
            return ctx, ty, draw.term(ctx, ty), draw.seq(ctx, ty, min_len=1)[0]

        def redex_parts():
            a = draw.type()
            return a, draw.term(_extend(ctx, {"y1": a}), ty), draw.term(ctx, a)

        def case_parts():
            a, b, c = draw.type(), draw.type(), draw.type()
            inj = (draw.term(ctx, a), draw.term(ctx, b))
            branches = (draw.term(_extend(ctx, {"y1": a}), c),
                        draw.term(_extend(ctx, {"y2": b}), c))
            return a, b, c, inj, branches

        ctx, ty, chosen, seq = draw.retry(inhabited)
        a, body, arg = draw.retry(redex_parts)
        pair = (chosen, draw.retry(lambda: draw.term(ctx, draw.type())))
        case_a, b, c, inj, branches = draw.retry(case_parts)
        named = draw.retry(lambda: draw.term(_extend(ctx, delta={"m1": ty}), BOT))
        return ctx, ty, seq, a, case_a, b, c, body, arg, pair, inj, branches, named

    for _ in range(cfg.lemma_instances):
        ctx, ty, seq, a, case_a, b, c, body, arg, pair, inj, branches, named = draw.retry(build)
        report.coverage["instances"] += 1
        if not all(sn(e) for e in seq):
            report.coverage["vacuous"] += 1
            continue
        # item 1
        t = apply_seq(Var("y1"), seq)
        report.coverage["item1"] += 1
        _record(report, sn(t), "item 1", t, "variable applied to a nice sequence is not SN")
        # item 2
        if sn(arg) and sn(apply_seq(subst(body, "y1", arg), seq)):
            t = apply_seq(App(Lam("y1", a, body), Arg(arg)), seq)
            report.coverage["item2"] += 1
            _record(report, sn(t), "item 2", t, "beta expansion is not SN")
        # item 3: the chosen component sits at position i
        chosen, other = pair
        for i, p in ((1, Pair(chosen, other)), (2, Pair(other, chosen))):
            if sn(chosen) and sn(other) and sn(apply_seq(chosen, seq)):
                t = apply_seq(App(p, PROJ1 if i == 1 else PROJ2), seq)
                report.coverage["item3"] += 1
                _record(report, sn(t), f"item 3 (p{i})", t, "projection expansion is not SN")
        # item 4
        u1, u2 = branches
        case = Case(c, "y1", u1, "y2", u2)
        for label, injected, var, branch, payload in (("inl", Inl(b, inj[0]), "y1", u1, inj[0]),
                                                      ("inr", Inr(case_a, inj[1]), "y2", u2, inj[1])):
            if sn(payload) and sn(u1) and sn(u2) and sn(subst(branch, var, payload)):
                t = App(injected, case)
                report.coverage["item4"] += 1
                _record(report, sn(t), f"item 4 ({label})", t, "case-injection expansion is not SN")
        # item 5 and the composition identity
        if sn(struct_subst_seq(named, "m1", seq)):
            t = apply_seq(Mu("m1", ty, named), seq)
            report.coverage["item5"] += 1
            _record(report, sn(t), "item 5", t, "mu expansion is not SN")
        if seq:
            split = struct_subst_seq(struct_subst_seq(named, "m1", seq[:1]), "m1", seq[1:])
            whole = struct_subst_seq(named, "m1", seq)
            report.coverage["composition"] += 1
            _record(report, alpha_eq(split, whole), "composition identity", named,
                    "structural substitution does not compose")


def _delta_lemma(cfg: GenConfig, report: SuiteReport):
    draw = _Draws(cfg, report.suite_name)
    sn = draw.sn

    def build():
        def scrutinee():
            ctx, a, b = draw.context(), draw.type(), draw.type()
            return ctx, a, b, draw.term(ctx, Or(a, b))

        def branches():
            c = draw.type()
            seq, res = draw.seq(ctx, c, min_len=1)
            u = draw.term(_extend(ctx, {"y1": a}), c)
            v = draw.term(_extend(ctx, {"y2": b}), c)
            return c, u, v, seq, res

        ctx, a, b, head = draw.retry(scrutinee)
        c, u, v, seq, res = draw.retry(branches)
        return head, u, v, c, seq, res

    for _ in range(cfg.lemma_instances):
        head, u, v, c, seq, res = draw.retry(build)
        report.coverage["instances"] += 1
        if not all(sn(e) for e in seq):
            report.coverage["vacuous"] += 1
            continue
        pushed = App(head, Case(res, "y1", apply_seq(u, seq), "y2", apply_seq(v, seq)))
        if not sn(pushed):
            report.coverage["vacuous"] += 1
            continue
        t = apply_seq(App(head, Case(c, "y1", u, "y2", v)), seq)
        report.coverage["checked"] += 1
        _record(report, sn(t), "delta", t, "pulling the sequence out of the case is not SN")


_RUNNERS: dict[str, Callable[[GenConfig, SuiteReport], None]] = {
    "subject_reduction": _subject_reduction,
    "confluence": _confluence,
    "strong_normalization": _strong_normalization,
    "substitution_lemma": _substitution_lemma,
    "nice_preservation": _nice_preservation,
    "int_lemma": _int_lemma,
    "delta_lemma": _delta_lemma,
    "candidate_closure": _candidate_closure,
    "mu_N": _mu_n,
    "adequation": _adequation,
}


def run_suite(name: str, cfg: GenConfig) -> SuiteReport:
    """Run one suite; failures are returned as data, never raised."""
    if name not in _RUNNERS:
        raise ValueError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")
    report = SuiteReport(name)
    start = time.perf_counter()
    _RUNNERS[name](cfg, report)
    report.runtime_millis = round((time.perf_counter() - start) * 1000)
    return report


def run_all(cfg: GenConfig, names: Iterable[str] = SUITES) -> list[SuiteReport]:
    return [run_suite(n, cfg) for n in names]
