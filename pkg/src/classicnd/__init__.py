"""Proof terms for classical natural deduction with bottom, implication,
conjunction and disjunction: parsing, type checking, cut elimination, and
executable checks of the strong normalization argument."""
from .candidates import I_N, adequation_check, battery, inhabitants, member_test
from .generate import GenConfig, enumerate_typed, sample_typed
from .grammar import parse_context, parse_term, parse_type, print_term, print_type
from .reduction import RedexKind, eta, is_sn, normal_forms, normalize, redexes, step
from .suites import SUITES, SuiteReport, run_all, run_suite
from .syntax import alpha_eq, apply_seq, struct_subst, struct_subst_seq, subst
from .typecheck import EMPTY_CTX, Contexts, Judgement, TypeCheckError, check, infer

__all__ = [
    "I_N", "adequation_check", "battery", "inhabitants", "member_test",
    "GenConfig", "enumerate_typed", "sample_typed",
    "parse_context", "parse_term", "parse_type", "print_term", "print_type",
    "RedexKind", "eta", "is_sn", "normal_forms", "normalize", "redexes", "step",
    "SUITES", "SuiteReport", "run_all", "run_suite",
    "alpha_eq", "apply_seq", "struct_subst", "struct_subst_seq", "subst",
    "EMPTY_CTX", "Contexts", "Judgement", "TypeCheckError", "check", "infer",
]
