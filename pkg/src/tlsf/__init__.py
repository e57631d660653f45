"""Compiler toolkit for the Temporal Logic Synthesis Format (TLSF).

Parse the full format, type check and evaluate its high-level constructs,
reduce to the basic format, interpret semantics and target conversions,
post-process the resulting LTL, and emit machine-readable output.  The ltl
module doubles as a test oracle: exact LTL evaluation over lasso words and
Mealy/Moore machine simulation.
"""

from .ast import (
    Definition,
    Expr,
    Ident,
    Info,
    Semantics,
    SignalDecl,
    Spec,
    Target,
    TlsfError,
    format_expr,
    free_identifiers,
    structural_eq,
)
from .emit import CLASSIC_PROFILE, TLSF_PROFILE, LtlProfile, parse_formula, print_basic, print_formula
from .evaluator import Env, EvalError, evaluate
from .frontend import ParseError, parse_basic_spec, parse_expr_text, parse_spec, parse_text, tokenize
from .ltl import (
    LassoWord,
    Machine,
    check_machine,
    equivalent_on_lassos,
    eval_lasso,
    expand_derived,
    pull_next,
    push_eventually,
    push_globally,
    push_next,
    run_machine,
    to_nnf,
)
from .reduce import BasicSpec, ElaborationError, elaborate
from .semantics import assemble_standard, classify_assumptions, convert_target, interpret, to_nonstrict
from .typecheck import TypeCheckError, TypeEnv, check_spec, infer

__version__ = "0.1.0"

__all__ = [
    "BasicSpec",
    "CLASSIC_PROFILE",
    "Definition",
    "ElaborationError",
    "Env",
    "EvalError",
    "Expr",
    "Ident",
    "Info",
    "LassoWord",
    "LtlProfile",
    "Machine",
    "ParseError",
    "Semantics",
    "SignalDecl",
    "Spec",
    "TLSF_PROFILE",
    "Target",
    "TlsfError",
    "TypeCheckError",
    "TypeEnv",
    "assemble_standard",
    "check_machine",
    "check_spec",
    "classify_assumptions",
    "convert_target",
    "elaborate",
    "equivalent_on_lassos",
    "eval_lasso",
    "evaluate",
    "expand_derived",
    "format_expr",
    "free_identifiers",
    "infer",
    "interpret",
    "parse_basic_spec",
    "parse_expr_text",
    "parse_formula",
    "parse_spec",
    "parse_text",
    "print_basic",
    "print_formula",
    "pull_next",
    "push_eventually",
    "push_globally",
    "push_next",
    "run_machine",
    "structural_eq",
    "to_nnf",
    "to_nonstrict",
    "tokenize",
]
