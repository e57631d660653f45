"""Command-line driver.

Pipeline: parse -> typecheck -> elaborate (with -p overrides) -> apply
--semantics/--target INFO overrides -> either print the basic format or
interpret to a single formula, run the requested transformations in order,
and print it under the chosen profile.

Exit codes: 0 on success, 1 on input errors (diagnostic on stderr as
file:line:col: message), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field, replace

from .ast import Expr, Semantics, Spec, Target, TlsfError
from .emit import PROFILES, print_basic, print_formula
from .evaluator import DEFAULT_RECURSION_LIMIT, Env, NatV, SignalV, BusV, evaluate
from .frontend import parse_text
from .ltl import (
    expand_derived,
    pull_next,
    push_eventually,
    push_globally,
    push_next,
    to_nnf,
)
from .reduce import BasicSpec, elaborate, scalar_name
from .semantics import interpret
from .typecheck import check_spec

TRANSFORMS = {
    "nnf": to_nnf,
    "expand-derived": expand_derived,
    "push-next": push_next,
    "pull-next": pull_next,
    "push-globally": push_globally,
    "push-eventually": push_eventually,
}

_SEMANTICS_FLAG = {
    "mealy": Semantics.MEALY,
    "moore": Semantics.MOORE,
    "mealy-strict": Semantics.MEALY_STRICT,
    "moore-strict": Semantics.MOORE_STRICT,
}

_TARGET_FLAG = {"mealy": Target.MEALY, "moore": Target.MOORE}


@dataclass
class CliConfig:
    input_path: str
    params: dict[str, int] = field(default_factory=dict)
    semantics: Semantics | None = None
    target: Target | None = None
    output_mode: str = "basic"  # basic | formula
    transforms: list[str] = field(default_factory=list)
    profile: str = "tlsf"
    check_only: bool = False
    output_path: str | None = None
    verbosity: int = 0
    recursion_limit: int = DEFAULT_RECURSION_LIMIT


def _build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tlsf",
        description="Compile TLSF specifications: reduce the full format to the "
        "basic format or to a single LTL formula.",
    )
    parser.add_argument("input", help="input file, or '-' for stdin")
    parser.add_argument(
        "-p",
        "--param",
        action="append",
        default=[],
        metavar="NAME=NAT",
        help="override a parameter (repeatable)",
    )
    parser.add_argument("--target", choices=sorted(_TARGET_FLAG), help="override the TARGET field")
    parser.add_argument(
        "--semantics", choices=sorted(_SEMANTICS_FLAG), help="override the SEMANTICS field"
    )
    parser.add_argument(
        "-o",
        "--output-mode",
        choices=["basic", "formula"],
        default="basic",
        help="emit basic-format text (default) or one LTL formula",
    )
    parser.add_argument(
        "-t",
        "--transform",
        action="append",
        default=[],
        choices=sorted(TRANSFORMS),
        metavar="NAME",
        help=f"formula transformation, applied in order (one of: {', '.join(sorted(TRANSFORMS))})",
    )
    parser.add_argument("--profile", choices=sorted(PROFILES), default="tlsf", help="operator spellings for formula output")
    parser.add_argument("--check", action="store_true", help="stop after type checking; print parameters and signal tables")
    parser.add_argument("-O", dest="output", metavar="FILE", help="write output to FILE instead of stdout")
    parser.add_argument("-v", dest="verbose", action="count", default=0, help="verbose progress on stderr")
    return parser


def _parse_params(pairs: list[str], parser: argparse.ArgumentParser) -> dict[str, int]:
    out: dict[str, int] = {}
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep or not name or not value.isdigit():
            parser.error(f"argument -p/--param: expected NAME=NAT, got '{pair}'")
        out[name] = int(value)
    return out


def parse_args(argv: list[str] | None = None) -> CliConfig:
    parser = _build_arg_parser()
    ns = parser.parse_args(argv)
    recursion_limit = DEFAULT_RECURSION_LIMIT
    env_limit = os.environ.get("TLSF_RECURSION_LIMIT")
    if env_limit is not None:
        if not env_limit.isdigit() or int(env_limit) < 1:
            parser.error(f"TLSF_RECURSION_LIMIT must be a positive integer, got '{env_limit}'")
        recursion_limit = int(env_limit)
    return CliConfig(
        input_path=ns.input,
        params=_parse_params(ns.param, parser),
        semantics=_SEMANTICS_FLAG[ns.semantics] if ns.semantics else None,
        target=_TARGET_FLAG[ns.target] if ns.target else None,
        output_mode=ns.output_mode,
        transforms=ns.transform,
        profile=ns.profile,
        check_only=ns.check,
        output_path=ns.output,
        verbosity=ns.verbose,
        recursion_limit=recursion_limit,
    )


def _read_input(config: CliConfig) -> tuple[str, str]:
    if config.input_path == "-":
        return sys.stdin.read(), "<stdin>"
    try:
        with open(config.input_path, encoding="utf-8") as handle:
            return handle.read(), config.input_path
    except OSError as err:
        raise TlsfError(f"cannot read '{config.input_path}': {err.strerror}") from None


def _check_report(spec: Spec, config: CliConfig) -> str:
    check_spec(spec)
    env = Env.for_spec(spec, recursion_limit=config.recursion_limit)
    lines = []
    lines.append("parameters:")
    for name, _ in spec.parameters:
        value = env.lookup(name)
        assert isinstance(value, NatV)
        lines.append(f"  {name.text} = {value.value}")
    for header, decls in (("inputs:", spec.inputs), ("outputs:", spec.outputs)):
        lines.append(header)
        for decl in decls:
            binding = env.signals[decl.name.text]
            if isinstance(binding, SignalV):
                lines.append(f"  {binding.name}")
            else:
                assert isinstance(binding, BusV)
                scalars = " ".join(scalar_name(binding.name, i) for i in range(binding.width))
                lines.append(f"  {binding.name}[{binding.width}]: {scalars}")
    return "\n".join(lines) + "\n"


def _note(config: CliConfig, message: str) -> None:
    if config.verbosity:
        print(f"tlsf: {message}", file=sys.stderr)


def _apply_info_overrides(basic: BasicSpec, config: CliConfig) -> BasicSpec:
    info = basic.info
    if config.semantics is not None:
        info = replace(info, semantics=config.semantics)
    if config.target is not None:
        info = replace(info, target=config.target)
    if info is basic.info:
        return basic
    return BasicSpec(
        info=info,
        inputs=basic.inputs,
        outputs=basic.outputs,
        assumptions=basic.assumptions,
        invariants=basic.invariants,
        guarantees=basic.guarantees,
    )


def run(config: CliConfig) -> int:
    """Execute the pipeline for one configuration; returns the exit status."""
    display_path = "<stdin>" if config.input_path == "-" else config.input_path
    try:
        source, display_path = _read_input(config)
        _note(config, f"parsing {display_path}")
        spec = parse_text(source)
        if config.check_only:
            _note(config, "type checking")
            _write_output(_check_report(spec, config), config)
            return 0
        _note(config, "elaborating")
        basic = elaborate(spec, config.params, recursion_limit=config.recursion_limit)
        basic = _apply_info_overrides(basic, config)
        if config.output_mode == "basic":
            _write_output(print_basic(basic), config)
            return 0
        _note(config, "interpreting")
        formula = interpret(basic)
        for name in config.transforms:
            _note(config, f"applying {name}")
            formula = TRANSFORMS[name](formula)
        _write_output(print_formula(formula, PROFILES[config.profile]) + "\n", config)
        return 0
    except TlsfError as err:
        location = f"{display_path}:{err.pos}" if err.pos is not None and err.pos.line else display_path
        print(f"{location}: error: {err.message}", file=sys.stderr)
        if config.verbosity > 1:
            import traceback

            traceback.print_exc()
        return 1


def _write_output(text: str, config: CliConfig) -> None:
    if config.output_path is None:
        sys.stdout.write(text)
    else:
        with open(config.output_path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)


def main(argv: list[str] | None = None) -> int:
    return run(parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
