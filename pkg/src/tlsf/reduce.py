"""Lowering of a checked full-format specification to the basic format.

Elaboration evaluates every parameter, definition, big operator and shorthand,
expands buses of width n into the scalar signals name@0 .. name@n-1, and
leaves flat lists of ground formulas over those scalars.  The '@' naming is a
convention of this toolkit: '@' is legal in identifiers, and a clash with a
user signal literally named "b@0" is detected and reported.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .ast import (
    BinOp,
    BoolConst,
    BusIndex,
    Expr,
    Id,
    Ident,
    Info,
    NatConst,
    Spec,
    TlsfError,
    UnOp,
    children,
    formula_atoms,
)
from .evaluator import (
    DEFAULT_RECURSION_LIMIT,
    Env,
    EvalError,
    BusV,
    NatV,
    SignalV,
    evaluate,
    lift_formula,
)
from .typecheck import check_spec


class ElaborationError(TlsfError):
    pass


@dataclass(frozen=True)
class BasicSpec:
    """Reduced specification: scalar signal names and ground formulas only."""

    info: Info
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    assumptions: tuple[Expr, ...] = ()
    invariants: tuple[Expr, ...] = ()
    guarantees: tuple[Expr, ...] = ()


def scalar_name(bus: str, index: int) -> str:
    return f"{bus}@{index}"


def _scalarize(e: Expr) -> Expr:
    """Replace constant-indexed bus accesses by their scalar signal names."""
    if isinstance(e, BusIndex):
        if not isinstance(e.index, NatConst):
            raise ElaborationError(f"bus index of '{e.bus.text}' did not evaluate to a constant", e.pos)
        return Id(Ident(scalar_name(e.bus.text, e.index.value), e.pos), e.pos)
    if isinstance(e, UnOp):
        return UnOp(e.kind, _scalarize(e.arg), e.pos)
    if isinstance(e, BinOp):
        return BinOp(e.kind, _scalarize(e.lhs), _scalarize(e.rhs), e.pos)
    if isinstance(e, (Id, BoolConst)):
        return e
    raise ElaborationError(f"unexpected node in ground formula: {e!r}", getattr(e, "pos", None))


def _expand_decls(decls, env: Env, taken: dict[str, str], side: str) -> list[str]:
    names: list[str] = []
    for decl in decls:
        binding = env.signals[decl.name.text]
        if isinstance(binding, SignalV):
            expanded = [binding.name]
        else:
            assert isinstance(binding, BusV)
            expanded = [scalar_name(binding.name, i) for i in range(binding.width)]
        for name in expanded:
            if name in taken:
                raise ElaborationError(
                    f"signal name '{name}' ({side}) collides with {taken[name]}", decl.name.pos
                )
            taken[name] = f"declaration of '{decl.name.text}' ({side})"
            names.append(name)
    return names


def elaborate(
    spec: Spec,
    overrides: Optional[dict[str, int]] = None,
    recursion_limit: int = DEFAULT_RECURSION_LIMIT,
) -> BasicSpec:
    """Reduce a specification to the basic format, with parameter overrides
    applied in place of the declared parameter values."""
    check_spec(spec)

    overrides = dict(overrides or {})
    declared = {name.text for name, _ in spec.parameters}
    for name in overrides:
        if name not in declared:
            raise ElaborationError(f"parameter override '{name}' does not name a declared parameter")

    env = Env.for_spec(_override_params(spec, overrides), recursion_limit=recursion_limit)

    taken: dict[str, str] = {}
    inputs = _expand_decls(spec.inputs, env, taken, "input")
    outputs = _expand_decls(spec.outputs, env, taken, "output")

    sections: dict[str, list[Expr]] = {}
    for section, entries in (
        ("ASSUMPTIONS", spec.assumptions),
        ("INVARIANTS", spec.invariants),
        ("GUARANTEES", spec.guarantees),
    ):
        out: list[Expr] = []
        for index, entry in enumerate(entries):
            try:
                value = evaluate(entry, env)
                out.append(_scalarize(lift_formula(value, entry.pos)))
            except EvalError as err:
                raise EvalError(f"{section} entry {index + 1}: {err.message}", err.pos) from None
        sections[section] = out

    basic = BasicSpec(
        info=spec.info,
        inputs=tuple(inputs),
        outputs=tuple(outputs),
        assumptions=tuple(sections["ASSUMPTIONS"]),
        invariants=tuple(sections["INVARIANTS"]),
        guarantees=tuple(sections["GUARANTEES"]),
    )
    _check_signals_declared(basic)
    return basic


def _override_params(spec: Spec, overrides: dict[str, int]) -> Spec:
    if not overrides:
        return spec
    parameters = tuple(
        (name, NatConst(overrides[name.text], value.pos) if name.text in overrides else value)
        for name, value in spec.parameters
    )
    return Spec(
        info=spec.info,
        parameters=parameters,
        definitions=spec.definitions,
        inputs=spec.inputs,
        outputs=spec.outputs,
        assumptions=spec.assumptions,
        invariants=spec.invariants,
        guarantees=spec.guarantees,
    )


def _check_signals_declared(basic: BasicSpec) -> None:
    declared = set(basic.inputs) | set(basic.outputs)
    for section in (basic.assumptions, basic.invariants, basic.guarantees):
        for formula in section:
            undeclared = formula_atoms(formula) - declared
            if undeclared:
                raise ElaborationError(
                    f"formula references undeclared signal(s): {', '.join(sorted(undeclared))}"
                )
