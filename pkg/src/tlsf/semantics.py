"""Interpretation of a basic specification as a single LTL formula.

Standard semantics reads the sections as "assumptions imply invariants-always
and guarantees".  Strict implication semantics (as used for GR(1)-style
synthesis) additionally demands that the system violate its safety obligations
only after the environment has violated its own; it is reduced to a standard
formula by decomposing both sides into initial, safety and liveness parts.
When the declared semantics and target machine models differ, input or output
atoms are prefixed with one X to align them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast import (
    BOOL_BINOPS,
    TEMPORAL_BINOPS,
    TEMPORAL_UNOPS,
    BinOp,
    BinOpKind,
    BoolConst,
    Expr,
    Id,
    Info,
    Semantics,
    Target,
    UnOp,
    UnOpKind,
    and_,
    conjoin,
    globally,
    implies,
    next_,
    not_,
    true_,
    weak_until,
)
from .reduce import BasicSpec


@dataclass(frozen=True)
class StrictDecomposition:
    """Initial / safety / liveness split of the environment assumptions and
    the system obligations.  Safety parts are the bodies under G."""

    env_initial: Expr
    env_safety: Expr
    env_liveness: Expr
    sys_initial: Expr
    sys_safety: Expr
    sys_liveness: Expr


def _top_conjuncts(formula: Expr) -> list[Expr]:
    if isinstance(formula, BinOp) and formula.kind is BinOpKind.AND:
        return _top_conjuncts(formula.lhs) + _top_conjuncts(formula.rhs)
    return [formula]


def _is_temporal_free(formula: Expr) -> bool:
    if isinstance(formula, (Id, BoolConst)):
        return True
    if isinstance(formula, UnOp):
        if formula.kind in TEMPORAL_UNOPS:
            return False
        return _is_temporal_free(formula.arg)
    if isinstance(formula, BinOp):
        if formula.kind in TEMPORAL_BINOPS:
            return False
        return _is_temporal_free(formula.lhs) and _is_temporal_free(formula.rhs)
    return False


def _is_safety_body(formula: Expr) -> bool:
    """Boolean combination of atoms, constants, and X over single atoms: the
    shape of an invariant over current and next values."""
    if isinstance(formula, (Id, BoolConst)):
        return True
    if isinstance(formula, UnOp):
        if formula.kind is UnOpKind.NEXT:
            return isinstance(formula.arg, Id)
        if formula.kind is UnOpKind.NOT:
            return _is_safety_body(formula.arg)
        return False
    if isinstance(formula, BinOp):
        if formula.kind in BOOL_BINOPS:
            return _is_safety_body(formula.lhs) and _is_safety_body(formula.rhs)
        return False
    return False


def classify_assumptions(assumptions) -> tuple[Expr, Expr, Expr]:
    """Route each top-level conjunct of the assumptions into an initial
    constraint, a safety constraint (G body), or a liveness constraint.
    Each bucket is conjoined; an empty bucket is true."""
    initial: list[Expr] = []
    safety: list[Expr] = []
    liveness: list[Expr] = []
    for assumption in assumptions:
        for conjunct in _top_conjuncts(assumption):
            if _is_temporal_free(conjunct):
                initial.append(conjunct)
            elif (
                isinstance(conjunct, UnOp)
                and conjunct.kind is UnOpKind.GLOBALLY
                and _is_safety_body(conjunct.arg)
            ):
                safety.append(conjunct.arg)
            else:
                liveness.append(conjunct)
    return conjoin(initial), conjoin(safety), conjoin(liveness)


def decompose_strict(basic: BasicSpec) -> StrictDecomposition:
    env_initial, env_safety, env_liveness = classify_assumptions(basic.assumptions)
    sys_initial_parts: list[Expr] = []
    sys_liveness_parts: list[Expr] = []
    for guarantee in basic.guarantees:
        for conjunct in _top_conjuncts(guarantee):
            if _is_temporal_free(conjunct):
                sys_initial_parts.append(conjunct)
            else:
                sys_liveness_parts.append(conjunct)
    return StrictDecomposition(
        env_initial=env_initial,
        env_safety=env_safety,
        env_liveness=env_liveness,
        sys_initial=conjoin(sys_initial_parts),
        sys_safety=conjoin(list(basic.invariants)),
        sys_liveness=conjoin(sys_liveness_parts),
    )


def assemble_standard(basic: BasicSpec) -> Expr:
    """Standard reading: assumptions -> (G invariants) && guarantees.  Empty
    invariant or guarantee sections are dropped from the consequent; with no
    assumptions the consequent stands alone; everything empty is true."""
    parts: list[Expr] = []
    if basic.invariants:
        parts.append(globally(conjoin(list(basic.invariants))))
    if basic.guarantees:
        parts.append(conjoin(list(basic.guarantees)))
    if not parts:
        consequent: Expr = true_()
    elif len(parts) == 1:
        consequent = parts[0]
    else:
        consequent = and_(parts[0], parts[1])
    if not basic.assumptions:
        return consequent
    return implies(conjoin(list(basic.assumptions)), consequent)


def to_nonstrict(basic: BasicSpec) -> Expr:
    """Reduce strict implication semantics to one standard-semantics formula:

        init_e -> (init_s && (safety_s W !safety_e)
                   && (G safety_e && live_e -> G safety_s && live_s))

    emitted literally, including trivially true parts."""
    d = decompose_strict(basic)
    safety_release = weak_until(d.sys_safety, not_(d.env_safety))
    progress = implies(
        and_(globally(d.env_safety), d.env_liveness),
        and_(globally(d.sys_safety), d.sys_liveness),
    )
    return implies(d.env_initial, and_(and_(d.sys_initial, safety_release), progress))


def _wrap_atoms(formula: Expr, names: frozenset[str]) -> Expr:
    """One X in front of every occurrence of the named atoms."""
    if isinstance(formula, Id):
        if formula.name.text in names:
            return next_(formula, formula.pos)
        return formula
    if isinstance(formula, BoolConst):
        return formula
    if isinstance(formula, UnOp):
        return UnOp(formula.kind, _wrap_atoms(formula.arg, names), formula.pos)
    if isinstance(formula, BinOp):
        return BinOp(
            formula.kind,
            _wrap_atoms(formula.lhs, names),
            _wrap_atoms(formula.rhs, names),
            formula.pos,
        )
    raise ValueError(f"not a ground LTL formula node: {formula!r}")


def convert_target(basic: BasicSpec, to: Target) -> BasicSpec:
    """Align the semantics machine model with the requested target: moving
    from Moore to Mealy prefixes every input occurrence with X, moving from
    Mealy to Moore prefixes every output occurrence.  Strictness and section
    structure are preserved."""
    current = basic.info.semantics.model
    if current is to:
        return basic
    if current is Target.MOORE and to is Target.MEALY:
        names = frozenset(basic.inputs)
    else:
        names = frozenset(basic.outputs)
    info = Info(
        title=basic.info.title,
        description=basic.info.description,
        semantics=Semantics.of(to, basic.info.semantics.strict),
        target=to,
        tags=basic.info.tags,
    )
    return BasicSpec(
        info=info,
        inputs=basic.inputs,
        outputs=basic.outputs,
        assumptions=tuple(_wrap_atoms(f, names) for f in basic.assumptions),
        invariants=tuple(_wrap_atoms(f, names) for f in basic.invariants),
        guarantees=tuple(_wrap_atoms(f, names) for f in basic.guarantees),
    )


def interpret(basic: BasicSpec) -> Expr:
    """The single plain-LTL formula denoted by the specification under its
    declared semantics and target: align the machine model first, then apply
    the strict reduction or the standard reading."""
    aligned = convert_target(basic, basic.info.target)
    if aligned.info.semantics.strict:
        return to_nonstrict(aligned)
    return assemble_standard(aligned)
