"""Evaluation of the static constructs of a specification.

Evaluating a well-typed expression yields a Value: a natural, a boolean, a
finite set, a signal or bus reference, or a ground LTL formula over signals.
Arithmetic is over unsigned 64-bit naturals and fails loudly on overflow,
subtraction below zero and division by zero.  Set values are deduplicated and
kept in a canonical sorted order so that big-operator folds are deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Optional, Union

from .ast import (
    ARITH_BINOPS,
    BOOL_BINOPS,
    COMPARE_BINOPS,
    OTHERWISE,
    SET_BINOPS,
    TEMPORAL_BINOPS,
    U64_MAX,
    BigOp,
    BigOpKind,
    BinOp,
    BinOpKind,
    BoolConst,
    BusIndex,
    Definition,
    Expr,
    FinallyRange,
    FnApp,
    GloballyRange,
    Id,
    Ident,
    NatConst,
    NextN,
    Pos,
    SetLiteral,
    SetRange,
    Spec,
    TlsfError,
    UnOp,
    UnOpKind,
    Wildcard,
    and_,
    next_,
    or_,
    structural_eq,
)

DEFAULT_RECURSION_LIMIT = 10_000


class EvalError(TlsfError):
    pass


# ---------------------------------------------------------------------------
# Values
# ---------------------------------------------------------------------------


class Value:
    pass


@dataclass(frozen=True)
class NatV(Value):
    value: int


@dataclass(frozen=True)
class BoolV(Value):
    value: bool


@dataclass(frozen=True)
class SignalV(Value):
    name: str


@dataclass(frozen=True)
class BusV(Value):
    name: str
    width: int


@dataclass(frozen=True)
class FormulaV(Value):
    """Ground LTL formula: constants, signals, constant-indexed bus accesses,
    boolean connectives and temporal operators only."""

    expr: Expr


@dataclass(frozen=True)
class SetV(Value):
    elems: tuple[Value, ...]

    @staticmethod
    def of(values: list[Value]) -> "SetV":
        seen: list[Value] = []
        for v in values:
            if not any(_value_eq(v, s) for s in seen):
                seen.append(v)
        return SetV(tuple(sorted(seen, key=_value_key)))


def _value_eq(a: Value, b: Value) -> bool:
    if isinstance(a, FormulaV) and isinstance(b, FormulaV):
        return structural_eq(a.expr, b.expr)
    return a == b


def _expr_key(e: Expr) -> tuple:
    if isinstance(e, NatConst):
        return ("nat", e.value)
    if isinstance(e, BoolConst):
        return ("bool", e.value)
    if isinstance(e, Id):
        return ("id", e.name.text)
    if isinstance(e, BusIndex):
        return ("busidx", e.bus.text, _expr_key(e.index))
    if isinstance(e, UnOp):
        return ("un", e.kind.value, _expr_key(e.arg))
    if isinstance(e, BinOp):
        return ("bin", e.kind.value, _expr_key(e.lhs), _expr_key(e.rhs))
    raise EvalError(f"unexpected node in ground formula: {e!r}", getattr(e, "pos", None))


def _value_key(v: Value) -> tuple:
    if isinstance(v, NatV):
        return (0, v.value)
    if isinstance(v, BoolV):
        return (1, v.value)
    if isinstance(v, SignalV):
        return (2, v.name)
    if isinstance(v, BusV):
        return (3, v.name)
    if isinstance(v, FormulaV):
        return (4, _expr_key(v.expr))
    if isinstance(v, SetV):
        return (5, tuple(_value_key(x) for x in v.elems))
    raise EvalError(f"unknown value {v!r}")


def describe_value(v: Value) -> str:
    if isinstance(v, NatV):
        return str(v.value)
    if isinstance(v, BoolV):
        return "true" if v.value else "false"
    if isinstance(v, SignalV):
        return v.name
    if isinstance(v, BusV):
        return f"{v.name}[{v.width}]"
    if isinstance(v, SetV):
        return "{" + ", ".join(describe_value(x) for x in v.elems) + "}"
    if isinstance(v, FormulaV):
        from .ast import format_expr

        return format_expr(v.expr)
    return repr(v)


def lift_formula(v: Value, pos: Pos) -> Expr:
    """View a value as a ground formula (booleans and signals coerce)."""
    if isinstance(v, FormulaV):
        return v.expr
    if isinstance(v, BoolV):
        return BoolConst(v.value, pos)
    if isinstance(v, SignalV):
        return Id(Ident(v.name, pos), pos)
    raise EvalError(f"value {describe_value(v)} is not an LTL formula", pos)


# ---------------------------------------------------------------------------
# Environments
# ---------------------------------------------------------------------------


@dataclass
class Env:
    """Evaluation environment: global bindings plus local scopes for function
    arguments, big-operator binders and pattern captures."""

    parameters: dict[str, Expr] = dc_field(default_factory=dict)
    definitions: dict[str, Definition] = dc_field(default_factory=dict)
    signals: dict[str, Value] = dc_field(default_factory=dict)  # SignalV or BusV
    recursion_limit: int = DEFAULT_RECURSION_LIMIT
    _memo: dict[str, Value] = dc_field(default_factory=dict)
    _forcing: set[str] = dc_field(default_factory=set)
    _locals: list[dict[str, Value]] = dc_field(default_factory=list)
    _depth: int = 0

    @staticmethod
    def for_spec(spec: Spec, recursion_limit: int = DEFAULT_RECURSION_LIMIT) -> "Env":
        env = Env(recursion_limit=recursion_limit)
        for name, value in spec.parameters:
            env.parameters[name.text] = value
        for defn in spec.definitions:
            env.definitions[defn.name.text] = defn
        for decl in itertools.chain(spec.inputs, spec.outputs):
            if decl.width is None:
                env.signals[decl.name.text] = SignalV(decl.name.text)
            else:
                width = evaluate(decl.width, env)
                if not isinstance(width, NatV) or width.value < 1:
                    raise EvalError(
                        f"width of bus '{decl.name.text}' must be a natural >= 1",
                        decl.width.pos,
                    )
                env.signals[decl.name.text] = BusV(decl.name.text, width.value)
        return env

    def lookup(self, name: Ident) -> Value:
        text = name.text
        for scope in reversed(self._locals):
            if text in scope:
                return scope[text]
        if text in self.signals:
            return self.signals[text]
        if text in self._memo:
            return self._memo[text]
        if text in self.parameters:
            return self._force(text, self.parameters[text], name.pos)
        if text in self.definitions:
            defn = self.definitions[text]
            if defn.params:
                raise EvalError(f"function '{text}' used without arguments", name.pos)
            return self._force(text, defn.bodies[0][1], name.pos)
        raise EvalError(f"unbound identifier '{text}'", name.pos)

    def _force(self, text: str, expr: Expr, pos: Pos) -> Value:
        if text in self._forcing:
            raise EvalError(f"cyclic definition involving '{text}'", pos)
        self._forcing.add(text)
        saved = self._locals
        self._locals = []
        try:
            value = evaluate(expr, self)
        finally:
            self._locals = saved
            self._forcing.discard(text)
        self._memo[text] = value
        return value

    def scoped(self, bindings: dict[str, Value]):
        return _Scope(self, bindings)


class _Scope:
    def __init__(self, env: Env, bindings: dict[str, Value]):
        self.env = env
        self.bindings = bindings

    def __enter__(self) -> Env:
        self.env._locals.append(self.bindings)
        return self.env

    def __exit__(self, *exc) -> None:
        self.env._locals.pop()


# ---------------------------------------------------------------------------
# Arithmetic helpers
# ---------------------------------------------------------------------------


def _nat(v: Value) -> int:
    assert isinstance(v, NatV), f"expected a natural, got {v!r}"
    return v.value


def _check_u64(n: int, pos: Pos, what: str) -> NatV:
    if n > U64_MAX:
        raise EvalError(f"{what} overflows the 64-bit natural range", pos)
    return NatV(n)


def _apply_arith(kind: BinOpKind, a: int, b: int, pos: Pos) -> NatV:
    if kind is BinOpKind.ADD:
        return _check_u64(a + b, pos, "addition")
    if kind is BinOpKind.SUB:
        if a < b:
            raise EvalError(f"subtraction {a} - {b} drops below zero (naturals only)", pos)
        return NatV(a - b)
    if kind is BinOpKind.MUL:
        return _check_u64(a * b, pos, "multiplication")
    if kind is BinOpKind.DIV:
        if b == 0:
            raise EvalError("division by zero", pos)
        return NatV(a // b)
    if kind is BinOpKind.MOD:
        if b == 0:
            raise EvalError("modulo by zero", pos)
        return NatV(a % b)
    raise EvalError(f"unknown arithmetic operator {kind}", pos)


_COMPARE = {
    BinOpKind.EQ: lambda a, b: a == b,
    BinOpKind.NEQ: lambda a, b: a != b,
    BinOpKind.LT: lambda a, b: a < b,
    BinOpKind.LEQ: lambda a, b: a <= b,
    BinOpKind.GT: lambda a, b: a > b,
    BinOpKind.GEQ: lambda a, b: a >= b,
}


def apply_binary(kind: BinOpKind, lhs: Value, rhs: Value, pos: Pos) -> Value:
    """Binary operator on values; static boolean operands are computed, any
    formula operand makes the result a formula node."""
    if kind in ARITH_BINOPS:
        return _apply_arith(kind, _nat(lhs), _nat(rhs), pos)
    if kind in COMPARE_BINOPS:
        return BoolV(_COMPARE[kind](_nat(lhs), _nat(rhs)))
    if kind in BOOL_BINOPS:
        if isinstance(lhs, BoolV) and isinstance(rhs, BoolV):
            a, b = lhs.value, rhs.value
            if kind is BinOpKind.AND:
                return BoolV(a and b)
            if kind is BinOpKind.OR:
                return BoolV(a or b)
            if kind is BinOpKind.IMPLIES:
                return BoolV((not a) or b)
            return BoolV(a == b)
        return FormulaV(BinOp(kind, lift_formula(lhs, pos), lift_formula(rhs, pos), pos))
    if kind in TEMPORAL_BINOPS:
        return FormulaV(BinOp(kind, lift_formula(lhs, pos), lift_formula(rhs, pos), pos))
    if kind is BinOpKind.IN:
        assert isinstance(rhs, SetV)
        return BoolV(any(_value_eq(lhs, x) for x in rhs.elems))
    if kind in SET_BINOPS:
        assert isinstance(lhs, SetV) and isinstance(rhs, SetV)
        if kind is BinOpKind.UNION:
            return SetV.of(list(lhs.elems) + list(rhs.elems))
        if kind is BinOpKind.INTERSECT:
            return SetV.of([x for x in lhs.elems if any(_value_eq(x, y) for y in rhs.elems)])
        return SetV.of([x for x in lhs.elems if not any(_value_eq(x, y) for y in rhs.elems)])
    raise EvalError(f"operator '{kind.value}' cannot be evaluated here", pos)


# ---------------------------------------------------------------------------
# Core evaluation
# ---------------------------------------------------------------------------


def evaluate(e: Expr, env: Env) -> Value:
    """Evaluate a well-typed expression to a value."""
    if isinstance(e, NatConst):
        return NatV(e.value)
    if isinstance(e, BoolConst):
        return BoolV(e.value)
    if isinstance(e, Id):
        return env.lookup(e.name)
    if isinstance(e, Wildcard):
        raise EvalError("the wildcard '_' cannot be evaluated", e.pos)
    if isinstance(e, BusIndex):
        bus = env.lookup(e.bus)
        if not isinstance(bus, BusV):
            raise EvalError(f"'{e.bus.text}' is not a bus", e.pos)
        index = _nat(evaluate(e.index, env))
        if index >= bus.width:
            raise EvalError(
                f"index {index} out of range for bus '{bus.name}' of width {bus.width}", e.pos
            )
        return FormulaV(BusIndex(Ident(bus.name, e.pos), NatConst(index, e.pos), e.pos))

    if isinstance(e, UnOp):
        if e.kind is UnOpKind.NOT:
            v = evaluate(e.arg, env)
            if isinstance(v, BoolV):
                return BoolV(not v.value)
            return FormulaV(UnOp(UnOpKind.NOT, lift_formula(v, e.pos), e.pos))
        if e.kind in (UnOpKind.NEXT, UnOpKind.GLOBALLY, UnOpKind.FINALLY):
            v = evaluate(e.arg, env)
            return FormulaV(UnOp(e.kind, lift_formula(v, e.pos), e.pos))
        if e.kind is UnOpKind.SIZE:
            v = evaluate(e.arg, env)
            assert isinstance(v, SetV)
            return NatV(len(v.elems))
        if e.kind in (UnOpKind.MIN, UnOpKind.MAX):
            v = evaluate(e.arg, env)
            assert isinstance(v, SetV)
            if not v.elems:
                raise EvalError(f"{e.kind.value} of the empty set", e.pos)
            values = [_nat(x) for x in v.elems]
            return NatV(min(values) if e.kind is UnOpKind.MIN else max(values))
        if e.kind is UnOpKind.SIZEOF:
            v = evaluate(e.arg, env)
            if not isinstance(v, BusV):
                raise EvalError("SIZEOF needs a bus", e.pos)
            return NatV(v.width)

    if isinstance(e, BinOp):
        if e.kind in (BinOpKind.GUARD, BinOpKind.MATCH):
            raise EvalError(f"'{e.kind.value}' may only appear as a function body guard", e.pos)
        return apply_binary(e.kind, evaluate(e.lhs, env), evaluate(e.rhs, env), e.pos)

    if isinstance(e, SetLiteral):
        return SetV.of([evaluate(x, env) for x in e.elems])
    if isinstance(e, SetRange):
        return eval_range(
            _nat(evaluate(e.start, env)),
            _nat(evaluate(e.second, env)),
            _nat(evaluate(e.stop, env)),
            e.pos,
        )
    if isinstance(e, BigOp):
        return expand_big_op(e.kind, list(e.binders), e.body, env, e.pos)
    if isinstance(e, FnApp):
        defn = env.definitions.get(e.name.text)
        if defn is None:
            raise EvalError(f"unbound function '{e.name.text}'", e.pos)
        args = [evaluate(a, env) for a in e.args]
        return apply_function(defn, args, env, e.pos)
    if isinstance(e, (NextN, FinallyRange, GloballyRange)):
        return evaluate(expand_sugar(e, env), env)

    raise EvalError(f"cannot evaluate {e!r}", getattr(e, "pos", None))


def eval_range(start: int, second: int, stop: int, pos: Optional[Pos] = None) -> SetV:
    """Range set {start, second .. stop}: start plus multiples of the stride
    (second - start) up to stop.  Defined only for start < second."""
    if start >= second:
        raise EvalError(
            f"range {{{start}, {second} .. {stop}}} needs {start} < {second}", pos
        )
    return SetV(tuple(NatV(n) for n in range(start, stop + 1, second - start)))


def apply_function(defn: Definition, args: list[Value], env: Env, pos: Pos) -> Value:
    """Apply a definition to argument values: guards are tried in declaration
    order; 'otherwise' fires iff every other guard of the function is false."""
    if len(args) != len(defn.params):
        raise EvalError(
            f"'{defn.name.text}' expects {len(defn.params)} argument(s), got {len(args)}", pos
        )
    if env._depth >= env.recursion_limit:
        raise EvalError(
            f"recursion limit of {env.recursion_limit} exceeded in '{defn.name.text}'", pos
        )
    env._depth += 1
    try:
        with env.scoped({p.text: a for p, a in zip(defn.params, args)}):
            return _first_matching_body(defn, env, pos)
    except RecursionError:
        raise EvalError(
            f"recursion limit exceeded in '{defn.name.text}' (interpreter stack exhausted)", pos
        ) from None
    finally:
        env._depth -= 1


def _eval_guard(guard: Expr, env: Env) -> tuple[bool, Optional[dict[str, Value]]]:
    """Truth of one non-otherwise guard, plus pattern captures if it matched."""
    if isinstance(guard, BinOp) and guard.kind is BinOpKind.MATCH:
        subject = lift_formula(evaluate(guard.lhs, env), guard.pos)
        bindings = match_pattern(subject, guard.rhs)
        if bindings is None:
            return False, None
        return True, {name: FormulaV(sub) for name, sub in bindings.items()}
    v = evaluate(guard, env)
    if not isinstance(v, BoolV):
        raise EvalError("guard did not evaluate to a boolean", guard.pos)
    return v.value, None


def _first_matching_body(defn: Definition, env: Env, pos: Pos) -> Value:
    for index, (guard, body) in enumerate(defn.bodies):
        if guard is None:
            return evaluate(body, env)
        if guard is OTHERWISE:
            others_false = True
            for other_guard, _ in defn.bodies[index + 1 :]:
                if other_guard is None:
                    others_false = False
                    break
                fired, _ = _eval_guard(other_guard, env)
                if fired:
                    others_false = False
                    break
            # Guards before this one were already found false.
            if others_false:
                return evaluate(body, env)
            continue
        fired, captures = _eval_guard(guard, env)
        if fired:
            if captures:
                with env.scoped(captures):
                    return evaluate(body, env)
            return evaluate(body, env)
    raise EvalError(f"no guard of '{defn.name.text}' matched", pos)


def match_pattern(subject: Expr, pattern: Expr) -> Optional[dict[str, Expr]]:
    """Match a ground formula against a pattern of boolean/temporal
    connectives, capture identifiers and wildcards.  Repeated capture names
    must bind structurally equal subtrees.  Returns the bindings, or None."""
    bindings: dict[str, Expr] = {}

    def walk(subj: Expr, pat: Expr) -> bool:
        if isinstance(pat, Wildcard):
            return True
        if isinstance(pat, Id):
            name = pat.name.text
            if name in bindings:
                return structural_eq(bindings[name], subj)
            bindings[name] = subj
            return True
        if isinstance(pat, BoolConst):
            return isinstance(subj, BoolConst) and subj.value == pat.value
        if isinstance(pat, UnOp):
            return isinstance(subj, UnOp) and subj.kind is pat.kind and walk(subj.arg, pat.arg)
        if isinstance(pat, BinOp):
            return (
                isinstance(subj, BinOp)
                and subj.kind is pat.kind
                and walk(subj.lhs, pat.lhs)
                and walk(subj.rhs, pat.rhs)
            )
        raise EvalError(f"invalid pattern construct {pat!r}", getattr(pat, "pos", None))

    return bindings if walk(subject, pattern) else None


_EMPTY_FOLD: dict[BigOpKind, Value] = {
    BigOpKind.AND: BoolV(True),
    BigOpKind.OR: BoolV(False),
    BigOpKind.SUM: NatV(0),
    BigOpKind.PROD: NatV(1),
    BigOpKind.UNION: SetV(()),
}

_FOLD_BINOP: dict[BigOpKind, BinOpKind] = {
    BigOpKind.AND: BinOpKind.AND,
    BigOpKind.OR: BinOpKind.OR,
    BigOpKind.SUM: BinOpKind.ADD,
    BigOpKind.PROD: BinOpKind.MUL,
    BigOpKind.UNION: BinOpKind.UNION,
    BigOpKind.INTERSECT: BinOpKind.INTERSECT,
}


def expand_big_op(
    kind: BigOpKind,
    binders: list[tuple[Ident, Expr]],
    body: Expr,
    env: Env,
    pos: Pos,
) -> Value:
    """Left fold of the binary operator over the body instances, enumerating
    binder sets in canonical order; earlier binders are in scope in the set
    expressions of later binders."""
    terms: list[Value] = []

    def enumerate_binders(index: int) -> None:
        if index == len(binders):
            terms.append(evaluate(body, env))
            return
        binder, set_expr = binders[index]
        sv = evaluate(set_expr, env)
        if not isinstance(sv, SetV):
            raise EvalError("big-operator binder needs a set", set_expr.pos)
        for elem in sv.elems:
            with env.scoped({binder.text: elem}):
                enumerate_binders(index + 1)

    enumerate_binders(0)

    if not terms:
        if kind is BigOpKind.INTERSECT:
            raise EvalError("intersection over an empty index set has no identity element", pos)
        return _EMPTY_FOLD[kind]
    acc = terms[0]
    for term in terms[1:]:
        acc = apply_binary(_FOLD_BINOP[kind], acc, term, pos)
    return acc


def expand_sugar(e: Union[NextN, FinallyRange, GloballyRange], env: Env) -> Expr:
    """Rewrite the bounded temporal shorthands into plain operator nests."""
    if isinstance(e, NextN):
        count = _nat(evaluate(e.count, env))
        out = e.body
        for _ in range(count):
            out = next_(out, e.pos)
        return out
    lo = _nat(evaluate(e.lo, env))
    hi = _nat(evaluate(e.hi, env))
    if hi < lo:
        raise EvalError(f"empty range [{lo}:{hi}] in temporal shorthand", e.pos)
    combine = or_ if isinstance(e, FinallyRange) else and_
    out = e.body
    for _ in range(hi - lo):
        out = combine(e.body, next_(out, e.pos), e.pos)
    for _ in range(lo):
        out = next_(out, e.pos)
    return out
