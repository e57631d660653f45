"""Syntax trees and specification records shared by every stage of the toolkit.

All node types are immutable (frozen dataclasses) and hashable, so they can be
shared freely between threads and stored in sets.  Source positions are carried
on every node for diagnostics but excluded from equality: two trees that differ
only in positions compare equal.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Union

U64_MAX = 2**64 - 1


@dataclass(frozen=True)
class Pos:
    """1-based line/column source position; (0, 0) means "no position"."""

    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


NO_POS = Pos(0, 0)


class TlsfError(Exception):
    """Base class for all diagnostics raised by the toolkit."""

    def __init__(self, message: str, pos: Optional[Pos] = None):
        super().__init__(message)
        self.message = message
        self.pos = pos

    def __str__(self) -> str:
        if self.pos is not None and self.pos != NO_POS:
            return f"{self.pos}: {self.message}"
        return self.message


@dataclass(frozen=True)
class Ident:
    """Identifier: letters, digits, underscores, primes and at-signs; must not
    start with a digit or a prime, and must not be a reserved word."""

    text: str
    pos: Pos = field(default=NO_POS, compare=False)

    def __str__(self) -> str:
        return self.text


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


class Ty:
    """Base class of expression types."""


@dataclass(frozen=True)
class SignalTy(Ty):
    def __str__(self) -> str:
        return "signal"


@dataclass(frozen=True)
class BusTy(Ty):
    def __str__(self) -> str:
        return "bus"


@dataclass(frozen=True)
class NatTy(Ty):
    def __str__(self) -> str:
        return "natural"


@dataclass(frozen=True)
class BoolTy(Ty):
    def __str__(self) -> str:
        return "boolean"


@dataclass(frozen=True)
class LtlTy(Ty):
    def __str__(self) -> str:
        return "ltl"


@dataclass(frozen=True)
class SetTy(Ty):
    elem: Ty

    def __str__(self) -> str:
        return f"set of {self.elem}"


@dataclass(frozen=True)
class VarTy(Ty):
    tid: int

    def __str__(self) -> str:
        return f"?{self.tid}"


SIGNAL = SignalTy()
BUS = BusTy()
NAT = NatTy()
BOOL = BoolTy()
LTL = LtlTy()


def is_ltl_family(ty: Ty) -> bool:
    """True for the types that coerce into an LTL position (bool, signal, ltl)."""
    return isinstance(ty, (BoolTy, SignalTy, LtlTy))


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------


class UnOpKind(enum.Enum):
    NOT = "!"
    NEXT = "X"
    GLOBALLY = "G"
    FINALLY = "F"
    SIZE = "SIZE"
    MIN = "MIN"
    MAX = "MAX"
    SIZEOF = "SIZEOF"


class BinOpKind(enum.Enum):
    ADD = "+"
    SUB = "-"
    MUL = "*"
    DIV = "/"
    MOD = "%"
    AND = "&&"
    OR = "||"
    IMPLIES = "->"
    EQUIV = "<->"
    UNTIL = "U"
    RELEASE = "R"
    WEAK_UNTIL = "W"
    EQ = "=="
    NEQ = "!="
    LT = "<"
    LEQ = "<="
    GT = ">"
    GEQ = ">="
    IN = "IN"
    UNION = "(+)"
    INTERSECT = "(*)"
    DIFFERENCE = "(\\)"
    MATCH = "~"
    GUARD = ":"


class BigOpKind(enum.Enum):
    SUM = "+"
    PROD = "*"
    UNION = "(+)"
    INTERSECT = "(*)"
    AND = "&&"
    OR = "||"


TEMPORAL_UNOPS = frozenset({UnOpKind.NEXT, UnOpKind.GLOBALLY, UnOpKind.FINALLY})
TEMPORAL_BINOPS = frozenset({BinOpKind.UNTIL, BinOpKind.RELEASE, BinOpKind.WEAK_UNTIL})
BOOL_BINOPS = frozenset({BinOpKind.AND, BinOpKind.OR, BinOpKind.IMPLIES, BinOpKind.EQUIV})
ARITH_BINOPS = frozenset({BinOpKind.ADD, BinOpKind.SUB, BinOpKind.MUL, BinOpKind.DIV, BinOpKind.MOD})
COMPARE_BINOPS = frozenset({BinOpKind.EQ, BinOpKind.NEQ, BinOpKind.LT, BinOpKind.LEQ, BinOpKind.GT, BinOpKind.GEQ})
SET_BINOPS = frozenset({BinOpKind.UNION, BinOpKind.INTERSECT, BinOpKind.DIFFERENCE})


class Expr:
    """Base class of all expression nodes."""

    pos: Pos


@dataclass(frozen=True)
class NatConst(Expr):
    value: int
    pos: Pos = field(default=NO_POS, compare=False)


@dataclass(frozen=True)
class BoolConst(Expr):
    value: bool
    pos: Pos = field(default=NO_POS, compare=False)


@dataclass(frozen=True)
class Id(Expr):
    name: Ident
    pos: Pos = field(default=NO_POS, compare=False)


@dataclass(frozen=True)
class Wildcard(Expr):
    pos: Pos = field(default=NO_POS, compare=False)


@dataclass(frozen=True)
class BusIndex(Expr):
    bus: Ident
    index: Expr
    pos: Pos = field(default=NO_POS, compare=False)


@dataclass(frozen=True)
class UnOp(Expr):
    kind: UnOpKind
    arg: Expr
    pos: Pos = field(default=NO_POS, compare=False)


@dataclass(frozen=True)
class BinOp(Expr):
    kind: BinOpKind
    lhs: Expr
    rhs: Expr
    pos: Pos = field(default=NO_POS, compare=False)


@dataclass(frozen=True)
class SetLiteral(Expr):
    elems: tuple[Expr, ...]
    pos: Pos = field(default=NO_POS, compare=False)


@dataclass(frozen=True)
class SetRange(Expr):
    """Range literal { start, second .. stop }: start, then steps of
    (second - start) while <= stop."""

    start: Expr
    second: Expr
    stop: Expr
    pos: Pos = field(default=NO_POS, compare=False)


@dataclass(frozen=True)
class BigOp(Expr):
    """Fold of a binary operator over one or more indexed sets; earlier
    binders are in scope in the set expressions of later binders."""

    kind: BigOpKind
    binders: tuple[tuple[Ident, Expr], ...]
    body: Expr
    pos: Pos = field(default=NO_POS, compare=False)

    def __post_init__(self) -> None:
        if not self.binders:
            raise ValueError("big operator needs at least one binder")
        names = [b.text for b, _ in self.binders]
        if len(set(names)) != len(names):
            raise ValueError("big operator binder names must be distinct")


@dataclass(frozen=True)
class FnApp(Expr):
    name: Ident
    args: tuple[Expr, ...]
    pos: Pos = field(default=NO_POS, compare=False)


@dataclass(frozen=True)
class NextN(Expr):
    """X[n] phi: n stacked next operators."""

    count: Expr
    body: Expr
    pos: Pos = field(default=NO_POS, compare=False)


@dataclass(frozen=True)
class FinallyRange(Expr):
    """F[n:m] phi: phi holds somewhere between the next n and m steps."""

    lo: Expr
    hi: Expr
    body: Expr
    pos: Pos = field(default=NO_POS, compare=False)


@dataclass(frozen=True)
class GloballyRange(Expr):
    """G[n:m] phi: phi holds everywhere between the next n and m steps."""

    lo: Expr
    hi: Expr
    body: Expr
    pos: Pos = field(default=NO_POS, compare=False)


# ---------------------------------------------------------------------------
# Specification records
# ---------------------------------------------------------------------------


class Semantics(enum.Enum):
    MEALY = "Mealy"
    MOORE = "Moore"
    MEALY_STRICT = "Mealy,Strict"
    MOORE_STRICT = "Moore,Strict"

    @property
    def model(self) -> "Target":
        if self in (Semantics.MEALY, Semantics.MEALY_STRICT):
            return Target.MEALY
        return Target.MOORE

    @property
    def strict(self) -> bool:
        return self in (Semantics.MEALY_STRICT, Semantics.MOORE_STRICT)

    @staticmethod
    def of(model: "Target", strict: bool) -> "Semantics":
        if model is Target.MEALY:
            return Semantics.MEALY_STRICT if strict else Semantics.MEALY
        return Semantics.MOORE_STRICT if strict else Semantics.MOORE


class Target(enum.Enum):
    MEALY = "Mealy"
    MOORE = "Moore"


@dataclass(frozen=True)
class Info:
    title: str
    description: str
    semantics: Semantics
    target: Target
    tags: tuple[str, ...] = ()


@dataclass(frozen=True)
class SignalDecl:
    """Scalar signal (width is None) or bus declaration (width expression)."""

    name: Ident
    width: Optional[Expr] = None


class _Otherwise:
    """Marker guard that fires iff every other guard of the function is false."""

    _instance: Optional["_Otherwise"] = None

    def __new__(cls) -> "_Otherwise":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "otherwise"


OTHERWISE = _Otherwise()

Guard = Union[None, _Otherwise, Expr]


@dataclass(frozen=True)
class Definition:
    """Named binding: a plain expression (params empty, one unguarded body) or
    a function with guarded/pattern-matched bodies tried in order."""

    name: Ident
    params: tuple[Ident, ...]
    bodies: tuple[tuple[Guard, Expr], ...]

    def __post_init__(self) -> None:
        if not self.bodies:
            raise ValueError(f"definition '{self.name}' has no body")
        if sum(1 for g, _ in self.bodies if g is OTHERWISE) > 1:
            raise ValueError(f"definition '{self.name}' has more than one 'otherwise' guard")


@dataclass(frozen=True)
class Spec:
    """Full-format specification: metadata, global bindings, signal partition
    and the assumption/invariant/guarantee sections."""

    info: Info
    parameters: tuple[tuple[Ident, Expr], ...] = ()
    definitions: tuple[Definition, ...] = ()
    inputs: tuple[SignalDecl, ...] = ()
    outputs: tuple[SignalDecl, ...] = ()
    assumptions: tuple[Expr, ...] = ()
    invariants: tuple[Expr, ...] = ()
    guarantees: tuple[Expr, ...] = ()


# ---------------------------------------------------------------------------
# Reserved words
# ---------------------------------------------------------------------------

# Word-form operator spellings, mapped to their canonical symbolic spelling.
# The bracketed big-operator forms (SUM[..], FORALL[..], ...) use the same
# words; the bracket itself is a separate token.
WORD_OPERATORS: dict[str, str] = {
    "SUM": "+",
    "PROD": "*",
    "SIZE": "SIZE",
    "MIN": "MIN",
    "MAX": "MAX",
    "SIZEOF": "SIZEOF",
    "MUL": "*",
    "DIV": "/",
    "MOD": "%",
    "PLUS": "+",
    "MINUS": "-",
    "CAP": "(*)",
    "CUP": "(+)",
    "SETMINUS": "(\\)",
    "EQ": "==",
    "NEQ": "!=",
    "LE": "<",
    "LEQ": "<=",
    "GE": ">",
    "GEG": ">=",
    "IN": "IN",
    "ELEM": "IN",
    "NOT": "!",
    "X": "X",
    "F": "F",
    "G": "G",
    "AND": "&&",
    "FORALL": "&&",
    "OR": "||",
    "EXISTS": "||",
    "IMPLIES": "->",
    "EQUIV": "<->",
    "W": "W",
    "U": "U",
    "R": "R",
}

SECTION_KEYWORDS = frozenset(
    {
        "INFO",
        "MAIN",
        "GLOBAL",
        "PARAMETERS",
        "DEFINITIONS",
        "INPUTS",
        "OUTPUTS",
        "ASSUMPTIONS",
        "INVARIANTS",
        "GUARANTEES",
        "TITLE",
        "DESCRIPTION",
        "SEMANTICS",
        "TARGET",
        "TAGS",
    }
)

LITERAL_KEYWORDS = frozenset({"true", "false", "otherwise"})

RESERVED_WORDS = frozenset(WORD_OPERATORS) | SECTION_KEYWORDS | LITERAL_KEYWORDS


# ---------------------------------------------------------------------------
# Formula construction helpers
# ---------------------------------------------------------------------------


def atom(name: str, pos: Pos = NO_POS) -> Id:
    return Id(Ident(name, pos), pos)


def true_(pos: Pos = NO_POS) -> BoolConst:
    return BoolConst(True, pos)


def false_(pos: Pos = NO_POS) -> BoolConst:
    return BoolConst(False, pos)


def not_(e: Expr, pos: Pos = NO_POS) -> UnOp:
    return UnOp(UnOpKind.NOT, e, pos)


def next_(e: Expr, pos: Pos = NO_POS) -> UnOp:
    return UnOp(UnOpKind.NEXT, e, pos)


def globally(e: Expr, pos: Pos = NO_POS) -> UnOp:
    return UnOp(UnOpKind.GLOBALLY, e, pos)


def finally_(e: Expr, pos: Pos = NO_POS) -> UnOp:
    return UnOp(UnOpKind.FINALLY, e, pos)


def and_(l: Expr, r: Expr, pos: Pos = NO_POS) -> BinOp:
    return BinOp(BinOpKind.AND, l, r, pos)


def or_(l: Expr, r: Expr, pos: Pos = NO_POS) -> BinOp:
    return BinOp(BinOpKind.OR, l, r, pos)


def implies(l: Expr, r: Expr, pos: Pos = NO_POS) -> BinOp:
    return BinOp(BinOpKind.IMPLIES, l, r, pos)


def equiv(l: Expr, r: Expr, pos: Pos = NO_POS) -> BinOp:
    return BinOp(BinOpKind.EQUIV, l, r, pos)


def until(l: Expr, r: Expr, pos: Pos = NO_POS) -> BinOp:
    return BinOp(BinOpKind.UNTIL, l, r, pos)


def release(l: Expr, r: Expr, pos: Pos = NO_POS) -> BinOp:
    return BinOp(BinOpKind.RELEASE, l, r, pos)


def weak_until(l: Expr, r: Expr, pos: Pos = NO_POS) -> BinOp:
    return BinOp(BinOpKind.WEAK_UNTIL, l, r, pos)


def conjoin(formulas: list[Expr]) -> Expr:
    """Left fold of && over the list; the empty conjunction is true."""
    if not formulas:
        return true_()
    acc = formulas[0]
    for f in formulas[1:]:
        acc = and_(acc, f)
    return acc


# ---------------------------------------------------------------------------
# Operations on trees
# ---------------------------------------------------------------------------


def structural_eq(a: Expr, b: Expr) -> bool:
    """Tree equality ignoring source positions (positions are non-comparing
    fields, so this is plain equality)."""
    return a == b


def children(e: Expr) -> tuple[Expr, ...]:
    """Direct sub-expressions of a node, in source order."""
    if isinstance(e, UnOp):
        return (e.arg,)
    if isinstance(e, BinOp):
        return (e.lhs, e.rhs)
    if isinstance(e, BusIndex):
        return (e.index,)
    if isinstance(e, SetLiteral):
        return e.elems
    if isinstance(e, SetRange):
        return (e.start, e.second, e.stop)
    if isinstance(e, BigOp):
        return tuple(s for _, s in e.binders) + (e.body,)
    if isinstance(e, FnApp):
        return e.args
    if isinstance(e, NextN):
        return (e.count, e.body)
    if isinstance(e, (FinallyRange, GloballyRange)):
        return (e.lo, e.hi, e.body)
    return ()


def free_identifiers(e: Expr, bound: frozenset[str] = frozenset()) -> set[Ident]:
    """Identifiers of e not bound by enclosing big-operator binders or pattern
    bindings.  Function application names count as free; wildcards never do."""
    out: set[Ident] = set()

    def walk(node: Expr, bnd: frozenset[str]) -> None:
        if isinstance(node, Id):
            if node.name.text not in bnd:
                out.add(node.name)
        elif isinstance(node, BusIndex):
            if node.bus.text not in bnd:
                out.add(node.bus)
            walk(node.index, bnd)
        elif isinstance(node, FnApp):
            if node.name.text not in bnd:
                out.add(node.name)
            for a in node.args:
                walk(a, bnd)
        elif isinstance(node, BigOp):
            inner = bnd
            for binder, sexpr in node.binders:
                walk(sexpr, inner)
                inner = inner | {binder.text}
            walk(node.body, inner)
        elif isinstance(node, BinOp) and node.kind is BinOpKind.GUARD and isinstance(node.lhs, BinOp) and node.lhs.kind is BinOpKind.MATCH:
            match = node.lhs
            walk(match.lhs, bnd)
            walk(node.rhs, bnd | {i.text for i in pattern_identifiers(match.rhs)})
        else:
            for c in children(node):
                walk(c, bnd)

    walk(e, bound)
    return out


def pattern_identifiers(pattern: Expr) -> set[Ident]:
    """Capture identifiers of a pattern expression (wildcards excluded)."""
    out: set[Ident] = set()

    def walk(node: Expr) -> None:
        if isinstance(node, Id):
            out.add(node.name)
        else:
            for c in children(node):
                walk(c)

    walk(pattern)
    return out


def formula_atoms(e: Expr) -> set[str]:
    """Names of the atomic propositions (signal identifiers) in a ground formula."""
    out: set[str] = set()

    def walk(node: Expr) -> None:
        if isinstance(node, Id):
            out.add(node.name.text)
        elif isinstance(node, BusIndex):
            walk(node.index)
        else:
            for c in children(node):
                walk(c)

    walk(e)
    return out


def format_expr(e: Expr) -> str:
    """Fully parenthesized rendering of an arbitrary expression; reparsing the
    result yields a structurally equal tree."""
    if isinstance(e, NatConst):
        return str(e.value)
    if isinstance(e, BoolConst):
        return "true" if e.value else "false"
    if isinstance(e, Id):
        return e.name.text
    if isinstance(e, Wildcard):
        return "_"
    if isinstance(e, BusIndex):
        return f"({e.bus.text}[{format_expr(e.index)}])"
    if isinstance(e, UnOp):
        if e.kind is UnOpKind.NOT:
            return f"(!{format_expr(e.arg)})"
        if e.kind is UnOpKind.SIZE:
            return f"(|{format_expr(e.arg)}|)"
        return f"({e.kind.value} {format_expr(e.arg)})"
    if isinstance(e, BinOp):
        return f"({format_expr(e.lhs)} {e.kind.value} {format_expr(e.rhs)})"
    if isinstance(e, SetLiteral):
        return "{" + ", ".join(format_expr(x) for x in e.elems) + "}"
    if isinstance(e, SetRange):
        return f"{{{format_expr(e.start)}, {format_expr(e.second)} .. {format_expr(e.stop)}}}"
    if isinstance(e, BigOp):
        binders = ", ".join(f"{b.text} IN {format_expr(s)}" for b, s in e.binders)
        return f"({e.kind.value}[{binders}] {format_expr(e.body)})"
    if isinstance(e, FnApp):
        return f"({e.name.text}({', '.join(format_expr(a) for a in e.args)}))"
    if isinstance(e, NextN):
        return f"(X[{format_expr(e.count)}] {format_expr(e.body)})"
    if isinstance(e, FinallyRange):
        return f"(F[{format_expr(e.lo)}:{format_expr(e.hi)}] {format_expr(e.body)})"
    if isinstance(e, GloballyRange):
        return f"(G[{format_expr(e.lo)}:{format_expr(e.hi)}] {format_expr(e.body)})"
    raise ValueError(f"unknown expression node: {e!r}")
