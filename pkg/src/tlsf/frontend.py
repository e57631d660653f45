"""Tokenizer and parsers for the full and basic TLSF formats.

Expressions are parsed by precedence climbing over the operator table below:
smaller row numbers bind tighter, associativity is per row.  Word-form
operator names (AND, IMPLIES, ELEM, ...) tokenize to the same canonical
operators as their symbolic spellings.  Comments are // to end of line and
/* ... */ with proper nesting.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .ast import (
    BOOL_BINOPS,
    NO_POS,
    OTHERWISE,
    RESERVED_WORDS,
    TEMPORAL_BINOPS,
    TEMPORAL_UNOPS,
    U64_MAX,
    WORD_OPERATORS,
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
    Guard,
    children,
    Id,
    Ident,
    Info,
    NatConst,
    NextN,
    Pos,
    Semantics,
    SetLiteral,
    SetRange,
    SignalDecl,
    Spec,
    Target,
    TlsfError,
    UnOp,
    UnOpKind,
    Wildcard,
)


class ParseError(TlsfError):
    def __init__(self, pos: Pos, expected: str, found: str):
        super().__init__(f"expected {expected}, found {found}", pos)
        self.expected = expected
        self.found = found


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_@")
IDENT_CONT = IDENT_START | set("0123456789'")

# Symbolic operators, longest first so that maximal munch is a linear scan.
SYMBOL_OPERATORS = [
    "(+)", "(*)", "(\\)", "(-)", "<->",
    "->", "<-", "&&", "||", "==", "!=", "/=", "<=", ">=", "..",
    "+", "-", "*", "/", "%", "<", ">", "!", "|", "~", ":",
]

CANONICAL_SYMBOL = {"(-)": "(\\)", "/=": "!=", "<-": "IN"}

PUNCTUATION = set("{}()[],;=")


@dataclass(frozen=True)
class Token:
    kind: str  # ident | nat | string | op | kw | punct | eof
    text: str
    pos: Pos = field(default=NO_POS, compare=False)

    def describe(self) -> str:
        if self.kind == "eof":
            return "end of input"
        if self.kind == "string":
            return f'string "{self.text}"'
        return f"'{self.text}'"


def tokenize(source: str) -> list[Token]:
    """Split source text into tokens, stripping whitespace and comments."""
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = source[i]
        pos = Pos(line, col)
        if c in " \t\r\n\f\v":
            advance(1)
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                advance(1)
            continue
        if source.startswith("/*", i):
            depth = 1
            advance(2)
            while i < n and depth > 0:
                if source.startswith("/*", i):
                    depth += 1
                    advance(2)
                elif source.startswith("*/", i):
                    depth -= 1
                    advance(2)
                else:
                    advance(1)
            if depth > 0:
                raise ParseError(pos, "'*/' closing the comment", "end of input")
            continue
        if c == '"':
            advance(1)
            chars: list[str] = []
            while True:
                if i >= n:
                    raise ParseError(pos, "closing '\"'", "end of input")
                d = source[i]
                if d == "\\":
                    if i + 1 >= n:
                        raise ParseError(pos, "closing '\"'", "end of input")
                    esc = source[i + 1]
                    if esc not in ('"', "\\"):
                        raise ParseError(Pos(line, col), "escape sequence \\\" or \\\\", f"'\\{esc}'")
                    chars.append(esc)
                    advance(2)
                    continue
                if d == '"':
                    advance(1)
                    break
                chars.append(d)
                advance(1)
            tokens.append(Token("string", "".join(chars), pos))
            continue
        if c.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            if j < n and source[j] in IDENT_START | {"'"}:
                raise ParseError(pos, "a natural number or an identifier", f"'{source[i:j + 1]}' (identifiers must not start with a digit)")
            text = source[i:j]
            if int(text) > U64_MAX:
                raise ParseError(pos, "a natural number below 2^64", f"'{text}'")
            tokens.append(Token("nat", text, pos))
            advance(j - i)
            continue
        if c in IDENT_START:
            j = i
            while j < n and source[j] in IDENT_CONT:
                j += 1
            word = source[i:j]
            advance(j - i)
            if word in WORD_OPERATORS:
                tokens.append(Token("op", WORD_OPERATORS[word], pos))
            elif word in RESERVED_WORDS:
                tokens.append(Token("kw", word, pos))
            else:
                tokens.append(Token("ident", word, pos))
            continue
        matched = False
        for op in SYMBOL_OPERATORS:
            if source.startswith(op, i):
                tokens.append(Token("op", CANONICAL_SYMBOL.get(op, op), pos))
                advance(len(op))
                matched = True
                break
        if matched:
            continue
        if c in PUNCTUATION:
            tokens.append(Token("punct", c, pos))
            advance(1)
            continue
        raise ParseError(pos, "a token", f"illegal character {c!r}")

    tokens.append(Token("eof", "", Pos(line, col)))
    return tokens


# ---------------------------------------------------------------------------
# Operator table (precedence climbing)
# ---------------------------------------------------------------------------

# Binding power: 20 - row, so row 1 (tightest) has the highest power.
_ROWS: dict[str, tuple[int, str]] = {
    "*": (2, "left"),
    "/": (3, "right"),
    "%": (3, "right"),
    "+": (4, "left"),
    "-": (4, "left"),
    "(\\)": (6, "right"),
    "(*)": (7, "left"),
    "(+)": (8, "left"),
    "==": (9, "left"),
    "!=": (9, "left"),
    "<": (9, "left"),
    "<=": (9, "left"),
    ">": (9, "left"),
    ">=": (9, "left"),
    "IN": (10, "left"),
    "&&": (12, "left"),
    "||": (13, "left"),
    "->": (14, "right"),
    "<->": (14, "right"),
    "W": (15, "right"),
    "U": (16, "right"),
    "R": (17, "left"),
    "~": (18, "left"),
    ":": (19, "left"),
}

BINARY_POWER = {op: 20 - row for op, (row, _) in _ROWS.items()}
BINARY_ASSOC = {op: assoc for op, (row, assoc) in _ROWS.items()}

PREFIX_POWER = {
    "MIN": 19, "MAX": 19, "SIZEOF": 19, "SIZE": 19,  # row 1
    "!": 9, "X": 9, "F": 9, "G": 9,  # row 11
}

PREFIX_KIND = {
    "MIN": UnOpKind.MIN,
    "MAX": UnOpKind.MAX,
    "SIZEOF": UnOpKind.SIZEOF,
    "SIZE": UnOpKind.SIZE,
    "!": UnOpKind.NOT,
    "X": UnOpKind.NEXT,
    "F": UnOpKind.FINALLY,
    "G": UnOpKind.GLOBALLY,
}

# Big-operator markers with the binding power of their table row.
BIG_OP_POWER = {
    "+": (BigOpKind.SUM, 19),
    "*": (BigOpKind.PROD, 19),
    "(*)": (BigOpKind.INTERSECT, 15),
    "(+)": (BigOpKind.UNION, 15),
    "&&": (BigOpKind.AND, 9),
    "||": (BigOpKind.OR, 9),
}

BINOP_BY_SYMBOL = {k.value: k for k in BinOpKind}

PATTERN_POWER = BINARY_POWER["~"]  # 2
GUARD_POWER = BINARY_POWER[":"]  # 1
# Expressions inside [...] bounds and guard right-hand sides must not swallow
# the surrounding ':' / '~', so they parse above both rows.
NO_GUARD_POWER = PATTERN_POWER + 1


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    # -- token plumbing ----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        t = self.tokens[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def error(self, expected: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(tok.pos, expected, tok.describe())

    def expect_punct(self, text: str) -> Token:
        t = self.peek()
        if t.kind != "punct" or t.text != text:
            raise self.error(f"'{text}'")
        return self.next()

    def expect_op(self, text: str) -> Token:
        t = self.peek()
        if t.kind != "op" or t.text != text:
            raise self.error(f"'{text}'")
        return self.next()

    def expect_kw(self, word: str) -> Token:
        t = self.peek()
        if t.kind != "kw" or t.text != word:
            raise self.error(f"'{word}'")
        return self.next()

    def expect_ident(self, what: str = "an identifier") -> Ident:
        t = self.peek()
        if t.kind != "ident":
            raise self.error(what)
        if t.text == "_":
            raise self.error(what + " (the wildcard '_' cannot be declared)")
        self.next()
        return Ident(t.text, t.pos)

    def at_punct(self, text: str) -> bool:
        t = self.peek()
        return t.kind == "punct" and t.text == text

    def at_op(self, text: str) -> bool:
        t = self.peek()
        return t.kind == "op" and t.text == text

    def at_kw(self, word: str) -> bool:
        t = self.peek()
        return t.kind == "kw" and t.text == word

    # -- expressions ---------------------------------------------------------

    def parse_expr(self, min_power: int, allow_guard: bool = False) -> Expr:
        lhs = self.parse_prefix(allow_guard)
        while True:
            t = self.peek()
            if t.kind != "op" or t.text not in BINARY_POWER:
                break
            if not allow_guard and t.text in (":", "~"):
                break
            power = BINARY_POWER[t.text]
            if power < min_power:
                break
            self.next()
            if t.text == ":":
                # A guard's right-hand side is a plain expression.
                rhs = self.parse_expr(NO_GUARD_POWER, allow_guard=False)
            elif BINARY_ASSOC[t.text] == "left":
                rhs = self.parse_expr(power + 1, allow_guard)
            else:
                rhs = self.parse_expr(power, allow_guard)
            lhs = BinOp(BINOP_BY_SYMBOL[t.text], lhs, rhs, t.pos)
        return lhs

    def parse_prefix(self, allow_guard: bool) -> Expr:
        t = self.peek()
        if t.kind == "op":
            if t.text in BIG_OP_POWER and self.peek(1).kind == "punct" and self.peek(1).text == "[":
                return self.parse_big_op()
            if t.text in ("X", "F", "G") and self.peek(1).kind == "punct" and self.peek(1).text == "[":
                return self.parse_temporal_sugar()
            if t.text in PREFIX_POWER:
                self.next()
                arg = self.parse_expr(PREFIX_POWER[t.text], allow_guard=False)
                return UnOp(PREFIX_KIND[t.text], arg, t.pos)
            if t.text == "|":
                self.next()
                arg = self.parse_expr(0, allow_guard=False)
                self.expect_op("|")
                return UnOp(UnOpKind.SIZE, arg, t.pos)
            raise self.error("an expression")
        return self.parse_atom(allow_guard)

    def parse_atom(self, allow_guard: bool) -> Expr:
        t = self.peek()
        if t.kind == "nat":
            self.next()
            return NatConst(int(t.text), t.pos)
        if t.kind == "kw" and t.text in ("true", "false"):
            self.next()
            return BoolConst(t.text == "true", t.pos)
        if t.kind == "ident":
            self.next()
            if t.text == "_":
                return Wildcard(t.pos)
            name = Ident(t.text, t.pos)
            if self.at_punct("("):
                self.next()
                args: list[Expr] = []
                if not self.at_punct(")"):
                    args.append(self.parse_expr(0, allow_guard=False))
                    while self.at_punct(","):
                        self.next()
                        args.append(self.parse_expr(0, allow_guard=False))
                self.expect_punct(")")
                return FnApp(name, tuple(args), t.pos)
            if self.at_punct("["):
                self.next()
                index = self.parse_expr(0, allow_guard=False)
                self.expect_punct("]")
                return BusIndex(name, index, t.pos)
            return Id(name, t.pos)
        if t.kind == "punct" and t.text == "(":
            self.next()
            inner = self.parse_expr(0, allow_guard=False)
            self.expect_punct(")")
            return inner
        if t.kind == "punct" and t.text == "{":
            return self.parse_set(t)
        raise self.error("an expression")

    def parse_set(self, brace: Token) -> Expr:
        self.expect_punct("{")
        if self.at_punct("}"):
            self.next()
            return SetLiteral((), brace.pos)
        first = self.parse_expr(0, allow_guard=False)
        if self.at_punct(","):
            self.next()
            second = self.parse_expr(0, allow_guard=False)
            if self.at_op(".."):
                self.next()
                stop = self.parse_expr(0, allow_guard=False)
                self.expect_punct("}")
                return SetRange(first, second, stop, brace.pos)
            elems = [first, second]
            while self.at_punct(","):
                self.next()
                elems.append(self.parse_expr(0, allow_guard=False))
            self.expect_punct("}")
            return SetLiteral(tuple(elems), brace.pos)
        self.expect_punct("}")
        return SetLiteral((first,), brace.pos)

    def parse_big_op(self) -> Expr:
        t = self.next()
        kind, power = BIG_OP_POWER[t.text]
        self.expect_punct("[")
        binders: list[tuple[Ident, Expr]] = []
        while True:
            binders.append(self.parse_binder())
            if self.at_punct(","):
                self.next()
                continue
            break
        self.expect_punct("]")
        body = self.parse_expr(power, allow_guard=False)
        names = [b.text for b, _ in binders]
        if len(set(names)) != len(names):
            raise ParseError(t.pos, "distinct binder names", f"duplicate '{next(n for n in names if names.count(n) > 1)}'")
        return BigOp(kind, tuple(binders), body, t.pos)

    def parse_binder(self) -> tuple[Ident, Expr]:
        """One binder: either 'id IN set' or the range form 'n <(=) id <(=) m',
        which rewrites to membership in the corresponding range set."""
        start = self.peek()
        e = self.parse_expr(NO_GUARD_POWER, allow_guard=False)
        if isinstance(e, BinOp) and e.kind is BinOpKind.IN and isinstance(e.lhs, Id):
            return (e.lhs.name, e.rhs)
        if (
            isinstance(e, BinOp)
            and e.kind in (BinOpKind.LT, BinOpKind.LEQ)
            and isinstance(e.lhs, BinOp)
            and e.lhs.kind in (BinOpKind.LT, BinOpKind.LEQ)
            and isinstance(e.lhs.rhs, Id)
        ):
            lo_cmp, hi_cmp = e.lhs, e
            binder = lo_cmp.rhs.name
            lo = lo_cmp.lhs
            hi = hi_cmp.rhs
            if lo_cmp.kind is BinOpKind.LT:
                lo = BinOp(BinOpKind.ADD, lo, NatConst(1, lo.pos), lo.pos)
            if hi_cmp.kind is BinOpKind.LT:
                hi = BinOp(BinOpKind.SUB, hi, NatConst(1, hi.pos), hi.pos)
            step = BinOp(BinOpKind.ADD, lo, NatConst(1, lo.pos), lo.pos)
            return (binder, SetRange(lo, step, hi, start.pos))
        raise ParseError(start.pos, "a binder ('id IN set' or 'n <= id < m')", "an unsupported binder shape")

    def parse_temporal_sugar(self) -> Expr:
        t = self.next()
        self.expect_punct("[")
        first = self.parse_expr(NO_GUARD_POWER, allow_guard=False)
        if t.text == "X":
            self.expect_punct("]")
            body = self.parse_expr(PREFIX_POWER["X"], allow_guard=False)
            return NextN(first, body, t.pos)
        self.expect_op(":")
        second = self.parse_expr(NO_GUARD_POWER, allow_guard=False)
        self.expect_punct("]")
        body = self.parse_expr(PREFIX_POWER[t.text], allow_guard=False)
        if t.text == "F":
            return FinallyRange(first, second, body, t.pos)
        return GloballyRange(first, second, body, t.pos)

    # -- sections ------------------------------------------------------------

    def parse_info(self) -> Info:
        self.expect_kw("INFO")
        self.expect_punct("{")
        fields: dict[str, object] = {}
        while not self.at_punct("}"):
            t = self.peek()
            if t.kind != "kw" or t.text not in ("TITLE", "DESCRIPTION", "SEMANTICS", "TARGET", "TAGS"):
                raise self.error("an INFO field (TITLE, DESCRIPTION, SEMANTICS, TARGET or TAGS)")
            if t.text in fields:
                raise ParseError(t.pos, "each INFO field at most once", f"duplicate '{t.text}'")
            self.next()
            self.expect_op(":")
            if t.text in ("TITLE", "DESCRIPTION"):
                s = self.peek()
                if s.kind != "string":
                    raise self.error("a string literal")
                self.next()
                fields[t.text] = s.text
            elif t.text == "SEMANTICS":
                fields[t.text] = self.parse_semantics_value()
            elif t.text == "TARGET":
                fields[t.text] = self.parse_target_value()
            else:
                fields[t.text] = self.parse_tags()
        close = self.expect_punct("}")
        missing = [f for f in ("TITLE", "DESCRIPTION", "SEMANTICS", "TARGET") if f not in fields]
        if missing:
            raise ParseError(close.pos, f"INFO field(s) {', '.join(missing)}", "'}'")
        return Info(
            title=fields["TITLE"],  # type: ignore[arg-type]
            description=fields["DESCRIPTION"],  # type: ignore[arg-type]
            semantics=fields["SEMANTICS"],  # type: ignore[arg-type]
            target=fields["TARGET"],  # type: ignore[arg-type]
            tags=fields.get("TAGS", ()),  # type: ignore[arg-type]
        )

    def parse_semantics_value(self) -> Semantics:
        t = self.peek()
        if t.kind != "ident" or t.text not in ("Mealy", "Moore"):
            raise self.error("'Mealy' or 'Moore'")
        self.next()
        strict = False
        if self.at_punct(","):
            self.next()
            s = self.peek()
            if s.kind != "ident" or s.text != "Strict":
                raise self.error("'Strict'")
            self.next()
            strict = True
        return Semantics.of(Target.MEALY if t.text == "Mealy" else Target.MOORE, strict)

    def parse_target_value(self) -> Target:
        t = self.peek()
        if t.kind != "ident" or t.text not in ("Mealy", "Moore"):
            raise self.error("'Mealy' or 'Moore'")
        self.next()
        return Target.MEALY if t.text == "Mealy" else Target.MOORE

    def parse_tags(self) -> tuple[str, ...]:
        tags = [self.parse_tag()]
        while self.at_punct(","):
            self.next()
            tags.append(self.parse_tag())
        return tuple(tags)

    def parse_tag(self) -> str:
        t = self.peek()
        if t.kind in ("ident", "string"):
            self.next()
            return t.text
        raise self.error("a tag (word or string literal)")

    def parse_global(self) -> tuple[tuple[tuple[Ident, Expr], ...], tuple[Definition, ...]]:
        self.expect_kw("GLOBAL")
        self.expect_punct("{")
        parameters: Optional[list[tuple[Ident, Expr]]] = None
        definitions: Optional[list[Definition]] = None
        while not self.at_punct("}"):
            t = self.peek()
            if self.at_kw("PARAMETERS"):
                if parameters is not None:
                    raise ParseError(t.pos, "each GLOBAL subsection at most once", "duplicate 'PARAMETERS'")
                self.next()
                parameters = self.parse_parameters()
            elif self.at_kw("DEFINITIONS"):
                if definitions is not None:
                    raise ParseError(t.pos, "each GLOBAL subsection at most once", "duplicate 'DEFINITIONS'")
                self.next()
                definitions = self.parse_definitions()
            else:
                raise self.error("'PARAMETERS', 'DEFINITIONS' or '}'")
        self.expect_punct("}")
        return tuple(parameters or []), tuple(definitions or [])

    def parse_parameters(self) -> list[tuple[Ident, Expr]]:
        self.expect_punct("{")
        out: list[tuple[Ident, Expr]] = []
        while not self.at_punct("}"):
            name = self.expect_ident("a parameter name")
            self.expect_punct("=")
            value = self.parse_expr(0)
            self.expect_punct(";")
            out.append((name, value))
        self.expect_punct("}")
        return out

    def parse_definitions(self) -> list[Definition]:
        self.expect_punct("{")
        out: list[Definition] = []
        while not self.at_punct("}"):
            name = self.expect_ident("a definition name")
            if self.at_punct("("):
                self.next()
                params = [self.expect_ident("a function argument name")]
                while self.at_punct(","):
                    self.next()
                    params.append(self.expect_ident("a function argument name"))
                self.expect_punct(")")
                if len({p.text for p in params}) != len(params):
                    raise ParseError(name.pos, "distinct argument names", f"duplicates in '{name.text}'")
                self.expect_punct("=")
                bodies = self.parse_function_bodies(name)
                out.append(Definition(name, tuple(params), tuple(bodies)))
            else:
                self.expect_punct("=")
                value = self.parse_expr(0)
                self.expect_punct(";")
                out.append(Definition(name, (), ((None, value),)))
        self.expect_punct("}")
        return out

    def parse_function_bodies(self, name: Ident) -> list[tuple[Guard, Expr]]:
        bodies: list[tuple[Guard, Expr]] = []
        saw_otherwise = False
        while True:
            if self.at_kw("otherwise"):
                t = self.next()
                if saw_otherwise:
                    raise ParseError(t.pos, "at most one 'otherwise' guard", "a second 'otherwise'")
                saw_otherwise = True
                self.expect_op(":")
                rhs = self.parse_expr(NO_GUARD_POWER, allow_guard=False)
                bodies.append((OTHERWISE, rhs))
            else:
                entry = self.parse_expr(0, allow_guard=True)
                bodies.append(self.split_guarded_entry(entry, name))
            if self.at_punct(";"):
                self.next()
                return bodies
            if self.peek().kind == "eof":
                raise self.error("';'")

    def split_guarded_entry(self, entry: Expr, name: Ident) -> tuple[Guard, Expr]:
        if isinstance(entry, BinOp) and entry.kind is BinOpKind.GUARD:
            guard, rhs = entry.lhs, entry.rhs
            if isinstance(guard, BinOp) and guard.kind is BinOpKind.GUARD:
                raise ParseError(entry.pos, "a single guard per alternative", "a chained ':'")
            self.check_no_guard_nodes(rhs)
            if isinstance(guard, BinOp) and guard.kind is BinOpKind.MATCH:
                self.check_pattern(guard.rhs)
                self.check_no_guard_nodes(guard.lhs)
            else:
                self.check_no_guard_nodes(guard)
            return (guard, rhs)
        if isinstance(entry, BinOp) and entry.kind is BinOpKind.MATCH:
            raise ParseError(entry.pos, "':' after the pattern match", "an unguarded pattern")
        self.check_no_guard_nodes(entry)
        return (None, entry)

    def check_no_guard_nodes(self, e: Expr) -> None:
        if isinstance(e, BinOp) and e.kind in (BinOpKind.GUARD, BinOpKind.MATCH):
            raise ParseError(e.pos, "guards and pattern matches only at the top of a function alternative", f"nested '{e.kind.value}'")
        for c in children(e):
            self.check_no_guard_nodes(c)

    def check_pattern(self, pattern: Expr) -> None:
        if isinstance(pattern, (Id, Wildcard, BoolConst)):
            return
        if isinstance(pattern, UnOp) and (pattern.kind is UnOpKind.NOT or pattern.kind in TEMPORAL_UNOPS):
            self.check_pattern(pattern.arg)
            return
        if isinstance(pattern, BinOp) and (pattern.kind in BOOL_BINOPS or pattern.kind in TEMPORAL_BINOPS):
            self.check_pattern(pattern.lhs)
            self.check_pattern(pattern.rhs)
            return
        raise ParseError(pattern.pos, "a pattern (boolean/temporal connectives, fresh identifiers and '_')", "an unsupported pattern construct")

    def parse_main(self) -> dict[str, list]:
        self.expect_kw("MAIN")
        self.expect_punct("{")
        seen: dict[str, list] = {}
        while not self.at_punct("}"):
            t = self.peek()
            if t.kind != "kw" or t.text not in ("INPUTS", "OUTPUTS", "ASSUMPTIONS", "INVARIANTS", "GUARANTEES"):
                raise self.error("a MAIN subsection (INPUTS, OUTPUTS, ASSUMPTIONS, INVARIANTS or GUARANTEES)")
            if t.text in seen:
                raise ParseError(t.pos, "each MAIN subsection at most once", f"duplicate '{t.text}'")
            self.next()
            if t.text in ("INPUTS", "OUTPUTS"):
                seen[t.text] = self.parse_signal_decls()
            else:
                seen[t.text] = self.parse_expr_list()
        close = self.expect_punct("}")
        for required in ("INPUTS", "OUTPUTS"):
            if required not in seen:
                raise ParseError(close.pos, f"a '{required}' subsection in MAIN", "'}'")
        return seen

    def parse_signal_decls(self) -> list[SignalDecl]:
        self.expect_punct("{")
        out: list[SignalDecl] = []
        while not self.at_punct("}"):
            name = self.expect_ident("a signal name")
            width: Optional[Expr] = None
            if self.at_punct("["):
                self.next()
                width = self.parse_expr(0)
                self.expect_punct("]")
            self.expect_punct(";")
            out.append(SignalDecl(name, width))
        self.expect_punct("}")
        return out

    def parse_expr_list(self) -> list[Expr]:
        self.expect_punct("{")
        out: list[Expr] = []
        while not self.at_punct("}"):
            out.append(self.parse_expr(0))
            self.expect_punct(";")
        self.expect_punct("}")
        return out

    def parse_spec(self) -> Spec:
        info = self.parse_info()
        parameters: tuple[tuple[Ident, Expr], ...] = ()
        definitions: tuple[Definition, ...] = ()
        if self.at_kw("GLOBAL"):
            parameters, definitions = self.parse_global()
        sections = self.parse_main()
        t = self.peek()
        if t.kind != "eof":
            raise self.error("end of input")
        return Spec(
            info=info,
            parameters=parameters,
            definitions=definitions,
            inputs=tuple(sections.get("INPUTS", [])),
            outputs=tuple(sections.get("OUTPUTS", [])),
            assumptions=tuple(sections.get("ASSUMPTIONS", [])),
            invariants=tuple(sections.get("INVARIANTS", [])),
            guarantees=tuple(sections.get("GUARANTEES", [])),
        )


def parse_spec(tokens: list[Token]) -> Spec:
    """Parse a tokenized full-format specification."""
    return _Parser(tokens).parse_spec()


def parse_expr(tokens: list[Token]) -> Expr:
    """Parse a token list holding exactly one expression."""
    p = _Parser(tokens)
    e = p.parse_expr(0)
    t = p.peek()
    if t.kind != "eof":
        raise p.error("end of input")
    return e


def parse_text(source: str) -> Spec:
    """Tokenize and parse full-format source text."""
    return parse_spec(tokenize(source))


def parse_expr_text(source: str) -> Expr:
    """Tokenize and parse a single expression."""
    return parse_expr(tokenize(source))


# ---------------------------------------------------------------------------
# Basic format
# ---------------------------------------------------------------------------

_BASIC_UNARY = {"!": UnOpKind.NOT, "X": UnOpKind.NEXT, "G": UnOpKind.GLOBALLY, "F": UnOpKind.FINALLY}
_BASIC_BINARY = {
    "&&": BinOpKind.AND,
    "||": BinOpKind.OR,
    "->": BinOpKind.IMPLIES,
    "<->": BinOpKind.EQUIV,
    "U": BinOpKind.UNTIL,
    "R": BinOpKind.RELEASE,
    "W": BinOpKind.WEAK_UNTIL,
}


class _BasicParser(_Parser):
    """Parser for the machine-oriented subset: no GLOBAL section, scalar
    signals only, and every operator application fully parenthesized."""

    def parse_basic_spec(self) -> Spec:
        info = self.parse_info()
        if self.at_kw("GLOBAL"):
            raise ParseError(self.peek().pos, "MAIN (a GLOBAL section is not in the basic format)", "'GLOBAL'")
        self.expect_kw("MAIN")
        self.expect_punct("{")
        seen: dict[str, list] = {}
        while not self.at_punct("}"):
            t = self.peek()
            if t.kind != "kw" or t.text not in ("INPUTS", "OUTPUTS", "ASSUMPTIONS", "INVARIANTS", "GUARANTEES"):
                raise self.error("a MAIN subsection (INPUTS, OUTPUTS, ASSUMPTIONS, INVARIANTS or GUARANTEES)")
            if t.text in seen:
                raise ParseError(t.pos, "each MAIN subsection at most once", f"duplicate '{t.text}'")
            self.next()
            if t.text in ("INPUTS", "OUTPUTS"):
                seen[t.text] = self.parse_basic_signal_decls()
            else:
                seen[t.text] = self.parse_basic_expr_list()
        close = self.expect_punct("}")
        for required in ("INPUTS", "OUTPUTS"):
            if required not in seen:
                raise ParseError(close.pos, f"a '{required}' subsection in MAIN", "'}'")
        t = self.peek()
        if t.kind != "eof":
            raise self.error("end of input")
        return Spec(
            info=info,
            inputs=tuple(seen.get("INPUTS", [])),
            outputs=tuple(seen.get("OUTPUTS", [])),
            assumptions=tuple(seen.get("ASSUMPTIONS", [])),
            invariants=tuple(seen.get("INVARIANTS", [])),
            guarantees=tuple(seen.get("GUARANTEES", [])),
        )

    def parse_basic_signal_decls(self) -> list[SignalDecl]:
        self.expect_punct("{")
        out: list[SignalDecl] = []
        while not self.at_punct("}"):
            name = self.expect_ident("a signal name")
            if self.at_punct("["):
                raise ParseError(self.peek().pos, "';' (bus declarations are not in the basic format)", "'['")
            self.expect_punct(";")
            out.append(SignalDecl(name, None))
        self.expect_punct("}")
        return out

    def parse_basic_expr_list(self) -> list[Expr]:
        self.expect_punct("{")
        out: list[Expr] = []
        while not self.at_punct("}"):
            out.append(self.parse_basic_formula())
            self.expect_punct(";")
        self.expect_punct("}")
        return out

    def parse_basic_formula(self) -> Expr:
        """One parenthesized formula: '(' application-or-leaf ')'."""
        if not self.at_punct("("):
            raise ParseError(self.peek().pos, "'(' (the basic format requires fully parenthesized expressions)", self.peek().describe())
        self.next()
        e = self.parse_basic_body()
        self.expect_punct(")")
        return e

    def parse_basic_body(self) -> Expr:
        t = self.peek()
        if t.kind == "kw" and t.text in ("true", "false"):
            self.next()
            return BoolConst(t.text == "true", t.pos)
        if t.kind == "ident":
            self.next()
            if t.text == "_":
                raise ParseError(t.pos, "a signal name", "'_'")
            if self.at_punct("["):
                raise ParseError(self.peek().pos, "')' (bus indexing is not in the basic format)", "'['")
            return Id(Ident(t.text, t.pos), t.pos)
        if t.kind == "op" and t.text in _BASIC_UNARY:
            self.next()
            arg = self.parse_basic_formula()
            return UnOp(_BASIC_UNARY[t.text], arg, t.pos)
        if t.kind == "punct" and t.text == "(":
            lhs = self.parse_basic_formula()
            op = self.peek()
            if op.kind != "op" or op.text not in _BASIC_BINARY:
                raise self.error("a binary operator (&&, ||, ->, <->, U, R or W)")
            self.next()
            rhs = self.parse_basic_formula()
            return BinOp(_BASIC_BINARY[op.text], lhs, rhs, op.pos)
        if t.kind == "nat":
            raise ParseError(t.pos, "a basic LTL expression", "a number (numeric expressions are not in the basic format)")
        raise self.error("a basic LTL expression (true, false, a signal, or an operator application)")


def parse_basic_spec(source: str) -> Spec:
    """Parse source text in the basic format only; any full-format construct
    is rejected with a dedicated diagnostic."""
    return _BasicParser(tokenize(source)).parse_basic_spec()
