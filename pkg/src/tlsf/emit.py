"""Serialization: basic-format text and flat LTL formulas.

print_basic emits a deterministic, fully parenthesized basic-format document
(two-space indent, one item per line, LF endings, trailing newline), so that
print -> parse -> print is byte identical.

print_formula renders a ground formula under an operator profile.  In minimal
mode parentheses are inserted exactly where the expression grammar's
precedence and associativity would otherwise reparse differently; parse_formula
is the inverse and is used by the round-trip tests.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .ast import (
    BinOp,
    BinOpKind,
    BoolConst,
    Expr,
    Id,
    Ident,
    Semantics,
    TlsfError,
    UnOp,
    UnOpKind,
    and_,
    globally as _globally,
    not_,
    or_,
    true_,
    until,
)
from .frontend import BINARY_ASSOC, BINARY_POWER, PREFIX_POWER
from .reduce import BasicSpec


class EmitError(TlsfError):
    pass


# ---------------------------------------------------------------------------
# Operator profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LtlProfile:
    """Operator spellings for flat LTL output.  A spelling of None marks the
    operator as unsupported; on_unsupported decides whether that is an error
    or a rewrite through the operator's defining identity."""

    name: str
    true: str = "true"
    false: str = "false"
    not_: Optional[str] = "!"
    and_: Optional[str] = "&&"
    or_: Optional[str] = "||"
    implies: Optional[str] = "->"
    equiv: Optional[str] = "<->"
    next_: Optional[str] = "X"
    finally_: Optional[str] = "F"
    globally: Optional[str] = "G"
    until: Optional[str] = "U"
    release: Optional[str] = "R"
    weak_until: Optional[str] = "W"
    parens: str = "minimal"  # minimal | full
    on_unsupported: str = "error"  # error | rewrite

    def __post_init__(self) -> None:
        spellings = [s for s in self._spelling_map().values() if s is not None]
        spellings += [self.true, self.false]
        if any(not s for s in spellings):
            raise ValueError("operator spellings must be nonempty")
        if len(set(spellings)) != len(spellings):
            raise ValueError("operator spellings must be pairwise distinct")
        if self.parens not in ("minimal", "full"):
            raise ValueError("parens must be 'minimal' or 'full'")
        if self.on_unsupported not in ("error", "rewrite"):
            raise ValueError("on_unsupported must be 'error' or 'rewrite'")
        if self.weak_until is None and self.on_unsupported != "rewrite":
            raise ValueError("a profile without weak-until must rewrite it away")

    def _spelling_map(self) -> dict:
        return {
            UnOpKind.NOT: self.not_,
            UnOpKind.NEXT: self.next_,
            UnOpKind.FINALLY: self.finally_,
            UnOpKind.GLOBALLY: self.globally,
            BinOpKind.AND: self.and_,
            BinOpKind.OR: self.or_,
            BinOpKind.IMPLIES: self.implies,
            BinOpKind.EQUIV: self.equiv,
            BinOpKind.UNTIL: self.until,
            BinOpKind.RELEASE: self.release,
            BinOpKind.WEAK_UNTIL: self.weak_until,
        }

    def spelling(self, kind) -> Optional[str]:
        return self._spelling_map().get(kind)


TLSF_PROFILE = LtlProfile(name="tlsf")
CLASSIC_PROFILE = LtlProfile(name="classic", and_="&", or_="|")

PROFILES = {p.name: p for p in (TLSF_PROFILE, CLASSIC_PROFILE)}


# ---------------------------------------------------------------------------
# Basic-format output
# ---------------------------------------------------------------------------


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


_WORD_TAG = re.compile(r"[a-zA-Z_@][a-zA-Z0-9_'@]*\Z")


def _format_tag(tag: str) -> str:
    if _WORD_TAG.match(tag):
        return tag
    return f'"{_escape(tag)}"'


def _print_full_parens(formula: Expr) -> str:
    """One fully parenthesized formula of the basic grammar."""
    if isinstance(formula, BoolConst):
        inner = "true" if formula.value else "false"
    elif isinstance(formula, Id):
        inner = formula.name.text
    elif isinstance(formula, UnOp):
        spelling = formula.kind.value
        sep = "" if formula.kind is UnOpKind.NOT else " "
        inner = f"{spelling}{sep}{_print_full_parens(formula.arg)}"
    elif isinstance(formula, BinOp):
        inner = f"{_print_full_parens(formula.lhs)} {formula.kind.value} {_print_full_parens(formula.rhs)}"
    else:
        raise EmitError(f"not a basic-format formula node: {formula!r}", getattr(formula, "pos", None))
    return f"({inner})"


def print_basic(basic: BasicSpec) -> str:
    """Bit-exact basic-format text for a reduced specification."""
    lines: list[str] = []
    info = basic.info
    lines.append("INFO {")
    lines.append(f'  TITLE: "{_escape(info.title)}"')
    lines.append(f'  DESCRIPTION: "{_escape(info.description)}"')
    lines.append(f"  SEMANTICS: {info.semantics.value}")
    lines.append(f"  TARGET: {info.target.value}")
    if info.tags:
        lines.append(f"  TAGS: {', '.join(_format_tag(t) for t in info.tags)}")
    lines.append("}")
    lines.append("MAIN {")
    for header, names in (("INPUTS", basic.inputs), ("OUTPUTS", basic.outputs)):
        lines.append(f"  {header} {{")
        for name in names:
            lines.append(f"    {name};")
        lines.append("  }")
    for header, formulas in (
        ("ASSUMPTIONS", basic.assumptions),
        ("INVARIANTS", basic.invariants),
        ("GUARANTEES", basic.guarantees),
    ):
        if not formulas:
            continue
        lines.append(f"  {header} {{")
        for formula in formulas:
            lines.append(f"    {_print_full_parens(formula)};")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Flat formula output
# ---------------------------------------------------------------------------

def _rewrite_unsupported(formula: Expr, profile: LtlProfile) -> Expr:
    """Eliminate operators the profile cannot spell, via their defining
    identities, repeating until only supported operators remain."""

    def eliminate(node: Expr) -> Expr:
        pos = node.pos
        if isinstance(node, UnOp):
            arg = eliminate(node.arg)
            if profile.spelling(node.kind) is not None:
                return UnOp(node.kind, arg, pos)
            if node.kind is UnOpKind.FINALLY:
                return eliminate(until(true_(pos), arg, pos))
            if node.kind is UnOpKind.GLOBALLY:
                return eliminate(not_(until(true_(pos), not_(arg, pos), pos), pos))
            raise EmitError(f"profile '{profile.name}' cannot express '{node.kind.value}'", pos)
        if isinstance(node, BinOp):
            lhs = eliminate(node.lhs)
            rhs = eliminate(node.rhs)
            if profile.spelling(node.kind) is not None:
                return BinOp(node.kind, lhs, rhs, pos)
            k = node.kind
            if k is BinOpKind.WEAK_UNTIL:
                return eliminate(or_(until(lhs, rhs, pos), _globally(lhs, pos), pos))
            if k is BinOpKind.RELEASE:
                return eliminate(not_(until(not_(lhs, pos), not_(rhs, pos), pos), pos))
            if k is BinOpKind.IMPLIES:
                return eliminate(or_(not_(lhs, pos), rhs, pos))
            if k is BinOpKind.EQUIV:
                fwd = or_(not_(lhs, pos), rhs, pos)
                bwd = or_(not_(rhs, pos), lhs, pos)
                return eliminate(and_(fwd, bwd, pos))
            if k is BinOpKind.AND:
                return eliminate(not_(or_(not_(lhs, pos), not_(rhs, pos), pos), pos))
            raise EmitError(f"profile '{profile.name}' cannot express '{k.value}'", pos)
        return node

    return eliminate(formula)


def _unsupported_ops(formula: Expr, profile: LtlProfile) -> list[str]:
    out: set[str] = set()

    def walk(node: Expr) -> None:
        if isinstance(node, UnOp):
            if profile.spelling(node.kind) is None:
                out.add(node.kind.value)
            walk(node.arg)
        elif isinstance(node, BinOp):
            if profile.spelling(node.kind) is None:
                out.add(node.kind.value)
            walk(node.lhs)
            walk(node.rhs)

    walk(formula)
    return sorted(out)


def _word_like(spelling: str) -> bool:
    return spelling[-1].isalnum() or spelling[-1] in "_@'"


def print_formula(formula: Expr, profile: LtlProfile = TLSF_PROFILE) -> str:
    """Flat text of a ground formula under the profile's spellings and
    parenthesization mode."""
    unsupported = _unsupported_ops(formula, profile)
    if unsupported:
        if profile.on_unsupported == "error":
            raise EmitError(
                f"profile '{profile.name}' does not support operator(s): {', '.join(unsupported)}"
            )
        formula = _rewrite_unsupported(formula, profile)

    def emit(node: Expr) -> str:
        if isinstance(node, BoolConst):
            return profile.true if node.value else profile.false
        if isinstance(node, Id):
            return node.name.text
        if isinstance(node, UnOp):
            spelling = profile.spelling(node.kind)
            sep = " " if _word_like(spelling) else ""
            arg = emit(node.arg)
            if _needs_parens_unary(node.arg, node.kind):
                return f"{spelling}{sep}({arg})"
            return f"{spelling}{sep}{arg}"
        if isinstance(node, BinOp):
            spelling = profile.spelling(node.kind)
            lhs = emit(node.lhs)
            rhs = emit(node.rhs)
            if _needs_parens_binary(node.lhs, node.kind, "left"):
                lhs = f"({lhs})"
            if _needs_parens_binary(node.rhs, node.kind, "right"):
                rhs = f"({rhs})"
            return f"{lhs} {spelling} {rhs}"
        raise EmitError(f"not a ground LTL formula node: {node!r}", getattr(node, "pos", None))

    def emit_full(node: Expr) -> str:
        if isinstance(node, BoolConst):
            return f"({profile.true if node.value else profile.false})"
        if isinstance(node, Id):
            return f"({node.name.text})"
        if isinstance(node, UnOp):
            spelling = profile.spelling(node.kind)
            sep = " " if _word_like(spelling) else ""
            return f"({spelling}{sep}{emit_full(node.arg)})"
        if isinstance(node, BinOp):
            spelling = profile.spelling(node.kind)
            return f"({emit_full(node.lhs)} {spelling} {emit_full(node.rhs)})"
        raise EmitError(f"not a ground LTL formula node: {node!r}", getattr(node, "pos", None))

    return emit_full(formula) if profile.parens == "full" else emit(formula)


def _power_of(node: Expr) -> Optional[int]:
    """Binding power of the node's top operator; None for atoms."""
    if isinstance(node, UnOp):
        return PREFIX_POWER[node.kind.value]
    if isinstance(node, BinOp):
        return BINARY_POWER[node.kind.value]
    return None


def _needs_parens_unary(arg: Expr, kind: UnOpKind) -> bool:
    power = _power_of(arg)
    if power is None:
        return False
    return power < PREFIX_POWER[kind.value]


def _needs_parens_binary(child: Expr, kind: BinOpKind, side: str) -> bool:
    power = _power_of(child)
    if power is None:
        return False
    parent = BINARY_POWER[kind.value]
    if power > parent:
        return False
    if power < parent:
        return True
    # Equal precedence: the associative side may stay bare.
    assoc = BINARY_ASSOC[kind.value]
    return (assoc == "left") != (side == "left")


# ---------------------------------------------------------------------------
# Profile-aware formula parsing (inverse of print_formula)
# ---------------------------------------------------------------------------

_IDENT_RE = re.compile(r"[a-zA-Z_@][a-zA-Z0-9_'@]*")
_IDENT_CONT = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_@'")


def parse_formula(text: str, profile: LtlProfile = TLSF_PROFILE) -> Expr:
    """Parse flat LTL text written under the given profile back into a ground
    formula, honoring the expression grammar's precedence table."""
    unary: dict[str, UnOpKind] = {}
    binary: dict[str, BinOpKind] = {}
    for kind, spelling in profile._spelling_map().items():
        if spelling is None:
            continue
        if isinstance(kind, UnOpKind):
            unary[spelling] = kind
        else:
            binary[spelling] = kind

    tokens = _lex_profile(text, profile, set(unary) | set(binary))
    pos = 0

    def peek() -> str:
        return tokens[pos][0] if pos < len(tokens) else "<eof>"

    def advance() -> tuple[str, str]:
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        return tok

    def parse(min_power: int) -> Expr:
        lhs = prefix()
        while True:
            kind_tag, text_ = tokens[pos] if pos < len(tokens) else ("<eof>", "")
            if kind_tag != "op" or text_ not in binary:
                break
            op = binary[text_]
            power = BINARY_POWER[op.value]
            if power < min_power:
                break
            advance()
            if BINARY_ASSOC[op.value] == "left":
                rhs = parse(power + 1)
            else:
                rhs = parse(power)
            lhs = BinOp(op, lhs, rhs)
        return lhs

    def prefix() -> Expr:
        kind_tag, text_ = tokens[pos] if pos < len(tokens) else ("<eof>", "")
        if kind_tag == "op" and text_ in unary:
            advance()
            op = unary[text_]
            return UnOp(op, parse(PREFIX_POWER[op.value]))
        if kind_tag == "lparen":
            advance()
            inner = parse(0)
            if peek() != "rparen":
                raise EmitError(f"expected ')' in formula text, found {peek()}")
            advance()
            return inner
        if kind_tag == "true":
            advance()
            return BoolConst(True)
        if kind_tag == "false":
            advance()
            return BoolConst(False)
        if kind_tag == "ident":
            advance()
            return Id(Ident(text_))
        raise EmitError(f"unexpected token {text_!r} in formula text")

    result = parse(0)
    if pos != len(tokens):
        raise EmitError(f"trailing input in formula text: {tokens[pos][1]!r}")
    return result


def _lex_profile(text: str, profile: LtlProfile, op_spellings: set[str]) -> list[tuple[str, str]]:
    ordered = sorted(op_spellings, key=len, reverse=True)
    tokens: list[tuple[str, str]] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c == "(":
            tokens.append(("lparen", c))
            i += 1
            continue
        if c == ")":
            tokens.append(("rparen", c))
            i += 1
            continue
        matched = False
        for op in ordered:
            if text.startswith(op, i):
                if _word_like(op):
                    end = i + len(op)
                    if end < n and text[end] in _IDENT_CONT:
                        continue  # part of a longer identifier
                tokens.append(("op", op))
                i += len(op)
                matched = True
                break
        if matched:
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            word = m.group(0)
            if word == profile.true:
                tokens.append(("true", word))
            elif word == profile.false:
                tokens.append(("false", word))
            else:
                tokens.append(("ident", word))
            i = m.end()
            continue
        raise EmitError(f"illegal character {c!r} in formula text")
    return tokens
