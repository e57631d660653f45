"""LTL formula algebra and the project's oracle layer.

Ground formulas are evaluated exactly over lasso words u v^omega.  Two unlike
evaluators are provided so they can catch each other's bugs: eval_lasso scans
positions directly from the satisfaction clauses, eval_lasso_fixpoint computes
satisfaction sets per position by backward induction.  LassoFamily evaluates a
formula over *all* lassos of one shape at once (bit-parallel over big
integers), which makes the exhaustive equivalence suites tractable.

The rewrites (derived-operator expansion, negation normal form, push/pull of
X, and pushing of F/G) never reassociate or commute operands beyond what the
defining identity requires; printing stability matters for golden tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Callable, Literal, Optional, Union

import numpy as np

from .ast import (
    BOOL_BINOPS,
    TEMPORAL_BINOPS,
    TEMPORAL_UNOPS,
    BinOp,
    BinOpKind,
    BoolConst,
    Expr,
    Id,
    UnOp,
    UnOpKind,
    and_,
    equiv,
    finally_,
    globally,
    implies,
    next_,
    not_,
    or_,
    release,
    true_,
    until,
    weak_until,
)

Letter = frozenset[str]


@dataclass(frozen=True)
class LassoWord:
    """Ultimately periodic word: prefix u then loop v repeated forever.
    Position i >= |u| reads v[(i - |u|) mod |v|]."""

    prefix: tuple[Letter, ...]
    loop: tuple[Letter, ...]
    alphabet: frozenset[str] = dc_field(default=frozenset())

    def __post_init__(self) -> None:
        if not self.loop:
            raise ValueError("lasso loop must be nonempty")
        letters = set().union(*self.prefix, *self.loop) if (self.prefix or self.loop) else set()
        if not self.alphabet:
            object.__setattr__(self, "alphabet", frozenset(letters))
        elif not letters <= self.alphabet:
            raise ValueError("letters mention atoms outside the alphabet")

    @staticmethod
    def of(prefix, loop, alphabet=()) -> "LassoWord":
        return LassoWord(
            tuple(frozenset(x) for x in prefix),
            tuple(frozenset(x) for x in loop),
            frozenset(alphabet),
        )

    def letter(self, i: int) -> Letter:
        if i < len(self.prefix):
            return self.prefix[i]
        return self.loop[(i - len(self.prefix)) % len(self.loop)]

    def canonical(self, i: int) -> int:
        """Fold position i into the finite representation [0, |u|+|v|)."""
        if i < len(self.prefix):
            return i
        return len(self.prefix) + (i - len(self.prefix)) % len(self.loop)


# ---------------------------------------------------------------------------
# Evaluator 1: direct scan over positions
# ---------------------------------------------------------------------------


def eval_lasso(formula: Expr, word: LassoWord, position: int = 0) -> bool:
    """Exact satisfaction of a ground formula at a position of a lasso word.
    Until-style operators are decided by scanning up to one full loop beyond
    the stabilized part, which is exhaustive on ultimately periodic words."""
    memo: dict[tuple[int, int], bool] = {}
    horizon_pad = 2 * len(word.loop)

    def sat(node: Expr, i: int) -> bool:
        i = word.canonical(i)
        key = (id(node), i)
        if key in memo:
            return memo[key]
        result = compute(node, i)
        memo[key] = result
        return result

    def until_scan(lhs: Callable[[int], bool], rhs: Callable[[int], bool], i: int) -> bool:
        horizon = max(i, len(word.prefix)) + horizon_pad
        for n in range(i, horizon + 1):
            if rhs(n):
                return True
            if not lhs(n):
                return False
        return False

    def compute(node: Expr, i: int) -> bool:
        if isinstance(node, BoolConst):
            return node.value
        if isinstance(node, Id):
            name = node.name.text
            if name not in word.alphabet:
                raise ValueError(f"unknown atom '{name}' (not in the word's alphabet)")
            return name in word.letter(i)
        if isinstance(node, UnOp):
            if node.kind is UnOpKind.NOT:
                return not sat(node.arg, i)
            if node.kind is UnOpKind.NEXT:
                return sat(node.arg, i + 1)
            if node.kind is UnOpKind.FINALLY:
                return until_scan(lambda n: True, lambda n: sat(node.arg, n), i)
            if node.kind is UnOpKind.GLOBALLY:
                return not until_scan(lambda n: True, lambda n: not sat(node.arg, n), i)
        if isinstance(node, BinOp):
            k = node.kind
            if k is BinOpKind.AND:
                return sat(node.lhs, i) and sat(node.rhs, i)
            if k is BinOpKind.OR:
                return sat(node.lhs, i) or sat(node.rhs, i)
            if k is BinOpKind.IMPLIES:
                return (not sat(node.lhs, i)) or sat(node.rhs, i)
            if k is BinOpKind.EQUIV:
                return sat(node.lhs, i) == sat(node.rhs, i)
            if k is BinOpKind.UNTIL:
                return until_scan(lambda n: sat(node.lhs, n), lambda n: sat(node.rhs, n), i)
            if k is BinOpKind.RELEASE:
                return not until_scan(
                    lambda n: not sat(node.lhs, n), lambda n: not sat(node.rhs, n), i
                )
            if k is BinOpKind.WEAK_UNTIL:
                holds_until = until_scan(
                    lambda n: sat(node.lhs, n), lambda n: sat(node.rhs, n), i
                )
                always = not until_scan(lambda n: True, lambda n: not sat(node.lhs, n), i)
                return holds_until or always
        raise ValueError(f"not a ground LTL formula node: {node!r}")

    return sat(formula, position)


# ---------------------------------------------------------------------------
# Evaluator 2: satisfaction sets by backward induction (independent oracle)
# ---------------------------------------------------------------------------


def eval_lasso_fixpoint(formula: Expr, word: LassoWord, position: int = 0) -> bool:
    """Same result as eval_lasso, computed the other way around: a boolean
    vector over the |u|+|v| canonical positions per subformula, with least or
    greatest fixpoints for the temporal operators."""
    n = len(word.prefix) + len(word.loop)
    succ = [i + 1 if i + 1 < n else len(word.prefix) for i in range(n)]
    memo: dict[int, list[bool]] = {}

    def fixpoint(step: Callable[[list[bool], int], bool], init: bool) -> list[bool]:
        val = [init] * n
        for _ in range(n + 1):
            new = [step(val, i) for i in range(n)]
            if new == val:
                break
            val = new
        return val

    def vec(node: Expr) -> list[bool]:
        if id(node) in memo:
            return memo[id(node)]
        out = compute(node)
        memo[id(node)] = out
        return out

    def compute(node: Expr) -> list[bool]:
        if isinstance(node, BoolConst):
            return [node.value] * n
        if isinstance(node, Id):
            name = node.name.text
            if name not in word.alphabet:
                raise ValueError(f"unknown atom '{name}' (not in the word's alphabet)")
            return [name in word.letter(i) for i in range(n)]
        if isinstance(node, UnOp):
            if node.kind is UnOpKind.NOT:
                return [not x for x in vec(node.arg)]
            if node.kind is UnOpKind.NEXT:
                a = vec(node.arg)
                return [a[succ[i]] for i in range(n)]
            if node.kind is UnOpKind.FINALLY:
                a = vec(node.arg)
                return fixpoint(lambda val, i: a[i] or val[succ[i]], False)
            if node.kind is UnOpKind.GLOBALLY:
                a = vec(node.arg)
                return fixpoint(lambda val, i: a[i] and val[succ[i]], True)
        if isinstance(node, BinOp):
            k = node.kind
            if k in BOOL_BINOPS:
                a, b = vec(node.lhs), vec(node.rhs)
                table = {
                    BinOpKind.AND: lambda x, y: x and y,
                    BinOpKind.OR: lambda x, y: x or y,
                    BinOpKind.IMPLIES: lambda x, y: (not x) or y,
                    BinOpKind.EQUIV: lambda x, y: x == y,
                }[k]
                return [table(a[i], b[i]) for i in range(n)]
            if k is BinOpKind.UNTIL:
                a, b = vec(node.lhs), vec(node.rhs)
                return fixpoint(lambda val, i: b[i] or (a[i] and val[succ[i]]), False)
            if k is BinOpKind.RELEASE:
                a, b = vec(node.lhs), vec(node.rhs)
                return fixpoint(lambda val, i: b[i] and (a[i] or val[succ[i]]), True)
            if k is BinOpKind.WEAK_UNTIL:
                a, b = vec(node.lhs), vec(node.rhs)
                return fixpoint(lambda val, i: b[i] or (a[i] and val[succ[i]]), True)
        raise ValueError(f"not a ground LTL formula node: {node!r}")

    return vec(formula)[word.canonical(position)]


# ---------------------------------------------------------------------------
# Bit-parallel evaluation over every lasso of one shape
# ---------------------------------------------------------------------------


class LassoFamily:
    """All lassos with |u| = prefix_len and |v| = loop_len over a fixed atom
    tuple, evaluated simultaneously.  Lasso index b encodes atom a at position
    i as bit (i * natoms + a); per-subformula satisfaction at each position is
    one big integer with a bit per lasso."""

    def __init__(self, atoms: tuple[str, ...], prefix_len: int, loop_len: int):
        if loop_len < 1:
            raise ValueError("loop length must be >= 1")
        self.atoms = atoms
        self.prefix_len = prefix_len
        self.loop_len = loop_len
        self.positions = prefix_len + loop_len
        self.count = 1 << (len(atoms) * self.positions)
        self.full = (1 << self.count) - 1
        self.succ = [
            i + 1 if i + 1 < self.positions else prefix_len for i in range(self.positions)
        ]
        self.masks = self._build_masks()

    def _build_masks(self) -> list[dict[str, int]]:
        natoms = len(self.atoms)
        if natoms == 0:
            return [{} for _ in range(self.positions)]
        index = np.arange(self.count, dtype=np.uint32)
        masks: list[dict[str, int]] = []
        for i in range(self.positions):
            row: dict[str, int] = {}
            for a, name in enumerate(self.atoms):
                bits = ((index >> np.uint32(i * natoms + a)) & 1).astype(bool)
                row[name] = int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")
            masks.append(row)
        return masks

    def satisfaction(self, formula: Expr) -> list[int]:
        """Bitmask per position: bit b is set iff lasso #b satisfies the
        formula at that position."""
        full = self.full
        succ = self.succ
        memo: dict[int, list[int]] = {}

        def fixpoint(step: Callable[[list[int], int], int], init: int) -> list[int]:
            val = [init] * self.positions
            for _ in range(self.positions + 1):
                new = [step(val, i) for i in range(self.positions)]
                if new == val:
                    break
                val = new
            return val

        def cols(node: Expr) -> list[int]:
            if id(node) in memo:
                return memo[id(node)]
            out = compute(node)
            memo[id(node)] = out
            return out

        def compute(node: Expr) -> list[int]:
            if isinstance(node, BoolConst):
                return [full if node.value else 0] * self.positions
            if isinstance(node, Id):
                name = node.name.text
                if name not in self.atoms:
                    raise ValueError(f"unknown atom '{name}' (not in the family's atom set)")
                return [self.masks[i][name] for i in range(self.positions)]
            if isinstance(node, UnOp):
                if node.kind is UnOpKind.NOT:
                    return [full ^ x for x in cols(node.arg)]
                if node.kind is UnOpKind.NEXT:
                    a = cols(node.arg)
                    return [a[succ[i]] for i in range(self.positions)]
                if node.kind is UnOpKind.FINALLY:
                    a = cols(node.arg)
                    return fixpoint(lambda val, i: a[i] | val[succ[i]], 0)
                if node.kind is UnOpKind.GLOBALLY:
                    a = cols(node.arg)
                    return fixpoint(lambda val, i: a[i] & val[succ[i]], full)
            if isinstance(node, BinOp):
                k = node.kind
                if k in BOOL_BINOPS:
                    a, b = cols(node.lhs), cols(node.rhs)
                    if k is BinOpKind.AND:
                        return [a[i] & b[i] for i in range(self.positions)]
                    if k is BinOpKind.OR:
                        return [a[i] | b[i] for i in range(self.positions)]
                    if k is BinOpKind.IMPLIES:
                        return [(full ^ a[i]) | b[i] for i in range(self.positions)]
                    return [full ^ (a[i] ^ b[i]) for i in range(self.positions)]
                if k is BinOpKind.UNTIL:
                    a, b = cols(node.lhs), cols(node.rhs)
                    return fixpoint(lambda val, i: b[i] | (a[i] & val[succ[i]]), 0)
                if k is BinOpKind.RELEASE:
                    a, b = cols(node.lhs), cols(node.rhs)
                    return fixpoint(lambda val, i: b[i] & (a[i] | val[succ[i]]), full)
                if k is BinOpKind.WEAK_UNTIL:
                    a, b = cols(node.lhs), cols(node.rhs)
                    return fixpoint(lambda val, i: b[i] | (a[i] & val[succ[i]]), full)
            raise ValueError(f"not a ground LTL formula node: {node!r}")

        return cols(formula)

    def decode(self, index: int) -> LassoWord:
        natoms = len(self.atoms)
        letters = [
            frozenset(
                self.atoms[a]
                for a in range(natoms)
                if (index >> (i * natoms + a)) & 1
            )
            for i in range(self.positions)
        ]
        return LassoWord(
            tuple(letters[: self.prefix_len]),
            tuple(letters[self.prefix_len :]),
            frozenset(self.atoms),
        )


@lru_cache(maxsize=256)
def _family(atoms: tuple[str, ...], prefix_len: int, loop_len: int) -> LassoFamily:
    return LassoFamily(atoms, prefix_len, loop_len)


def lasso_shapes(max_total: int):
    """All (prefix length, loop length) pairs with total size <= max_total."""
    for total in range(1, max_total + 1):
        for loop_len in range(1, total + 1):
            yield total - loop_len, loop_len


def find_inequivalent_lasso(
    f: Expr, g: Expr, atoms: tuple[str, ...], max_total: int
) -> Optional[LassoWord]:
    """First lasso with |u|+|v| <= max_total over the atoms on which f and g
    disagree at position 0, or None if they agree on all of them (exhaustive)."""
    for prefix_len, loop_len in lasso_shapes(max_total):
        family = _family(tuple(atoms), prefix_len, loop_len)
        fs = family.satisfaction(f)[0]
        gs = family.satisfaction(g)[0]
        diff = fs ^ gs
        if diff:
            return family.decode((diff & -diff).bit_length() - 1)
    return None


def equivalent_on_lassos(f: Expr, g: Expr, atoms, max_total: int) -> bool:
    """Exhaustive lasso equivalence of two ground formulas at position 0."""
    return find_inequivalent_lasso(f, g, tuple(sorted(atoms)), max_total) is None


def all_lassos(atoms, max_total: int):
    """Every lasso word with |u|+|v| <= max_total over the given atoms."""
    atoms = tuple(atoms)
    for prefix_len, loop_len in lasso_shapes(max_total):
        family = _family(atoms, prefix_len, loop_len)
        for index in range(family.count):
            yield family.decode(index)


# ---------------------------------------------------------------------------
# Rewrites
# ---------------------------------------------------------------------------


def _is_formula_node(e: Expr) -> bool:
    if isinstance(e, (BoolConst, Id)):
        return True
    if isinstance(e, UnOp):
        return e.kind is UnOpKind.NOT or e.kind in TEMPORAL_UNOPS
    if isinstance(e, BinOp):
        return e.kind in BOOL_BINOPS or e.kind in TEMPORAL_BINOPS
    return False


def expand_derived(formula: Expr) -> Expr:
    """Rewrite the derived operators into the core {not, or, next, until,
    true, atoms}, using exactly their defining identities; the literal false
    becomes (not true)."""
    if isinstance(formula, BoolConst):
        return formula if formula.value else not_(true_(formula.pos), formula.pos)
    if isinstance(formula, Id):
        return formula
    if isinstance(formula, UnOp):
        arg = expand_derived(formula.arg)
        pos = formula.pos
        if formula.kind is UnOpKind.NOT:
            return not_(arg, pos)
        if formula.kind is UnOpKind.NEXT:
            return next_(arg, pos)
        if formula.kind is UnOpKind.FINALLY:
            return until(true_(pos), arg, pos)
        if formula.kind is UnOpKind.GLOBALLY:
            return not_(until(true_(pos), not_(arg, pos), pos), pos)
    if isinstance(formula, BinOp):
        lhs = expand_derived(formula.lhs)
        rhs = expand_derived(formula.rhs)
        pos = formula.pos
        k = formula.kind
        if k is BinOpKind.OR:
            return or_(lhs, rhs, pos)
        if k is BinOpKind.UNTIL:
            return until(lhs, rhs, pos)
        if k is BinOpKind.AND:
            return not_(or_(not_(lhs, pos), not_(rhs, pos), pos), pos)
        if k is BinOpKind.IMPLIES:
            return or_(not_(lhs, pos), rhs, pos)
        if k is BinOpKind.EQUIV:
            fwd = or_(not_(lhs, pos), rhs, pos)
            bwd = or_(not_(rhs, pos), lhs, pos)
            return not_(or_(not_(fwd, pos), not_(bwd, pos), pos), pos)
        if k is BinOpKind.RELEASE:
            return not_(until(not_(lhs, pos), not_(rhs, pos), pos), pos)
        if k is BinOpKind.WEAK_UNTIL:
            globally_lhs = not_(until(true_(pos), not_(lhs, pos), pos), pos)
            return or_(until(lhs, rhs, pos), globally_lhs, pos)
    raise ValueError(f"not a ground LTL formula node: {formula!r}")


def to_nnf(formula: Expr) -> Expr:
    """Negation normal form: negations pushed down to atoms via the X, U/R,
    F/G and and/or dualities.  The full operator set is kept (implication and
    equivalence flip polarity instead of being expanded, which avoids the
    exponential blowup of eliminating them)."""

    def walk(node: Expr, negate: bool) -> Expr:
        pos = node.pos
        if isinstance(node, BoolConst):
            return BoolConst(node.value != negate, pos)
        if isinstance(node, Id):
            return not_(node, pos) if negate else node
        if isinstance(node, UnOp):
            if node.kind is UnOpKind.NOT:
                return walk(node.arg, not negate)
            if node.kind is UnOpKind.NEXT:
                return next_(walk(node.arg, negate), pos)
            if node.kind is UnOpKind.FINALLY:
                ctor = globally if negate else finally_
                return ctor(walk(node.arg, negate), pos)
            if node.kind is UnOpKind.GLOBALLY:
                ctor = finally_ if negate else globally
                return ctor(walk(node.arg, negate), pos)
        if isinstance(node, BinOp):
            k = node.kind
            if k is BinOpKind.AND or k is BinOpKind.OR:
                flipped = {BinOpKind.AND: and_, BinOpKind.OR: or_}[k] if not negate else (
                    or_ if k is BinOpKind.AND else and_
                )
                return flipped(walk(node.lhs, negate), walk(node.rhs, negate), pos)
            if k is BinOpKind.IMPLIES:
                if negate:
                    return and_(walk(node.lhs, False), walk(node.rhs, True), pos)
                return implies(walk(node.lhs, False), walk(node.rhs, False), pos)
            if k is BinOpKind.EQUIV:
                # not (a <-> b) is (a <-> not b); the negation moves into one side.
                return equiv(walk(node.lhs, False), walk(node.rhs, negate), pos)
            if k is BinOpKind.UNTIL:
                ctor = release if negate else until
                return ctor(walk(node.lhs, negate), walk(node.rhs, negate), pos)
            if k is BinOpKind.RELEASE:
                ctor = until if negate else release
                return ctor(walk(node.lhs, negate), walk(node.rhs, negate), pos)
            if k is BinOpKind.WEAK_UNTIL:
                if negate:
                    # not (a W b) = not ((a U b) or G a) = (not a R not b) and F(not a)
                    return and_(
                        release(walk(node.lhs, True), walk(node.rhs, True), pos),
                        finally_(walk(node.lhs, True), pos),
                        pos,
                    )
                return weak_until(walk(node.lhs, False), walk(node.rhs, False), pos)
        raise ValueError(f"not a ground LTL formula node: {node!r}")

    return walk(formula, False)


def _rewrite_bottom_up(formula: Expr, rule: Callable[[Expr], Expr]) -> Expr:
    """Apply rule at every node, children first, re-applying at freshly built
    nodes until it no longer fires."""

    def go(node: Expr) -> Expr:
        if isinstance(node, UnOp):
            node = UnOp(node.kind, go(node.arg), node.pos)
        elif isinstance(node, BinOp):
            node = BinOp(node.kind, go(node.lhs), go(node.rhs), node.pos)
        elif not isinstance(node, (BoolConst, Id)):
            raise ValueError(f"not a ground LTL formula node: {node!r}")
        return fix(node)

    def fix(node: Expr) -> Expr:
        new = rule(node)
        while new is not node:
            node = new
            new = rule(node)
        return node

    return go(formula)


def push_next(formula: Expr) -> Expr:
    """Distribute X over every boolean connective and temporal operator, to a
    fixpoint, so X ends up only on atoms (X over a constant disappears)."""

    def rule(node: Expr) -> Expr:
        if not (isinstance(node, UnOp) and node.kind is UnOpKind.NEXT):
            return node
        arg = node.arg
        pos = node.pos
        if isinstance(arg, BoolConst):
            return arg
        if isinstance(arg, UnOp):
            if arg.kind is UnOpKind.NEXT:
                return node  # X stacks over atoms are already pushed
            return UnOp(arg.kind, push_next(next_(arg.arg, pos)), arg.pos)
        if isinstance(arg, BinOp):
            return BinOp(
                arg.kind,
                push_next(next_(arg.lhs, pos)),
                push_next(next_(arg.rhs, pos)),
                arg.pos,
            )
        return node

    return _rewrite_bottom_up(formula, rule)


def pull_next(formula: Expr) -> Expr:
    """Factor a shared leading X out of operator applications: (X a) op (X b)
    becomes X (a op b), unary ops over X move outwards, to a fixpoint."""

    def rule(node: Expr) -> Expr:
        if isinstance(node, UnOp) and node.kind is not UnOpKind.NEXT:
            if isinstance(node.arg, UnOp) and node.arg.kind is UnOpKind.NEXT:
                return next_(rule_fix(UnOp(node.kind, node.arg.arg, node.pos)), node.pos)
        if isinstance(node, BinOp):
            lhs, rhs = node.lhs, node.rhs
            if (
                isinstance(lhs, UnOp)
                and lhs.kind is UnOpKind.NEXT
                and isinstance(rhs, UnOp)
                and rhs.kind is UnOpKind.NEXT
            ):
                return next_(rule_fix(BinOp(node.kind, lhs.arg, rhs.arg, node.pos)), node.pos)
        return node

    def rule_fix(node: Expr) -> Expr:
        new = rule(node)
        while new is not node:
            node = new
            new = rule(node)
        return node

    return _rewrite_bottom_up(formula, rule)


def push_globally(formula: Expr) -> Expr:
    """G(a and b) becomes (G a) and (G b); stacked G collapses."""

    def rule(node: Expr) -> Expr:
        if not (isinstance(node, UnOp) and node.kind is UnOpKind.GLOBALLY):
            return node
        arg = node.arg
        if isinstance(arg, BinOp) and arg.kind is BinOpKind.AND:
            return and_(
                push_globally(globally(arg.lhs, node.pos)),
                push_globally(globally(arg.rhs, node.pos)),
                arg.pos,
            )
        if isinstance(arg, UnOp) and arg.kind is UnOpKind.GLOBALLY:
            return arg
        return node

    return _rewrite_bottom_up(formula, rule)


def push_eventually(formula: Expr) -> Expr:
    """F(a or b) becomes (F a) or (F b); stacked F collapses."""

    def rule(node: Expr) -> Expr:
        if not (isinstance(node, UnOp) and node.kind is UnOpKind.FINALLY):
            return node
        arg = node.arg
        if isinstance(arg, BinOp) and arg.kind is BinOpKind.OR:
            return or_(
                push_eventually(finally_(arg.lhs, node.pos)),
                push_eventually(finally_(arg.rhs, node.pos)),
                arg.pos,
            )
        if isinstance(arg, UnOp) and arg.kind is UnOpKind.FINALLY:
            return arg
        return node

    return _rewrite_bottom_up(formula, rule)


# ---------------------------------------------------------------------------
# Mealy / Moore machines
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Machine:
    """Finite-state transducer over subset letters.  The transition function
    must be total on states x input letters; a Mealy machine's output reads
    (state, input), a Moore machine's output reads the state alone."""

    kind: Literal["mealy", "moore"]
    inputs: frozenset[str]
    outputs: frozenset[str]
    states: tuple
    initial: object
    transition: dict
    output: dict

    def __post_init__(self) -> None:
        letters = list(subset_letters(self.inputs))
        for q in self.states:
            for a in letters:
                if (q, a) not in self.transition:
                    raise ValueError(f"transition function not total at ({q!r}, {set(a)!r})")
                if self.kind == "mealy" and (q, a) not in self.output:
                    raise ValueError(f"output function not total at ({q!r}, {set(a)!r})")
            if self.kind == "moore" and q not in self.output:
                raise ValueError(f"output function not total at {q!r}")
        if self.initial not in self.states:
            raise ValueError("initial state is not a state")

    def output_at(self, state, input_letter: Letter) -> Letter:
        if self.kind == "mealy":
            return self.output[(state, input_letter)]
        return self.output[state]


def subset_letters(atoms) -> list[Letter]:
    """All subsets of the atom set, in a deterministic order."""
    atoms = sorted(atoms)
    return [
        frozenset(a for a, bit in zip(atoms, bits) if bit)
        for bits in itertools.product((False, True), repeat=len(atoms))
    ]


def run_machine(machine: Machine, word: LassoWord) -> LassoWord:
    """Combined input/output word of the machine on an input lasso.  The run
    is simulated until the (input position class, state) pair repeats, which
    bounds the combined word's lasso shape."""
    if not word.alphabet <= machine.inputs:
        raise ValueError("input word alphabet does not match the machine's inputs")
    letters: list[Letter] = []
    seen: dict[tuple[int, object], int] = {}
    state = machine.initial
    t = 0
    while True:
        key = (word.canonical(t), state)
        if key in seen:
            start = seen[key]
            return LassoWord(
                tuple(letters[:start]),
                tuple(letters[start:]),
                machine.inputs | machine.outputs,
            )
        seen[key] = t
        in_letter = word.letter(t)
        out_letter = machine.output_at(state, in_letter)
        letters.append(in_letter | out_letter)
        state = machine.transition[(state, in_letter)]
        t += 1


def check_machine(machine: Machine, formula: Expr, bound: int) -> bool:
    """True iff for every input lasso with |u|+|v| <= bound the machine's
    combined word satisfies the formula at position 0."""
    from .ast import formula_atoms

    atoms = formula_atoms(formula)
    if not atoms <= (machine.inputs | machine.outputs):
        raise ValueError(
            "alphabet mismatch: formula atoms "
            f"{sorted(atoms - (machine.inputs | machine.outputs))} are not machine signals"
        )
    letters = subset_letters(machine.inputs)
    for prefix_len, loop_len in lasso_shapes(bound):
        for seq in itertools.product(letters, repeat=prefix_len + loop_len):
            word = LassoWord(
                tuple(seq[:prefix_len]), tuple(seq[prefix_len:]), machine.inputs
            )
            combined = run_machine(machine, word)
            if not eval_lasso(formula, combined, 0):
                return False
    return True
