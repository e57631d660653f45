"""Shared test utilities: seeded random generators for expressions and ground
formulas, and small spec-construction shorthands."""

from __future__ import annotations

import random

from tlsf.ast import (
    BigOp,
    BigOpKind,
    BinOp,
    BinOpKind,
    BoolConst,
    BusIndex,
    Expr,
    FinallyRange,
    FnApp,
    GloballyRange,
    Id,
    Ident,
    Info,
    NatConst,
    NextN,
    Semantics,
    SetLiteral,
    SetRange,
    Target,
    UnOp,
    UnOpKind,
)
from tlsf.reduce import BasicSpec

FORMULA_UNOPS = [UnOpKind.NOT, UnOpKind.NEXT, UnOpKind.GLOBALLY, UnOpKind.FINALLY]
FORMULA_BINOPS = [
    BinOpKind.AND,
    BinOpKind.OR,
    BinOpKind.IMPLIES,
    BinOpKind.EQUIV,
    BinOpKind.UNTIL,
    BinOpKind.RELEASE,
    BinOpKind.WEAK_UNTIL,
]


def random_formula(rng: random.Random, atoms: list[str], depth: int) -> Expr:
    """Ground LTL formula of the given maximum operator depth."""
    if depth == 0 or rng.random() < 0.2:
        roll = rng.random()
        if roll < 0.8:
            return Id(Ident(rng.choice(atoms)))
        return BoolConst(roll < 0.9)
    if rng.random() < 0.45:
        return UnOp(rng.choice(FORMULA_UNOPS), random_formula(rng, atoms, depth - 1))
    return BinOp(
        rng.choice(FORMULA_BINOPS),
        random_formula(rng, atoms, depth - 1),
        random_formula(rng, atoms, depth - 1),
    )


def formula_corpus(count: int, max_atoms: int = 3, depth: int = 3, seed: int = 20240817) -> list[Expr]:
    """Deterministic corpus of distinct ground formulas over atoms a..c (so
    lasso families can be shared), with all atom counts up to max_atoms well
    represented."""
    from tlsf.ast import formula_atoms

    rng = random.Random(seed)
    pool = ["a", "b", "c"][:max_atoms]
    seen: set[Expr] = set()
    out: list[Expr] = []
    # Roughly even shares of 1-, 2- and 3-atom formulas (as actually used;
    # constant-only formulas count into the first bucket).
    quota = {n: count // max_atoms + max_atoms for n in range(1, max_atoms + 1)}
    while len(out) < count:
        atoms = pool[: rng.randint(1, len(pool))]
        f = random_formula(rng, atoms, depth)
        used = max(len(formula_atoms(f)), 1)
        if f not in seen and quota.get(used, 0) > 0:
            quota[used] -= 1
            seen.add(f)
            out.append(f)
    return out


_IDENT_POOL = ["a", "b", "c", "x", "y", "zeta", "sig_1", "q'", "v@2", "@at"]


def random_expression(rng: random.Random, depth: int) -> Expr:
    """Arbitrary full-format expression (not necessarily well typed), used for
    print/parse round trips.  Guards, pattern matches and wildcards are
    excluded: they only parse inside function bodies."""
    if depth == 0:
        roll = rng.random()
        if roll < 0.4:
            return Id(Ident(rng.choice(_IDENT_POOL)))
        if roll < 0.7:
            return NatConst(rng.randint(0, 9))
        if roll < 0.85:
            return BoolConst(rng.random() < 0.5)
        return SetLiteral(())
    shape = rng.randint(0, 9)
    sub = lambda: random_expression(rng, depth - 1)  # noqa: E731
    if shape == 0:
        kind = rng.choice(list(UnOpKind))
        return UnOp(kind, sub())
    if shape == 1:
        kind = rng.choice([k for k in BinOpKind if k not in (BinOpKind.GUARD, BinOpKind.MATCH)])
        return BinOp(kind, sub(), sub())
    if shape == 2:
        return SetLiteral(tuple(sub() for _ in range(rng.randint(0, 3))))
    if shape == 3:
        return SetRange(sub(), sub(), sub())
    if shape == 4:
        names = rng.sample(_IDENT_POOL, rng.randint(1, 2))
        binders = tuple((Ident(n), sub()) for n in names)
        return BigOp(rng.choice(list(BigOpKind)), binders, sub())
    if shape == 5:
        return FnApp(Ident(rng.choice(_IDENT_POOL)), tuple(sub() for _ in range(rng.randint(1, 3))))
    if shape == 6:
        return BusIndex(Ident(rng.choice(_IDENT_POOL)), sub())
    if shape == 7:
        return NextN(sub(), sub())
    if shape == 8:
        return FinallyRange(sub(), sub(), sub())
    return GloballyRange(sub(), sub(), sub())


def make_basic(
    assumptions=(),
    invariants=(),
    guarantees=(),
    inputs=("r@0", "r@1"),
    outputs=("g@0", "g@1"),
    semantics=Semantics.MEALY,
    target=Target.MEALY,
) -> BasicSpec:
    return BasicSpec(
        info=Info("t", "d", semantics, target),
        inputs=tuple(inputs),
        outputs=tuple(outputs),
        assumptions=tuple(assumptions),
        invariants=tuple(invariants),
        guarantees=tuple(guarantees),
    )
