import random

import pytest

from tlsf.ast import (
    BigOp,
    BigOpKind,
    Ident,
    Pos,
    atom,
    format_expr,
    free_identifiers,
    globally,
    next_,
    structural_eq,
    and_,
)
from tlsf.frontend import parse_expr_text

from helpers import random_expression


def names(idents):
    return {i.text for i in idents}


class TestFreeIdentifiers:
    def test_single_free_variable(self):
        assert names(free_identifiers(atom("a"))) == {"a"}

    def test_big_op_binder_shadows(self):
        e = parse_expr_text("&&[i IN {0,1}] b[i]")
        assert names(free_identifiers(e)) == {"b"}

    def test_function_application_name_is_free(self):
        e = parse_expr_text("f(x)")
        assert names(free_identifiers(e)) == {"f", "x"}

    def test_earlier_binder_scopes_over_later_set(self):
        e = parse_expr_text("&&[i IN {0,1}, j IN {0,1} (\\) {i}] c")
        assert names(free_identifiers(e)) == {"c"}

    def test_closed_expression_has_no_free_identifiers(self):
        e = parse_expr_text("+[i IN {1,2}] (i * i)")
        assert free_identifiers(e) == set()

    def test_wildcard_is_never_free(self):
        e = parse_expr_text("X _")
        assert free_identifiers(e) == set()


class TestStructuralEq:
    def test_equal_trees(self):
        assert structural_eq(next_(atom("a")), next_(atom("a")))

    def test_no_commutativity(self):
        assert not structural_eq(
            and_(atom("a"), atom("b")), and_(atom("b"), atom("a"))
        )

    def test_positions_ignored(self):
        left = globally(atom("a", Pos(3, 1)), Pos(3, 1))
        right = globally(atom("a", Pos(9, 7)), Pos(9, 7))
        assert structural_eq(left, right)

    def test_equivalence_relation_on_random_trees(self):
        rng = random.Random(11)
        trees = [random_expression(rng, 3) for _ in range(120)]
        for t in trees:
            assert structural_eq(t, t)
        for x in trees:
            for y in trees[:25]:
                assert structural_eq(x, y) == structural_eq(y, x)
        # transitivity via representatives: equal printed forms must be equal trees
        by_text = {}
        for t in trees:
            by_text.setdefault(format_expr(t), t)
        for t in trees:
            rep = by_text[format_expr(t)]
            assert structural_eq(t, rep)


class TestInvariants:
    def test_big_op_requires_binders(self):
        with pytest.raises(ValueError):
            BigOp(BigOpKind.AND, (), atom("a"))

    def test_big_op_binders_distinct(self):
        with pytest.raises(ValueError):
            BigOp(
                BigOpKind.AND,
                ((Ident("i"), atom("s")), (Ident("i"), atom("t"))),
                atom("a"),
            )

    def test_nodes_are_hashable(self):
        seen = {atom("a"), next_(atom("a")), atom("a")}
        assert len(seen) == 2
