import random

import pytest

from tlsf.ast import (
    BinOp,
    BinOpKind,
    BoolConst,
    Definition,
    Id,
    OTHERWISE,
    Semantics,
    Target,
    UnOp,
    UnOpKind,
    format_expr,
    structural_eq,
)
from tlsf.frontend import (
    ParseError,
    parse_basic_spec,
    parse_expr_text,
    parse_text,
    tokenize,
)

from helpers import random_expression


def texts(tokens):
    return [t.text for t in tokens if t.kind != "eof"]


class TestTokenizer:
    def test_nested_block_comments(self):
        assert texts(tokenize("/* a /* b */ c */ x")) == ["x"]

    def test_line_comment(self):
        assert texts(tokenize("a // rest\nb")) == ["a", "b"]

    def test_longest_match(self):
        assert texts(tokenize("a&&b")) == ["a", "&&", "b"]

    def test_word_operator_maps_to_symbol(self):
        tok = tokenize("AND")[0]
        assert (tok.kind, tok.text) == ("op", "&&")

    def test_membership_arrow(self):
        assert texts(tokenize("a<-s")) == ["a", "IN", "s"]

    def test_identifier_charset(self):
        assert texts(tokenize("_x a'b q@2 @at")) == ["_x", "a'b", "q@2", "@at"]

    def test_identifier_must_not_start_with_digit(self):
        with pytest.raises(ParseError, match="must not start with a digit"):
            tokenize("9a")

    def test_unterminated_comment(self):
        with pytest.raises(ParseError, match="closing the comment"):
            tokenize("/* a /* b */")

    def test_unterminated_string(self):
        with pytest.raises(ParseError, match="closing"):
            tokenize('"abc')

    def test_string_escapes(self):
        tok = tokenize(r'"a\"b\\c"')[0]
        assert tok.text == 'a"b\\c'

    def test_unknown_escape_rejected(self):
        with pytest.raises(ParseError, match="escape"):
            tokenize(r'"a\nb"')

    def test_illegal_character(self):
        with pytest.raises(ParseError, match="illegal character"):
            tokenize("a $ b")

    def test_positions(self):
        tok = tokenize("a\n  b")[1]
        assert (tok.pos.line, tok.pos.col) == (2, 3)

    def test_natural_beyond_64_bits(self):
        with pytest.raises(ParseError, match=r"2\^64"):
            tokenize(str(2**64))
        assert texts(tokenize(str(2**64 - 1))) == [str(2**64 - 1)]


# Alternative operator spellings: each must parse identically to the symbolic
# form (the bracketed big-operator variants take their own rows).
ALTERNATIVE_SPELLINGS = [
    ("SUM[i IN s] i", "+[i IN s] i"),
    ("PROD[i IN s] i", "*[i IN s] i"),
    ("SIZE s", "|s|"),
    ("a MUL b", "a * b"),
    ("a DIV b", "a / b"),
    ("a MOD b", "a % b"),
    ("a PLUS b", "a + b"),
    ("a MINUS b", "a - b"),
    ("CAP[i IN s] t", "(*)[i IN s] t"),
    ("CUP[i IN s] t", "(+)[i IN s] t"),
    ("a (-) b", "a (\\) b"),
    ("a SETMINUS b", "a (\\) b"),
    ("a CAP b", "a (*) b"),
    ("a CUP b", "a (+) b"),
    ("a EQ b", "a == b"),
    ("a NEQ b", "a != b"),
    ("a /= b", "a != b"),
    ("a LE b", "a < b"),
    ("a LEQ b", "a <= b"),
    ("a GE b", "a > b"),
    ("a GEG b", "a >= b"),
    ("a ELEM s", "a IN s"),
    ("a <- s", "a IN s"),
    ("NOT a", "!a"),
    ("AND[i IN s] t", "&&[i IN s] t"),
    ("FORALL[i IN s] t", "&&[i IN s] t"),
    ("OR[i IN s] t", "||[i IN s] t"),
    ("EXISTS[i IN s] t", "||[i IN s] t"),
    ("a AND b", "a && b"),
    ("a OR b", "a || b"),
    ("a IMPLIES b", "a -> b"),
    ("a EQUIV b", "a <-> b"),
]


@pytest.mark.parametrize("alt,symbolic", ALTERNATIVE_SPELLINGS)
def test_alternative_spelling(alt, symbolic):
    assert structural_eq(parse_expr_text(alt), parse_expr_text(symbolic))


# Precedence and associativity, row by row: each pair states the bare source
# and its fully disambiguated reading per the operator table.
PRECEDENCE_CASES = [
    # row 1 unary binds tightest
    ("MIN s (+) t", "(MIN s) (+) t"),
    ("MAX s + 1", "(MAX s) + 1"),
    ("SIZEOF b == 2", "(SIZEOF b) == 2"),
    ("|s| + 1", "(|s|) + 1"),
    ("+[i IN s] i + 1", "(+[i IN s] i) + 1"),
    ("*[i IN s] i * 2", "(*[i IN s] i) * 2"),
    # row 2 (*) left, tighter than row 3
    ("a * b * c", "(a * b) * c"),
    ("a / b * c", "a / (b * c)"),
    ("a * b / c", "(a * b) / c"),
    # row 3 (/, %) right-to-left
    ("a / b / c", "a / (b / c)"),
    ("a % b % c", "a % (b % c)"),
    ("a / b % c", "a / (b % c)"),
    # row 4 (+, -) left, looser than row 3
    ("a - b + c", "(a - b) + c"),
    ("a + b - c", "(a + b) - c"),
    ("a + b / c", "a + (b / c)"),
    # row 5 big set operators bind tighter than row 6
    ("(+)[i IN s] t (\\) u", "((+)[i IN s] t) (\\) u"),
    ("(*)[i IN s] t (+) u", "((*)[i IN s] t) (+) u"),
    # row 6 set difference right-to-left, tighter than rows 7 and 8
    ("a (\\) b (\\) c", "a (\\) (b (\\) c)"),
    ("a (\\) b (*) c", "(a (\\) b) (*) c"),
    ("a (*) b (\\) c", "a (*) (b (\\) c)"),
    # row 7 intersection left, tighter than row 8 union
    ("a (*) b (*) c", "(a (*) b) (*) c"),
    ("a (+) b (*) c", "a (+) (b (*) c)"),
    ("a (+) b (+) c", "(a (+) b) (+) c"),
    # row 9 comparisons left-to-right (rejected later by typing, parsed here)
    ("a < b < c", "(a < b) < c"),
    ("a == b != c", "(a == b) != c"),
    # row 10 membership looser than comparisons
    ("a == b IN s", "(a == b) IN s"),
    # row 11 unary over rows 12+
    ("!a && b", "(!a) && b"),
    ("X a U b", "(X a) U b"),
    ("G a -> b", "(G a) -> b"),
    ("F a || b", "(F a) || b"),
    ("&&[i IN s] a || b", "(&&[i IN s] a) || b"),
    ("||[i IN s] a -> b", "(||[i IN s] a) -> b"),
    ("!X a", "!(X a)"),
    ("X F a", "X (F a)"),
    # row 12 conjunction left, tighter than row 13
    ("a && b && c", "(a && b) && c"),
    ("a && b || c", "(a && b) || c"),
    ("a || b && c", "a || (b && c)"),
    # row 13 disjunction left
    ("a || b || c", "(a || b) || c"),
    # row 14 implication/equivalence right-to-left, looser than row 13
    ("a -> b -> c", "a -> (b -> c)"),
    ("a <-> b <-> c", "a <-> (b <-> c)"),
    ("a -> b <-> c", "a -> (b <-> c)"),
    ("a || b -> c", "(a || b) -> c"),
    # row 15 weak until right-to-left, looser than row 14
    ("a W b W c", "a W (b W c)"),
    ("a -> b W c", "(a -> b) W c"),
    # row 16 until right-to-left, looser than row 15
    ("a U b U c", "a U (b U c)"),
    ("a W b U c", "(a W b) U c"),
    # row 17 release left-to-right, loosest temporal
    ("a R b R c", "(a R b) R c"),
    ("a U b R c", "(a U b) R c"),
    ("a R b U c", "a R (b U c)"),
]


@pytest.mark.parametrize("bare,parenthesized", PRECEDENCE_CASES)
def test_precedence_row(bare, parenthesized):
    assert structural_eq(parse_expr_text(bare), parse_expr_text(parenthesized))


class TestExprParsing:
    def test_parse_errors(self):
        for bad in ["a &&", "(a", "a)", "{1,2", "&&[i IN] x", "&&[] x", "a U", "MIN"]:
            with pytest.raises(ParseError):
                parse_expr_text(bad)

    def test_duplicate_binder_rejected(self):
        with pytest.raises(ParseError, match="distinct binder"):
            parse_expr_text("&&[i IN s, i IN t] a")

    def test_reserved_words_are_not_identifiers(self):
        for word in ["U", "MIN", "otherwise", "INFO", "GUARANTEES", "FORALL"]:
            with pytest.raises(ParseError):
                parse_expr_text(f"{word} && x" if word != "U" else "U")

    def test_determinism(self):
        src = "&&[0 <= i < n] (a U b[i]) -> F[1:3] c"
        assert structural_eq(parse_expr_text(src), parse_expr_text(src))

    def test_range_binder_desugars_to_membership(self):
        open_form = parse_expr_text("&&[0 < i <= n] b[i]")
        closed = parse_expr_text("&&[i IN {0+1, (0+1)+1 .. n}] b[i]")
        assert structural_eq(open_form, closed)

    def test_round_trip_random_expressions(self):
        rng = random.Random(99)
        for _ in range(300):
            e = random_expression(rng, 3)
            printed = format_expr(e)
            assert structural_eq(parse_expr_text(printed), e), printed


class TestSpecParsing:
    def test_arbiter_fixture(self, arbiter_spec):
        spec = arbiter_spec
        assert spec.info.title == "A Parameterized Arbiter"
        assert spec.info.semantics is Semantics.MEALY
        assert spec.info.target is Target.MEALY
        assert [(p.text, format_expr(e)) for p, e in spec.parameters] == [("n", "2")]
        assert [d.name.text for d in spec.definitions] == ["mutual", "reqres"]
        assert [s.name.text for s in spec.inputs] == ["r"]
        assert spec.inputs[0].width is not None
        assert len(spec.invariants) == 1
        assert len(spec.guarantees) == 1

    def test_global_optional(self):
        spec = parse_text(
            'INFO { TITLE: "t" DESCRIPTION: "d" SEMANTICS: Mealy TARGET: Moore }\n'
            "MAIN { INPUTS { a; } OUTPUTS { b; } }"
        )
        assert spec.parameters == ()
        assert spec.definitions == ()
        assert spec.guarantees == ()

    def test_strict_semantics_literal(self):
        spec = parse_text(
            'INFO { TITLE: "t" DESCRIPTION: "d" SEMANTICS: Mealy,Strict TARGET: Mealy }\n'
            "MAIN { INPUTS { a; } OUTPUTS { b; } }"
        )
        assert spec.info.semantics is Semantics.MEALY_STRICT

    def test_info_fields_any_order_and_tags(self):
        spec = parse_text(
            'INFO { TAGS: safety, "two words" TARGET: Moore SEMANTICS: Moore,Strict '
            'DESCRIPTION: "d" TITLE: "t" }\n'
            "MAIN { INPUTS { a; } OUTPUTS { b; } }"
        )
        assert spec.info.tags == ("safety", "two words")
        assert spec.info.semantics is Semantics.MOORE_STRICT

    def test_missing_info_field(self):
        with pytest.raises(ParseError, match="TARGET"):
            parse_text('INFO { TITLE: "t" DESCRIPTION: "d" SEMANTICS: Mealy }\nMAIN { INPUTS { } OUTPUTS { } }')

    def test_duplicate_info_field(self):
        with pytest.raises(ParseError, match="duplicate 'TITLE'"):
            parse_text('INFO { TITLE: "a" TITLE: "b" DESCRIPTION: "d" SEMANTICS: Mealy TARGET: Mealy }\nMAIN { INPUTS { } OUTPUTS { } }')

    def test_bad_semantics_literal(self):
        with pytest.raises(ParseError, match="'Mealy' or 'Moore'"):
            parse_text('INFO { TITLE: "t" DESCRIPTION: "d" SEMANTICS: Melay TARGET: Mealy }\nMAIN { INPUTS { } OUTPUTS { } }')

    def test_duplicate_main_subsection(self):
        with pytest.raises(ParseError, match="duplicate 'INPUTS'"):
            parse_text(
                'INFO { TITLE: "t" DESCRIPTION: "d" SEMANTICS: Mealy TARGET: Mealy }\n'
                "MAIN { INPUTS { a; } INPUTS { b; } OUTPUTS { } }"
            )

    def test_main_subsections_any_order(self):
        spec = parse_text(
            'INFO { TITLE: "t" DESCRIPTION: "d" SEMANTICS: Mealy TARGET: Mealy }\n'
            "MAIN { GUARANTEES { a; } OUTPUTS { b; } INPUTS { a; } }"
        )
        assert len(spec.guarantees) == 1

    def test_missing_semicolon(self):
        with pytest.raises(ParseError, match="';'"):
            parse_text(
                'INFO { TITLE: "t" DESCRIPTION: "d" SEMANTICS: Mealy TARGET: Mealy }\n'
                "MAIN { INPUTS { a } OUTPUTS { } }"
            )

    def test_guard_outside_function_body_rejected(self):
        with pytest.raises(ParseError):
            parse_text(
                'INFO { TITLE: "t" DESCRIPTION: "d" SEMANTICS: Mealy TARGET: Mealy }\n'
                "MAIN { INPUTS { a; } OUTPUTS { b; } GUARANTEES { a : b; } }"
            )


class TestDefinitions:
    SHELL = (
        'INFO {{ TITLE: "t" DESCRIPTION: "d" SEMANTICS: Mealy TARGET: Mealy }}\n'
        "GLOBAL {{ DEFINITIONS {{ {defs} }} }}\n"
        "MAIN {{ INPUTS {{ p; q; }} OUTPUTS {{ o; }} }}"
    )

    def parse_defs(self, defs: str) -> list[Definition]:
        return list(parse_text(self.SHELL.format(defs=defs)).definitions)

    def test_plain_binding(self):
        (d,) = self.parse_defs("width = 2 + 3;")
        assert d.params == ()
        assert d.bodies[0][0] is None

    def test_guarded_function(self):
        (d,) = self.parse_defs("f(x) = x == 0 : 1 x == 1 : 2 otherwise : 3;")
        guards = [g for g, _ in d.bodies]
        assert guards[2] is OTHERWISE
        assert isinstance(guards[0], BinOp) and guards[0].kind is BinOpKind.EQ
        assert len(d.bodies) == 3

    def test_pattern_guard(self):
        (d,) = self.parse_defs("fun(f) = f ~ a U _ : a otherwise : X f;")
        guard = d.bodies[0][0]
        assert isinstance(guard, BinOp) and guard.kind is BinOpKind.MATCH
        assert isinstance(guard.rhs, BinOp) and guard.rhs.kind is BinOpKind.UNTIL

    def test_two_otherwise_rejected(self):
        with pytest.raises(ParseError, match="otherwise"):
            self.parse_defs("f(x) = otherwise : 1 otherwise : 2;")

    def test_chained_guard_rejected(self):
        with pytest.raises(ParseError, match="single guard"):
            self.parse_defs("f(x) = x == 0 : 1 : 2;")

    def test_bare_pattern_rejected(self):
        with pytest.raises(ParseError, match="':' after the pattern"):
            self.parse_defs("f(x) = x ~ a U _;")

    def test_invalid_pattern_construct(self):
        with pytest.raises(ParseError, match="pattern"):
            self.parse_defs("f(x) = x ~ (a + 1) : a;")

    def test_duplicate_parameter_names(self):
        with pytest.raises(ParseError, match="distinct argument names"):
            self.parse_defs("f(x, x) = 1;")


class TestBasicParsing:
    SHELL = (
        'INFO {{ TITLE: "t" DESCRIPTION: "d" SEMANTICS: Mealy TARGET: Mealy }}\n'
        "MAIN {{ INPUTS {{ a; }} OUTPUTS {{ b; }} GUARANTEES {{ {expr}; }} }}"
    )

    def parse_formula(self, expr: str):
        return parse_basic_spec(self.SHELL.format(expr=expr)).guarantees[0]

    def test_until_application(self):
        f = self.parse_formula("((a) U (b))")
        assert isinstance(f, BinOp) and f.kind is BinOpKind.UNTIL
        assert isinstance(f.lhs, Id) and f.lhs.name.text == "a"
        assert isinstance(f.rhs, Id) and f.rhs.name.text == "b"

    def test_leaves(self):
        assert isinstance(self.parse_formula("(true)"), BoolConst)
        assert isinstance(self.parse_formula("(a)"), Id)

    def test_unary_chain(self):
        f = self.parse_formula("(X ((a) && (!(b))))")
        assert isinstance(f, UnOp) and f.kind is UnOpKind.NEXT

    def test_not_fully_parenthesized(self):
        with pytest.raises(ParseError, match="fully parenthesized"):
            self.parse_formula("a U b")

    def test_partially_parenthesized(self):
        with pytest.raises(ParseError):
            self.parse_formula("((a) U b)")

    def test_redundant_parens_rejected(self):
        with pytest.raises(ParseError, match="binary operator"):
            self.parse_formula("((a))")

    def test_global_section_rejected(self):
        with pytest.raises(ParseError, match="not in the basic format"):
            parse_basic_spec(
                'INFO { TITLE: "t" DESCRIPTION: "d" SEMANTICS: Mealy TARGET: Mealy }\n'
                "GLOBAL { PARAMETERS { n = 1; } }\n"
                "MAIN { INPUTS { a; } OUTPUTS { b; } }"
            )

    def test_bus_declaration_rejected(self):
        with pytest.raises(ParseError, match="bus declarations are not in the basic format"):
            parse_basic_spec(
                'INFO { TITLE: "t" DESCRIPTION: "d" SEMANTICS: Mealy TARGET: Mealy }\n'
                "MAIN { INPUTS { a[2]; } OUTPUTS { b; } }"
            )

    def test_numeric_expression_rejected(self):
        with pytest.raises(ParseError, match="not in the basic format"):
            self.parse_formula("(1)")
