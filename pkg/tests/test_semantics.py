import pytest

from tlsf.ast import (
    Semantics,
    Target,
    UnOp,
    UnOpKind,
    and_,
    conjoin,
    format_expr,
    formula_atoms,
    globally,
    structural_eq,
)
from tlsf.frontend import parse_expr_text as p
from tlsf.ltl import Machine, check_machine, equivalent_on_lassos, subset_letters
from tlsf.reduce import elaborate
from tlsf.semantics import (
    assemble_standard,
    classify_assumptions,
    convert_target,
    decompose_strict,
    interpret,
    to_nonstrict,
)

from helpers import make_basic


class TestAssembleStandard:
    def test_full_shape(self):
        b = make_basic(assumptions=[p("r@0")], invariants=[p("g@0")], guarantees=[p("F g@1")])
        got = assemble_standard(b)
        assert structural_eq(got, p("r@0 -> ((G g@0) && F g@1)"))

    def test_all_empty_is_true(self):
        assert structural_eq(assemble_standard(make_basic()), p("true"))

    def test_no_assumptions_returns_consequent_alone(self):
        b = make_basic(invariants=[p("g@0")], guarantees=[p("F g@1")])
        assert structural_eq(assemble_standard(b), p("(G g@0) && F g@1"))

    def test_empty_sides_are_dropped(self):
        only_inv = make_basic(invariants=[p("g@0")])
        assert structural_eq(assemble_standard(only_inv), p("G g@0"))
        only_guar = make_basic(guarantees=[p("F g@0")])
        assert structural_eq(assemble_standard(only_guar), p("F g@0"))

    def test_multiple_entries_conjoined_left(self):
        b = make_basic(guarantees=[p("g@0"), p("g@1"), p("F g@0")])
        assert structural_eq(assemble_standard(b), p("(g@0 && g@1) && F g@0"))

    def test_arbiter_shape(self, arbiter_spec):
        basic = elaborate(arbiter_spec)
        got = assemble_standard(basic)
        assert structural_eq(
            got,
            and_(globally(basic.invariants[0]), basic.guarantees[0]),
        )


class TestClassifyAssumptions:
    def test_routing(self):
        theta, psi, phi = classify_assumptions([p("r@0"), p("G(r@0 -> X r@1)"), p("G F r@0")])
        assert structural_eq(theta, p("r@0"))
        assert structural_eq(psi, p("r@0 -> X r@1"))
        assert structural_eq(phi, p("G F r@0"))

    def test_empty(self):
        theta, psi, phi = classify_assumptions([])
        for part in (theta, psi, phi):
            assert structural_eq(part, p("true"))

    def test_liveness_fallback(self):
        theta, psi, phi = classify_assumptions([p("F r@0")])
        assert structural_eq(theta, p("true"))
        assert structural_eq(psi, p("true"))
        assert structural_eq(phi, p("F r@0"))

    def test_top_level_conjuncts_split(self):
        theta, psi, phi = classify_assumptions([p("r@0 && G (X r@1 || r@0) && F r@1")])
        assert structural_eq(theta, p("r@0"))
        assert structural_eq(psi, p("X r@1 || r@0"))
        assert structural_eq(phi, p("F r@1"))

    def test_nested_temporal_does_not_count_as_safety(self):
        theta, psi, phi = classify_assumptions([p("G (r@0 U r@1)")])
        assert structural_eq(psi, p("true"))
        assert structural_eq(phi, p("G (r@0 U r@1)"))

    def test_x_over_compound_is_not_safety(self):
        theta, psi, phi = classify_assumptions([p("G (X (r@0 && r@1))")])
        assert structural_eq(phi, p("G (X (r@0 && r@1))"))

    RECONSTRUCTION_FIXTURES = [
        [],
        ["r@0"],
        ["F r@0"],
        ["r@0", "G(r@0 -> X r@1)", "G F r@0"],
        ["r@0 && G (r@0 || X r@1)"],
        ["G r@0", "r@1"],
        ["G (r@0 && X r@0)", "G F r@1"],
        ["!r@0", "G (!r@0 -> X r@1)"],
    ]

    @pytest.mark.parametrize("sources", RECONSTRUCTION_FIXTURES)
    def test_reconstruction_is_lasso_equivalent(self, sources):
        assumptions = [p(s) for s in sources]
        theta, psi, phi = classify_assumptions(assumptions)
        rebuilt = and_(and_(theta, globally(psi)), phi)
        original = conjoin(assumptions)
        atoms = formula_atoms(rebuilt) | formula_atoms(original) or {"r@0"}
        assert equivalent_on_lassos(rebuilt, original, atoms, 6)


class TestToNonstrict:
    def test_displayed_shape_trivial_env(self):
        b = make_basic(invariants=[p("g@0")], semantics=Semantics.MEALY_STRICT)
        got = to_nonstrict(b)
        expected = p("true -> ((true && (g@0 W !true)) && ((G true && true) -> (G g@0 && true)))")
        assert structural_eq(got, expected)
        assert equivalent_on_lassos(got, p("G g@0"), {"g@0"}, 6)

    def test_displayed_shape_with_safety_assumption(self):
        b = make_basic(
            assumptions=[p("G r@0")],
            invariants=[p("g@0")],
            semantics=Semantics.MEALY_STRICT,
        )
        got = to_nonstrict(b)
        expected = p("true -> ((true && (g@0 W !r@0)) && ((G r@0 && true) -> (G g@0 && true)))")
        assert structural_eq(got, expected)

    def test_safety_violation_ordering(self):
        # System safety may fail only after environment safety has failed.
        b = make_basic(
            assumptions=[p("G r@0")],
            invariants=[p("g@0")],
            semantics=Semantics.MEALY_STRICT,
        )
        got = to_nonstrict(b)
        from tlsf.ltl import LassoWord, eval_lasso

        ok = LassoWord.of([{"r@0", "g@0"}, {"r@0", "g@0"}, {}], [{}], alphabet={"r@0", "g@0"})
        assert eval_lasso(got, ok)  # env fails at step 2, sys fails at step 3
        bad = LassoWord.of([{"r@0"}], [{"r@0", "g@0"}], alphabet={"r@0", "g@0"})
        assert not eval_lasso(got, bad)  # sys fails first while env holds

    def test_guarantee_split(self):
        b = make_basic(guarantees=[p("g@0"), p("F g@1")], semantics=Semantics.MEALY_STRICT)
        d = decompose_strict(b)
        assert structural_eq(d.sys_initial, p("g@0"))
        assert structural_eq(d.sys_liveness, p("F g@1"))

    @pytest.mark.parametrize(
        "invariants,guarantees",
        [
            ([], []),
            (["g@0"], []),
            ([], ["F g@0"]),
            (["g@0"], ["g@1", "F g@0"]),
            (["g@0 -> g@1"], ["G F g@0"]),
        ],
    )
    def test_trivial_env_matches_standard(self, invariants, guarantees):
        strict = make_basic(
            invariants=[p(s) for s in invariants],
            guarantees=[p(s) for s in guarantees],
            semantics=Semantics.MEALY_STRICT,
        )
        standard = make_basic(
            invariants=[p(s) for s in invariants],
            guarantees=[p(s) for s in guarantees],
        )
        atoms = {"g@0", "g@1"}
        assert equivalent_on_lassos(to_nonstrict(strict), assemble_standard(standard), atoms, 6)


class TestConvertTarget:
    def test_moore_to_mealy_wraps_inputs(self):
        b = make_basic(
            guarantees=[p("G(r@0 -> g@0)")],
            semantics=Semantics.MOORE,
            target=Target.MOORE,
        )
        c = convert_target(b, Target.MEALY)
        assert structural_eq(c.guarantees[0], p("G((X r@0) -> g@0)"))
        assert c.info.semantics is Semantics.MEALY
        assert c.info.target is Target.MEALY

    def test_mealy_to_moore_wraps_outputs(self):
        b = make_basic(guarantees=[p("G(r@0 -> g@0)")])
        c = convert_target(b, Target.MOORE)
        assert structural_eq(c.guarantees[0], p("G(r@0 -> (X g@0))"))

    def test_identity_when_models_agree(self):
        b = make_basic(guarantees=[p("G(r@0 -> g@0)")])
        assert convert_target(b, Target.MEALY) is b

    def test_strictness_preserved(self):
        b = make_basic(semantics=Semantics.MOORE_STRICT, target=Target.MOORE)
        c = convert_target(b, Target.MEALY)
        assert c.info.semantics is Semantics.MEALY_STRICT

    def test_involution_wraps_each_side_once(self):
        b = make_basic(
            guarantees=[p("G(r@0 -> g@0)")],
            semantics=Semantics.MOORE,
            target=Target.MOORE,
        )
        both = convert_target(convert_target(b, Target.MEALY), Target.MOORE)
        assert structural_eq(both.guarantees[0], p("G((X r@0) -> (X g@0))"))

    def _count_wrapped(self, formula, names):
        count = 0

        def walk(node):
            nonlocal count
            from tlsf.ast import BinOp, Id

            if isinstance(node, UnOp):
                if node.kind is UnOpKind.NEXT and isinstance(node.arg, Id) and node.arg.name.text in names:
                    count += 1
                walk(node.arg)
            elif isinstance(node, BinOp):
                walk(node.lhs)
                walk(node.rhs)

        walk(formula)
        return count

    CONVERSION_FIXTURES = [
        "G(r@0 -> g@0)",
        "r@0 U g@1",
        "(F r@1) && (G g@0)",
        "G(r@0 -> F g@0)",
        "!(r@0 && g@0)",
        "r@0 <-> g@1",
        "G F r@1 -> G F g@1",
        "(r@0 W g@0) R g@1",
        "X r@0",
        "true",
    ]

    @pytest.mark.parametrize("source", CONVERSION_FIXTURES)
    def test_exactly_input_occurrences_wrapped(self, source):
        from tlsf.ast import BinOp, Id

        def count_atoms(formula, names):
            total = 0

            def walk(node):
                nonlocal total
                if isinstance(node, Id) and node.name.text in names:
                    total += 1
                elif isinstance(node, UnOp):
                    walk(node.arg)
                elif isinstance(node, BinOp):
                    walk(node.lhs)
                    walk(node.rhs)

            walk(formula)
            return total

        b = make_basic(guarantees=[p(source)], semantics=Semantics.MOORE, target=Target.MOORE)
        converted = convert_target(b, Target.MEALY)
        inputs = set(b.inputs)
        expected = count_atoms(b.guarantees[0], inputs)
        assert self._count_wrapped(converted.guarantees[0], inputs) == expected

        b2 = make_basic(guarantees=[p(source)])
        converted2 = convert_target(b2, Target.MOORE)
        outputs = set(b2.outputs)
        expected2 = count_atoms(b2.guarantees[0], outputs)
        assert self._count_wrapped(converted2.guarantees[0], outputs) == expected2


def alternating_arbiter() -> Machine:
    """Mealy arbiter that grants one request per step: unserved requests stay
    pending, and on contention the grant alternates via a turn bit.  (A
    memoryless grant function cannot satisfy the arbiter property: under
    constant simultaneous requests it would starve one client.)"""
    inputs = frozenset({"r@0", "r@1"})
    outputs = frozenset({"g@0", "g@1"})
    states = tuple(
        (p0, p1, turn) for p0 in (False, True) for p1 in (False, True) for turn in (0, 1)
    )
    transition = {}
    output = {}
    for q in states:
        p0, p1, turn = q
        for letter in subset_letters(inputs):
            want0 = p0 or "r@0" in letter
            want1 = p1 or "r@1" in letter
            if want0 and want1:
                if turn == 0:
                    out, nxt = frozenset({"g@0"}), (False, True, 1)
                else:
                    out, nxt = frozenset({"g@1"}), (True, False, 0)
            elif want0:
                out, nxt = frozenset({"g@0"}), (False, False, turn)
            elif want1:
                out, nxt = frozenset({"g@1"}), (False, False, turn)
            else:
                out, nxt = frozenset(), (False, False, turn)
            transition[(q, letter)] = nxt
            output[(q, letter)] = out
    return Machine(
        kind="mealy",
        inputs=inputs,
        outputs=outputs,
        states=states,
        initial=(False, False, 0),
        transition=transition,
        output=output,
    )


class TestInterpret:
    def test_nonstrict_aligned_is_standard(self):
        b = make_basic(invariants=[p("g@0")])
        assert structural_eq(interpret(b), assemble_standard(b))

    def test_strict_moore_spec_with_mealy_target(self):
        b = make_basic(
            assumptions=[p("G r@0")],
            invariants=[p("g@0")],
            semantics=Semantics.MOORE_STRICT,
            target=Target.MEALY,
        )
        aligned = convert_target(b, Target.MEALY)
        assert structural_eq(interpret(b), to_nonstrict(aligned))
        # inputs got X-prefixed before the strict reduction
        assert "(X r@0)" in format_expr(interpret(b))

    def test_arbiter_formula_has_no_antecedent(self, arbiter_spec):
        basic = elaborate(arbiter_spec)
        got = interpret(basic)
        assert structural_eq(got, and_(globally(basic.invariants[0]), basic.guarantees[0]))

    def test_alternating_arbiter_machine_satisfies_interpretation(self, arbiter_spec):
        basic = elaborate(arbiter_spec)
        formula = interpret(basic)
        machine = alternating_arbiter()
        assert check_machine(machine, formula, 6)

    def test_machine_check_rejects_wrong_property(self, arbiter_spec):
        basic = elaborate(arbiter_spec)
        machine = alternating_arbiter()
        assert not check_machine(machine, p("G !g@0"), 2)
