"""Type checking for full-format specifications.

Every expression gets one of the types signal, bus, natural, boolean, ltl, or
set-of-X.  Boolean and signal expressions coerce into LTL positions; no other
subtyping exists.  Function definitions are typed per instantiation (each call
site checks the body under the concrete argument types), so recursive
functions need no polymorphic machinery.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional

from .ast import (
    ARITH_BINOPS,
    BOOL,
    BOOL_BINOPS,
    BUS,
    COMPARE_BINOPS,
    LTL,
    NAT,
    OTHERWISE,
    SET_BINOPS,
    SIGNAL,
    TEMPORAL_BINOPS,
    TEMPORAL_UNOPS,
    BigOp,
    BigOpKind,
    BinOp,
    BinOpKind,
    BoolConst,
    BoolTy,
    BusIndex,
    BusTy,
    Definition,
    Expr,
    FinallyRange,
    FnApp,
    GloballyRange,
    Id,
    Ident,
    LtlTy,
    NatConst,
    NatTy,
    NextN,
    Pos,
    SetLiteral,
    SetRange,
    SetTy,
    SignalTy,
    Spec,
    TlsfError,
    Ty,
    UnOp,
    UnOpKind,
    VarTy,
    Wildcard,
    is_ltl_family,
    pattern_identifiers,
)


class TypeCheckError(TlsfError):
    pass


class _Unifier:
    """Union-find style substitution for the type variables that arise from
    empty set literals and in-progress recursive function instantiations."""

    def __init__(self) -> None:
        self.subst: dict[int, Ty] = {}
        self.counter = 0

    def fresh(self) -> VarTy:
        self.counter += 1
        return VarTy(self.counter)

    def resolve(self, ty: Ty) -> Ty:
        while isinstance(ty, VarTy) and ty.tid in self.subst:
            ty = self.subst[ty.tid]
        if isinstance(ty, SetTy):
            return SetTy(self.resolve(ty.elem))
        return ty

    def unify(self, a: Ty, b: Ty, pos: Pos, what: str) -> Ty:
        a = self.resolve(a)
        b = self.resolve(b)
        if a == b:
            return a
        if isinstance(a, VarTy):
            self.subst[a.tid] = b
            return b
        if isinstance(b, VarTy):
            self.subst[b.tid] = a
            return a
        if isinstance(a, SetTy) and isinstance(b, SetTy):
            return SetTy(self.unify(a.elem, b.elem, pos, what))
        raise TypeCheckError(f"{what}: type mismatch, {a} vs {b}", pos)


@dataclass
class TypeEnv:
    """Name environment built by check_spec: parameter, signal, bus and
    definition types, plus the per-instantiation function result cache."""

    parameters: dict[str, Ty] = dc_field(default_factory=dict)
    signals: dict[str, Ty] = dc_field(default_factory=dict)  # signal or bus
    definitions: dict[str, Definition] = dc_field(default_factory=dict)
    binding_types: dict[str, Ty] = dc_field(default_factory=dict)  # plain bindings
    instantiations: dict[tuple[str, tuple[Ty, ...]], Ty] = dc_field(default_factory=dict)
    unifier: _Unifier = dc_field(default_factory=_Unifier)
    _in_progress: set[str] = dc_field(default_factory=set)

    def lookup(self, name: Ident, locals_: dict[str, Ty]) -> Ty:
        text = name.text
        if text in locals_:
            return locals_[text]
        if text in self.parameters:
            return self.parameters[text]
        if text in self.signals:
            return self.signals[text]
        if text in self.binding_types:
            return self.binding_types[text]
        if text in self.definitions:
            defn = self.definitions[text]
            if defn.params:
                raise TypeCheckError(f"'{text}' is a function of arity {len(defn.params)} and needs arguments", name.pos)
            return self._plain_binding_type(text, name.pos)
        raise TypeCheckError(f"unbound identifier '{text}'", name.pos)

    def _plain_binding_type(self, text: str, pos: Pos) -> Ty:
        if text in self._in_progress:
            raise TypeCheckError(f"cyclic definition involving '{text}'", pos)
        self._in_progress.add(text)
        try:
            ty = infer(self.definitions[text].bodies[0][1], self, {})
        finally:
            self._in_progress.discard(text)
        self.binding_types[text] = ty
        return ty

    def is_bus(self, name: str) -> bool:
        return isinstance(self.signals.get(name), BusTy)


def _expect_nat(e: Expr, env: TypeEnv, locals_: dict[str, Ty], what: str) -> None:
    ty = infer(e, env, locals_)
    env.unifier.unify(ty, NAT, e.pos, what)


def _expect_ltl(e: Expr, env: TypeEnv, locals_: dict[str, Ty], what: str) -> Ty:
    """Type of e, required to be coercible into an LTL position."""
    ty = env.unifier.resolve(infer(e, env, locals_))
    if isinstance(ty, VarTy):
        return env.unifier.unify(ty, LTL, e.pos, what)
    if not is_ltl_family(ty):
        raise TypeCheckError(f"{what}: expected an ltl/boolean operand, found {ty}", e.pos)
    return ty


def infer(e: Expr, env: TypeEnv, locals_: Optional[dict[str, Ty]] = None) -> Ty:
    """Most specific type of e; raises TypeCheckError for ill-typed input."""
    locals_ = locals_ if locals_ is not None else {}
    uni = env.unifier

    if isinstance(e, NatConst):
        return NAT
    if isinstance(e, BoolConst):
        return BOOL
    if isinstance(e, Wildcard):
        raise TypeCheckError("the wildcard '_' is only allowed inside patterns", e.pos)
    if isinstance(e, Id):
        return env.lookup(e.name, locals_)
    if isinstance(e, BusIndex):
        bus_ty = env.lookup(e.bus, locals_)
        if not isinstance(uni.resolve(bus_ty), BusTy):
            raise TypeCheckError(f"'{e.bus.text}' is indexed like a bus but has type {uni.resolve(bus_ty)}", e.pos)
        _expect_nat(e.index, env, locals_, "bus index")
        return SIGNAL

    if isinstance(e, UnOp):
        if e.kind is UnOpKind.NOT:
            ty = uni.resolve(infer(e.arg, env, locals_))
            if isinstance(ty, BoolTy):
                return BOOL
            if isinstance(ty, VarTy):
                return uni.unify(ty, BOOL, e.pos, "negation")
            if is_ltl_family(ty):
                return LTL
            raise TypeCheckError(f"negation needs a boolean or ltl operand, found {ty}", e.pos)
        if e.kind in TEMPORAL_UNOPS:
            _expect_ltl(e.arg, env, locals_, f"operand of {e.kind.value}")
            return LTL
        if e.kind is UnOpKind.SIZE:
            ty = infer(e.arg, env, locals_)
            uni.unify(ty, SetTy(uni.fresh()), e.pos, "set size")
            return NAT
        if e.kind in (UnOpKind.MIN, UnOpKind.MAX):
            ty = infer(e.arg, env, locals_)
            uni.unify(ty, SetTy(NAT), e.pos, e.kind.value)
            return NAT
        if e.kind is UnOpKind.SIZEOF:
            if not (isinstance(e.arg, Id) and isinstance(uni.resolve(env.lookup(e.arg.name, locals_)), BusTy)):
                raise TypeCheckError("SIZEOF needs a bus identifier", e.pos)
            return NAT

    if isinstance(e, BinOp):
        k = e.kind
        if k in ARITH_BINOPS:
            _expect_nat(e.lhs, env, locals_, f"operand of {k.value}")
            _expect_nat(e.rhs, env, locals_, f"operand of {k.value}")
            return NAT
        if k in COMPARE_BINOPS:
            _expect_nat(e.lhs, env, locals_, f"operand of {k.value}")
            _expect_nat(e.rhs, env, locals_, f"operand of {k.value}")
            return BOOL
        if k in BOOL_BINOPS:
            lt = uni.resolve(infer(e.lhs, env, locals_))
            rt = uni.resolve(infer(e.rhs, env, locals_))
            if isinstance(lt, VarTy):
                lt = uni.unify(lt, rt if not isinstance(rt, VarTy) else BOOL, e.pos, k.value)
            if isinstance(rt, VarTy):
                rt = uni.unify(rt, lt, e.pos, k.value)
            if isinstance(lt, BoolTy) and isinstance(rt, BoolTy):
                return BOOL
            if is_ltl_family(lt) and is_ltl_family(rt):
                return LTL
            raise TypeCheckError(f"operands of {k.value} must be boolean or ltl, found {lt} and {rt}", e.pos)
        if k in TEMPORAL_BINOPS:
            _expect_ltl(e.lhs, env, locals_, f"operand of {k.value}")
            _expect_ltl(e.rhs, env, locals_, f"operand of {k.value}")
            return LTL
        if k in SET_BINOPS:
            lt = infer(e.lhs, env, locals_)
            rt = infer(e.rhs, env, locals_)
            lt = uni.unify(lt, SetTy(uni.fresh()), e.lhs.pos, k.value)
            rt = uni.unify(rt, SetTy(uni.fresh()), e.rhs.pos, k.value)
            elem = _join_elem(uni, lt.elem, rt.elem, e.pos, k.value)  # type: ignore[union-attr]
            return SetTy(elem)
        if k is BinOpKind.IN:
            st = uni.resolve(uni.unify(infer(e.rhs, env, locals_), SetTy(uni.fresh()), e.rhs.pos, "membership"))
            lt = infer(e.lhs, env, locals_)
            _join_elem(uni, uni.resolve(lt), st.elem, e.pos, "membership")  # type: ignore[union-attr]
            return BOOL
        if k in (BinOpKind.GUARD, BinOpKind.MATCH):
            raise TypeCheckError(f"'{k.value}' may only appear as a function body guard", e.pos)

    if isinstance(e, SetLiteral):
        elem: Ty = uni.fresh()
        for x in e.elems:
            elem = _join_elem(uni, elem, infer(x, env, locals_), x.pos, "set literal")
        return SetTy(elem)
    if isinstance(e, SetRange):
        for part in (e.start, e.second, e.stop):
            _expect_nat(part, env, locals_, "set range bound")
        return SetTy(NAT)

    if isinstance(e, BigOp):
        scope = dict(locals_)
        for binder, sexpr in e.binders:
            sty = uni.resolve(uni.unify(infer(sexpr, env, scope), SetTy(uni.fresh()), sexpr.pos, "big-operator binder"))
            scope[binder.text] = sty.elem  # type: ignore[union-attr]
        body_ty = uni.resolve(infer(e.body, env, scope))
        if e.kind in (BigOpKind.SUM, BigOpKind.PROD):
            uni.unify(body_ty, NAT, e.pos, f"body of {e.kind.value}[..]")
            return NAT
        if e.kind in (BigOpKind.UNION, BigOpKind.INTERSECT):
            return uni.unify(body_ty, SetTy(uni.fresh()), e.pos, f"body of {e.kind.value}[..]")
        if isinstance(body_ty, BoolTy):
            return BOOL
        if isinstance(body_ty, VarTy):
            return uni.unify(body_ty, BOOL, e.pos, f"body of {e.kind.value}[..]")
        if is_ltl_family(body_ty):
            return LTL
        raise TypeCheckError(f"body of {e.kind.value}[..] must be boolean or ltl, found {body_ty}", e.pos)

    if isinstance(e, FnApp):
        return _infer_application(e, env, locals_)

    if isinstance(e, NextN):
        _expect_nat(e.count, env, locals_, "repetition count of X[..]")
        _expect_ltl(e.body, env, locals_, "body of X[..]")
        return LTL
    if isinstance(e, (FinallyRange, GloballyRange)):
        op = "F" if isinstance(e, FinallyRange) else "G"
        _expect_nat(e.lo, env, locals_, f"lower bound of {op}[..]")
        _expect_nat(e.hi, env, locals_, f"upper bound of {op}[..]")
        _expect_ltl(e.body, env, locals_, f"body of {op}[..]")
        return LTL

    raise TypeCheckError(f"cannot type expression {e!r}", getattr(e, "pos", None))


def _join_elem(uni: _Unifier, a: Ty, b: Ty, pos: Pos, what: str) -> Ty:
    """Unify two element types, lifting boolean/signal to ltl when the other
    side requires it (sets of formulas may mix signals and formulas)."""
    a = uni.resolve(a)
    b = uni.resolve(b)
    if a == b:
        return a
    if isinstance(a, VarTy) or isinstance(b, VarTy):
        return uni.unify(a, b, pos, what)
    if is_ltl_family(a) and is_ltl_family(b):
        return LTL
    if isinstance(a, SetTy) and isinstance(b, SetTy):
        return SetTy(_join_elem(uni, a.elem, b.elem, pos, what))
    raise TypeCheckError(f"{what}: heterogeneous element types, {a} vs {b}", pos)


def _infer_application(e: FnApp, env: TypeEnv, locals_: dict[str, Ty]) -> Ty:
    name = e.name.text
    defn = env.definitions.get(name)
    if defn is None:
        raise TypeCheckError(f"unbound function '{name}'", e.pos)
    if not defn.params:
        raise TypeCheckError(f"'{name}' is not a function but is applied to arguments", e.pos)
    if len(defn.params) != len(e.args):
        raise TypeCheckError(
            f"'{name}' expects {len(defn.params)} argument(s), got {len(e.args)}", e.pos
        )
    arg_tys = tuple(env.unifier.resolve(infer(a, env, locals_)) for a in e.args)
    key = (name, arg_tys)
    if key in env.instantiations:
        return env.instantiations[key]
    # Placeholder for recursive calls at the same argument types.
    placeholder = env.unifier.fresh()
    env.instantiations[key] = placeholder
    scope = {p.text: t for p, t in zip(defn.params, arg_tys)}
    result = _infer_function_body(defn, env, scope)
    result = env.unifier.unify(placeholder, result, e.pos, f"result of '{name}'")
    env.instantiations[key] = result
    return result


def _infer_function_body(defn: Definition, env: TypeEnv, scope: dict[str, Ty]) -> Ty:
    uni = env.unifier
    result: Ty = uni.fresh()
    for guard, body in defn.bodies:
        body_scope = scope
        if isinstance(guard, Expr):
            if isinstance(guard, BinOp) and guard.kind is BinOpKind.MATCH:
                _expect_ltl(guard.lhs, env, scope, "pattern match subject")
                _check_pattern_freshness(guard.rhs, env, scope)
                captures = {i.text: LTL for i in pattern_identifiers(guard.rhs)}
                body_scope = {**scope, **captures}
            else:
                # Guards are evaluated statically, so they are strictly boolean.
                gty = uni.resolve(infer(guard, env, scope))
                if isinstance(gty, VarTy):
                    uni.unify(gty, BOOL, guard.pos, "guard")
                elif not isinstance(gty, BoolTy):
                    raise TypeCheckError(f"guard must be boolean, found {gty}", guard.pos)
        body_ty = infer(body, env, body_scope)
        result = _join_elem(uni, result, body_ty, body.pos, f"alternatives of '{defn.name.text}'")
    return result


def _check_pattern_freshness(pattern: Expr, env: TypeEnv, scope: dict[str, Ty]) -> None:
    for ident in pattern_identifiers(pattern):
        text = ident.text
        if (
            text in scope
            or text in env.parameters
            or text in env.signals
            or text in env.definitions
        ):
            raise TypeCheckError(f"pattern identifier '{text}' is not fresh", ident.pos)


def check_spec(spec: Spec) -> TypeEnv:
    """Check a parsed specification and return its name environment."""
    env = TypeEnv()

    seen: dict[str, str] = {}

    def declare(name: Ident, what: str) -> None:
        if name.text in seen:
            raise TypeCheckError(
                f"name '{name.text}' declared twice ({seen[name.text]} and {what})", name.pos
            )
        seen[name.text] = what

    for pname, _ in spec.parameters:
        declare(pname, "parameter")
        env.parameters[pname.text] = NAT
    for defn in spec.definitions:
        declare(defn.name, "definition")
        env.definitions[defn.name.text] = defn
    for decl in spec.inputs:
        declare(decl.name, "input")
        env.signals[decl.name.text] = BUS if decl.width is not None else SIGNAL
    for decl in spec.outputs:
        declare(decl.name, "output")
        env.signals[decl.name.text] = BUS if decl.width is not None else SIGNAL

    for pname, value in spec.parameters:
        _expect_nat(value, env, {}, f"parameter '{pname.text}'")
    for decl in list(spec.inputs) + list(spec.outputs):
        if decl.width is not None:
            _expect_nat(decl.width, env, {}, f"width of bus '{decl.name.text}'")

    # Force plain bindings now so unused ill-typed or cyclic ones are caught.
    for defn in spec.definitions:
        if not defn.params:
            env.lookup(defn.name, {})

    for section, entries in (
        ("assumption", spec.assumptions),
        ("invariant", spec.invariants),
        ("guarantee", spec.guarantees),
    ):
        for index, entry in enumerate(entries):
            try:
                _expect_ltl(entry, env, {}, section)
            except TypeCheckError as err:
                raise TypeCheckError(f"{section} {index + 1}: {err.message}", err.pos) from None
    return env
