"""The trusted kernel.

Theorem values can be produced only by the operations in this module:
axiom, assume, implies_intro, implies_elim, forall_intro, forall_elim,
equality, conversion, abstract_rule, combination, extensionality,
instantiate and trivial.  Everything downstream (lifting, resolution,
the object theory) is derived through these.

Propositions are stored beta-normal.  Where two propositions must agree
(discharging hypotheses, eliminating an implication, chaining a
transitivity), they are compared modulo beta-eta: the framework's
conversion rules make beta-eta-convertible propositions interderivable,
so the liberal comparison is an admissible shortcut, and it is what lets
resolution be replayed through these primitives instead of being trusted
itself.
"""

from __future__ import annotations

import itertools

from .syntax import (
    PROP, Abs, App, Base, Bound, Const, Free, Fun, SVar, TVar, Term, Ty,
    TypingError, abstract_over, apply_unifier, beta_normalize, econv,
    free_names, is_closed, loose_bounds, match_type, occurs_free, shift,
    subst_bound, type_of,
)

TVAR_A = TVar("a")

IMP = "==>"
EQ = "=="
ALL = "!!"


class KernelError(Exception):
    """An inference-rule precondition was violated."""


# ---------------------------------------------------------------------------
# Logical constants (each occurrence carries its instance type)

def imp_const() -> Const:
    return Const(IMP, Fun(PROP, Fun(PROP, PROP)))


def eq_const(ty: Ty) -> Const:
    return Const(EQ, Fun(ty, Fun(ty, PROP)))


def all_const(ty: Ty) -> Const:
    return Const(ALL, Fun(Fun(ty, PROP), PROP))


def mk_imp(p: Term, q: Term) -> Term:
    return App(App(imp_const(), p), q)


def dest_imp(t: Term) -> tuple[Term, Term]:
    match t:
        case App(App(Const(name, _), p), q) if name == IMP:
            return p, q
    raise KernelError(f"not an implication: {t!r}")


def is_imp(t: Term) -> bool:
    match t:
        case App(App(Const(name, _), _), _) if name == IMP:
            return True
    return False


def mk_implies(prems: list[Term], concl: Term) -> Term:
    out = concl
    for p in reversed(prems):
        out = mk_imp(p, out)
    return out


def strip_imp(t: Term, limit: int | None = None) -> tuple[list[Term], Term]:
    prems = []
    while is_imp(t) and (limit is None or len(prems) < limit):
        p, t = dest_imp(t)
        prems.append(p)
    return prems, t


def mk_eq(a: Term, b: Term) -> Term:
    return App(App(eq_const(type_of(a)), a), b)


def dest_eq(t: Term) -> tuple[Term, Term, Ty]:
    match t:
        case App(App(Const(name, Fun(ty, _)), a), b) if name == EQ:
            return a, b, ty
    raise KernelError(f"not an equation: {t!r}")


def is_eq(t: Term) -> bool:
    match t:
        case App(App(Const(name, _), _), _) if name == EQ:
            return True
    return False


def mk_all(x: Free, body_with_x: Term) -> Term:
    return App(all_const(x.ty), Abs(x.name, x.ty, abstract_over(body_with_x, x)))


def mk_all_raw(hint: str, ty: Ty, body: Term) -> Term:
    """All-quantification from an already-abstracted body."""
    return App(all_const(ty), Abs(hint, ty, body))


def dest_all(t: Term) -> tuple[str, Ty, Term]:
    """Return (hint, binder type, body) of an all-quantified formula."""
    match t:
        case App(Const(name, _), Abs(h, ty, b)) if name == ALL:
            return h, ty, b
        case App(Const(name, Fun(Fun(ty, _), _)), f) if name == ALL:
            # eta-contracted operand: treat as binding a trivial body f x
            return "x", ty, App(shift(f, 1), Bound(0))
    raise KernelError(f"not an all-formula: {t!r}")


def is_all(t: Term) -> bool:
    match t:
        case App(Const(name, _), _) if name == ALL:
            return True
    return False


# ---------------------------------------------------------------------------
# Theories

class TheoryCtx:
    """Declared base types, constants and named axioms.

    Extension is append-only and produces a new value; theorems certified
    by an ancestor remain valid in every descendant.
    """

    _ids = itertools.count()

    def __init__(self, base_types, constants, axioms, definitions, parent=None):
        self._base_types = base_types
        self._constants = constants
        self._axioms = axioms
        self._definitions = definitions
        self._id = next(TheoryCtx._ids)
        self._ancestry = (parent._ancestry | {self._id}) if parent else {self._id}

    @staticmethod
    def pure() -> "TheoryCtx":
        consts = {IMP: imp_const().ty,
                  EQ: Fun(TVAR_A, Fun(TVAR_A, PROP)),
                  ALL: Fun(Fun(TVAR_A, PROP), PROP)}
        return TheoryCtx({"prop"}, consts, {}, {})

    @property
    def theory_id(self) -> int:
        return self._id

    def subsumes(self, other_id: int) -> bool:
        return other_id in self._ancestry

    # -- queries

    def base_types(self) -> frozenset:
        return frozenset(self._base_types)

    def const_type(self, name: str) -> Ty | None:
        return self._constants.get(name)

    def axiom_names(self):
        return self._axioms.keys()

    def axiom_prop(self, name: str) -> Term | None:
        return self._axioms.get(name)

    def definition_rhs(self, name: str) -> Term | None:
        return self._definitions.get(name)

    def definition_names(self):
        return self._definitions.keys()

    # -- well-formedness

    def check_type(self, ty: Ty):
        match ty:
            case Base(name):
                if name not in self._base_types:
                    raise KernelError(f"undeclared base type {name}")
            case Fun(a, r):
                self.check_type(a)
                self.check_type(r)
            case _:
                pass

    def certify(self, t: Term, binders: tuple[Ty, ...] = ()) -> Ty:
        """Check t is well-typed and every constant instance is declared."""

        def walk(t: Term, binders):
            match t:
                case Const(name, ty):
                    generic = self._constants.get(name)
                    if generic is None:
                        raise KernelError(f"undeclared constant {name}")
                    try:
                        match_type(generic, ty)
                    except Exception:
                        raise KernelError(
                            f"constant {name} used at type {ty!r}, "
                            f"not an instance of {generic!r}")
                    self.check_type(ty)
                case Free(_, ty) | SVar(_, _, ty):
                    self.check_type(ty)
                case App(f, a):
                    walk(f, binders)
                    walk(a, binders)
                case Abs(_, ty, b):
                    self.check_type(ty)
                    walk(b, (ty,) + binders)
                case _:
                    pass

        walk(t, binders)
        return type_of(t, binders)

    # -- extension

    def extend_type(self, name: str) -> "TheoryCtx":
        if name in self._base_types:
            raise KernelError(f"base type {name} already declared")
        return TheoryCtx(self._base_types | {name}, self._constants,
                         self._axioms, self._definitions, parent=self)

    def extend_const(self, name: str, ty: Ty) -> "TheoryCtx":
        if name in self._constants:
            raise KernelError(f"constant {name} already declared")
        self.check_type(ty)
        return TheoryCtx(self._base_types, {**self._constants, name: ty},
                         self._axioms, self._definitions, parent=self)

    def extend_axiom(self, name: str, prop: Term) -> "TheoryCtx":
        if name in self._axioms:
            raise KernelError(f"axiom {name} already declared")
        if self.certify(prop) != PROP:
            raise KernelError(f"axiom {name} is not a proposition")
        if loose_bounds(prop):
            raise KernelError(f"axiom {name} has loose bound variables")
        prop = beta_normalize(prop)
        return TheoryCtx(self._base_types, self._constants,
                         {**self._axioms, name: prop}, self._definitions,
                         parent=self)

    def extend_definition(self, name: str, rhs: Term) -> "TheoryCtx":
        """Declare a fresh constant name == rhs; the equation becomes an axiom."""
        if name in self._constants:
            raise KernelError(f"name collision: constant {name} exists")
        if not is_closed(rhs) or free_names(rhs):
            raise KernelError(f"definition of {name} has a non-closed right side")
        rhs = beta_normalize(rhs)
        ty = self.certify(rhs)
        eqn = beta_normalize(mk_eq(Const(name, ty), rhs))
        return TheoryCtx(self._base_types, {**self._constants, name: ty},
                         {**self._axioms, name + "_def": eqn},
                         {**self._definitions, name: rhs}, parent=self)


# ---------------------------------------------------------------------------
# Theorems

_KERNEL_TOKEN = object()


class Theorem:
    """A certified formula with hypotheses; constructible only here."""

    __slots__ = ("_hyps", "_prop", "_theory")

    def __init__(self, hyps, prop, theory, *, _token=None):
        if _token is not _KERNEL_TOKEN:
            raise KernelError(
                "Theorem values may only be constructed by kernel operations")
        object.__setattr__(self, "_hyps", hyps)
        object.__setattr__(self, "_prop", prop)
        object.__setattr__(self, "_theory", theory)

    def __setattr__(self, name, value):
        raise AttributeError("Theorem values are immutable")

    @property
    def hyps(self) -> tuple[Term, ...]:
        return self._hyps

    @property
    def prop(self) -> Term:
        return self._prop

    @property
    def theory(self) -> TheoryCtx:
        return self._theory

    def __repr__(self):
        if self._hyps:
            return f"<Theorem [{len(self._hyps)} hyps] {self._prop!r}>"
        return f"<Theorem {self._prop!r}>"


def _mk(hyps, prop, theory) -> Theorem:
    return Theorem(tuple(hyps), prop, theory, _token=_KERNEL_TOKEN)


def _dedup(hyps):
    out = []
    for h in hyps:
        if not any(h == o for o in out):
            out.append(h)
    return tuple(out)


def _union(*hyp_lists):
    out = []
    for hs in hyp_lists:
        out.extend(hs)
    return _dedup(out)


def _join_theory(*thms: Theorem) -> TheoryCtx:
    thy = thms[0].theory
    for t in thms[1:]:
        if t.theory.subsumes(thy.theory_id):
            thy = t.theory
        elif not thy.subsumes(t.theory.theory_id):
            raise KernelError("theorems from unrelated theories")
    return thy


def _check_prop(thy: TheoryCtx, p: Term, what: str) -> Term:
    if loose_bounds(p):
        raise KernelError(f"{what} has loose bound variables")
    ty = thy.certify(p)
    if ty != PROP:
        raise KernelError(f"{what} is not a proposition (type {ty!r})")
    return beta_normalize(p)


# ---------------------------------------------------------------------------
# The thirteen operations

def axiom(thy: TheoryCtx, name: str) -> Theorem:
    prop = thy.axiom_prop(name)
    if prop is None:
        raise KernelError(f"unknown axiom: {name}")
    return _mk((), prop, thy)


def assume(thy: TheoryCtx, p: Term) -> Theorem:
    p = _check_prop(thy, p, "assumption")
    return _mk((p,), p, thy)


def implies_intro(p: Term, thm: Theorem) -> Theorem:
    """Discharge p from the hypotheses (vacuously if absent)."""
    p = _check_prop(thm.theory, p, "discharged formula")
    hyps = tuple(h for h in thm.hyps if not econv(h, p))
    return _mk(hyps, mk_imp(p, thm.prop), thm.theory)


def implies_elim(pq: Theorem, p: Theorem) -> Theorem:
    ante, concl = dest_imp(pq.prop)
    if not econv(ante, p.prop):
        raise KernelError(
            f"antecedent mismatch:\n  {ante!r}\nvs\n  {p.prop!r}")
    return _mk(_union(pq.hyps, p.hyps), concl, _join_theory(pq, p))


def forall_intro(x: Free, thm: Theorem) -> Theorem:
    for h in thm.hyps:
        if occurs_free(x.name, h):
            raise KernelError(
                f"cannot generalize {x.name}: free in a hypothesis")
    return _mk(thm.hyps, mk_all(x, thm.prop), thm.theory)


def forall_elim(thm: Theorem, t: Term) -> Theorem:
    _, ty, body = dest_all(thm.prop)
    actual = thm.theory.certify(t)
    if actual != ty:
        raise KernelError(
            f"instantiation type mismatch: expected {ty!r}, got {actual!r}")
    if loose_bounds(t):
        raise KernelError("instantiation term has loose bound variables")
    return _mk(thm.hyps, beta_normalize(subst_bound(body, t)), thm.theory)


def equality(kind: str, *args) -> Theorem:
    if kind == "refl":
        thy, t = args
        if loose_bounds(t):
            raise KernelError("refl of a term with loose bound variables")
        thy.certify(t)
        t = beta_normalize(t)
        return _mk((), mk_eq(t, t), thy)
    if kind == "sym":
        (thm,) = args
        a, b, ty = dest_eq(thm.prop)
        return _mk(thm.hyps, App(App(eq_const(ty), b), a), thm.theory)
    if kind == "trans":
        ab, bc = args
        a, b, ty = dest_eq(ab.prop)
        b2, c, ty2 = dest_eq(bc.prop)
        if ty != ty2:
            raise KernelError("transitivity across different types")
        if not econv(b, b2):
            raise KernelError(
                f"middle term mismatch:\n  {b!r}\nvs\n  {b2!r}")
        return _mk(_union(ab.hyps, bc.hyps), App(App(eq_const(ty), a), c),
                   _join_theory(ab, bc))
    raise KernelError(f"unknown equality kind: {kind}")


def conversion(kind: str, thy: TheoryCtx, t: Term) -> Theorem:
    if loose_bounds(t):
        raise KernelError("conversion of a term with loose bound variables")
    thy.certify(t)
    if kind == "alpha":
        if not isinstance(t, Abs):
            raise KernelError("alpha conversion expects an abstraction")
        reduct = t  # positional binders make renaming the identity
    elif kind == "beta":
        match t:
            case App(Abs(_, _, body), a):
                reduct = subst_bound(body, a)
            case _:
                raise KernelError(f"not a beta redex: {t!r}")
    elif kind == "eta":
        match t:
            case Abs(_, _, App(f, Bound(0))) if 0 not in loose_bounds(f):
                reduct = shift(f, -1)
            case _:
                raise KernelError(f"not an eta redex: {t!r}")
    else:
        raise KernelError(f"unknown conversion kind: {kind}")
    return _mk((), mk_eq(beta_normalize(t), beta_normalize(reduct)), thy)


def abstract_rule(x: Free, thm: Theorem) -> Theorem:
    a, b, ty = dest_eq(thm.prop)
    for h in thm.hyps:
        if occurs_free(x.name, h):
            raise KernelError(
                f"cannot abstract {x.name}: free in a hypothesis")
    la = Abs(x.name, x.ty, abstract_over(a, x))
    lb = Abs(x.name, x.ty, abstract_over(b, x))
    return _mk(thm.hyps, App(App(eq_const(Fun(x.ty, ty)), la), lb), thm.theory)


def combination(fg: Theorem, ab: Theorem) -> Theorem:
    f, g, fty = dest_eq(fg.prop)
    a, b, aty = dest_eq(ab.prop)
    if not isinstance(fty, Fun):
        raise KernelError("combination: left equation is not at function type")
    if fty.arg != aty:
        raise KernelError(
            f"combination type mismatch: {fty!r} applied to {aty!r}")
    prop = mk_eq(beta_normalize(App(f, a)), beta_normalize(App(g, b)))
    return _mk(_union(fg.hyps, ab.hyps), prop, _join_theory(fg, ab))


def extensionality(thm: Theorem) -> Theorem:
    """From f x == g x (x free, not in f, g, or hypotheses) derive f == g.

    Built from eta-conversion, symmetry, abstraction and transitivity; not
    a new primitive.
    """
    lhs, rhs, _ = dest_eq(thm.prop)
    match lhs, rhs:
        case App(f, Free(xn, xty) as x), App(g, Free(xn2, xty2)):
            if xn != xn2 or xty != xty2:
                raise KernelError("extensionality: sides apply different variables")
        case _:
            raise KernelError(f"extensionality expects f x == g x, got {thm.prop!r}")
    if occurs_free(xn, f) or occurs_free(xn, g):
        raise KernelError(f"extensionality: {xn} occurs in a function side")
    for h in thm.hyps:
        if occurs_free(xn, h):
            raise KernelError(f"extensionality: {xn} free in a hypothesis")
    thy = thm.theory
    eta_f = conversion("eta", thy, Abs(xn, xty, App(shift(f, 1), Bound(0))))
    step1 = equality("sym", eta_f)                       # f == (lam x. f x)
    step2 = abstract_rule(x, thm)                        # (lam x. f x) == (lam x. g x)
    step3 = equality("trans", step1, step2)              # f == (lam x. g x)
    eta_g = conversion("eta", thy, Abs(xn, xty, App(shift(g, 1), Bound(0))))
    return equality("trans", step3, eta_g)               # f == g


def instantiate(thm: Theorem, sigma) -> Theorem:
    """Apply a type-respecting assignment of schematic variables."""
    for key in sigma.terms:
        if not (isinstance(key, tuple) and len(key) == 2
                and isinstance(key[0], str) and isinstance(key[1], int)):
            raise KernelError(
                "only schematic variables may be instantiated")
    thy = thm.theory
    try:
        prop = apply_unifier(thm.prop, sigma)
        hyps = tuple(apply_unifier(h, sigma) for h in thm.hyps)
    except TypingError as e:
        raise KernelError(f"instantiation is not type-respecting: {e}") from e
    for t in (prop, *hyps):
        thy.certify(t)
    return _mk(_dedup(hyps), prop, thy)


def trivial(thy: TheoryCtx, p: Term) -> Theorem:
    p = _check_prop(thy, p, "goal")
    return _mk((), mk_imp(p, p), thy)
