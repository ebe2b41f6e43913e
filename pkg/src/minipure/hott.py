"""The homotopy type theory object logic.

Object-level types and terms share the meta-type Term (Russell-style
universes force the uniform treatment).  Universe levels live in the
meta-type Ord.  The typing judgment is the binary constant has_type,
written ``a : A``; definitional equality is the framework's ``==``.

Axioms are stated in concrete syntax and elaborated at build time, so
the signature below is also a reference for the script language.
"""

from __future__ import annotations

from . import kernel
from .kernel import KernelError, TheoryCtx, Theorem, mk_all_raw, mk_eq
from .syntax import (
    PROP, Abs, App, Base, Bound, Const, Free, Fun, MiniPureError, SVar, TVar,
    Term, app, fun_ty,
)

TERM = Base("Term")
ORD = Base("Ord")


class TheoryError(MiniPureError):
    pass


SIGNATURE: list[tuple[str, object]] = [
    ("has_type", fun_ty(TERM, TERM, PROP)),
    ("U", Fun(ORD, TERM)),
    ("O", ORD),
    ("S", Fun(ORD, ORD)),
    ("<", fun_ty(ORD, ORD, PROP)),
    ("<=", fun_ty(ORD, ORD, PROP)),
    ("Prod", fun_ty(TERM, Fun(TERM, TERM), TERM)),
    ("Sum", fun_ty(TERM, Fun(TERM, TERM), TERM)),
    ("lam", Fun(Fun(TERM, TERM), TERM)),
    ("`", fun_ty(TERM, TERM, TERM)),
    ("pair", fun_ty(TERM, TERM, TERM)),
    ("ind_Sum", fun_ty(fun_ty(TERM, TERM, TERM), TERM, TERM)),
    ("Eq", fun_ty(TERM, TERM, TERM, TERM)),
    ("refl", Fun(TERM, TERM)),
    ("ind_Eq", fun_ty(Fun(TERM, TERM), TERM, TERM)),
    ("Nat", TERM),
    ("0", TERM),
    ("succ", Fun(TERM, TERM)),
    ("ind_Nat", fun_ty(fun_ty(TERM, TERM, TERM), TERM, TERM, TERM)),
    ("+", fun_ty(TERM, TERM, TERM)),
    ("inl", Fun(TERM, TERM)),
    ("inr", Fun(TERM, TERM)),
    ("ind_Coprod", fun_ty(Fun(TERM, TERM), Fun(TERM, TERM), TERM, TERM)),
    ("Empty", TERM),
    ("ind_Empty", Fun(TERM, TERM)),
    ("Unit", TERM),
    ("star", TERM),
    ("ind_Unit", fun_ty(TERM, TERM, TERM)),
    ("univalence", fun_ty(TERM, TERM, TERM)),
]

# Definitions are elaborated in order; later ones may use earlier ones.
DEFINITIONS: list[tuple[str, str]] = [
    ("id", "lam x. x"),
    ("compose", "%g f. lam x. g`(f`x)"),
    ("homotopy", "%A B f g. Prod x:A. Eq (B x) (f`x) (g`x)"),
    ("isequiv",
     "%A B f. Sum u : (Sum g : B -> A. homotopy A (%x. A) (compose g f) id)."
     " (Sum g : B -> A. homotopy B (%x. B) (compose f g) id)"),
    ("equiv", "%A B. Sum f : A -> B. isequiv A B f"),
    ("transport", "%p. ind_Eq (%x. id) p"),
    ("idtoeqv",
     "lam p. pair (transport p)"
     " (ind_Eq (%A. pair (pair id (lam x. refl x)) (pair id (lam x. refl x))) p)"),
]

ORD_AXIOMS: list[tuple[str, str]] = [
    ("O_lt_S", "!!n. O < S n"),
    ("O_le", "!!n. O <= n"),
    ("lt_S", "!!n. n < S n"),
    ("le_S", "!!n. n <= S n"),
    ("lt_mono", "!!m n. m < n ==> S m < S n"),
    ("le_mono", "!!m n. m <= n ==> S m <= S n"),
]

TYPE_AXIOMS: list[tuple[str, str]] = [
    ("U_hierarchy", "?i < ?j ==> U ?i : U ?j"),
    ("U_cumulative", "?A : U ?i ==> ?i <= ?j ==> ?A : U ?j"),

    ("Prod_form",
     "?A : U ?i ==> (!!x. x : ?A ==> ?B x : U ?i) ==> (Prod x : ?A. ?B x) : U ?i"),
    ("Prod_intro",
     "?A : U ?i ==> (!!x. x : ?A ==> ?b x : ?B x)"
     " ==> (lam x. ?b x) : (Prod x : ?A. ?B x)"),
    ("Prod_elim",
     "?f : (Prod x : ?A. ?B x) ==> ?a : ?A ==> ?f`?a : ?B ?a"),
    ("Prod_appl",
     "(!!x. x : ?A ==> ?b x : ?B x) ==> ?a : ?A ==> (lam x. ?b x)`?a == ?b ?a"),
    ("Prod_uniq",
     "?f : (Prod x : ?A. ?B x) ==> (lam x. ?f`x) == ?f"),
    ("Prod_eq",
     "?A : U ?i ==> (!!x. x : ?A ==> ?b x == ?c x)"
     " ==> (lam x. ?b x) == (lam x. ?c x)"),

    ("Sum_form",
     "?A : U ?i ==> (!!x. x : ?A ==> ?B x : U ?i) ==> (Sum x : ?A. ?B x) : U ?i"),
    ("Sum_intro",
     "(!!x. x : ?A ==> ?B x : U ?i) ==> ?a : ?A ==> ?b : ?B ?a"
     " ==> pair ?a ?b : (Sum x : ?A. ?B x)"),
    ("Sum_elim",
     "(!!p. p : (Sum x : ?A. ?B x) ==> ?C p : U ?i)"
     " ==> (!!x y. x : ?A ==> y : ?B x ==> ?f x y : ?C (pair x y))"
     " ==> ?p : (Sum x : ?A. ?B x) ==> ind_Sum ?f ?p : ?C ?p"),
    ("Sum_comp",
     "(!!p. p : (Sum x : ?A. ?B x) ==> ?C p : U ?i)"
     " ==> (!!x y. x : ?A ==> y : ?B x ==> ?f x y : ?C (pair x y))"
     " ==> (!!x. x : ?A ==> ?B x : U ?i) ==> ?a : ?A ==> ?b : ?B ?a"
     " ==> ind_Sum ?f (pair ?a ?b) == ?f ?a ?b"),

    ("Equal_form", "?A : U ?i ==> ?a : ?A ==> ?b : ?A ==> Eq ?A ?a ?b : U ?i"),
    ("Equal_intro", "?a : ?A ==> refl ?a : Eq ?A ?a ?a"),
    ("Equal_elim",
     "(!!x y p. x : ?A ==> y : ?A ==> p : Eq ?A x y ==> ?C x y p : U ?i)"
     " ==> (!!x. x : ?A ==> ?f x : ?C x x (refl x))"
     " ==> ?x : ?A ==> ?y : ?A ==> ?p : Eq ?A ?x ?y"
     " ==> ind_Eq ?f ?p : ?C ?x ?y ?p"),
    ("Equal_comp",
     "(!!x y p. x : ?A ==> y : ?A ==> p : Eq ?A x y ==> ?C x y p : U ?i)"
     " ==> (!!x. x : ?A ==> ?f x : ?C x x (refl x)) ==> ?a : ?A"
     " ==> ind_Eq ?f (refl ?a) == ?f ?a"),

    ("Nat_form", "Nat : U O"),
    ("Nat_intro_0", "0 : Nat"),
    ("Nat_intro_succ", "?n : Nat ==> succ ?n : Nat"),
    ("Nat_elim",
     "(!!n. n : Nat ==> ?C n : U ?i)"
     " ==> (!!n c. n : Nat ==> c : ?C n ==> ?f n c : ?C (succ n))"
     " ==> ?a : ?C 0 ==> ?n : Nat ==> ind_Nat ?f ?a ?n : ?C ?n"),
    ("Nat_comp_0",
     "(!!n. n : Nat ==> ?C n : U ?i)"
     " ==> (!!n c. n : Nat ==> c : ?C n ==> ?f n c : ?C (succ n))"
     " ==> ?a : ?C 0 ==> ind_Nat ?f ?a 0 == ?a"),
    ("Nat_comp_succ",
     "(!!n. n : Nat ==> ?C n : U ?i)"
     " ==> (!!n c. n : Nat ==> c : ?C n ==> ?f n c : ?C (succ n))"
     " ==> ?a : ?C 0 ==> ?n : Nat"
     " ==> ind_Nat ?f ?a (succ ?n) == ?f ?n (ind_Nat ?f ?a ?n)"),

    ("Coprod_form", "?A : U ?i ==> ?B : U ?i ==> ?A + ?B : U ?i"),
    ("Coprod_intro_inl", "?a : ?A ==> ?B : U ?i ==> inl ?a : ?A + ?B"),
    ("Coprod_intro_inr", "?A : U ?i ==> ?b : ?B ==> inr ?b : ?A + ?B"),
    ("Coprod_elim",
     "(!!u. u : ?A + ?B ==> ?C u : U ?i)"
     " ==> (!!x. x : ?A ==> ?c x : ?C (inl x))"
     " ==> (!!y. y : ?B ==> ?d y : ?C (inr y))"
     " ==> ?u : ?A + ?B ==> ind_Coprod ?c ?d ?u : ?C ?u"),
    ("Coprod_comp_inl",
     "(!!u. u : ?A + ?B ==> ?C u : U ?i)"
     " ==> (!!x. x : ?A ==> ?c x : ?C (inl x))"
     " ==> (!!y. y : ?B ==> ?d y : ?C (inr y))"
     " ==> ?a : ?A ==> ind_Coprod ?c ?d (inl ?a) == ?c ?a"),
    # the second coproduct computation rule; contents match the inr case
    ("Coprod_comp_inr",
     "(!!u. u : ?A + ?B ==> ?C u : U ?i)"
     " ==> (!!x. x : ?A ==> ?c x : ?C (inl x))"
     " ==> (!!y. y : ?B ==> ?d y : ?C (inr y))"
     " ==> ?b : ?B ==> ind_Coprod ?c ?d (inr ?b) == ?d ?b"),

    ("Empty_form", "Empty : U O"),
    ("Empty_elim",
     "(!!x. x : Empty ==> ?C x : U ?i) ==> ?z : Empty ==> ind_Empty ?z : ?C ?z"),

    ("Unit_form", "Unit : U O"),
    ("Unit_intro", "star : Unit"),
    ("Unit_elim",
     "(!!x. x : Unit ==> ?C x : U ?i) ==> ?c : ?C star ==> ?a : Unit"
     " ==> ind_Unit ?c ?a : ?C ?a"),
    ("Unit_comp",
     "(!!x. x : Unit ==> ?C x : U ?i) ==> ?c : ?C star"
     " ==> ind_Unit ?c star == ?c"),

    # well-formedness rules (axiomatized; conjectured correct)
    ("Prod_wellform1", "(Prod x : ?A. ?B x) : U ?i ==> ?A : U ?i"),
    ("Prod_wellform2",
     "(Prod x : ?A. ?B x) : U ?i ==> (!!x. x : ?A ==> ?B x : U ?i)"),
    ("Sum_wellform1", "(Sum x : ?A. ?B x) : U ?i ==> ?A : U ?i"),
    ("Sum_wellform2",
     "(Sum x : ?A. ?B x) : U ?i ==> (!!x. x : ?A ==> ?B x : U ?i)"),
    ("Equal_wellform1", "Eq ?A ?a ?b : U ?i ==> ?A : U ?i"),
    ("Equal_wellform2", "Eq ?A ?a ?b : U ?i ==> ?a : ?A"),
    ("Equal_wellform3", "Eq ?A ?a ?b : U ?i ==> ?b : ?A"),
    ("Coprod_wellform1", "?A + ?B : U ?i ==> ?A : U ?i"),
    ("Coprod_wellform2", "?A + ?B : U ?i ==> ?B : U ?i"),
]

UA_AXIOM = ("UA",
            "?A : U ?i ==> ?B : U ?i ==> univalence ?A ?B"
            " : isequiv (Eq (U ?i) ?A ?B) (equiv ?A ?B) idtoeqv")


def pure_theory() -> TheoryCtx:
    """The base framework theory: logical constants plus equal elimination.

    The kernel has no primitive that uses an equation between formulas, so
    the usability of == at formula positions is supplied axiomatically.
    """
    from .elaborate import elaborate_prop
    thy = TheoryCtx.pure()
    return thy.extend_axiom(
        "equal_elim", elaborate_prop(thy, "?p == ?q ==> ?p ==> ?q"))


def build_theory() -> TheoryCtx:
    """The full object theory: signature, definitions and axioms."""
    from .elaborate import elaborate, elaborate_prop, ElabError

    thy = pure_theory()
    thy = thy.extend_type("Term").extend_type("Ord")
    for name, ty in SIGNATURE:
        thy = thy.extend_const(name, ty)
    for name, rhs_text in DEFINITIONS:
        rhs = elaborate(thy, rhs_text)
        thy = thy.extend_definition(name, rhs)
    for name, text in ORD_AXIOMS + TYPE_AXIOMS + [UA_AXIOM]:
        thy = thy.extend_axiom(name, elaborate_prop(thy, text))
    return thy


def define(thy: TheoryCtx, name: str, rhs: Term) -> tuple[TheoryCtx, Theorem]:
    """Extend the theory with a defined constant; returns |- name == rhs."""
    try:
        ext = thy.extend_definition(name, rhs)
    except KernelError as e:
        raise TheoryError(str(e)) from e
    return ext, kernel.axiom(ext, name + "_def")


# ---------------------------------------------------------------------------
# Derived rules of the framework, in formula form for backward proof.
# Each is a kernel derivation; nothing here extends the trusted base.

class _Subst:
    def __init__(self, terms=None, types=None):
        self.terms = terms or {}
        self.types = types or {}


def base_rules(thy: TheoryCtx) -> dict[str, Theorem]:
    a_ty, b_ty = TVar("a"), TVar("b")
    va, vb, vc = (SVar(n, 0, a_ty) for n in "abc")
    f, g = (SVar(n, 0, Fun(a_ty, b_ty)) for n in "fg")
    rules: dict[str, Theorem] = {}

    rules["eq_refl"] = kernel.equality("refl", thy, va)

    ab = kernel.assume(thy, mk_eq(va, vb))
    rules["eq_sym"] = kernel.implies_intro(ab.prop, kernel.equality("sym", ab))

    bc = kernel.assume(thy, mk_eq(vb, vc))
    tr = kernel.equality("trans", ab, bc)
    rules["eq_trans"] = kernel.implies_intro(
        ab.prop, kernel.implies_intro(bc.prop, tr))

    fg = kernel.assume(thy, mk_eq(f, g))
    ab2 = kernel.assume(thy, mk_eq(va, vb))
    rules["eq_comb"] = kernel.implies_intro(
        fg.prop, kernel.implies_intro(ab2.prop, kernel.combination(fg, ab2)))

    x0 = Free("x", a_ty)
    pointwise = kernel.mk_all(x0, mk_eq(App(f, x0), App(g, x0)))
    allfg = kernel.assume(thy, pointwise)
    c = Free("x", a_ty)
    at_c = kernel.forall_elim(allfg, c)
    rules["eq_abs"] = kernel.implies_intro(
        pointwise, kernel.abstract_rule(c, at_c))

    rules["eta"] = kernel.conversion(
        "eta", thy, Abs("x", a_ty, App(f, Bound(0))))

    rules["ext"] = kernel.implies_intro(
        pointwise, kernel.extensionality(at_c))

    rules["equal_elim"] = kernel.axiom(thy, "equal_elim")

    # conversion along == at the subject and the type of a typing judgment
    has = Const("has_type", fun_ty(TERM, TERM, PROP))
    ta, tb, tA, tB = (SVar(n, 0, TERM) for n in ("a", "b", "A", "B"))

    def eq_elim_with(eq_thm, minor):
        inst = kernel.instantiate(
            kernel.axiom(thy, "equal_elim"),
            _Subst({("p", 0): eq_thm.prop.fun.arg,
                    ("q", 0): eq_thm.prop.arg}))
        return kernel.implies_elim(kernel.implies_elim(inst, eq_thm), minor)

    e1 = kernel.assume(thy, mk_eq(ta, tb))
    e2 = kernel.assume(thy, app(has, tb, tA))
    cong = kernel.combination(
        kernel.combination(kernel.equality("refl", thy, has),
                           kernel.equality("sym", e1)),
        kernel.equality("refl", thy, tA))
    out = eq_elim_with(cong, e2)
    rules["conv_tm"] = kernel.implies_intro(
        e1.prop, kernel.implies_intro(e2.prop, out))

    e3 = kernel.assume(thy, mk_eq(tA, tB))
    e4 = kernel.assume(thy, app(has, ta, tB))
    cong2 = kernel.combination(
        kernel.equality("refl", thy, App(has, ta)), kernel.equality("sym", e3))
    out2 = eq_elim_with(cong2, e4)
    rules["conv_ty"] = kernel.implies_intro(
        e3.prop, kernel.implies_intro(e4.prop, out2))

    return rules


# ---------------------------------------------------------------------------
# Ord decision procedure

def ord_numeral(n: int) -> Term:
    t: Term = Const("O", ORD)
    for _ in range(n):
        t = App(Const("S", Fun(ORD, ORD)), t)
    return t


def numeral_value(t: Term) -> int:
    n = 0
    while True:
        match t:
            case Const("O", _):
                return n
            case App(Const("S", _), inner):
                n += 1
                t = inner
            case _:
                raise TheoryError(f"not a closed Ord numeral: {t!r}")


def ord_decide(thy: TheoryCtx, relation: str, i: Term, j: Term) -> Theorem:
    """Derive |- i < j or |- i <= j for closed numerals, from the axioms.

    The derivation peels matching successors with the monotonicity axiom
    and closes with the O-<-S or O-<= base axiom.  Raises when the
    relation does not hold (no theorem exists).
    """
    a, b = numeral_value(i), numeral_value(j)
    if relation == "<":
        if not a < b:
            raise TheoryError(f"relation-false: {a} < {b} does not hold")
        base = kernel.forall_elim(kernel.axiom(thy, "O_lt_S"),
                                  ord_numeral(b - a - 1))
        mono = "lt_mono"
    elif relation == "<=":
        if not a <= b:
            raise TheoryError(f"relation-false: {a} <= {b} does not hold")
        base = kernel.forall_elim(kernel.axiom(thy, "O_le"),
                                  ord_numeral(b - a))
        mono = "le_mono"
    else:
        raise TheoryError(f"unknown Ord relation {relation!r}")
    thm = base
    for k in range(a):
        step = kernel.forall_elim(kernel.axiom(thy, mono), ord_numeral(k))
        step = kernel.forall_elim(step, ord_numeral(b - a + k))
        thm = kernel.implies_elim(step, thm)
    return thm
