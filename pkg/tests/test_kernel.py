import pytest

from minipure import kernel
from minipure.kernel import (
    KernelError, TheoryCtx, Theorem, abstract_rule, assume, axiom,
    combination, conversion, dest_eq, equality, extensionality, forall_elim,
    forall_intro, implies_elim, implies_intro, instantiate, mk_all, mk_eq,
    mk_imp, trivial,
)
from minipure.syntax import (
    PROP, Abs, App, Base, Bound, Const, Free, Fun, SVar, app, fun_ty,
)

TERM = Base("Term")


@pytest.fixture(scope="module")
def thy():
    t = TheoryCtx.pure()
    t = t.extend_type("Term")
    t = t.extend_const("c", TERM)
    t = t.extend_const("d", TERM)
    t = t.extend_const("h", Fun(TERM, TERM))
    t = t.extend_axiom("c_eq_d", mk_eq(Const("c", TERM), Const("d", TERM)))
    return t


class Subst:
    def __init__(self, terms=None, types=None):
        self.terms = terms or {}
        self.types = types or {}


def fv(name, ty=TERM):
    return Free(name, ty)


def test_construction_is_kernel_only(thy):
    with pytest.raises(KernelError):
        Theorem((), mk_eq(fv("a"), fv("a")), thy)
    thm = assume(thy, mk_eq(fv("a"), fv("a")))
    with pytest.raises(AttributeError):
        thm.prop = None


def test_axiom_lookup(thy):
    thm = axiom(thy, "c_eq_d")
    assert thm.hyps == ()
    assert thm.prop == mk_eq(Const("c", TERM), Const("d", TERM))
    with pytest.raises(KernelError):
        axiom(thy, "nonexistent")


def test_assume(thy):
    p = mk_eq(fv("a"), fv("b"))
    thm = assume(thy, p)
    assert thm.hyps == (p,)
    assert thm.prop == p
    with pytest.raises(KernelError):
        assume(thy, fv("a"))  # not a proposition


def test_implies_intro_discharges(thy):
    p = mk_eq(fv("a"), fv("b"))
    q = assume(thy, p)
    out = implies_intro(p, q)
    assert out.hyps == ()
    assert out.prop == mk_imp(p, p)


def test_implies_intro_vacuous_discharge(thy):
    p = mk_eq(fv("a"), fv("a"))
    r = mk_eq(fv("b"), fv("b"))
    thm = assume(thy, p)
    out = implies_intro(r, thm)
    assert out.hyps == (p,)
    assert out.prop == mk_imp(r, p)


def test_implies_intro_keeps_other_hypotheses(thy):
    p = mk_eq(fv("a"), fv("b"))
    r = mk_eq(fv("b"), fv("c"))
    both = equality("trans", assume(thy, p), assume(thy, r))
    assert set(both.hyps) == {p, r}
    out = implies_intro(p, both)
    assert out.hyps == (r,)


def test_implies_elim(thy):
    p = mk_eq(fv("a"), fv("a"))
    q = mk_eq(fv("b"), fv("b"))
    pq = implies_intro(p, assume(thy, q))
    out = implies_elim(pq, assume(thy, p))
    assert out.prop == q
    # hypotheses of both inputs are unioned: {q} from pq, {p} from the minor
    assert set(out.hyps) == {q, p}
    with pytest.raises(KernelError):
        implies_elim(assume(thy, p), assume(thy, p))  # not an implication
    with pytest.raises(KernelError):
        implies_elim(pq, assume(thy, q))  # antecedent mismatch


def test_forall_intro_and_side_condition(thy):
    x = fv("x")
    p = mk_eq(App(Const("h", Fun(TERM, TERM)), x), x)
    thm = implies_intro(p, assume(thy, p))
    gen = forall_intro(x, thm)
    assert gen.prop == mk_all(x, thm.prop)
    with pytest.raises(KernelError):
        forall_intro(x, assume(thy, p))  # x free in hypothesis


def test_forall_elim(thy):
    x = fv("x")
    p = mk_eq(x, x)
    gen = forall_intro(x, implies_intro(p, assume(thy, p)))
    inst = forall_elim(gen, Const("c", TERM))
    c = Const("c", TERM)
    assert inst.prop == mk_imp(mk_eq(c, c), mk_eq(c, c))
    with pytest.raises(KernelError):
        forall_elim(gen, Free("p", PROP))  # ill-typed instantiation
    with pytest.raises(KernelError):
        forall_elim(inst, c)  # shape mismatch


def test_equality_kinds(thy):
    a = fv("a")
    refl = equality("refl", thy, a)
    assert refl.prop == mk_eq(a, a)
    ab = assume(thy, mk_eq(fv("a"), fv("b")))
    sym = equality("sym", ab)
    assert sym.prop == mk_eq(fv("b"), fv("a"))
    bc = assume(thy, mk_eq(fv("b"), fv("c")))
    tr = equality("trans", ab, bc)
    assert tr.prop == mk_eq(fv("a"), fv("c"))
    assert set(tr.hyps) == {ab.prop, bc.prop}
    with pytest.raises(KernelError):
        equality("trans", ab, assume(thy, mk_eq(fv("x"), fv("c"))))


def test_conversion_beta(thy):
    a = fv("a")
    redex = App(Abs("x", TERM, Bound(0)), a)
    thm = conversion("beta", thy, redex)
    # the stored proposition is beta-normal on both sides
    assert thm.prop == mk_eq(a, a)
    with pytest.raises(KernelError):
        conversion("beta", thy, Const("c", TERM))


def test_conversion_eta(thy):
    f = fv("f", Fun(TERM, TERM))
    redex = Abs("x", TERM, App(f, Bound(0)))
    thm = conversion("eta", thy, redex)
    # propositions are beta-normal but not eta-contracted, so the redex
    # survives on the left: |- (lam x. f x) == f
    assert thm.prop == mk_eq(redex, f)
    g = fv("g", fun_ty(TERM, TERM, TERM))
    with pytest.raises(KernelError):
        conversion("eta", thy, Abs("x", TERM, app(g, Bound(0), Bound(0))))


def test_conversion_alpha(thy):
    t = Abs("x", TERM, Bound(0))
    thm = conversion("alpha", thy, t)
    assert thm.prop == mk_eq(t, t)


def test_abstract_rule(thy):
    x = fv("x")
    h = Const("h", Fun(TERM, TERM))
    thm = equality("refl", thy, App(h, x))
    out = abstract_rule(x, thm)
    lam = Abs("x", TERM, App(h, Bound(0)))
    assert out.prop == mk_eq(lam, lam)
    hyp = assume(thy, mk_eq(App(h, x), x))
    with pytest.raises(KernelError):
        abstract_rule(x, hyp)  # x free in hypothesis
    with pytest.raises(KernelError):
        abstract_rule(x, implies_intro(hyp.prop, hyp))  # not an equation


def test_combination(thy):
    f = fv("f", Fun(TERM, TERM))
    g = fv("g", Fun(TERM, TERM))
    fg = assume(thy, mk_eq(f, g))
    ab = assume(thy, mk_eq(fv("a"), fv("b")))
    out = combination(fg, ab)
    assert out.prop == mk_eq(App(f, fv("a")), App(g, fv("b")))
    refl_f = equality("refl", thy, f)
    cong = combination(refl_f, ab)
    assert cong.prop == mk_eq(App(f, fv("a")), App(f, fv("b")))
    with pytest.raises(KernelError):
        combination(ab, ab)  # sides not of function type


def test_extensionality(thy):
    f = fv("f", Fun(TERM, TERM))
    x = fv("x")
    # |- f x == f x by congruence; the refl path yields |- f == f
    fx_eq = combination(equality("refl", thy, f), equality("refl", thy, x))
    ext = extensionality(fx_eq)
    assert ext.prop == mk_eq(f, f)
    # side condition: x occurs free in a function side
    g2 = fv("g2", fun_ty(TERM, TERM, TERM))
    gx = App(g2, x)  # g2 x : Term => Term mentions x
    bad = combination(equality("refl", thy, gx), equality("refl", thy, x))
    with pytest.raises(KernelError):
        extensionality(bad)


def test_extensionality_matches_paper_derivation(thy):
    """Replay the eta/sym/ABS/trans/trans derivation by hand and compare."""
    f = fv("f", Fun(TERM, TERM))
    g = fv("g", Fun(TERM, TERM))
    x = fv("x")
    thm = assume(thy, mk_eq(App(f, x), App(g, x)))
    # the hypothesis mentions x, so extensionality must refuse
    with pytest.raises(KernelError):
        extensionality(thm)
    # discharge and rebuild a hypothesis-free instance at concrete functions
    h = Const("h", Fun(TERM, TERM))
    inst = combination(equality("refl", thy, h), equality("refl", thy, x))
    via_op = extensionality(inst)

    eta_h = conversion("eta", thy, Abs("x", TERM, App(h, Bound(0))))
    step1 = equality("sym", eta_h)
    step2 = abstract_rule(x, inst)
    step3 = equality("trans", step1, step2)
    by_hand = equality("trans", step3, eta_h)
    assert via_op.prop == by_hand.prop
    assert via_op.hyps == by_hand.hyps


def test_instantiate(thy):
    p = SVar("p", 0, PROP)
    triv = trivial(thy, p)
    q = mk_eq(fv("a"), fv("a"))
    out = instantiate(triv, Subst({("p", 0): q}))
    assert out.prop == mk_imp(q, q)
    with pytest.raises(KernelError):
        instantiate(triv, Subst({"p": q}))  # free-variable-style key rejected
    with pytest.raises(KernelError):
        instantiate(triv, Subst({("p", 0): fv("a")}))  # ill-typed assignment


def test_trivial(thy):
    q = mk_eq(fv("a"), fv("b"))
    thm = trivial(thy, q)
    assert thm.hyps == ()
    assert thm.prop == mk_imp(q, q)
    with pytest.raises(KernelError):
        trivial(thy, fv("x"))


def test_hypotheses_monotone(thy):
    # output hypotheses are always within the union of input hypotheses
    p = mk_eq(fv("a"), fv("b"))
    q = mk_eq(fv("b"), fv("c"))
    tp, tq = assume(thy, p), assume(thy, q)
    tr = equality("trans", tp, tq)
    assert set(tr.hyps) <= set(tp.hyps) | set(tq.hyps)
    out = implies_intro(p, tr)
    assert set(out.hyps) <= set(tr.hyps)


def test_instantiate_commutes_with_implies_elim(thy):
    import random
    rng = random.Random(3)
    closed = [Const("c", TERM), Const("d", TERM),
              App(Const("h", Fun(TERM, TERM)), Const("c", TERM))]
    for _ in range(25):
        t1, t2 = rng.choice(closed), rng.choice(closed)
        x = SVar("x", 0, TERM)
        p = mk_eq(x, x)
        q = mk_eq(t2, t2)
        pq = implies_intro(p, assume(thy, q))  # vacuous: |- p ==> q
        sigma = Subst({("x", 0): t1})
        a = implies_elim(instantiate(pq, sigma),
                         instantiate(assume(thy, p), sigma))
        b = instantiate(implies_elim(pq, assume(thy, p)), sigma)
        assert a.prop == b.prop
        assert set(a.hyps) == set(b.hyps)


def test_theory_extension_keeps_old_theorems(thy):
    thm = axiom(thy, "c_eq_d")
    ext = thy.extend_const("fresh_const", TERM)
    assert ext.subsumes(thm.theory.theory_id)
    # theorems of the ancestor can be combined with new-theory theorems
    refl = equality("refl", ext, Const("fresh_const", TERM))
    both = equality("trans", thm, equality("refl", ext, Const("d", TERM)))
    assert both.theory.subsumes(thy.theory_id)
    assert refl.theory.theory_id == ext.theory_id
