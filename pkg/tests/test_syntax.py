import random

import pytest

from minipure.syntax import (
    PROP, Abs, App, Base, Bound, Const, Free, Fun, SVar, TVar, TypeUnifyError,
    TypingError, aconv, app, apply_unifier, beta_normalize, eta_contract,
    fun_ty, mgu_type, shift, subst_bound, type_of,
)

TERM = Base("Term")
ORD = Base("Ord")


class Subst:
    def __init__(self, terms=None, types=None):
        self.terms = terms or {}
        self.types = types or {}


def sv(name, ty, index=0):
    return SVar(name, index, ty)


# ---------------------------------------------------------------------------
# Independent oracle: applicative-order reducer (different strategy from the
# implementation's normal order; both must agree on simply-typed terms).

def oracle_beta(t):
    match t:
        case App(f, a):
            f, a = oracle_beta(f), oracle_beta(a)
            if isinstance(f, Abs):
                return oracle_beta(subst_bound(f.body, a))
            return App(f, a)
        case Abs(h, ty, b):
            return Abs(h, ty, oracle_beta(b))
        case _:
            return t


def test_type_of_imp_constant():
    imp = Const("==>", fun_ty(PROP, PROP, PROP))
    assert type_of(imp) == Fun(PROP, Fun(PROP, PROP))


def test_type_of_identity_abstraction():
    ident = Abs("x", TERM, Bound(0))
    assert type_of(ident) == Fun(TERM, TERM)


def test_type_of_has_type_application():
    has_type = Const("has_type", fun_ty(TERM, TERM, PROP))
    a = Free("a", TERM)
    A = Free("A", TERM)
    assert type_of(app(has_type, a, A)) == PROP


def test_type_of_errors():
    f = Free("f", Fun(TERM, TERM))
    with pytest.raises(TypingError):
        type_of(App(f, Free("p", PROP)))
    with pytest.raises(TypingError):
        type_of(Bound(0))
    with pytest.raises(TypingError):
        type_of(Abs("x", TERM, Bound(1)))


def test_beta_identity_redex():
    a = Free("a", TERM)
    assert beta_normalize(App(Abs("x", TERM, Bound(0)), a)) == a


def test_beta_k_combinator():
    # (lambda x. lambda y. x) a b  -->  a, checked against the oracle
    a, b = Free("a", TERM), Free("b", TERM)
    k = Abs("x", TERM, Abs("y", TERM, Bound(1)))
    t = app(k, a, b)
    assert beta_normalize(t) == a
    assert oracle_beta(t) == a


def test_beta_fixed_point_on_normal_terms():
    f = Free("f", Fun(TERM, TERM))
    t = App(f, Free("a", TERM))
    assert beta_normalize(t) == t


def test_eta_contracts_simple_redex():
    f = Free("f", Fun(TERM, TERM))
    assert eta_contract(Abs("x", TERM, App(f, Bound(0)))) == f


def test_eta_respects_occurrence_side_condition():
    g = Free("g", fun_ty(TERM, TERM, TERM))
    t = Abs("x", TERM, app(g, Bound(0), Bound(0)))
    assert eta_contract(t) == t


def test_eta_inner_binder_used():
    f = Free("f", fun_ty(TERM, TERM, TERM))
    # lambda x. lambda y. f y x: the inner variable is used in argument
    # position of f y, so neither binder contracts.
    t = Abs("x", TERM, Abs("y", TERM, app(f, Bound(0), Bound(1))))
    assert eta_contract(t) == t


def test_eta_chained_contraction():
    f = Free("f", Fun(TERM, TERM))
    # lambda x. (lambda y. f y) x contracts all the way to f
    t = Abs("x", TERM, App(Abs("y", TERM, App(f, Bound(0))), Bound(0)))
    assert eta_contract(t) == f


def test_aconv_alpha_variants_and_mismatches():
    assert aconv(Abs("x", TERM, Bound(0)), Abs("y", TERM, Bound(0)))
    a, b = Free("a", TERM), Free("b", TERM)
    assert not aconv(Abs("x", TERM, a), Abs("x", TERM, b))
    f = Free("f", Fun(TERM, TERM))
    assert aconv(App(f, a), App(f, a))


def test_apply_unifier_direct_assignment():
    x = sv("x", TERM)
    a = Free("a", TERM)
    assert apply_unifier(x, Subst({("x", 0): a})) == a


def test_apply_unifier_paper_style_assignment():
    f = Free("f", Fun(TERM, TERM))
    g = Free("g", Fun(TERM, TERM))
    a = Free("a", TERM)
    x1 = sv("x", Fun(TERM, TERM), index=1)
    t = App(f, App(x1, a))
    assert apply_unifier(t, Subst({("x", 1): g})) == App(f, App(g, a))


def test_apply_unifier_beta_reduces_created_redex():
    x = Free("x", TERM)
    c = Free("c", TERM)
    fv = sv("f", Fun(TERM, TERM))
    t = App(fv, x)
    out = apply_unifier(t, Subst({("f", 0): Abs("y", TERM, c)}))
    assert out == c


def test_apply_unifier_type_respecting():
    x = sv("x", TERM)
    with pytest.raises(TypingError):
        apply_unifier(x, Subst({("x", 0): Free("p", PROP)}))


def test_subst_bound_examples():
    a = Free("a", TERM)
    assert subst_bound(Bound(0), a) == a
    c = Const("c", TERM)
    assert subst_bound(c, a) == c
    # application(bound 0, bound 1) with arg a -> application(a, bound 0):
    # the remaining index refers one binder further out, so it shifts down.
    body = App(Bound(0), Bound(1))
    assert subst_bound(body, a) == App(a, Bound(0))


def test_subst_bound_shifts_argument_under_binder():
    # body (lambda y. b0[outer]) where outer is replaced by Bound(0) of an
    # enclosing context: the argument must be shifted as it moves inside.
    body = Abs("y", TERM, App(Bound(1), Bound(0)))
    arg = Bound(0)  # belongs to some context outside the redex
    assert subst_bound(body, arg) == Abs("y", TERM, App(Bound(1), Bound(0)))


def test_mgu_type_examples():
    a = TVar("a")
    assert mgu_type(Fun(a, PROP), Fun(TERM, PROP)) == {"a": TERM}
    with pytest.raises(TypeUnifyError):
        mgu_type(TERM, ORD)
    with pytest.raises(TypeUnifyError):
        mgu_type(a, Fun(a, PROP))


# ---------------------------------------------------------------------------
# Properties

def random_term(rng, binders, ty, size):
    """Random well-typed term of the requested type over a tiny signature."""
    atoms = [Free("a", TERM), Free("b", TERM)]
    funs = [Free("f", Fun(TERM, TERM)), Free("g", fun_ty(TERM, TERM, TERM))]
    choices = []
    if ty == TERM:
        choices.extend(("atom", "bound", "app", "redex"))
    if isinstance(ty, Fun):
        choices.append("abs")
        choices.append("redex")
    if size <= 1:
        choices = [c for c in choices if c in ("atom", "bound", "abs")]
        if not choices:
            choices = ["abs"]
    kind = rng.choice(choices)
    if kind == "bound":
        spots = [i for i, b in enumerate(binders) if b == ty]
        if spots:
            return Bound(rng.choice(spots))
        kind = "atom" if ty == TERM else "abs"
    if kind == "atom":
        return rng.choice(atoms)
    if kind == "abs":
        assert isinstance(ty, Fun)
        return Abs("x", ty.arg, random_term(rng, (ty.arg,) + binders, ty.res, size - 1))
    if kind == "app":
        f = rng.choice(funs)
        args, res = [], type_of(f)
        while isinstance(res, Fun):
            args.append(random_term(rng, binders, res.arg, size // 2))
            res = res.res
        return app(f, *args)
    # redex: (lambda x:src. body) arg
    src = TERM
    body = random_term(rng, (src,) + binders, ty, size - 1)
    arg = random_term(rng, binders, src, size // 2)
    return App(Abs("x", src, body), arg)


def reduce_random_order(rng, t):
    """Contract beta-redexes in random positions until none remain."""

    def redex_positions(t, path):
        out = []
        if isinstance(t, App):
            if isinstance(t.fun, Abs):
                out.append(path)
            out += redex_positions(t.fun, path + (0,))
            out += redex_positions(t.arg, path + (1,))
        elif isinstance(t, Abs):
            out += redex_positions(t.body, path + (2,))
        return out

    def contract_at(t, path):
        if not path:
            assert isinstance(t, App) and isinstance(t.fun, Abs)
            return subst_bound(t.fun.body, t.arg)
        head, rest = path[0], path[1:]
        if head == 0:
            return App(contract_at(t.fun, rest), t.arg)
        if head == 1:
            return App(t.fun, contract_at(t.arg, rest))
        return Abs(t.hint, t.arg_ty, contract_at(t.body, rest))

    for _ in range(10_000):
        spots = redex_positions(t, ())
        if not spots:
            return t
        t = contract_at(t, rng.choice(spots))
    raise AssertionError("random-order reduction did not terminate")


def test_beta_normal_form_independent_of_reduction_order():
    rng = random.Random(7)
    for _ in range(150):
        ty = rng.choice([TERM, Fun(TERM, TERM)])
        t = random_term(rng, (), ty, rng.randint(1, 7))
        nf = beta_normalize(t)
        assert nf == reduce_random_order(rng, t)
        assert nf == oracle_beta(t)


def test_normalization_preserves_types_and_is_idempotent():
    rng = random.Random(11)
    for _ in range(150):
        ty = rng.choice([TERM, Fun(TERM, TERM), fun_ty(TERM, TERM, TERM)])
        t = random_term(rng, (), ty, rng.randint(1, 7))
        nf = beta_normalize(t)
        assert type_of(nf) == type_of(t)
        assert beta_normalize(nf) == nf
        ec = eta_contract(nf)
        assert type_of(ec) == type_of(t)
        assert eta_contract(ec) == ec


def test_apply_unifier_distributes_over_structure():
    f = Free("f", Fun(TERM, TERM))
    x = sv("x", TERM)
    sigma = Subst({("x", 0): Free("a", TERM)})
    t1 = App(f, x)
    assert apply_unifier(t1, sigma) == App(f, apply_unifier(x, sigma))
    t2 = Abs("y", TERM, App(f, x))
    assert apply_unifier(t2, sigma) == Abs("y", TERM, App(f, apply_unifier(x, sigma)))


def test_shift_roundtrip():
    t = Abs("x", TERM, App(Bound(0), Bound(1)))
    assert shift(shift(t, 3), -3) == t
