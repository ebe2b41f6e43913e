import pytest

from minipure.elaborate import ElabError, elaborate, elaborate_prop
from minipure.hott import TERM, build_theory
from minipure.parser import (
    AssumptionTac, AxiomDecl, BackTac, CanonicityDecl, ConstDecl,
    DefinitionDecl, RuleTac, ScriptSyntaxError, TheoremDecl, parse,
    parse_term_text,
)
from minipure.printer import print_term, print_type
from minipure.syntax import (
    PROP, Abs, App, Base, Bound, Const, Free, Fun, aconv, app, fun_ty, type_of,
)


@pytest.fixture(scope="module")
def thy():
    return build_theory()


def test_parse_theorem_item():
    src = '''
    # a comment
    theorem id_typing : "A : U O ==> lam x. x : A -> A"
      apply rule Prod_intro
      apply assumption
      apply assumption
    qed
    '''
    ast = parse(src)
    assert len(ast.items) == 1
    thm = ast.items[0]
    assert isinstance(thm, TheoremDecl)
    assert thm.name == "id_typing"
    assert [type(t) for t in thm.tactics] == [RuleTac, AssumptionTac, AssumptionTac]
    assert thm.tactics[0].name == "Prod_intro"


def test_parse_empty_file():
    assert parse("").items == []
    assert parse("  # only a comment\n").items == []


def test_parse_unbalanced_quote():
    with pytest.raises(ScriptSyntaxError) as exc:
        parse('axiom broken : "a == b\n')
    assert exc.value.line == 1


def test_parse_reports_position():
    with pytest.raises(ScriptSyntaxError) as exc:
        parse('axiom a : "x =="\naxiom b : "y"')
    assert exc.value.line == 1


def test_parse_where_and_back():
    src = '''
    theorem t : "?p ==> ?p"
      apply rule eq_trans where ?b = "lam x. x", ?c = "0" at 2
      apply back 3
      apply assumption at 1
    qed
    '''
    ast = parse(src)
    tac = ast.items[0].tactics[0]
    assert tac.name == "eq_trans"
    assert tac.subgoal == 2
    assert [key for key, _ in tac.insts] == [("b", 0), ("c", 0)]
    assert ast.items[0].tactics[1] == BackTac(3, ast.items[0].tactics[1].line)
    assert ast.items[0].tactics[2].subgoal == 1


def test_parse_other_declarations():
    src = '''
    const w :: "Term => Term"
    axiom w_ax : "w 0 == 0"
    definition two : "succ (succ 0)"
    check_canonicity Nat size 4
    '''
    ast = parse(src)
    kinds = [type(i) for i in ast.items]
    assert kinds == [ConstDecl, AxiomDecl, DefinitionDecl, CanonicityDecl]
    assert ast.items[3].type_name == "Nat"
    assert ast.items[3].size == 4


def test_duplicate_names_rejected():
    with pytest.raises(ScriptSyntaxError):
        parse('axiom a : "0 == 0"\naxiom a : "0 == 0"')


def test_elaborate_ord_axiom_matches_builtin(thy):
    t = elaborate_prop(thy, "!!n. O < S n")
    assert aconv(t, thy.axiom_prop("O_lt_S"))


def test_elaborate_id_typing_shape(thy):
    t = elaborate_prop(thy, "lam x. x : A -> A")
    lam = Const("lam", thy.const_type("lam"))
    prod = Const("Prod", thy.const_type("Prod"))
    has = Const("has_type", thy.const_type("has_type"))
    A = Free("A", TERM)
    expected = app(has, App(lam, Abs("x", TERM, Bound(0))),
                   app(prod, A, Abs("_", TERM, A)))
    assert t == expected


def test_elaborate_syntax_error_position(thy):
    with pytest.raises(ScriptSyntaxError):
        elaborate_prop(thy, "a : ")


def test_elaborate_type_errors(thy):
    with pytest.raises(ElabError):
        elaborate_prop(thy, "O : Nat")  # O is an Ord, has_type wants Terms
    with pytest.raises(ElabError):
        elaborate_prop(thy, "succ O == 0")


def test_elaborate_infers_function_frees(thy):
    t = elaborate_prop(thy, "!!z. z : A ==> P z : U i")
    # P must come out as a meta-function Term => Term, i with type Ord
    from minipure.syntax import free_vars
    frees = dict(free_vars(t))
    assert frees["P"] == Fun(TERM, TERM)
    assert frees["i"] == Base("Ord")


def test_precedences(thy):
    t = elaborate_prop(thy, "f x == g x")
    lhs, rhs = t.fun.arg, t.arg
    assert isinstance(lhs, App) and isinstance(rhs, App)
    t2 = elaborate(thy, "succ n`m")
    # juxtaposition binds tighter than the object application backtick
    head, args = t2.fun, t2.arg
    assert print_term(t2) == "succ n`m"
    t3 = elaborate_prop(thy, "a : A ==> b : B ==> c : C")
    assert print_term(t3) == "a : A ==> b : B ==> c : C"


def test_print_parse_roundtrip_on_all_axioms(thy):
    for name in thy.axiom_names():
        prop = thy.axiom_prop(name)
        printed = print_term(prop)
        back = elaborate_prop(thy, printed)
        assert aconv(back, prop), f"{name}: {printed} reparsed differently"


def test_print_parse_roundtrip_on_definitions(thy):
    for name in thy.definition_names():
        rhs = thy.definition_rhs(name)
        printed = print_term(rhs)
        back = elaborate(thy, printed)
        assert aconv(back, rhs), f"{name}: {printed} reparsed differently"
        assert type_of(back) == type_of(rhs)


def test_print_type_roundtrip():
    from minipure.parser import parse_type_text
    from minipure.elaborate import elaborate_type
    thy = build_theory()
    for ty in [PROP, TERM, Fun(TERM, PROP), fun_ty(TERM, TERM, PROP),
               Fun(Fun(TERM, TERM), TERM)]:
        text = print_type(ty)
        assert elaborate_type(thy, parse_type_text(text)) == ty
