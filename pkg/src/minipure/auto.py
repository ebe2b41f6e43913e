"""Semi-automated proof methods built on resolution.

The search prover runs depth-first over the first subgoal, trying
assumption, cached subproofs, definition unfolding and a head-indexed
rule table.  The certified normalizer turns reduction and definitional
unfolding into kernel equations; together they back the ``auto`` and
``definitional`` proof methods available to scripts, and the typing /
step certification used by the canonicity oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import kernel, reduction
from .hott import ORD, TERM, TheoryError, base_rules, ord_decide
from .kernel import (
    KernelError, TheoryCtx, Theorem, dest_eq, is_eq, mk_eq, mk_implies,
    strip_imp,
)
from .syntax import (
    Abs, App, Bound, Const, Free, SVar, Term, aconv, app, beta_normalize,
    econv, schematic_vars, strip_app, subst_bound,
)
from .tactics import (
    ProofState, Rule, TacticError, Unifier, _compose_at, assumption,
    finish, init_goal, open_telescope, premise_resolve, resolve, rule_of,
)

# conclusions of these need no automation beyond unification, and they are
# tried in this order when their head bucket matches
TYPING_RULE_ORDER = [
    "Nat_form", "Nat_intro_0", "Nat_intro_succ",
    "Unit_form", "Unit_intro", "Empty_form",
    "Equal_form", "Equal_intro",
    "Prod_form", "Prod_intro", "Prod_elim",
    "Sum_form", "Sum_intro",
    "Coprod_form", "Coprod_intro_inl", "Coprod_intro_inr",
    "U_hierarchy",
    "Sum_elim", "Equal_elim", "Nat_elim", "Coprod_elim", "Unit_elim",
    "Empty_elim",
]

EQ_RULE_ORDER = [
    "Prod_appl", "Equal_comp", "Nat_comp_0", "Nat_comp_succ",
    "Unit_comp", "Coprod_comp_inl", "Coprod_comp_inr", "Sum_comp",
]

ORD_RULE_ORDER = ["O_lt_S", "O_le", "lt_S", "le_S", "lt_mono", "le_mono"]


def _concl_of(prop: Term) -> Term:
    tele = open_telescope(prop)
    return tele.concl


def _judgment_head(concl: Term):
    """("has_type", subject-head-name | None) / ("==", lhs-head) / etc."""
    head, args = strip_app(concl)
    if isinstance(head, Const):
        if head.name == "has_type" and len(args) == 2:
            sh, _ = strip_app(args[0])
            return ("has_type", sh.name if isinstance(sh, Const) else None)
        if head.name == "==" and len(args) == 2:
            sh, _ = strip_app(args[0])
            return ("==", sh.name if isinstance(sh, Const) else None)
        if head.name in ("<", "<=") and len(args) == 2:
            return (head.name, None)
    return (None, None)


class AutoProver:
    """Bounded backward search over the theory's rules."""

    def __init__(self, thy: TheoryCtx, extra_rules: dict[str, Theorem] | None = None,
                 max_unifiers: int = 8, search_depth: int = 10,
                 depth: int = 24, budget: int = 6000):
        self.thy = thy
        self.max_unifiers = max_unifiers
        self.search_depth = search_depth
        self.depth = depth
        self.budget = budget
        self.rules: dict[str, Theorem] = dict(base_rules(thy))
        for name in thy.axiom_names():
            self.rules[name] = kernel.axiom(thy, name)
        if extra_rules:
            self.rules.update(extra_rules)
        self._rule_cache: dict[str, Rule] = {}
        self.cache: dict[Term, Theorem | None] = {}
        self._in_progress: set[Term] = set()
        self._sig_types = None

    # -- rule access

    def rule(self, name: str) -> Rule:
        if name not in self._rule_cache:
            self._rule_cache[name] = rule_of(self.rules[name])
        return self._rule_cache[name]

    def signature_types(self):
        if self._sig_types is None:
            from .hott import SIGNATURE
            self._sig_types = dict(SIGNATURE)
        return self._sig_types

    # -- public entry points

    def prove(self, goal: Term) -> Theorem | None:
        """A kernel theorem for the goal, or None if the search fails."""
        goal = beta_normalize(goal)
        closed = not schematic_vars(goal)
        if closed:
            if goal in self.cache:
                return self.cache[goal]
            if goal in self._in_progress:
                return None
            self._in_progress.add(goal)
        try:
            state = init_goal(self.thy, goal)
            out = self._search(state, self.depth, [self.budget])
            thm = finish(out)[0] if out is not None else None
        finally:
            if closed:
                self._in_progress.discard(goal)
        if closed:
            self.cache[goal] = thm
        return thm

    def prove_typing(self, term: Term, type_term: Term) -> Theorem | None:
        has = Const("has_type", self.thy.const_type("has_type"))
        return self.prove(app(has, term, type_term))

    def certify_step(self, t: Term, t2: Term) -> Theorem | None:
        """A kernel theorem |- t == t2 for a single reduction step."""
        thm = self.equation(t, t2)
        if thm is not None and not thm.hyps:
            return thm
        return None

    # -- search

    def _search(self, state: ProofState, depth: int, budget) -> ProofState | None:
        if state.n_subgoals == 0:
            return state
        if depth <= 0 or budget[0] <= 0:
            return None
        budget[0] -= 1
        subgoal = state.subgoals()[0]

        for succ in self._candidates(state, subgoal, depth, budget):
            out = self._search(succ, depth - 1, budget)
            if out is not None:
                return out
        return None

    def _candidates(self, state: ProofState, subgoal: Term, depth, budget):
        yield from assumption(state, 1, self.max_unifiers, self.search_depth)
        yield from self._limited(premise_resolve(
            state, 1, self.max_unifiers, self.search_depth))

        if not schematic_vars(subgoal):
            if subgoal not in self._in_progress:
                # delegate to an independent, cached subproblem
                sub = self.prove(subgoal)
                if sub is not None:
                    try:
                        yield _compose_at(state, 1, sub, [], Unifier())
                    except (KernelError, TacticError):
                        pass
                return
            # we are that subproblem: fall through to the rule search

        concl = _concl_of(subgoal)
        kind, head = _judgment_head(concl)
        for name in self._rule_names_for(kind, head, concl):
            try:
                for succ in self._limited(resolve(
                        state, 1, self.rule(name),
                        self.max_unifiers, self.search_depth)):
                    yield succ
            except (TacticError, KernelError):
                continue
        if kind == "has_type" and head is not None \
                and self.thy.definition_rhs(head) is not None:
            succ = self._unfold_subject(state, concl)
            if succ is not None:
                yield succ
        if kind == "==":
            succ = self.definitional(state, 1)
            if succ is not None:
                yield succ

    def _limited(self, it, k: int = 4):
        return itertools.islice(it, k)

    def _rule_names_for(self, kind, head, concl):
        names = []
        if kind == "has_type":
            for name in TYPING_RULE_ORDER:
                r = self.rule(name)
                _, rhead = _judgment_head(r.concl)
                if head is None or rhead is None or rhead == head:
                    names.append(name)
            names.append("U_cumulative")
        elif kind == "==":
            names.append("eq_refl")
            for name in EQ_RULE_ORDER:
                r = self.rule(name)
                _, rhead = _judgment_head(r.concl)
                if head is None or rhead is None or rhead == head:
                    names.append(name)
        elif kind in ("<", "<="):
            names.extend(ORD_RULE_ORDER)
        return [n for n in names if n in self.rules]

    # -- definition unfolding

    def unfold_head_eq(self, t: Term) -> Theorem | None:
        """|- t == t' where the defined head constant of t is unfolded."""
        head, args = strip_app(t)
        if not isinstance(head, Const):
            return None
        if self.thy.definition_rhs(head.name) is None:
            return None
        eq = kernel.axiom(self.thy, head.name + "_def")
        for a in args:
            eq = kernel.combination(eq, kernel.equality("refl", self.thy, a))
        return eq

    def _unfold_subject(self, state: ProofState, concl) -> ProofState | None:
        """Resolve a typing subgoal via conv_tm plus the unfolding equation."""
        _, cargs = strip_app(concl)
        eq = self.unfold_head_eq(cargs[0])
        if eq is None:
            return None
        try:
            mid = next(resolve(state, 1, self.rule("conv_tm"),
                               self.max_unifiers, self.search_depth), None)
            if mid is None:
                return None
            out = next(resolve(mid, 1, rule_of(eq),
                               self.max_unifiers, self.search_depth), None)
            return out
        except (TacticError, KernelError):
            return None

    # -- certified normalization

    def equation(self, t: Term, goal_rhs: Term | None = None,
                 hyp_context: tuple[Term, ...] = (),
                 unfold_defs: bool = False, fuel: int = 200) -> Theorem | None:
        """A kernel theorem t == nf by reduction (and optional unfolding).

        When goal_rhs is given, normalization runs on both sides and the
        equations are joined; hypotheses in hyp_context may be assumed to
        discharge typing side conditions (they appear among the result's
        hypotheses).
        """
        nf1, c1 = self._norm_conv(t, hyp_context, unfold_defs, [fuel])
        if goal_rhs is None:
            return c1 if c1 is not None else kernel.equality("refl", self.thy, t)
        nf2, c2 = self._norm_conv(goal_rhs, hyp_context, unfold_defs, [fuel])
        if not econv(nf1, nf2):
            return None
        if c1 is None:
            c1 = kernel.equality("refl", self.thy, t)
        if c2 is None:
            c2 = kernel.equality("refl", self.thy, goal_rhs)
        try:
            return kernel.equality("trans", c1, kernel.equality("sym", c2))
        except KernelError:
            return None

    def _norm_conv(self, t: Term, hyps, unfold_defs, fuel):
        """(normal form, conv theorem or None), certified step by step."""
        current = t
        total: Theorem | None = None

        def push(conv: Theorem, new: Term):
            nonlocal total, current
            total = conv if total is None else \
                kernel.equality("trans", total, conv)
            current = new

        while fuel[0] > 0:
            fuel[0] -= 1
            stepped = False
            # head steps at the root spine
            red = reduction.head_contract(current)
            if red is not None:
                conv = self._comp_step_thm(current, red, hyps)
                if conv is not None:
                    push(conv, red)
                    stepped = True
            if not stepped and unfold_defs:
                eq = self.unfold_head_eq(current)
                if eq is not None:
                    push(eq, eq.prop.arg)
                    stepped = True
            if stepped:
                continue
            # descend into the structure
            match current:
                case App(f, a):
                    nf, cf = self._norm_conv(f, hyps, unfold_defs, fuel)
                    na, ca = self._norm_conv(a, hyps, unfold_defs, fuel)
                    if cf is None and ca is None:
                        break
                    conv = kernel.combination(
                        cf or kernel.equality("refl", self.thy, f),
                        ca or kernel.equality("refl", self.thy, a))
                    push(conv, conv.prop.arg)
                    continue
                case Abs(h, ty, b):
                    c = Free(f"_n{next(_fresh)}", ty)
                    opened = beta_normalize(subst_bound(b, c))
                    nb, cb = self._norm_conv(opened, hyps, unfold_defs, fuel)
                    if cb is None:
                        break
                    conv = kernel.abstract_rule(c, cb)
                    push(conv, conv.prop.arg)
                    continue
                case _:
                    break
        return current, total

    def _comp_step_thm(self, redex: Term, contractum: Term, hyps) -> Theorem | None:
        """Certify one computation step through the matching axiom."""
        goal = mk_eq(redex, contractum)
        wrapped = mk_implies(list(hyps), goal)
        thm = self.prove(wrapped)
        if thm is None:
            return None
        for h in hyps:
            thm = kernel.implies_elim(thm, kernel.assume(self.thy, h))
        return thm

    # -- the definitional proof method

    def definitional(self, state: ProofState, i: int) -> ProofState | None:
        """Close an equational subgoal whose sides share a normal form under
        reduction plus definition unfolding."""
        subgoal = state.subgoals()[i - 1]
        tele = open_telescope(subgoal)
        if not is_eq(tele.concl):
            return None
        lhs, rhs, _ = dest_eq(tele.concl)
        eq = self.equation(lhs, rhs, hyp_context=tuple(tele.prems),
                           unfold_defs=True)
        if eq is None:
            return None
        cur = eq
        for kind, e in reversed(tele.entries):
            if kind == "prem":
                cur = kernel.implies_intro(e, cur)
            else:
                cur = kernel.forall_intro(e, cur)
        try:
            return _compose_at(state, i, cur, [], Unifier())
        except (KernelError, TacticError):
            return None


_fresh = itertools.count()
