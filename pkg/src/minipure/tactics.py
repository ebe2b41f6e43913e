"""Backward proof: proof states, rule lifting, resolution, assumption.

A proof state is a genuine kernel theorem [|p1; ...; pn|] ==> p whose
first n antecedents are the subgoals.  Lifting is derived through the
kernel (it is not trusted), and resolution composes the lifted rule with
the state by assume/elim/intro chains, so every successor state is again
a kernel theorem.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import kernel
from .kernel import (
    KernelError, TheoryCtx, Theorem, dest_all, dest_imp, is_all, is_imp,
    mk_all, mk_imp, strip_imp,
)
from .syntax import (
    PROP, Free, MiniPureError, SVar, TVar, Term, Ty, app, apply_unifier,
    beta_normalize, econv, free_names, fun_ty, max_svar_index,
    schematic_vars, subst_bound, term_type_vars,
)
from .unify import Unifier, solve_flexflex_trivially, unify_pairs


class TacticError(MiniPureError):
    pass


_fresh_frees = itertools.count()
_fresh_tyrename = itertools.count(1)


def _fresh_free(ty: Ty, hint: str = "c") -> Free:
    return Free(f"_{hint}{next(_fresh_frees)}", ty)


# ---------------------------------------------------------------------------
# Rules

@dataclass(frozen=True)
class Rule:
    """A theorem viewed as [|r1; ...; rm|] ==> r."""

    thm: Theorem
    prems: tuple[Term, ...]
    concl: Term

    @property
    def arity(self) -> int:
        return len(self.prems)


def rule_of(thm: Theorem) -> Rule:
    """Present a theorem as a rule: outer alls become fresh schematics."""
    base = max_svar_index(thm.prop)
    counter = itertools.count(base + 1)
    while is_all(thm.prop):
        hint, ty, _ = dest_all(thm.prop)
        thm = kernel.forall_elim(thm, SVar(hint or "x", next(counter), ty))
    prems, concl = strip_imp(thm.prop)
    return Rule(thm, tuple(prems), concl)


def rule_max_index(rule: Rule) -> int:
    return max_svar_index(rule.thm.prop)


class _Subst:
    def __init__(self, terms=None, types=None):
        self.terms = terms or {}
        self.types = types or {}


def rename_apart(rule: Rule, above: int) -> Rule:
    """Bump the rule's schematic indices above a state's maximum, and give
    its type variables a fresh suffix."""
    bump = above + 1
    svars = schematic_vars(rule.thm.prop)
    tyvars = term_type_vars(rule.thm.prop)
    if not svars and not tyvars:
        return rule
    suffix = next(_fresh_tyrename)
    tymap = {name: TVar(f"{name}.{suffix}") for name in tyvars}
    terms = {v.key: SVar(v.name, v.index + bump, v.ty) for v in svars}
    thm = kernel.instantiate(rule.thm, _Subst(terms, tymap))
    prems, concl = strip_imp(thm.prop, limit=len(rule.prems))
    return Rule(thm, tuple(prems), concl)


# ---------------------------------------------------------------------------
# Telescopes

@dataclass(frozen=True)
class Telescope:
    """The parameter/premise prefix of a subgoal, opened with fresh frees."""

    entries: tuple[tuple[str, object], ...]  # ("param", Free) | ("prem", Term)
    concl: Term

    @property
    def params(self) -> list[Free]:
        return [e for k, e in self.entries if k == "param"]

    @property
    def prems(self) -> list[Term]:
        return [e for k, e in self.entries if k == "prem"]


def open_telescope(goal: Term) -> Telescope:
    """Strip leading alls and implications, opening binders with frees."""
    entries = []
    t = goal
    while True:
        if is_all(t):
            hint, ty, body = dest_all(t)
            c = _fresh_free(ty, hint if hint.isidentifier() else "c")
            entries.append(("param", c))
            t = beta_normalize(subst_bound(body, c))
        elif is_imp(t):
            p, t = dest_imp(t)
            entries.append(("prem", p))
        else:
            return Telescope(tuple(entries), t)


def close_telescope(entries, body: Term) -> Term:
    for kind, e in reversed(entries):
        if kind == "prem":
            body = mk_imp(e, body)
        else:
            body = mk_all(e, body)
    return body


def lift_over_telescope(rule: Rule, entries) -> Rule:
    """Lift a rule over an interleaved parameter/premise telescope.

    Every schematic of the rule is raised over the parameters; every
    premise and the conclusion is wrapped in the full telescope.  The
    result is derived through the kernel, not axiomatized.
    """
    params = [e for k, e in entries if k == "param"]
    thy = rule.thm.theory
    for kind, e in entries:
        if kind == "prem" and thy.certify(e) != PROP:
            raise TacticError("lift context formulas must be propositions")

    if params:
        raise_map = {}
        for v in schematic_vars(rule.thm.prop):
            raised_ty = fun_ty(*[c.ty for c in params], v.ty)
            raise_map[v.key] = app(SVar(v.name, v.index, raised_ty), *params)
        inst = kernel.instantiate(rule.thm, _Subst(raise_map))
    else:
        inst = rule.thm
    prems, _concl = strip_imp(inst.prop, limit=rule.arity)

    lifted_prems = [close_telescope(entries, p) for p in prems]

    # derive: assume each lifted premise, unwrap it through the telescope,
    # feed the rule, then rewrap and discharge
    unwrapped = []
    hyp_prems = []
    for lp in lifted_prems:
        cur = kernel.assume(thy, lp)
        for kind, e in entries:
            if kind == "param":
                cur = kernel.forall_elim(cur, e)
            else:
                cur = kernel.implies_elim(cur, kernel.assume(thy, e))
        unwrapped.append(cur)
    body = inst
    for u in unwrapped:
        body = kernel.implies_elim(body, u)
    for kind, e in reversed(entries):
        if kind == "prem":
            body = kernel.implies_intro(e, body)
        else:
            body = kernel.forall_intro(e, body)
    for lp in reversed(lifted_prems):
        body = kernel.implies_intro(lp, body)

    new_prems, new_concl = strip_imp(body.prop, limit=rule.arity)
    return Rule(body, tuple(new_prems), new_concl)


def lift_over_formulas(rule: Rule, hyps: list[Term]) -> Rule:
    """Each premise ri becomes [|q1..qk|] ==> ri; likewise the conclusion."""
    return lift_over_telescope(rule, [("prem", q) for q in hyps])


def lift_over_params(rule: Rule, params: list[tuple[str, Ty]]) -> Rule:
    """Wrap premises and conclusion in alls, raising every schematic."""
    names = [n for n, _ in params]
    if len(set(names)) != len(names):
        raise TacticError("parameter names must be distinct")
    for n in names:
        if n in free_names(rule.thm.prop):
            raise TacticError(f"parameter name {n} collides with the rule")
    entries = [("param", Free(n, ty)) for n, ty in params]
    return lift_over_telescope(rule, entries)


# ---------------------------------------------------------------------------
# Proof states

@dataclass(frozen=True)
class ProofState:
    """A kernel theorem [|p1;...;pn|] ==> p with its subgoal count."""

    thm: Theorem
    n_subgoals: int
    pending: tuple[tuple[Term, Term], ...] = ()

    def subgoals(self) -> list[Term]:
        return strip_imp(self.thm.prop, limit=self.n_subgoals)[0]

    def goal(self) -> Term:
        return strip_imp(self.thm.prop, limit=self.n_subgoals)[1]

    def max_index(self) -> int:
        out = max_svar_index(self.thm.prop)
        for a, b in self.pending:
            out = max(out, max_svar_index(a), max_svar_index(b))
        return out


def init_goal(thy: TheoryCtx, p: Term) -> ProofState:
    try:
        t = kernel.trivial(thy, p)
    except KernelError as e:
        raise TacticError(str(e)) from e
    return ProofState(t, 1)


def finish(state: ProofState) -> tuple[Theorem, tuple]:
    """The proved theorem of a state with no subgoals, plus any deferred
    flex-flex constraints outstanding (reported, never blocking)."""
    if state.n_subgoals != 0:
        raise TacticError(f"{state.n_subgoals} subgoals remaining")
    return state.thm, state.pending


def _compose_at(state: ProofState, i: int, minor: Theorem,
                new_prems: list[Term], sigma: Unifier) -> ProofState:
    """Replace subgoal i of the sigma-instantiated state by new_prems,
    justified by minor (a theorem of the instantiated subgoal)."""
    thy = state.thm.theory
    state_inst = kernel.instantiate(state.thm, sigma)
    prems, _ = strip_imp(state_inst.prop, limit=state.n_subgoals)
    cur = state_inst
    for j, p in enumerate(prems):
        if j == i - 1:
            cur = kernel.implies_elim(cur, minor)
        else:
            cur = kernel.implies_elim(cur, kernel.assume(thy, p))
    order = prems[:i - 1] + new_prems + prems[i:]
    for q in reversed(order):
        cur = kernel.implies_intro(q, cur)
    if cur.hyps:
        raise TacticError("composition left undischarged hypotheses")
    pending = tuple(sigma.flexflex)
    return ProofState(cur, state.n_subgoals - 1 + len(new_prems), pending)


def resolve(state: ProofState, i: int, rule: Rule, max_unifiers: int = 32,
            search_depth: int = 10):
    """Lazy successor states from resolving subgoal i with the rule."""
    if not 1 <= i <= state.n_subgoals:
        raise TacticError(f"subgoal index {i} out of range "
                          f"(1..{state.n_subgoals})")
    subgoal = state.subgoals()[i - 1]
    fresh = rename_apart(rule, max(state.max_index(), rule_max_index(rule)))
    tele = open_telescope(subgoal)
    lifted = lift_over_telescope(fresh, list(tele.entries))
    return _resolve_successors(state, i, lifted, subgoal,
                               max_unifiers, search_depth)


def _resolve_successors(state, i, lifted, subgoal, max_unifiers, search_depth):
    problem = [(lifted.concl, subgoal)] + list(state.pending)
    for sigma in unify_pairs(problem, max_unifiers, search_depth):
        try:
            lifted_inst = kernel.instantiate(lifted.thm, sigma)
            new_prems, _ = strip_imp(lifted_inst.prop, limit=lifted.arity)
            minor = lifted_inst
            for q in new_prems:
                minor = kernel.implies_elim(
                    minor, kernel.assume(state.thm.theory, q))
            yield _compose_at(state, i, minor, new_prems, sigma)
        except (KernelError, TacticError):
            continue  # blocked by a deferred constraint; try the next unifier


def assumption(state: ProofState, i: int, max_unifiers: int = 32,
               search_depth: int = 10):
    """Lazy successors discharging subgoal i against one of its premises."""
    if not 1 <= i <= state.n_subgoals:
        raise TacticError(f"subgoal index {i} out of range "
                          f"(1..{state.n_subgoals})")
    subgoal = state.subgoals()[i - 1]
    tele = open_telescope(subgoal)
    return _assumption_successors(state, i, tele, max_unifiers, search_depth)


def premise_resolve(state: ProofState, i: int, max_unifiers: int = 32,
                    search_depth: int = 10):
    """Resolve subgoal i with one of its own local premises as the rule.

    A hereditary Harrop premise !!zs. [|H1;..;Hm|] ==> B whose head B
    unifies with the subgoal's conclusion replaces it by the premises Hs
    (each still under the subgoal's full telescope).
    """
    if not 1 <= i <= state.n_subgoals:
        raise TacticError(f"subgoal index {i} out of range "
                          f"(1..{state.n_subgoals})")
    subgoal = state.subgoals()[i - 1]
    tele = open_telescope(subgoal)
    return _premise_resolve_successors(state, i, tele,
                                       max_unifiers, search_depth)


def _premise_resolve_successors(state, i, tele, max_unifiers, search_depth):
    thy = state.thm.theory
    opened_names = {c.name for c in tele.params}
    base = state.max_index()
    for q in tele.prems:
        counter = itertools.count(base + 1)
        spine: list[SVar] = []
        conds: list[Term] = []
        inst = q
        while True:
            if kernel.is_all(inst):
                hint, ty, body = dest_all(inst)
                v = SVar(hint if hint.isidentifier() else "v",
                         next(counter), ty)
                spine.append(v)
                inst = beta_normalize(subst_bound(body, v))
            elif kernel.is_imp(inst):
                h, inst = dest_imp(inst)
                conds.append(h)
            else:
                break
        if not conds:
            continue  # plain assumption covers the condition-free case
        local_keys = {v.key for v in spine}
        problem = [(inst, tele.concl)] + list(state.pending)
        for sigma in unify_pairs(problem, max_unifiers, search_depth):
            if any(free_names(val) & opened_names
                   for key, val in sigma.terms.items()
                   if key not in local_keys):
                continue
            try:
                sub = lambda t: beta_normalize(apply_unifier(t, sigma))
                entries = [(k, e if k == "param" else sub(e))
                           for k, e in tele.entries]
                conds_s = [sub(h) for h in conds]
                new_subgoals = [close_telescope(entries, h) for h in conds_s]
                # derive the instantiated subgoal from the new subgoals
                qs = sub(q)
                cur = kernel.assume(thy, qs)
                for v in spine:
                    cur = kernel.forall_elim(cur, sub(v))
                for h in conds_s:
                    hthm = kernel.assume(thy, close_telescope(entries, h))
                    for kind, e in entries:
                        if kind == "param":
                            hthm = kernel.forall_elim(hthm, e)
                        else:
                            hthm = kernel.implies_elim(
                                hthm, kernel.assume(thy, e))
                    cur = kernel.implies_elim(cur, hthm)
                if not econv(cur.prop, sub(tele.concl)):
                    continue
                for kind, e in reversed(entries):
                    if kind == "prem":
                        cur = kernel.implies_intro(e, cur)
                    else:
                        cur = kernel.forall_intro(e, cur)
                for sg in reversed(new_subgoals):
                    cur = kernel.implies_intro(sg, cur)
                minor = cur
                for sg in new_subgoals:
                    minor = kernel.implies_elim(
                        minor, kernel.assume(thy, sg))
                sigma_out = Unifier(
                    {k: v for k, v in sigma.terms.items()
                     if k not in local_keys},
                    sigma.types, sigma.flexflex)
                yield _compose_at(state, i, minor, new_subgoals, sigma_out)
            except (KernelError, TacticError):
                continue


def _assumption_successors(state, i, tele, max_unifiers, search_depth):
    thy = state.thm.theory
    opened_names = {c.name for c in tele.params}
    base = state.max_index()
    for q in tele.prems:
        # a premise may be universally closed; its own prefix is stripped
        # with fresh schematics so it can match the conclusion at instances
        counter = itertools.count(base + 1)
        spine: list[SVar] = []
        inst = q
        while is_all(inst):
            hint, ty, body = dest_all(inst)
            v = SVar(hint if hint.isidentifier() else "v", next(counter), ty)
            spine.append(v)
            inst = beta_normalize(subst_bound(body, v))
        local_keys = {v.key for v in spine}
        problem = [(inst, tele.concl)] + list(state.pending)
        for sigma in unify_pairs(problem, max_unifiers, search_depth):
            if any(free_names(val) & opened_names
                   for key, val in sigma.terms.items()
                   if key not in local_keys):
                continue  # a parameter would escape its scope
            try:
                entries = [
                    (k, e if k == "param"
                     else beta_normalize(apply_unifier(e, sigma)))
                    for k, e in tele.entries]
                conclp = beta_normalize(apply_unifier(tele.concl, sigma))
                qp = beta_normalize(apply_unifier(q, sigma))
                cur = kernel.assume(thy, qp)
                for v in spine:
                    cur = kernel.forall_elim(
                        cur, beta_normalize(apply_unifier(v, sigma)))
                if not econv(cur.prop, conclp):
                    continue
                for kind, e in reversed(entries):
                    if kind == "prem":
                        cur = kernel.implies_intro(e, cur)
                    else:
                        cur = kernel.forall_intro(e, cur)
                sigma_out = Unifier(
                    {k: v for k, v in sigma.terms.items()
                     if k not in local_keys},
                    sigma.types, sigma.flexflex)
                yield _compose_at(state, i, cur, [], sigma_out)
            except (KernelError, TacticError):
                continue
