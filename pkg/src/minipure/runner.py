"""Batch execution of proof scripts against a theory."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import kernel, reduction
from .auto import AutoProver
from .elaborate import ElabError, Elaborator, elaborate_type
from .hott import TheoryError, define
from .kernel import KernelError, TheoryCtx, Theorem
from .parser import (
    AssumptionTac, AxiomDecl, BackTac, CanonicityDecl, ConstDecl,
    DefinitionDecl, RuleTac, ScriptAst, ScriptSyntaxError, TheoremDecl, parse,
)
from .printer import print_term
from .syntax import (
    PROP, Free, MiniPureError, SVar, Term, aconv, apply_unifier,
    beta_normalize, econv, free_vars, schematic_vars,
)
from .tactics import (
    ProofState, Rule, TacticError, finish, init_goal, resolve, rule_of,
)
from .unify import Unifier, unify
from .syntax import mgu_type, type_of


class ProofFailure(MiniPureError):
    pass


@dataclass
class Options:
    max_unifiers: int = 32
    search_depth: int = 10
    fuel: int = 10_000
    trace: bool = False
    dump_states: bool = False
    auto_depth: int = 24
    auto_budget: int = 6000


@dataclass
class TheoremReport:
    name: str
    status: str                 # proved | failed | unfinished
    detail: str = ""
    steps: int = 0
    flexflex: list = field(default_factory=list)

    @property
    def ok(self):
        return self.status == "proved"


@dataclass
class CanonicityItem:
    report: reduction.CanonicityReport

    @property
    def ok(self):
        return self.report.ok


@dataclass
class RunReport:
    name: str
    items: list = field(default_factory=list)

    @property
    def theorems(self):
        return [i for i in self.items if isinstance(i, TheoremReport)]

    @property
    def ok(self):
        return all(i.ok for i in self.items)

    def summary_lines(self):
        out = []
        for item in self.items:
            if isinstance(item, TheoremReport):
                mark = "proved" if item.ok else item.status
                extra = f" ({item.detail})" if item.detail and not item.ok else ""
                ff = f" [{len(item.flexflex)} flex-flex]" if item.flexflex else ""
                out.append(f"  {item.name}: {mark}"
                           f" [{item.steps} steps]{extra}{ff}")
            else:
                r = item.report
                verdict = "ok" if r.ok else "FAILED"
                out.append(f"  check_canonicity {r.type_name} size "
                           f"{r.size_bound}: {verdict} "
                           f"({r.certified}/{r.checked} certified)")
        return out


class Session:
    """One script-checking session over an extensible theory."""

    def __init__(self, thy: TheoryCtx, options: Options | None = None,
                 log=None):
        self.thy = thy
        self.options = options or Options()
        self.theorems: dict[str, Theorem] = {}
        self.log = log or (lambda s: None)
        self._rebuild_prover()

    def _rebuild_prover(self):
        self.prover = AutoProver(
            self.thy, extra_rules=dict(self.theorems),
            max_unifiers=min(self.options.max_unifiers, 8),
            search_depth=self.options.search_depth,
            depth=self.options.auto_depth,
            budget=self.options.auto_budget)

    # -- name resolution

    def lookup_rule(self, name: str) -> Theorem:
        if name in self.theorems:
            return self.theorems[name]
        if name in self.prover.rules:
            return self.prover.rules[name]
        raise ProofFailure(f"unknown rule {name}")

    def add_theorem(self, name: str, thm: Theorem):
        self.theorems[name] = thm
        self.prover.rules[name] = thm

    # -- declarations

    def run(self, ast: ScriptAst, name: str = "<script>") -> RunReport:
        report = RunReport(name)
        for item in ast.items:
            match item:
                case ConstDecl():
                    self.thy = self.thy.extend_const(
                        item.name, elaborate_type(self.thy, item.ty))
                    self._rebuild_prover()
                case AxiomDecl():
                    prop = self._elaborate_prop(item.formula)
                    prop = _frees_to_schematics(prop)
                    self.thy = self.thy.extend_axiom(item.name, prop)
                    self._rebuild_prover()
                case DefinitionDecl():
                    rhs = self._elaborate(item.rhs)
                    self.thy, _ = define(self.thy, item.name, rhs)
                    self._rebuild_prover()
                case TheoremDecl():
                    report.items.append(self._run_theorem(item))
                case CanonicityDecl():
                    self.log(f"check_canonicity {item.type_name} "
                             f"size {item.size}")
                    rep = reduction.check_canonicity(
                        self.prover, item.type_name, item.size,
                        fuel=self.options.fuel)
                    if self.options.trace:
                        for line in rep.format_lines():
                            self.log("  " + line)
                    report.items.append(CanonicityItem(rep))
        return report

    # -- theorem execution

    def _elaborate(self, raw, expect=None, free_types=None):
        el = Elaborator(self.thy, free_types)
        t, ty = el.infer(raw, [])
        if expect is not None:
            el.unify(ty, expect, "formula")
        out = el.finish(t)
        self.thy.certify(out)
        return out, el.free_types

    def _elaborate_prop(self, raw, free_types=None):
        return self._elaborate(raw, PROP, free_types)[0]

    def _run_theorem(self, decl: TheoremDecl) -> TheoremReport:
        opts = self.options
        try:
            el = Elaborator(self.thy)
            raw_t, ty = el.infer(decl.formula, [])
            el.unify(ty, PROP, "statement")
            statement = el.finish(raw_t)
            self.thy.certify(statement)
            free_types = dict(el.free_types)
        except (ElabError, KernelError) as e:
            return TheoremReport(decl.name, "error", f"statement: {e}")

        state = init_goal(self.thy, statement)
        history: tuple | None = None  # (base_state, successors, iterator)
        steps = 0
        self.log(f"theorem {decl.name}: {print_term(statement)}")

        for tac in decl.tactics:
            steps += 1
            try:
                match tac:
                    case RuleTac():
                        state, history = self._apply_rule(
                            state, tac, free_types)
                    case AssumptionTac():
                        i = tac.subgoal or 1
                        from .tactics import assumption
                        it = assumption(state, i, opts.max_unifiers,
                                        opts.search_depth)
                        state, history = self._first(state, it, "assumption")
                    case BackTac():
                        if history is None:
                            raise ProofFailure("back without a previous step")
                        base, seen, it = history
                        while len(seen) < tac.k:
                            nxt = next(it, None)
                            if nxt is None:
                                raise ProofFailure(
                                    f"only {len(seen)} successors available")
                            seen.append(nxt)
                        state = seen[tac.k - 1]
                        history = (base, seen, it)
            except (ProofFailure, TacticError, KernelError, ElabError,
                    TheoryError) as e:
                return TheoremReport(decl.name, "failed",
                                     f"step {steps} (line {tac.line}): {e}",
                                     steps)
            self._trace_state(state)

        if state.n_subgoals != 0:
            return TheoremReport(decl.name, "unfinished",
                                 f"{state.n_subgoals} subgoals remain", steps)
        thm, pending = finish(state)
        if not self._matches(statement, thm.prop):
            return TheoremReport(
                decl.name, "failed",
                f"proved {print_term(thm.prop)}, not the stated goal", steps)
        final = thm
        for name, fty in reversed(_ordered_frees(statement)):
            final = kernel.forall_intro(Free(name, fty), final)
        self.add_theorem(decl.name, final)
        ff = [(print_term(a), print_term(b)) for a, b in pending]
        return TheoremReport(decl.name, "proved", "", steps, ff)

    def _apply_rule(self, state: ProofState, tac: RuleTac, free_types):
        opts = self.options
        i = tac.subgoal or 1
        if tac.name == "auto":
            return self._apply_auto(state, i), None
        if tac.name == "definitional":
            out = self.prover.definitional(state, i)
            if out is None:
                raise ProofFailure(
                    "definitional: sides have distinct normal forms")
            return out, None
        thm = self.lookup_rule(tac.name)
        rule = rule_of(thm)
        if tac.insts:
            sigma = self._instantiation(rule, tac.insts, free_types)
            inst = kernel.instantiate(rule.thm, sigma)
            prems, concl = kernel.strip_imp(inst.prop, limit=len(rule.prems))
            rule = Rule(inst, tuple(prems), concl)
        it = resolve(state, i, rule, opts.max_unifiers, opts.search_depth)
        return self._first(state, it, f"rule {tac.name}")

    def _apply_auto(self, state: ProofState, i: int) -> ProofState:
        subgoal = state.subgoals()[i - 1]
        if schematic_vars(subgoal):
            raise ProofFailure(
                "auto requires a subgoal without schematic variables; "
                "pin them with a where-instantiation first")
        thm = self.prover.prove(subgoal)
        if thm is None:
            raise ProofFailure("auto found no proof")
        from .tactics import _compose_at
        return _compose_at(state, i, thm, [], Unifier())

    def _instantiation(self, rule, insts, free_types) -> Unifier:
        by_key = {}
        for v in schematic_vars(rule.thm.prop):
            by_key.setdefault(v.key, v)
            by_key.setdefault(v.name, v)  # allow ?x to mean the unique ?x.k
        terms, types = {}, {}
        for key, raw in insts:
            v = by_key.get(key) or by_key.get(key[0])
            if v is None:
                raise ProofFailure(
                    f"rule has no schematic variable ?{key[0]}")
            t, _ = self._elaborate(raw, expect=None, free_types=free_types)
            types = mgu_type(v.ty, type_of(t), types)
            terms[v.key] = t
        return Unifier(terms, types, ())

    def _first(self, base: ProofState, it, what: str):
        first = next(it, None)
        if first is None:
            raise ProofFailure(f"{what}: no successor state "
                               "(unification found no match)")
        return first, (base, [first], it)

    def _matches(self, statement: Term, proved: Term) -> bool:
        if econv(statement, proved):
            return True
        if not schematic_vars(statement):
            return False
        sigma = unify(statement, proved,
                      self.options.max_unifiers,
                      self.options.search_depth).first()
        if sigma is None or sigma.flexflex:
            return False
        return econv(beta_normalize(apply_unifier(statement, sigma)), proved)

    def _trace_state(self, state: ProofState):
        if not self.options.trace:
            return
        subs = state.subgoals()
        self.log(f"  goal ({state.n_subgoals} subgoal"
                 f"{'s' if state.n_subgoals != 1 else ''}):")
        for k, sg in enumerate(subs, 1):
            self.log(f"    {k}. {print_term(sg)}")
        if self.options.dump_states:
            self.log(f"    state: {print_term(state.thm.prop)}")
        for a, b in state.pending:
            self.log(f"    flex-flex: {print_term(a)} =?= {print_term(b)}")


def _frees_to_schematics(t: Term) -> Term:
    """Axiom statements treat their free variables as schematic."""
    mapping = {}

    def go(t):
        from .syntax import Abs, App
        match t:
            case Free(n, ty):
                mapping.setdefault((n, ty), SVar(n, 0, ty))
                return mapping[(n, ty)]
            case App(f, a):
                return App(go(f), go(a))
            case Abs(h, ty, b):
                return Abs(h, ty, go(b))
            case _:
                return t

    return go(t)


def _ordered_frees(t: Term) -> list[tuple[str, object]]:
    """Free variables in first-occurrence order, for qed generalization."""
    out = []

    def go(t):
        from .syntax import Abs, App
        match t:
            case Free(n, ty):
                if (n, ty) not in out:
                    out.append((n, ty))
            case App(f, a):
                go(f)
                go(a)
            case Abs(_, _, b):
                go(b)

    go(t)
    return out


def check_files(paths, thy_factory, options: Options | None = None,
                log=print) -> list[RunReport]:
    """Run each script in an independent session; reports sorted by name."""
    reports = []
    for path in sorted(paths):
        src = open(path).read()
        ast = parse(src)
        session = Session(thy_factory(), options,
                          log=log if options and options.trace else None)
        reports.append(session.run(ast, name=str(path)))
    return reports
