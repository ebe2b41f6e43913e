"""Executable reduction on closed object-level terms, and desk-scale
canonicity/consistency oracles.

The step relation applies one head reduction: object beta, or an
eliminator meeting its constructor (pairs, refl, numerals, injections,
the unit value).  Uniqueness (object eta) is deliberately not a step;
normal forms are constructor-driven.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (
    Abs, App, Bound, Const, Fun, MiniPureError, Term, Ty, app,
    beta_normalize, is_closed, strip_app, strip_fun,
)


class ReductionFuelError(MiniPureError):
    pass


class EnumerationCapError(MiniPureError):
    pass


# constructor heads; type formers count as constructors of their universe
CONSTRUCTOR_HEADS = {
    "0", "succ", "star", "pair", "inl", "inr", "lam", "refl",
    "Nat", "Unit", "Empty", "U", "Prod", "Sum", "Eq", "+",
}

ELIMINATOR_HEADS = {"`", "ind_Sum", "ind_Eq", "ind_Nat", "ind_Coprod",
                    "ind_Empty", "ind_Unit"}


def head_contract(t: Term) -> Term | None:
    """One head reduction at the root spine, or None.

    The contractum is meta-beta-normalized: eliminator branches are
    meta-level functions, and applying them is framework bookkeeping,
    not an object step.
    """
    head, args = strip_app(t)
    if not isinstance(head, Const):
        return None
    name = head.name
    if name == "`" and len(args) == 2:
        fn, arg = args
        fh, fargs = strip_app(fn)
        if isinstance(fh, Const) and fh.name == "lam" and len(fargs) == 1:
            return beta_normalize(App(fargs[0], arg))
    elif name == "ind_Sum" and len(args) == 2:
        f, p = args
        ph, pargs = strip_app(p)
        if isinstance(ph, Const) and ph.name == "pair" and len(pargs) == 2:
            return beta_normalize(app(f, *pargs))
    elif name == "ind_Eq" and len(args) == 2:
        f, p = args
        ph, pargs = strip_app(p)
        if isinstance(ph, Const) and ph.name == "refl" and len(pargs) == 1:
            return beta_normalize(App(f, pargs[0]))
    elif name == "ind_Nat" and len(args) == 3:
        f, a, n = args
        nh, nargs = strip_app(n)
        if isinstance(nh, Const) and nh.name == "0" and not nargs:
            return a
        if isinstance(nh, Const) and nh.name == "succ" and len(nargs) == 1:
            pred = nargs[0]
            return beta_normalize(app(f, pred, app(head, f, a, pred)))
    elif name == "ind_Coprod" and len(args) == 3:
        c, d, u = args
        uh, uargs = strip_app(u)
        if isinstance(uh, Const) and uh.name == "inl" and len(uargs) == 1:
            return beta_normalize(App(c, uargs[0]))
        if isinstance(uh, Const) and uh.name == "inr" and len(uargs) == 1:
            return beta_normalize(App(d, uargs[0]))
    elif name == "ind_Unit" and len(args) == 2:
        c, a = args
        ah, aargs = strip_app(a)
        if isinstance(ah, Const) and ah.name == "star" and not aargs:
            return c
    return None


def step(t: Term) -> Term | None:
    """Leftmost-outermost single step, descending into arguments and under
    binders after the head is stable; None when no rule applies."""
    out = head_contract(t)
    if out is not None:
        return out
    match t:
        case App(f, a):
            sf = step(f)
            if sf is not None:
                return App(sf, a)
            sa = step(a)
            if sa is not None:
                return App(f, sa)
        case Abs(h, ty, b):
            sb = step(b)
            if sb is not None:
                return Abs(h, ty, sb)
    return None


def step_positions(t: Term, path=()) -> list[tuple]:
    """Paths (sequences of 0=fun,1=arg,2=body) where a head step applies."""
    out = []
    if head_contract(t) is not None:
        out.append(path)
    match t:
        case App(f, a):
            out += step_positions(f, path + (0,))
            out += step_positions(a, path + (1,))
        case Abs(_, _, b):
            out += step_positions(b, path + (2,))
    return out


def normalize(t: Term, fuel: int = 10_000) -> Term:
    """Iterate step until no rule applies; raise when fuel runs out."""
    for _ in range(fuel):
        nxt = step(t)
        if nxt is None:
            return t
        t = nxt
    raise ReductionFuelError(f"no normal form within {fuel} steps")


def trace(t: Term, fuel: int = 10_000) -> list[Term]:
    """The reduction sequence from t to its normal form, inclusive."""
    out = [t]
    for _ in range(fuel):
        nxt = step(out[-1])
        if nxt is None:
            return out
        out.append(nxt)
    raise ReductionFuelError(f"no normal form within {fuel} steps")


@dataclass(frozen=True)
class ObjTermView:
    kind: str  # canonical | neutral | redex
    term: Term


def classify(t: Term) -> ObjTermView:
    """Canonical (constructors all the way down), redex, or neutral."""
    if step(t) is not None:
        return ObjTermView("redex", t)

    def all_constructors(t: Term) -> bool:
        head, args = strip_app(t)
        match head:
            case Const(name, _):
                if name in ELIMINATOR_HEADS:
                    return False
                return all(all_constructors(a) for a in args)
            case Abs(_, _, b):
                return not args and all_constructors(b)
            case Bound(_):
                return all(all_constructors(a) for a in args)
            case _:
                return False

    if all_constructors(t):
        return ObjTermView("canonical", t)
    return ObjTermView("neutral", t)


# ---------------------------------------------------------------------------
# Closed-term enumeration

SIZE_CAP = 8

_TERM_TY = None


def _term_ty():
    global _TERM_TY
    if _TERM_TY is None:
        from .hott import TERM as T
        _TERM_TY = T
    return _TERM_TY


def term_size(t: Term) -> int:
    """Constants and variable occurrences count one; binders are free."""
    match t:
        case App(f, a):
            return term_size(f) + term_size(a)
        case Abs(_, _, b):
            return term_size(b)
        case _:
            return 1


def enumerate_closed(size_bound: int, symbols: list[str],
                     signature: dict[str, Ty]) -> list[Term]:
    """All closed object terms up to the size bound over the given symbols.

    Meta-abstractions are generated for eliminator arguments of function
    meta-type; the order is deterministic (size-major, then construction).
    """
    if size_bound > SIZE_CAP:
        raise EnumerationCapError(
            f"size {size_bound} exceeds the configured cap {SIZE_CAP}")
    term_ty = _term_ty()
    consts = [(name, signature[name]) for name in symbols]
    memo: dict = {}

    def _gen(ty: Ty, size: int, depth: int):
        key = (ty, size, depth)
        if key in memo:
            return memo[key]
        out = []
        if size >= 1:
            # bound variables of matching type
            if ty == term_ty and size == 1:
                for i in range(depth):
                    out.append(Bound(i))
            if isinstance(ty, Fun):
                for body in _gen(ty.res, size, depth + 1):
                    out.append(Abs("x", ty.arg, body))
            for name, cty in consts:
                args, res = strip_fun(cty)
                if res != ty:
                    continue
                if not args:
                    if size == 1:
                        out.append(Const(name, cty))
                    continue
                for split in _splits(size - 1, len(args)):
                    for combo in _products([_gen(a, s, depth)
                                            for a, s in zip(args, split)]):
                        out.append(app(Const(name, cty), *combo))
        memo[key] = out
        return out

    def _splits(total: int, k: int):
        if k == 1:
            if total >= 1:
                yield (total,)
            return
        for first in range(1, total - k + 2):
            for rest in _splits(total - first, k - 1):
                yield (first,) + rest

    def _products(lists):
        if not lists:
            yield ()
            return
        for head in lists[0]:
            for rest in _products(lists[1:]):
                yield (head,) + rest

    out = []
    for size in range(1, size_bound + 1):
        out.extend(_gen(term_ty, size, 0))
    # deduplicate while preserving order (memo layers never overlap sizes,
    # but bound-variable generation may coincide across depths)
    seen = set()
    unique = []
    for t in out:
        if t not in seen and is_closed(t):
            seen.add(t)
            unique.append(t)
    return unique


def count_closed(size_bound: int, symbols: list[str],
                 signature: dict[str, Ty]) -> int:
    return len(enumerate_closed(size_bound, symbols, signature))


# ---------------------------------------------------------------------------
# Canonicity / consistency oracle

@dataclass
class CheckLine:
    term: Term
    type_name: str
    normal_form: Term | None
    steps: int
    verdict: str  # ok | counterexample | uncertified


@dataclass
class CanonicityReport:
    type_name: str
    size_bound: int
    checked: int
    certified: int
    counterexamples: list[CheckLine]
    lines: list[CheckLine]

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def format_lines(self) -> list[str]:
        from .printer import print_term
        out = []
        for ln in self.lines:
            nf = print_term(ln.normal_form) if ln.normal_form is not None else "-"
            out.append(f"{print_term(ln.term)} : {ln.type_name} ~> {nf} "
                       f"[{ln.steps} steps] {ln.verdict}")
        return out


def is_numeral(t: Term) -> bool:
    head, args = strip_app(t)
    match head:
        case Const("0", _):
            return not args
        case Const("succ", _):
            return len(args) == 1 and is_numeral(args[0])
    return False


CANONICITY_SYMBOLS = ["0", "succ", "star", "lam", "`", "ind_Nat", "ind_Unit"]


def check_canonicity(prover, type_head: str, size_bound: int,
                     symbols: list[str] | None = None,
                     fuel: int = 10_000,
                     certify_steps: bool = True) -> CanonicityReport:
    """Every enumerated closed term the prover certifies at the given type
    must normalize to a canonical value; for Empty, nothing is certified.

    ``prover`` supplies ``thy``, ``signature_types()`` and
    ``prove_typing(term, type_term)``; each accepted reduction step is
    re-certified as a kernel equation when ``certify_steps`` is set.
    """
    from .printer import print_term

    sig = prover.signature_types()
    symbols = symbols or CANONICITY_SYMBOLS
    if type_head not in ("Nat", "Unit", "Empty"):
        raise MiniPureError(
            f"canonicity checks cover Nat, Unit and Empty, not {type_head}")
    target = Const(type_head, _term_ty())

    def value_ok(nf: Term) -> bool:
        if type_head == "Nat":
            return is_numeral(nf)
        if type_head == "Unit":
            return nf == Const("star", _term_ty())
        return False  # Empty has no values at all

    lines: list[CheckLine] = []
    counterexamples: list[CheckLine] = []
    certified = 0
    for t in enumerate_closed(size_bound, symbols, sig):
        thm = prover.prove_typing(t, target)
        if thm is None:
            lines.append(CheckLine(t, type_head, None, 0, "uncertified"))
            continue
        certified += 1
        if type_head == "Empty":
            ln = CheckLine(t, type_head, None, 0,
                           "counterexample: certified inhabitant of Empty")
            counterexamples.append(ln)
            lines.append(ln)
            continue
        steps = trace(t, fuel)
        nf = steps[-1]
        verdict = "ok"
        if not value_ok(nf):
            verdict = f"counterexample: normal form {print_term(nf)}"
        elif certify_steps:
            for a, b in zip(steps, steps[1:]):
                if prover.certify_step(a, b) is None:
                    verdict = (f"counterexample: step {print_term(a)} ~> "
                               f"{print_term(b)} not kernel-certifiable")
                    break
        ln = CheckLine(t, type_head, nf, len(steps) - 1, verdict)
        lines.append(ln)
        if verdict != "ok":
            counterexamples.append(ln)
    return CanonicityReport(type_head, size_bound, len(lines), certified,
                            counterexamples, lines)
