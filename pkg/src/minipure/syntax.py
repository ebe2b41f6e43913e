"""Meta-types and meta-terms of the logical framework.

Terms use positional (de Bruijn) indices for bound variables, so
alpha-equivalent terms are structurally identical.  Free and schematic
variables are named; schematic variables additionally carry an integer
index used to rename rule copies apart.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class MiniPureError(Exception):
    """Base class for all errors raised by this package."""


class TypingError(MiniPureError):
    """A term failed meta-level type checking."""


class TypeUnifyError(MiniPureError):
    """Two meta-types do not unify (clash or occurs-check failure)."""


# ---------------------------------------------------------------------------
# Meta-types

@dataclass(frozen=True)
class Base:
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class Fun:
    arg: "Ty"
    res: "Ty"

    def __repr__(self):
        a = repr(self.arg)
        if isinstance(self.arg, Fun):
            a = f"({a})"
        return f"{a} => {self.res!r}"


@dataclass(frozen=True)
class TVar:
    name: str

    def __repr__(self):
        return f"'{self.name}"


Ty = Base | Fun | TVar

PROP = Base("prop")


def fun_ty(*tys: Ty) -> Ty:
    """[t1, ..., tn] => r as right-nested function type."""
    out = tys[-1]
    for t in reversed(tys[:-1]):
        out = Fun(t, out)
    return out


def strip_fun(ty: Ty) -> tuple[list[Ty], Ty]:
    args = []
    while isinstance(ty, Fun):
        args.append(ty.arg)
        ty = ty.res
    return args, ty


def type_vars(ty: Ty) -> set[str]:
    match ty:
        case TVar(name):
            return {name}
        case Fun(a, r):
            return type_vars(a) | type_vars(r)
        case _:
            return set()


def apply_ty_subst(ty: Ty, subst: dict[str, Ty]) -> Ty:
    if not subst:
        return ty
    match ty:
        case TVar(name):
            got = subst.get(name)
            if got is None:
                return ty
            # chase chains so callers may pass non-normalized substs
            return apply_ty_subst(got, subst) if type_vars(got) & subst.keys() else got
        case Fun(a, r):
            return Fun(apply_ty_subst(a, subst), apply_ty_subst(r, subst))
        case _:
            return ty


def mgu_type(t1: Ty, t2: Ty, subst: dict[str, Ty] | None = None) -> dict[str, Ty]:
    """Most general unifier of two simple types, extending ``subst``."""
    subst = dict(subst) if subst else {}

    def walk(ty: Ty) -> Ty:
        while isinstance(ty, TVar) and ty.name in subst:
            ty = subst[ty.name]
        return ty

    def occurs(name: str, ty: Ty) -> bool:
        ty = walk(ty)
        match ty:
            case TVar(n):
                return n == name
            case Fun(a, r):
                return occurs(name, a) or occurs(name, r)
            case _:
                return False

    def go(a: Ty, b: Ty):
        a, b = walk(a), walk(b)
        match a, b:
            case TVar(n), TVar(m) if n == m:
                pass
            case TVar(n), _:
                if occurs(n, b):
                    raise TypeUnifyError(f"occurs check: '{n} in {b!r}")
                subst[n] = b
            case _, TVar(_):
                go(b, a)
            case Base(n), Base(m):
                if n != m:
                    raise TypeUnifyError(f"type clash: {n} vs {m}")
            case Fun(a1, r1), Fun(a2, r2):
                go(a1, a2)
                go(r1, r2)
            case _:
                raise TypeUnifyError(f"type clash: {a!r} vs {b!r}")

    go(t1, t2)
    return subst


def match_type(pattern: Ty, ty: Ty, subst: dict[str, Ty] | None = None) -> dict[str, Ty]:
    """One-sided unification: instantiate pattern's variables to equal ty."""
    subst = dict(subst) if subst else {}

    def go(p: Ty, t: Ty):
        match p, t:
            case TVar(n), _:
                if n in subst:
                    if subst[n] != t:
                        raise TypeUnifyError(f"inconsistent match for '{n}")
                else:
                    subst[n] = t
            case Base(n), Base(m):
                if n != m:
                    raise TypeUnifyError(f"type clash: {n} vs {m}")
            case Fun(a1, r1), Fun(a2, r2):
                go(a1, a2)
                go(r1, r2)
            case _:
                raise TypeUnifyError(f"type clash: {p!r} vs {t!r}")

    go(pattern, ty)
    return subst


# ---------------------------------------------------------------------------
# Meta-terms

@dataclass(frozen=True)
class Const:
    name: str
    ty: Ty


@dataclass(frozen=True)
class Free:
    name: str
    ty: Ty


@dataclass(frozen=True)
class SVar:
    name: str
    index: int
    ty: Ty

    @property
    def key(self) -> tuple[str, int]:
        return (self.name, self.index)


@dataclass(frozen=True)
class Bound:
    index: int


@dataclass(frozen=True)
class Abs:
    hint: str = field(compare=False)
    arg_ty: Ty
    body: "Term"


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"


Term = Const | Free | SVar | Bound | Abs | App


def app(head: Term, *args: Term) -> Term:
    for a in args:
        head = App(head, a)
    return head


def strip_app(t: Term) -> tuple[Term, list[Term]]:
    args: list[Term] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


def aconv(t: Term, s: Term) -> bool:
    """Alpha-equivalence; structural identity thanks to positional binders."""
    return t == s


# ---------------------------------------------------------------------------
# Traversals

def shift(t: Term, by: int, cutoff: int = 0) -> Term:
    """Add ``by`` to every bound index >= cutoff."""
    match t:
        case Bound(i):
            return Bound(i + by) if i >= cutoff else t
        case App(f, a):
            return App(shift(f, by, cutoff), shift(a, by, cutoff))
        case Abs(h, ty, b):
            return Abs(h, ty, shift(b, by, cutoff + 1))
        case _:
            return t


def subst_bound(body: Term, arg: Term) -> Term:
    """Replace index-0 bound variables of an abstraction body by arg."""

    def go(t: Term, depth: int) -> Term:
        match t:
            case Bound(i):
                if i == depth:
                    return shift(arg, depth)
                return Bound(i - 1) if i > depth else t
            case App(f, a):
                return App(go(f, depth), go(a, depth))
            case Abs(h, ty, b):
                return Abs(h, ty, go(b, depth + 1))
            case _:
                return t

    return go(body, 0)


def loose_bounds(t: Term, depth: int = 0) -> set[int]:
    """Indices of bound variables not enclosed by an abstraction of t."""
    match t:
        case Bound(i):
            return {i - depth} if i >= depth else set()
        case App(f, a):
            return loose_bounds(f, depth) | loose_bounds(a, depth)
        case Abs(_, _, b):
            return loose_bounds(b, depth + 1)
        case _:
            return set()


def is_closed(t: Term) -> bool:
    return not loose_bounds(t)


def free_vars(t: Term) -> set[tuple[str, Ty]]:
    match t:
        case Free(n, ty):
            return {(n, ty)}
        case App(f, a):
            return free_vars(f) | free_vars(a)
        case Abs(_, _, b):
            return free_vars(b)
        case _:
            return set()


def free_names(t: Term) -> set[str]:
    return {n for n, _ in free_vars(t)}


def schematic_vars(t: Term) -> set[SVar]:
    match t:
        case SVar():
            return {t}
        case App(f, a):
            return schematic_vars(f) | schematic_vars(a)
        case Abs(_, _, b):
            return schematic_vars(b)
        case _:
            return set()


def max_svar_index(t: Term) -> int:
    return max((v.index for v in schematic_vars(t)), default=-1)


def term_type_vars(t: Term) -> set[str]:
    match t:
        case Const(_, ty) | Free(_, ty) | SVar(_, _, ty):
            return type_vars(ty)
        case App(f, a):
            return term_type_vars(f) | term_type_vars(a)
        case Abs(_, ty, b):
            return type_vars(ty) | term_type_vars(b)
        case _:
            return set()


def occurs_free(name: str, t: Term) -> bool:
    match t:
        case Free(n, _):
            return n == name
        case App(f, a):
            return occurs_free(name, f) or occurs_free(name, a)
        case Abs(_, _, b):
            return occurs_free(name, b)
        case _:
            return False


def abstract_over(t: Term, x: Free) -> Term:
    """Body of (lambda x. t): occurrences of x become Bound indices."""

    def go(t: Term, depth: int) -> Term:
        match t:
            case Free(n, ty) if n == x.name and ty == x.ty:
                return Bound(depth)
            case App(f, a):
                return App(go(f, depth), go(a, depth))
            case Abs(h, ty, b):
                return Abs(h, ty, go(b, depth + 1))
            case _:
                return t

    return go(t, 0)


def apply_term_ty_subst(t: Term, subst: dict[str, Ty]) -> Term:
    """Apply a type substitution to every type annotation in t."""
    if not subst:
        return t
    match t:
        case Const(n, ty):
            return Const(n, apply_ty_subst(ty, subst))
        case Free(n, ty):
            return Free(n, apply_ty_subst(ty, subst))
        case SVar(n, i, ty):
            return SVar(n, i, apply_ty_subst(ty, subst))
        case App(f, a):
            return App(apply_term_ty_subst(f, subst), apply_term_ty_subst(a, subst))
        case Abs(h, ty, b):
            return Abs(h, apply_ty_subst(ty, subst), apply_term_ty_subst(b, subst))
        case _:
            return t


# ---------------------------------------------------------------------------
# Typing

def type_of(t: Term, binders: tuple[Ty, ...] = ()) -> Ty:
    """The unique simple type of a well-typed term.

    ``binders`` lists the types of enclosing abstractions, innermost first.
    """
    match t:
        case Const(_, ty) | Free(_, ty) | SVar(_, _, ty):
            return ty
        case Bound(i):
            if i >= len(binders):
                raise TypingError(f"loose bound variable {i}")
            return binders[i]
        case Abs(_, ty, b):
            return Fun(ty, type_of(b, (ty,) + binders))
        case App(f, a):
            fty = type_of(f, binders)
            if not isinstance(fty, Fun):
                raise TypingError(f"application of non-function type {fty!r}")
            aty = type_of(a, binders)
            if fty.arg != aty:
                raise TypingError(
                    f"operand type mismatch: expected {fty.arg!r}, got {aty!r}")
            return fty.res
    raise TypingError(f"not a term: {t!r}")


def is_well_typed(t: Term, binders: tuple[Ty, ...] = ()) -> bool:
    try:
        type_of(t, binders)
        return True
    except TypingError:
        return False


# ---------------------------------------------------------------------------
# Beta / eta

def beta_normalize(t: Term) -> Term:
    """Full beta-normal form, normal (leftmost-outermost) order."""
    match t:
        case App(f, a):
            fn = beta_normalize(f)
            if isinstance(fn, Abs):
                return beta_normalize(subst_bound(fn.body, a))
            return App(fn, beta_normalize(a))
        case Abs(h, ty, b):
            return Abs(h, ty, beta_normalize(b))
        case _:
            return t


def eta_contract(t: Term) -> Term:
    """Contract every (lambda x. f x) with x not free in f, bottom-up."""
    match t:
        case App(f, a):
            return App(eta_contract(f), eta_contract(a))
        case Abs(h, ty, b):
            bn = eta_contract(b)
            if isinstance(bn, App) and bn.arg == Bound(0) and 0 not in loose_bounds(bn.fun):
                return shift(bn.fun, -1)
            return Abs(h, ty, bn)
        case _:
            return t


def beta_eta(t: Term) -> Term:
    """Canonical representative modulo beta-eta."""
    return eta_contract(beta_normalize(t))


def econv(t: Term, s: Term) -> bool:
    """Equality modulo beta-eta (and alpha, trivially)."""
    return t == s or beta_eta(t) == beta_eta(s)


# ---------------------------------------------------------------------------
# Unifier application

def apply_unifier(t: Term, sigma) -> Term:
    """Simultaneous substitution of sigma's assignments into t.

    ``sigma`` needs attributes ``terms`` (mapping (name, index) -> Term) and
    ``types`` (mapping type-variable name -> Ty).  Redexes created by the
    substitution are beta-reduced away; unassigned schematics remain.
    """
    terms = sigma.terms
    types = sigma.types

    def go(t: Term) -> Term:
        match t:
            case SVar(n, i, ty):
                got = terms.get((n, i))
                if got is not None:
                    if types:
                        got = apply_term_ty_subst(got, types)
                    expected = apply_ty_subst(ty, types)
                    actual = type_of(got)
                    if expected != actual:
                        raise TypingError(
                            f"assignment for ?{n}.{i} has type {actual!r}, "
                            f"expected {expected!r}")
                    return got
                return SVar(n, i, apply_ty_subst(ty, types)) if types else t
            case Const(n, ty):
                return Const(n, apply_ty_subst(ty, types)) if types else t
            case Free(n, ty):
                return Free(n, apply_ty_subst(ty, types)) if types else t
            case App(f, a):
                return App(go(f), go(a))
            case Abs(h, ty, b):
                return Abs(h, apply_ty_subst(ty, types) if types else ty, go(b))
            case _:
                return t

    if not terms and not types:
        return t
    return beta_normalize(go(t))
