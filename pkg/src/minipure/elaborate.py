"""Elaboration of raw parse trees into well-typed kernel terms.

Identifiers resolve binder-first, then against the theory's constants,
and otherwise become free variables.  Types are inferred by first-order
unification over the simple types; constants get a fresh instance of
their declared generic type per occurrence.
"""

from __future__ import annotations

import itertools

from .kernel import TheoryCtx
from .parser import RAbs, RApp, RSVar, RVar, parse_term_text, parse_type_text
from .syntax import (
    PROP, Abs, App, Base, Bound, Const, Free, Fun, MiniPureError, SVar, TVar,
    Term, Ty, TypeUnifyError, apply_term_ty_subst, apply_ty_subst, mgu_type,
    type_of,
)


class ElabError(MiniPureError):
    pass


def elaborate_type(thy: TheoryCtx, raw) -> Ty:
    match raw:
        case ("base", name):
            if name not in thy.base_types():
                raise ElabError(f"unknown base type {name}")
            return Base(name)
        case ("tvar", name):
            return TVar(name)
        case ("fun", a, r):
            return Fun(elaborate_type(thy, a), elaborate_type(thy, r))
    raise ElabError(f"bad type tree {raw!r}")


class Elaborator:
    def __init__(self, thy: TheoryCtx,
                 free_types: dict[str, Ty] | None = None,
                 svar_types: dict[tuple[str, int], Ty] | None = None):
        self.thy = thy
        self.subst: dict[str, Ty] = {}
        self.supply = itertools.count()
        self.free_types = dict(free_types or {})
        self.svar_types = dict(svar_types or {})

    def fresh_ty(self) -> TVar:
        return TVar(f"t{next(self.supply)}")

    def freshen(self, ty: Ty) -> Ty:
        """A fresh instance of a generic constant type."""
        from .syntax import type_vars
        mapping = {v: self.fresh_ty() for v in sorted(type_vars(ty))}
        return apply_ty_subst(ty, mapping) if mapping else ty

    def unify(self, a: Ty, b: Ty, what: str):
        try:
            self.subst = mgu_type(a, b, self.subst)
        except TypeUnifyError as e:
            raise ElabError(
                f"type error in {what}: cannot match "
                f"{apply_ty_subst(a, self.subst)!r} with "
                f"{apply_ty_subst(b, self.subst)!r} ({e})")

    def infer(self, raw, bound: list[tuple[str, Ty]]) -> tuple[Term, Ty]:
        match raw:
            case RVar(name):
                for i, (bn, bty) in enumerate(bound):
                    if bn == name:
                        return Bound(i), bty
                generic = self.thy.const_type(name)
                if generic is not None:
                    ty = self.freshen(generic)
                    return Const(name, ty), ty
                ty = self.free_types.get(name)
                if ty is None:
                    ty = self.fresh_ty()
                    self.free_types[name] = ty
                return Free(name, ty), ty
            case RSVar(name, index):
                key = (name, index)
                ty = self.svar_types.get(key)
                if ty is None:
                    ty = self.fresh_ty()
                    self.svar_types[key] = ty
                return SVar(name, index, ty), ty
            case RApp(f, a):
                tf, tyf = self.infer(f, bound)
                ta, tya = self.infer(a, bound)
                res = self.fresh_ty()
                self.unify(tyf, Fun(tya, res), "application")
                return App(tf, ta), res
            case RAbs(var, body):
                vty = self.fresh_ty()
                tb, tyb = self.infer(body, [(var, vty)] + bound)
                return Abs(var, vty, tb), Fun(vty, tyb)
        raise ElabError(f"bad term tree {raw!r}")

    def finish(self, t: Term) -> Term:
        out = apply_term_ty_subst(t, self.subst)
        self.free_types = {n: apply_ty_subst(ty, self.subst)
                           for n, ty in self.free_types.items()}
        self.svar_types = {k: apply_ty_subst(ty, self.subst)
                           for k, ty in self.svar_types.items()}
        return out


def elaborate(thy: TheoryCtx, source, expect: Ty | None = None,
              free_types: dict[str, Ty] | None = None) -> Term:
    """Elaborate a raw tree (or formula text) to a certified term."""
    raw = parse_term_text(source) if isinstance(source, str) else source
    el = Elaborator(thy, free_types)
    t, ty = el.infer(raw, [])
    if expect is not None:
        el.unify(ty, expect, "formula")
    out = el.finish(t)
    try:
        thy.certify(out)
    except Exception as e:
        raise ElabError(str(e)) from e
    return out


def elaborate_prop(thy: TheoryCtx, source,
                   free_types: dict[str, Ty] | None = None) -> Term:
    return elaborate(thy, source, expect=PROP, free_types=free_types)
