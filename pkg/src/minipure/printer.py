"""Canonical concrete syntax for meta-types and meta-terms.

The printer emits exactly the ASCII surface language the parser reads, so
print-then-parse round-trips on every well-formed term.
"""

from __future__ import annotations

from .syntax import (
    Abs, App, Base, Bound, Const, Free, Fun, SVar, Term, Ty, TVar, shift,
    strip_app,
)

# precedence levels (higher binds tighter)
LVL_IMP = 3
LVL_EQ = 4
LVL_JUDGE = 5     # : < <=
LVL_ARROW = 6
LVL_PLUS = 7
LVL_OAPP = 8
LVL_APP = 9

INFIX = {
    "==>": (LVL_IMP, "r"),
    "==": (LVL_EQ, "n"),
    "<": (LVL_JUDGE, "n"),
    "<=": (LVL_JUDGE, "n"),
    "+": (LVL_PLUS, "l"),
    "`": (LVL_OAPP, "l"),
}

BINDER_CONSTS = {"lam": "lam", "Prod": "Prod", "Sum": "Sum"}


def print_type(ty: Ty) -> str:
    match ty:
        case Base(name):
            return name
        case TVar(name):
            return f"'{name}"
        case Fun(a, r):
            left = print_type(a)
            if isinstance(a, Fun):
                left = f"({left})"
            return f"{left} => {print_type(r)}"
    raise ValueError(f"not a type: {ty!r}")


def _svar_name(v: SVar) -> str:
    return f"?{v.name}{v.index if v.index else ''}"


class _Printer:
    def __init__(self):
        self.avoid: set[str] = set()

    def fresh(self, hint: str) -> str:
        base = hint if hint and hint != "u" else "x"
        name = base
        n = 1
        while name in self.avoid:
            name = f"{base}{n}"
            n += 1
        return name

    def go(self, t: Term, env: list[str], lvl: int) -> str:
        s = self.node(t, env)
        return s

    def node(self, t: Term, env: list[str], lvl: int = 0) -> str:
        match t:
            case Const(name, _):
                return self.const_app(name, [], env, lvl)
            case Free(name, _):
                return name
            case SVar():
                return _svar_name(t)
            case Bound(i):
                if i < len(env):
                    return env[i]
                return f"B.{i - len(env)}"
            case Abs():
                return self.binder("%", t, env, lvl)
            case App():
                head, args = strip_app(t)
                if isinstance(head, Const):
                    return self.const_app(head.name, args, env, lvl)
                out = self.node(head, env, LVL_APP + 1)
                for a in args:
                    out += " " + self.node(a, env, LVL_APP + 1)
                return self.wrap(out, LVL_APP, lvl)
        raise ValueError(f"not a term: {t!r}")

    def wrap(self, s: str, mylvl: int, ctxlvl: int) -> str:
        return f"({s})" if mylvl < ctxlvl else s

    def binder(self, kw: str, fn: Term, env: list[str], lvl: int,
               dom: Term | None = None) -> str:
        """Print a binder: %x. b, lam x. b, Prod x:A. B, !!x. b."""
        names: list[str] = []
        body = fn
        while True:
            if isinstance(body, Abs):
                hint, body = body.hint, body.body
            else:
                # eta-expand a non-abstraction operand so it can be displayed
                hint, body = "x", App(shift(body, 1), Bound(0))
            name = self.fresh(hint)
            self.avoid.add(name)
            names.append(name)
            if dom is not None:
                break  # Prod/Sum binders carry a domain, bind one at a time
            nxt = self.merge_target(kw, body)
            if nxt is None:
                break
            body = nxt
        body_lvl = 0 if kw == "!!" else LVL_ARROW
        inner = self.node(body, list(reversed(names)) + env, body_lvl)
        for name in names:
            self.avoid.discard(name)
        joined = " ".join(names)
        if dom is not None:
            head = f"{kw} {joined}:{self.node(dom, env, LVL_PLUS)}. {inner}"
        elif kw in ("%", "!!"):
            head = f"{kw}{joined}. {inner}"
        else:
            head = f"{kw} {joined}. {inner}"
        mylvl = 0 if kw == "!!" else LVL_ARROW
        return self.wrap(head, mylvl, lvl)

    @staticmethod
    def merge_target(kw: str, body: Term) -> Term | None:
        """The operand to keep binding when the body repeats the binder."""
        match kw, body:
            case "%", Abs():
                return body
            case "!!", App(Const("!!", _), arg):
                return arg
            case "lam", App(Const("lam", _), arg) if isinstance(arg, Abs):
                return arg
        return None

    def const_app(self, name: str, args, env, lvl: int) -> str:
        if name == "!!" and len(args) == 1:
            return self.binder("!!", args[0], env, lvl)
        if name == "==>" and len(args) == 2:
            left = self.node(args[0], env, LVL_IMP + 1)
            right = self.node(args[1], env, LVL_IMP)
            return self.wrap(f"{left} ==> {right}", LVL_IMP, lvl)
        if name == "has_type" and len(args) == 2:
            left = self.node(args[0], env, LVL_JUDGE + 1)
            right = self.node(args[1], env, LVL_JUDGE + 1)
            return self.wrap(f"{left} : {right}", LVL_JUDGE, lvl)
        if name in INFIX and len(args) == 2:
            mylvl, assoc = INFIX[name]
            ll = mylvl if assoc == "l" else mylvl + 1
            rl = mylvl if assoc == "r" else mylvl + 1
            left = self.node(args[0], env, ll)
            right = self.node(args[1], env, rl)
            op = name if name == "`" else f" {name} "
            sep = f"{left}{op}{right}" if name == "`" else f"{left}{op}{right}"
            return self.wrap(sep, mylvl, lvl)
        if name == "Prod" and len(args) == 2:
            fam = args[1]
            if isinstance(fam, Abs) and 0 not in _loose(fam.body):
                # non-dependent product prints as an arrow
                left = self.node(args[0], env, LVL_ARROW + 1)
                right = self.node(shift(fam.body, -1), env, LVL_ARROW)
                return self.wrap(f"{left} -> {right}", LVL_ARROW, lvl)
            return self.binder("Prod", fam, env, lvl, dom=args[0])
        if name == "Sum" and len(args) == 2:
            return self.binder("Sum", args[1], env, lvl, dom=args[0])
        if name == "lam" and len(args) == 1:
            return self.binder("lam", args[0], env, lvl)
        # plain prefix application
        out = name
        for a in args:
            out += " " + self.node(a, env, LVL_APP + 1)
        return self.wrap(out, LVL_APP if args else LVL_APP + 1, lvl)


def _loose(t: Term, depth: int = 0) -> set[int]:
    from .syntax import loose_bounds
    return loose_bounds(t, depth)


def print_term(t: Term) -> str:
    from .syntax import free_names
    pr = _Printer()
    pr.avoid = set(free_names(t))
    return pr.node(t, [], 0)
