"""Higher-order unification of meta-terms with schematic variables.

The solvable core is Miller's pattern fragment (schematic variables
applied to distinct bound variables), decided most-generally with
pruning.  Non-pattern flex-rigid pairs fall back to a bounded Huet-style
search ordered imitation-before-projection, refined with a head-match
decomposition branch tried first so quasi-first-order problems get their
intuitive unifier as the first solution.  Flex-flex pairs are never
chosen for solving: identical-argument pattern pairs are identified
(their most general unifier), anything else is deferred and carried in
the resulting unifier.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .syntax import (
    Abs, App, Bound, Const, Free, Fun, SVar, Term, Ty, TypeUnifyError,
    apply_ty_subst, beta_eta, eta_contract, fun_ty, max_svar_index, mgu_type,
    schematic_vars, shift, strip_app, strip_fun, type_of,
)


@dataclass
class Unifier:
    """Assignments of schematic term/type variables plus deferred pairs."""

    terms: dict[tuple[str, int], Term] = field(default_factory=dict)
    types: dict[str, Ty] = field(default_factory=dict)
    flexflex: tuple[tuple[Term, Term], ...] = ()

    def is_empty(self) -> bool:
        return not self.terms and not self.types and not self.flexflex

    def __repr__(self):
        parts = [f"?{n}{i if i else ''} := {t!r}" for (n, i), t in self.terms.items()]
        parts += [f"'{n} := {t!r}" for n, t in self.types.items()]
        if self.flexflex:
            parts.append(f"[{len(self.flexflex)} flex-flex]")
        return "{" + ", ".join(parts) + "}"


@dataclass
class UnifyProblem:
    """Work list of pairs under a binder context, with a fresh-index supply.

    The counter strictly exceeds every schematic index in the problem, so
    invented variables can never collide with existing ones.
    """

    pairs: list[tuple[Term, Term]]
    depth: int
    fresh: int

    @staticmethod
    def of(*pairs: tuple[Term, Term], depth: int = 10) -> "UnifyProblem":
        fresh = 1 + max((max(max_svar_index(a), max_svar_index(b))
                         for a, b in pairs), default=-1)
        return UnifyProblem(list(pairs), depth, fresh)


class UnifierStream:
    """Lazy sequence of unifiers; flags truncation by the depth limit."""

    def __init__(self):
        self._gen = None
        self.depth_limited = False

    def __iter__(self):
        return self._gen

    def first(self) -> Unifier | None:
        return next(self._gen, None)


def is_pattern(t: Term) -> bool:
    """Every schematic occurrence is applied to distinct bound variables only."""

    def walk(t: Term) -> bool:
        head, args = strip_app(t)
        if isinstance(head, SVar):
            seen = set()
            for a in args:
                if not isinstance(a, Bound) or a.index in seen:
                    return False
                seen.add(a.index)
            return True
        if isinstance(head, Abs):
            if not walk(head.body):
                return False
        return all(walk(a) for a in args)

    return walk(t)


def classify_flexflex(t: Term, s: Term) -> bool:
    """True iff both heads are schematic variables (inputs beta-eta-normal)."""

    def head_of(u: Term) -> Term:
        while isinstance(u, Abs):
            u = u.body
        return strip_app(u)[0]

    return isinstance(head_of(t), SVar) and isinstance(head_of(s), SVar)


# ---------------------------------------------------------------------------
# Search machinery

class _Fail(Exception):
    """This branch admits no unifier."""


class _NonPattern(Exception):
    """Pattern solving does not apply here; fall back to search."""


class _Env:
    __slots__ = ("terms", "types", "fresh")

    def __init__(self, terms, types, fresh):
        self.terms = terms
        self.types = types
        self.fresh = fresh

    def copy(self) -> "_Env":
        return _Env(dict(self.terms), dict(self.types), self.fresh)

    def new_svar(self, base: str, ty: Ty) -> SVar:
        v = SVar(base, self.fresh, ty)
        self.fresh += 1
        return v

    def bind(self, v: SVar, value: Term):
        self.types = mgu_type(apply_ty_subst(v.ty, self.types),
                              type_of(value), self.types)
        self.terms[v.key] = value

    def resolve(self, t: Term) -> Term:
        """Apply current assignments, then beta-eta-normalize."""

        def go(t: Term) -> Term:
            match t:
                case SVar(n, i, ty):
                    got = self.terms.get((n, i))
                    if got is not None:
                        return go(got)
                    return SVar(n, i, apply_ty_subst(ty, self.types))
                case Const(n, ty):
                    return Const(n, apply_ty_subst(ty, self.types))
                case Free(n, ty):
                    return Free(n, apply_ty_subst(ty, self.types))
                case App(f, a):
                    return App(go(f), go(a))
                case Abs(h, ty, b):
                    return Abs(h, apply_ty_subst(ty, self.types), go(b))
                case _:
                    return t

        return beta_eta(go(t))


def _wrap(ctx: tuple[Ty, ...], t: Term) -> Term:
    """Close a term over its binder context (innermost type first)."""
    for ty in ctx:
        t = Abs("u", ty, t)
    return t


def _respine(head: Term, args) -> Term:
    for a in args:
        head = App(head, a)
    return head


def _result_type(ty: Ty, n: int) -> Ty:
    for _ in range(n):
        if not isinstance(ty, Fun):
            raise _Fail("spine exceeds its head type")
        ty = ty.res
    return ty


def _lambdas(tys, body: Term) -> Term:
    for ty in reversed(list(tys)):
        body = Abs("u", ty, body)
    return body


def _pattern_bind(head: SVar, args, rhs, env: _Env):
    """Miller step: solve ?F a1..an == rhs most generally, with pruning.

    Raises _Fail when no unifier exists, _NonPattern to fall back to search.
    """
    if not all(isinstance(a, Bound) for a in args):
        raise _NonPattern
    idxs = [a.index for a in args]
    if len(set(idxs)) != len(idxs):
        raise _NonPattern
    n = len(args)
    avail = {b: n - 1 - pos for pos, b in enumerate(idxs)}

    head_ty = apply_ty_subst(head.ty, env.types)
    arg_tys = strip_fun(head_ty)[0][:n]
    if len(arg_tys) < n:
        raise _Fail("pattern head applied beyond its type")

    def transfer(t: Term, d: int) -> Term:
        match t:
            case Bound(j):
                if j < d:
                    return t
                outer = j - d
                if outer in avail:
                    return Bound(avail[outer] + d)
                raise _Fail("bound variable escapes the pattern arguments")
            case App(_, _):
                h, sp = strip_app(t)
                if isinstance(h, SVar):
                    return transfer_flex(h, sp, d)
                hd = transfer(h, d) if isinstance(h, (Bound, Abs)) else retype(h)
                return _respine(hd, [transfer(a, d) for a in sp])
            case SVar(_, _, _):
                return transfer_flex(t, [], d)
            case Abs(hn, ty, b):
                return Abs(hn, apply_ty_subst(ty, env.types), transfer(b, d + 1))
            case Const(_, _) | Free(_, _):
                return retype(t)
        raise _Fail(f"unexpected term {t!r}")

    def retype(t: Term) -> Term:
        if isinstance(t, Const):
            return Const(t.name, apply_ty_subst(t.ty, env.types))
        return Free(t.name, apply_ty_subst(t.ty, env.types))

    def transfer_flex(h: SVar, sp, d: int) -> Term:
        if h.key == head.key:
            raise _Fail("occurs check")
        if h.key in env.terms:
            return transfer(env.resolve(_respine(h, sp)), d)
        h_ty = apply_ty_subst(h.ty, env.types)
        sp_tys = strip_fun(h_ty)[0][:len(sp)]
        if len(sp_tys) < len(sp):
            raise _Fail("spine exceeds its head type")
        transferred, keep = [], []
        for a in sp:
            if (isinstance(a, Bound) and a.index >= d
                    and (a.index - d) not in avail):
                keep.append(False)
                transferred.append(None)
                continue
            try:
                transferred.append(transfer(a, d))
                keep.append(True)
            except _Fail:
                if isinstance(a, Bound):
                    raise
                raise _NonPattern  # non-variable argument escaping scope
        hv = SVar(h.name, h.index, h_ty)
        if all(keep):
            return _respine(hv, transferred)
        # prune: h cannot depend on the dropped positions
        kept_tys = [ty for ty, k in zip(sp_tys, keep) if k]
        res = _result_type(h_ty, len(sp))
        fresh = env.new_svar(h.name, fun_ty(*kept_tys, res))
        spine = [Bound(len(sp) - 1 - pos) for pos, k in enumerate(keep) if k]
        env.bind(hv, _lambdas(sp_tys, _respine(fresh, spine)))
        return _respine(fresh, [a for a, k in zip(transferred, keep) if k])

    body = transfer(rhs, 0)
    env.bind(SVar(head.name, head.index, head_ty),
             eta_contract(_lambdas(arg_tys, body)))


def _decompose_rigid(ctx, t, s, env: _Env):
    """Both sides rigid-headed: match heads, pair up arguments."""
    th, targs = strip_app(t)
    sh, sargs = strip_app(s)
    match th, sh:
        case Const(n1, ty1), Const(n2, ty2):
            if n1 != n2:
                raise _Fail(f"constant clash {n1} vs {n2}")
        case Free(n1, ty1), Free(n2, ty2):
            if n1 != n2:
                raise _Fail(f"variable clash {n1} vs {n2}")
        case Bound(i), Bound(j):
            if i != j:
                raise _Fail("bound variable clash")
            ty1 = ty2 = None
        case _:
            raise _Fail("head clash")
    if ty1 is not None:
        try:
            env.types = mgu_type(ty1, ty2, env.types)
        except TypeUnifyError as e:
            raise _Fail(str(e))
    if len(targs) != len(sargs):
        raise _Fail("argument count mismatch")
    return [(ctx, a, b) for a, b in zip(targs, sargs)]


def _strip_binders(t: Term, s: Term):
    """Strip the common lambda prefix of two closed beta-eta-normal terms."""
    ctx: tuple[Ty, ...] = ()
    while True:
        if isinstance(t, Abs) and isinstance(s, Abs):
            ctx = (t.arg_ty,) + ctx
            t, s = t.body, s.body
        elif isinstance(t, Abs):
            ctx = (t.arg_ty,) + ctx
            t, s = t.body, App(shift(s, 1), Bound(0))
        elif isinstance(s, Abs):
            ctx = (s.arg_ty,) + ctx
            t, s = App(shift(t, 1), Bound(0)), s.body
        else:
            return ctx, t, s


def _solve(pairs, env: _Env, fuel: int, stream: UnifierStream):
    """Yield (env, deferred flex-flex pairs) for each solved branch."""
    queue = list(pairs)
    deferred: list[tuple[Term, Term]] = []
    nonpattern: list[tuple[Term, Term]] = []

    while True:
        progress = False
        flexflex: list[tuple[Term, Term]] = []
        while queue:
            ctx0, t0, s0 = queue.pop(0)
            tw = env.resolve(_wrap(ctx0, t0))
            sw = env.resolve(_wrap(ctx0, s0))
            if tw == sw:
                progress = True
                continue
            try:
                env.types = mgu_type(type_of(tw), type_of(sw), env.types)
            except TypeUnifyError as e:
                raise _Fail(str(e))
            ctx, t, s = _strip_binders(tw, sw)
            th, _targs = strip_app(t)
            sh, _sargs = strip_app(s)
            tflex, sflex = isinstance(th, SVar), isinstance(sh, SVar)
            if not tflex and not sflex:
                queue.extend(_decompose_rigid(ctx, t, s, env))
                progress = True
            elif tflex and sflex:
                flexflex.append((tw, sw))
            else:
                if sflex:
                    t, s, th, _targs = s, t, sh, _sargs
                try:
                    _pattern_bind(th, strip_app(t)[1], s, env)
                    progress = True
                except _NonPattern:
                    nonpattern.append((tw, sw))

        for tw, sw in flexflex:
            tw, sw = env.resolve(tw), env.resolve(sw)
            if tw == sw:
                progress = True
                continue
            a, b = tw, sw
            while isinstance(a, Abs) and isinstance(b, Abs):
                a, b = a.body, b.body
            th, targs = strip_app(a)
            sh, sargs = strip_app(b)
            if not (isinstance(th, SVar) and isinstance(sh, SVar)):
                queue.append(((), tw, sw))
                progress = True
                continue
            if (th.key != sh.key and targs == sargs
                    and all(isinstance(x, Bound) for x in targs)
                    and len({x.index for x in targs}) == len(targs)):
                lo, hi = sorted([th, sh], key=lambda v: (v.index, v.name))
                try:
                    env.bind(hi, SVar(lo.name, lo.index,
                                      apply_ty_subst(lo.ty, env.types)))
                except TypeUnifyError as e:
                    raise _Fail(str(e))
                progress = True
                continue
            deferred.append((tw, sw))

        if queue:
            continue
        if progress and (nonpattern or deferred):
            queue = [((), t, s) for t, s in nonpattern + deferred]
            nonpattern, deferred = [], []
            continue
        break

    if not nonpattern:
        yield env, deferred
        return

    if fuel <= 0:
        stream.depth_limited = True
        return

    # branch on the first non-pattern flex-rigid pair
    tw, sw = nonpattern[0]
    rest = [((), a, b) for a, b in nonpattern[1:] + deferred]
    ctx, t, s = _strip_binders(env.resolve(tw), env.resolve(sw))
    th, targs = strip_app(t)
    if not isinstance(th, SVar):
        t, s = s, t
        th, targs = strip_app(t)
    sh, sargs = strip_app(s)
    n = len(targs)
    fty = apply_ty_subst(th.ty, env.types)
    arg_tys = strip_fun(fty)[0][:n]
    res_ty = _result_type(fty, n)
    retry = [((), tw, sw)] + rest

    candidates: list[tuple[str, int | None]] = []
    if isinstance(sh, (Const, Free)):
        if len(sargs) == n:
            candidates.append(("headmatch", None))
        candidates.append(("imitate", None))
    candidates.extend(("project", i) for i in range(n))

    for kind, i in candidates:
        env2 = env.copy()
        try:
            thv = SVar(th.name, th.index, apply_ty_subst(th.ty, env2.types))
            if kind == "headmatch":
                value = (Const(sh.name, apply_ty_subst(sh.ty, env2.types))
                         if isinstance(sh, Const)
                         else Free(sh.name, apply_ty_subst(sh.ty, env2.types)))
                env2.bind(thv, value)
            elif kind == "imitate":
                sh_ty = apply_ty_subst(sh.ty, env2.types)
                s_arg_tys = strip_fun(sh_ty)[0][:len(sargs)]
                spine = [Bound(n - 1 - k) for k in range(n)]
                hargs = [_respine(env2.new_svar("H", fun_ty(*arg_tys, aty)), spine)
                         for aty in s_arg_tys]
                hd = (Const(sh.name, sh_ty) if isinstance(sh, Const)
                      else Free(sh.name, sh_ty))
                env2.bind(thv, eta_contract(_lambdas(arg_tys, _respine(hd, hargs))))
            else:
                pty = apply_ty_subst(arg_tys[i], env2.types)
                p_arg_tys, p_res = strip_fun(pty)
                env2.types = mgu_type(p_res, res_ty, env2.types)
                spine = [Bound(n - 1 - k) for k in range(n)]
                kargs = [_respine(env2.new_svar("H", fun_ty(*arg_tys, aty)), spine)
                         for aty in p_arg_tys]
                env2.bind(thv, _lambdas(arg_tys, _respine(Bound(n - 1 - i), kargs)))
        except (TypeUnifyError, _Fail):
            continue
        try:
            yield from _solve(retry, env2, fuel - 1, stream)
        except _Fail:
            continue


def unify_pairs(pairs: list[tuple[Term, Term]], max_solutions: int = 32,
                depth: int = 10) -> UnifierStream:
    """Simultaneously unify a list of term pairs; see ``unify``."""
    stream = UnifierStream()
    orig_keys = set()
    fresh = 0
    for a, b in pairs:
        orig_keys |= {v.key for v in schematic_vars(a) | schematic_vars(b)}
        fresh = max(fresh, max_svar_index(a) + 1, max_svar_index(b) + 1)

    def gen():
        types0: dict[str, Ty] = {}
        try:
            for a, b in pairs:
                types0 = mgu_type(type_of(a), type_of(b), types0)
        except TypeUnifyError:
            return
        env = _Env({}, types0, fresh)
        count = 0
        try:
            for env_out, deferred in _solve([((), a, b) for a, b in pairs],
                                            env, depth, stream):
                yield _finish(env_out, deferred, orig_keys)
                count += 1
                if count >= max_solutions:
                    stream.depth_limited = True
                    return
        except _Fail:
            return

    stream._gen = gen()
    return stream


def unify(t: Term, s: Term, max_solutions: int = 32,
          depth: int = 10) -> UnifierStream:
    """Lazy sequence of unifiers of t and s.

    An empty sequence signals there is no unifier; ``depth_limited`` on
    the stream records truncation by the search depth or solution cap.
    """
    return unify_pairs([(t, s)], max_solutions, depth)


def _finish(env: _Env, deferred, orig_keys) -> Unifier:
    terms = {}
    for key in env.terms:
        if key in orig_keys:
            n, i = key
            terms[key] = env.resolve(SVar(n, i, type_of(env.terms[key])))
    ff = tuple((env.resolve(a), env.resolve(b)) for a, b in deferred)
    return Unifier(terms, dict(env.types), ff)


def solve_flexflex_trivially(pairs, fresh: int) -> Unifier:
    """Absorbing assignments making each deferred flex-flex pair reflexive.

    Every remaining pair has schematic heads on both sides, so assigning
    each head a constant function onto a shared fresh schematic closes it.
    This is the canonical end-of-proof resolution of deferred constraints.
    """
    terms: dict[tuple[str, int], Term] = {}
    for a, b in pairs:
        while isinstance(a, Abs) and isinstance(b, Abs):
            a, b = a.body, b.body
        ah, aargs = strip_app(a)
        bh, bargs = strip_app(b)
        if not (isinstance(ah, SVar) and isinstance(bh, SVar)):
            raise ValueError("not a flex-flex pair")
        res = _result_type(ah.ty, len(aargs))
        joint = SVar("F", fresh, res)
        fresh += 1
        for head, nargs in ((ah, len(aargs)), (bh, len(bargs))):
            if head.key in terms:
                continue
            tys = strip_fun(head.ty)[0][:nargs]
            terms[head.key] = _lambdas(tys, joint)
    return Unifier(terms, {}, ())
