"""Reduction and expansion of typing derivations, and principal typings.

Contracting a redex inside a derivation follows the maximal typed prefix
of the redex: if the redex itself is typed, its copies are rewritten by
typed substitution (and the derivation shrinks); otherwise the redex sits
inside an untyped argument or under a ``val`` leaf and only subjects change.
"""

from __future__ import annotations

from .reduction import (
    FuelExhausted, NotARedex, contract, is_redex, redex_occurrences, run_strategy,
)
from .syntax import Abs, App, Term, Var, all_names, fresh_name, format_occ, subst, subterm_at
from .typesys import (
    EMPTY, Arrow, BaseVar, Derivation, DerivationError, MultisetType,
    _tree_at, abs_, app, ax, maximal_typed_prefix, replace_at_derivation, val,
)

__all__ = [
    "rename_var", "typed_substitute", "reduce_derivation", "expand_derivation",
    "normal_principal", "infer_principal", "whnd_redexes_by_typing", "normalize_derivation",
]


def _derivation_names(d: Derivation) -> set:
    return all_names(d.subject)


def rename_var(d: Derivation, y: str, z: str) -> Derivation:
    """Rename the free variable *y* to *z* throughout *d*, avoiding capture."""
    if y == z or y not in d.subject.fv:
        return d
    if d.rule == "ax":
        return ax(z, d.type)
    if d.rule == "val":
        return val(subst(d.subject, y, Var(z)))
    if d.rule == "abs":
        b, prem = d.subject.binder, d.premises[0]
        if b == z:
            w = fresh_name(b, _derivation_names(d) | {y, z})
            prem, b = rename_var(prem, z, w), w
        return abs_(b, rename_var(prem, y, z))
    fun, args = d.premises[0], d.premises[1:]
    return app(rename_var(fun, y, z), subst(d.subject.arg, y, Var(z)),
               [rename_var(a, y, z) for a in args])


def typed_substitute(body: Derivation, x: str, args, arg_subject: Term | None = None) -> Derivation:
    """Replace each typed axiom for *x* in *body* by one of *args*.

    Axioms are visited left to right and each takes the first unused
    argument derivation with its type; untyped occurrences of *x* are
    substituted at the term level.
    """
    args = list(args)
    if arg_subject is None:
        if not args:
            raise DerivationError("typed substitution of no derivations needs the argument term")
        arg_subject = args[0].subject
    for a in args:
        if a.subject != arg_subject:
            raise DerivationError("argument derivations do not share a subject")
    if body.ctx.get(x) != MultisetType(a.type for a in args):
        raise DerivationError(f"{x} has type {body.ctx.get(x)} but arguments have "
                              f"{MultisetType(a.type for a in args)}")
    pool = list(args)
    out = _tsub(body, x, pool, arg_subject)
    assert not pool
    return out


def _tsub(d, x, pool, u):
    if x not in d.subject.fv:
        return d
    if d.rule == "ax":
        for i, a in enumerate(pool):
            if a.type == d.type:
                return pool.pop(i)
        raise DerivationError(f"no argument of type {d.type} left for {x}")
    if d.rule == "val":
        return val(subst(d.subject, x, u))
    if d.rule == "abs":
        b, prem = d.subject.binder, d.premises[0]
        if b in u.fv:
            z = fresh_name(b, _derivation_names(d) | all_names(u) | {x})
            prem, b = rename_var(prem, b, z), z
        return abs_(b, _tsub(prem, x, pool, u))
    fun = _tsub(d.premises[0], x, pool, u)
    new_args = [_tsub(a, x, pool, u) for a in d.premises[1:]]
    return app(fun, subst(d.subject.arg, x, u), new_args)


def reduce_derivation(d: Derivation, r: str) -> Derivation:
    """Contract the redex at *r* inside *d*, keeping context and type."""
    t = d.subject
    redex = subterm_at(t, r)
    if not is_redex(redex):
        raise NotARedex(f"{format_occ(r)} is not a redex occurrence")
    m = maximal_typed_prefix(d, r)
    q = r[len(m):]
    here = subterm_at(t, m)
    new_subject = contract(here, q)
    reduced = []
    for e in _tree_at(d, m):
        if q == "":
            lam = e.premises[0]
            if lam.rule != "abs":
                raise DerivationError(f"typed redex at {format_occ(r)} has a {lam.rule} function premise")
            reduced.append(typed_substitute(lam.premises[0], lam.subject.binder, e.premises[1:],
                                            arg_subject=e.subject.arg))
        elif q[0] == "0":
            # below a val leaf
            reduced.append(val(contract(e.subject, q)))
        else:
            # inside an argument with no typed copies
            reduced.append(app(e.premises[0], contract(e.subject.arg, q[1:]), e.premises[1:]))
    return replace_at_derivation(d, m, reduced, subject=new_subject)


def _anti(s: Term, x: str, u: Term, d: Derivation):
    """Split *d* (typing s{x:=u}) into a derivation of *s* and the copies typing *u*."""
    if x not in s.fv:
        return d, []
    if isinstance(s, Var):
        return ax(x, d.type), [d]
    if isinstance(s, App):
        if d.rule != "app":
            raise DerivationError("derivation does not match an application")
        fun, extracted = _anti(s.fun, x, u, d.premises[0])
        extracted = list(extracted)
        new_args = []
        for a in d.premises[1:]:
            da, ea = _anti(s.arg, x, u, a)
            new_args.append(da)
            extracted.extend(ea)
        return app(fun, s.arg, new_args), extracted
    if isinstance(s, Abs):
        if d.rule == "val":
            return val(s), []
        if d.rule != "abs":
            raise DerivationError("derivation does not match an abstraction")
        y, body = s.binder, s.body
        prem = d.premises[0]
        y_after = d.subject.binder
        if y_after != y or y in u.fv:
            z = fresh_name(y, all_names(s) | all_names(u) | _derivation_names(d) | {x})
            body = subst(body, y, Var(z))
            prem = rename_var(prem, y_after, z)
            y = z
        db, extracted = _anti(body, x, u, prem)
        return abs_(y, db), extracted
    raise DerivationError(f"cannot type {s}")


def expand_derivation(t: Term, r: str, d_after: Derivation) -> Derivation:
    """A derivation of *t* with the judgement of *d_after*, where t ->r subject(d_after)."""
    if contract(t, r) != d_after.subject:
        raise DerivationError("derivation subject is not the reduct of the term")
    return _expand(t, r, d_after)


def _expand(t, r, d):
    if r == "":
        lam, u = t.fun, t.arg
        body, extracted = _anti(lam.body, lam.binder, u, d)
        return app(abs_(lam.binder, body), u, extracted)
    if d.rule == "val":
        return val(t)
    head, rest = r[0], r[1:]
    if d.rule == "abs":
        prem = d.premises[0]
        if d.subject.binder != t.binder:
            prem = rename_var(prem, d.subject.binder, t.binder)
        return abs_(t.binder, _expand(t.body, rest, prem))
    if d.rule != "app":
        raise DerivationError("derivation does not match the term shape")
    fun, args = d.premises[0], d.premises[1:]
    if head == "0":
        return app(_expand(t.fun, rest, fun), t.arg, args)
    return app(fun, t.arg, [_expand(t.arg, rest, a) for a in args])


def normal_principal(w: Term, base: str = "α1") -> Derivation:
    """The minimal derivation of a weak-head normal form."""
    if isinstance(w, Abs):
        return val(w)
    spine = []
    h = w
    while isinstance(h, App):
        spine.append(h.arg)
        h = h.fun
    if not isinstance(h, Var):
        raise DerivationError(f"{w} is not in weak-head normal form")
    tau = BaseVar(base)
    for _ in spine:
        tau = Arrow(EMPTY, tau)
    d = ax(h.name, tau)
    for a in reversed(spine):
        d = app(d, a, [])
    return d


def infer_principal(t: Term, fuel: int):
    """Principal derivation of *t*, or the FuelExhausted result of the name strategy."""
    res = run_strategy(t, "name", fuel)
    if not res.normalized:
        return res
    d = normal_principal(res.result)
    for step in reversed(res.trace.steps):
        d = expand_derivation(step.before, step.occurrence, d)
    return d


def whnd_redexes_by_typing(t: Term, fuel: int):
    d = infer_principal(t, fuel)
    if isinstance(d, FuelExhausted):
        return d
    return sorted(set(redex_occurrences(t)) & d.toc)


def normalize_derivation(d: Derivation, limit: int | None = None):
    """Contract typed redexes (leftmost first) until none remain; returns the chain."""
    chain = [d]
    while limit is None or len(chain) <= limit:
        typed = [r for r in redex_occurrences(d.subject) if r in d.toc]
        if not typed:
            break
        d = reduce_derivation(d, typed[0])
        chain.append(d)
    return chain
