"""Residuals of occurrences through beta steps and traces."""

from __future__ import annotations

from .reduction import NotARedex, ReductionTrace, is_redex
from .syntax import Abs, App, Closure, OccurrenceError, Term, Var, format_occ, subterm_at

__all__ = ["free_occurrences", "residuals_step", "residuals_set_step", "residuals_trace", "used_in"]


def free_occurrences(t: Term, x: str) -> list:
    """Occurrences of the free variable *x* in *t*, in preorder."""
    out = []
    stack = [("", t)]
    while stack:
        p, node = stack.pop()
        if x not in node.fv:
            continue
        if isinstance(node, Var):
            out.append(p)
        elif isinstance(node, App):
            stack.append((p + "1", node.arg))
            stack.append((p + "0", node.fun))
        elif isinstance(node, Abs):
            stack.append((p + "0", node.body))
        elif isinstance(node, Closure):
            stack.append((p + "1", node.bound))
            if node.binder != x:
                stack.append((p + "0", node.body))
    return out


def _redex_at(t, r):
    try:
        s = subterm_at(t, r)
    except OccurrenceError:
        raise NotARedex(f"{format_occ(r)} is not an occurrence")
    if not is_redex(s):
        raise NotARedex(f"{format_occ(r)} is not a redex occurrence")
    return s


def residuals_step(t: Term, p: str, r: str) -> list:
    redex = _redex_at(t, r)
    subterm_at(t, p)
    return _residuals(redex, p, r)


def _residuals(redex, p, r):
    if p == r or p == r + "0":
        return []
    if not p.startswith(r):
        return [p]
    q = p[len(r):]
    if q.startswith("00"):
        return [r + q[2:]]
    # q starts with 1: the argument gets copied to each free occurrence of x
    rest = q[1:]
    xs = free_occurrences(redex.fun.body, redex.fun.binder)
    return sorted(r + k + rest for k in xs)


def residuals_set_step(t: Term, ps, r: str) -> list:
    redex = _redex_at(t, r)
    out = set()
    for p in ps:
        out.update(_residuals(redex, p, r))
    return sorted(out)


def residuals_trace(ps, rho: ReductionTrace) -> list:
    cur = sorted(set(ps))
    for step in rho.steps:
        if not cur:
            break
        cur = residuals_set_step(step.before, cur, step.occurrence)
    return cur


def used_in(r: str, rho: ReductionTrace) -> bool:
    """True iff some step of *rho* contracts *r* or one of its residuals."""
    cur = [r]
    for step in rho.steps:
        if not cur:
            return False
        if step.occurrence in cur:
            return True
        cur = residuals_set_step(step.before, cur, step.occurrence)
    return False
