"""Needed, head-needed and weak-head-needed redexes.

``classify`` uses the strategy characterisation: a redex is needed for a
normal-form class iff the matching deterministic strategy uses it.
``brute_force_classify`` is an independent oracle that searches every
reduction sequence avoiding the redex and its residuals.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

from .reduction import (
    NotARedex, contract, is_hnf, is_nf, is_redex, is_whnf, redex_occurrences,
    run_strategy, weak_head_redex,
)
from .residuals import residuals_set_step, used_in
from .syntax import Abs, App, OccurrenceError, Term, Var, format_occ, subterm_at

__all__ = ["NeedClass", "classify", "whnd_step", "whnd_normalize", "brute_force_classify", "FLAGS"]

# flag name -> (strategy, target predicate)
FLAGS = {
    "needed": ("leftmost", is_nf),
    "head_needed": ("head", is_hnf),
    "whnd_needed": ("name", is_whnf),
}


@dataclass(frozen=True)
class NeedClass:
    """Three flags; ``None`` means the check did not conclude (fuel/bounds)."""

    needed: Optional[bool]
    head_needed: Optional[bool]
    whnd_needed: Optional[bool]

    def flags(self) -> dict:
        return {"needed": self.needed, "head_needed": self.head_needed, "whnd_needed": self.whnd_needed}

    @property
    def conclusive(self) -> bool:
        return None not in (self.needed, self.head_needed, self.whnd_needed)

    @property
    def diverged(self) -> bool:
        return not self.conclusive

    def chain_ok(self) -> bool:
        """whnd => head => needed, ignoring undetermined flags."""
        w, h, n = self.whnd_needed, self.head_needed, self.needed
        if w and h is False:
            return False
        if h and n is False:
            return False
        if w and n is False:
            return False
        return True


def _check_redex(t, r):
    try:
        if not is_redex(subterm_at(t, r)):
            raise NotARedex(f"{format_occ(r)} is not a redex occurrence")
    except OccurrenceError:
        raise NotARedex(f"{format_occ(r)} is not an occurrence")


def classify(t: Term, r: str, fuel: int, traces: dict | None = None) -> NeedClass:
    """Flags via the leftmost/head/name strategies; undetermined when fuel runs out.

    If *traces* is a dict, the strategy runs are stored there by flag name.
    """
    _check_redex(t, r)
    out = {}
    for flag, (strategy, _) in FLAGS.items():
        res = run_strategy(t, strategy, fuel)
        if traces is not None:
            traces[flag] = res
        out[flag] = used_in(r, res.trace) if res.normalized else None
    return NeedClass(**out)


def whnd_step(t: Term, fuel_ignored=None):
    """Contract the weak-head redex (always weak-head needed); None on WHNF."""
    r = weak_head_redex(t)
    return None if r is None else contract(t, r)


def brute_force_classify(t: Term, r: str, depth: int = 8, width: int = 20000) -> NeedClass:
    """Search all reduction sequences from *t* that never contract *r* or a residual.

    A flag is False as soon as such a sequence reaches the target normal
    form, True when the search space is exhausted without one, and None when
    the *depth* (steps) or *width* (visited states) budget truncates it.
    """
    _check_redex(t, r)
    return NeedClass(**{flag: _avoid_search(t, r, target, depth, width)
                        for flag, (_, target) in FLAGS.items()})


def _avoid_search(t, r, target, depth, width):
    start = (t, (r,))
    seen = {(t.key, (r,))}
    queue = deque([(start, 0)])
    truncated = False
    while queue:
        (term, res), d = queue.popleft()
        if target(term):
            return False
        if d >= depth:
            truncated = True
            continue
        for s in redex_occurrences(term):
            if s in res:
                continue
            nxt = contract(term, s)
            nres = tuple(residuals_set_step(term, res, s))
            k = (nxt.key, nres)
            if k in seen:
                continue
            if len(seen) >= width:
                truncated = True
                continue
            seen.add(k)
            queue.append(((nxt, nres), d + 1))
    return None if truncated else True


def whnd_normalize(t: Term, fuel: int):
    """Weak-head normalisation by repeatedly firing weak-head needed redexes.

    Runs on a Krivine machine (closures and an argument stack) instead of
    rewriting terms, so it is an implementation independent of
    ``run_strategy``.  Returns ``(reached_whnf, beta_steps)``.
    """
    code, env, stack, steps = t, None, None, 0
    while True:
        cls = type(code)
        if cls is App:
            stack = ((code.arg, env), stack)
            code = code.fun
        elif cls is Abs:
            if stack is None:
                return True, steps
            if steps >= fuel:
                return False, steps
            (arg, stack) = stack
            env = (code.binder, arg, env)
            code = code.body
            steps += 1
        elif cls is Var:
            e = env
            while e is not None and e[0] != code.name:
                e = e[2]
            if e is None:
                return True, steps
            code, env = e[1]
        else:
            raise ValueError(f"not a pure term: {code}")
