"""Shared builders for the test suite: parsing shorthands, an exhaustive
small-term enumerator, a hypothesis strategy, and the lemma checkers that
both the lemma tests and the acceptance suite run."""

import functools
import itertools
import random

from hypothesis import strategies as st

from needlab.derivations import reduce_derivation, typed_substitute
from needlab.harness import random_derivation
from needlab.reduction import (
    contract, head_redex, is_whnf, leftmost_redex, redex_occurrences, weak_head_redex,
)
from needlab.residuals import residuals_set_step, residuals_step
from needlab.syntax import DELTA, I, K, OMEGA, Abs, App, Var, occurrences, parse, subterm_at
from needlab.typesys import tree_at, validate

ZOO = {"I": I, "K": K, "Omega": OMEGA, "Delta": DELTA}


def P(src):
    return parse(src, ZOO)


@functools.lru_cache(maxsize=None)
def _terms_of_size(n, scope, free):
    if n == 1:
        return tuple(Var(v) for v in scope + free)
    out = []
    for b in ("x", "y"):
        inner = scope if b in scope else scope + (b,)
        out.extend(Abs(b, body) for body in _terms_of_size(n - 1, inner, free))
    for k in range(1, n - 1):
        for f, a in itertools.product(_terms_of_size(k, scope, free), _terms_of_size(n - 1 - k, scope, free)):
            out.append(App(f, a))
    return tuple(out)


def enumerate_terms(max_size, free=("a",)):
    """Every term up to *max_size* nodes over binders x, y and the given free names."""
    for n in range(1, max_size + 1):
        yield from _terms_of_size(n, (), tuple(free))


def terms_with_redexes(max_size, free=("a",)):
    return [t for t in enumerate_terms(max_size, free) if t.has_redex]


_names = st.sampled_from(["x", "y", "z"])
_leaves = st.one_of(_names.map(Var), st.sampled_from([I, DELTA, K]))
terms = st.recursive(
    _leaves,
    lambda c: st.one_of(st.builds(App, c, c), st.builds(Abs, _names, c),
                        st.builds(lambda b, body, a: App(Abs(b, body), a), _names, c, c)),
    max_leaves=7,
)


def derivation_pool(n, seed=0):
    """*n* random valid derivations from a fixed seed (deterministic instances)."""
    rng = random.Random(seed)
    return [random_derivation(rng, expansions=rng.randint(1, 5), depth=rng.randint(1, 3)) for _ in range(n)]


# ---------------------------------------------------------------------------
# lemma checkers: each returns a list of violations (empty when the lemma holds)

def _left(a, b):
    return a != b and a < b


def check_left_preservation(t):
    """l left of r, s not a prefix of l: l stays a redex and stays left of all of r/s."""
    bad = []
    roc = redex_occurrences(t)
    for s in roc:
        t2 = None
        for l, r in itertools.permutations(roc, 2):
            if not _left(l, r) or s == l or l.startswith(s):
                continue
            t2 = t2 or contract(t, s)
            if l not in redex_occurrences(t2):
                bad.append((t, l, r, s, "l lost"))
                continue
            for r2 in residuals_step(t, r, s):
                if not _left(l, r2):
                    bad.append((t, l, r, s, r2))
    return bad


def check_leftmost_survives(t, rng, steps=3):
    """A trace avoiding the leftmost redex and its residuals keeps it leftmost."""
    l = leftmost_redex(t)
    if l is None:
        return []
    res = [l]
    cur = t
    for _ in range(steps):
        choices = [s for s in redex_occurrences(cur) if s not in res]
        if not choices:
            break
        s = rng.choice(choices)
        res = residuals_set_step(cur, res, s)
        cur = contract(cur, s)
        if leftmost_redex(cur) != l or res != [l]:
            return [(t, l, s, cur)]
    return []


def typed_beta_instances(d):
    """(body, x, args, arg_term) for each copy of each typed redex of *d*."""
    for r in redex_occurrences(d.subject):
        if r not in d.toc:
            continue
        for e in tree_at(d, r):
            lam = e.premises[0]
            yield lam.premises[0], lam.subject.binder, list(e.premises[1:]), e.subject.arg


def check_typed_substitution_occurrences(d):
    """Typedness of old positions is unchanged and typed x-positions carry the args' toc."""
    bad = []
    for body, x, args, u in typed_beta_instances(d):
        out = typed_substitute(body, x, args, arg_subject=u)
        validate(out)
        for p in occurrences(body.subject):
            if (p in body.toc) != (p in out.toc):
                bad.append((body, x, p))
        xs = [p for p in body.toc if subterm_at(body.subject, p) == Var(x)]
        below = {q[len(p):] for p in xs for q in out.toc if q.startswith(p)}
        want = set().union(*(a.toc for a in args)) if args else set()
        if below != want:
            bad.append((body, x, "below", below, want))
    return bad


def check_typed_descendant(d):
    bad = []
    t = d.subject
    for r in redex_occurrences(t):
        d2 = reduce_derivation(d, r)
        for p in occurrences(t):
            if p in (r, r + "0"):
                continue
            lhs = p in d.toc
            rhs = any(q in d2.toc for q in residuals_step(t, p, r))
            if lhs != rhs:
                bad.append((d, r, p, lhs, rhs))
    return bad


def check_typed_ancestor(d, rng, steps=3):
    """Along a random trace, a typed residual always has a typed ancestor."""
    bad = []
    t0 = d.subject
    tracked = {p: [p] for p in occurrences(t0)}
    cur = d
    for _ in range(steps):
        roc = redex_occurrences(cur.subject)
        if not roc:
            break
        r = rng.choice(roc)
        tracked = {p: residuals_set_step(cur.subject, qs, r) for p, qs in tracked.items()}
        cur = reduce_derivation(cur, r)
        for p, qs in tracked.items():
            if any(q in cur.toc for q in qs) and p not in d.toc:
                bad.append((d, p, qs))
    return bad


def check_normal_is_whnf(d):
    if set(redex_occurrences(d.subject)) & d.toc:
        return []
    return [] if is_whnf(d.subject) else [d]


def check_weak_head_typed(d):
    w = weak_head_redex(d.subject)
    return [] if w is None or w in d.toc else [(d, w)]


def check_classes_nest(t):
    from needlab.reduction import is_hnf, is_nf
    if is_nf(t) and not is_hnf(t):
        return [t]
    if is_hnf(t) and not is_whnf(t):
        return [t]
    w, h, l = weak_head_redex(t), head_redex(t), leftmost_redex(t)
    if w is not None and (w != l or set(w) - {"0"}):
        return [t]
    if h is not None and set(h) - {"0"}:
        return [t]
    return []


# ---------------------------------------------------------------------------
# lemma runners over fixed enumerated instances: name -> () -> (instances, violations)

def _derivation_instances():
    """Random valid derivations plus principal derivations of small enumerated terms."""
    from needlab.derivations import infer_principal
    from needlab.reduction import FuelExhausted
    out = derivation_pool(300, seed=1)
    for t in enumerate_terms(6, free=("a",)):
        d = infer_principal(t, 50)
        if not isinstance(d, FuelExhausted):
            out.append(d)
    return out


@functools.lru_cache(maxsize=None)
def derivation_instances():
    return tuple(_derivation_instances())


def run_left_preservation():
    n, bad = 0, []
    for t in terms_with_redexes(9, free=("a",)):
        roc = redex_occurrences(t)
        n += sum(1 for s in roc for l, r in itertools.permutations(roc, 2)
                 if _left(l, r) and s != l and not l.startswith(s))
        bad += check_left_preservation(t)
    return n, bad


def run_leftmost_survives():
    n, bad = 0, []
    for i, t in enumerate(terms_with_redexes(8, free=("a",))):
        if len(redex_occurrences(t)) > 1:
            n += 1
            bad += check_leftmost_survives(t, random.Random(i))
    return n, bad


def run_typed_substitution():
    ds = derivation_instances()
    return sum(1 for d in ds for _ in typed_beta_instances(d)), \
        [b for d in ds for b in check_typed_substitution_occurrences(d)]


def run_typed_descendant():
    ds = derivation_instances()
    return sum(len(redex_occurrences(d.subject)) for d in ds), [b for d in ds for b in check_typed_descendant(d)]


def run_typed_ancestor():
    ds = derivation_instances()
    return len(ds), [b for i, d in enumerate(ds) for b in check_typed_ancestor(d, random.Random(i))]


def run_normal_is_whnf():
    from needlab.derivations import normalize_derivation
    finals = [normalize_derivation(d)[-1] for d in derivation_instances()]
    return len(finals), [b for d in finals for b in check_normal_is_whnf(d)]


def run_weak_head_typed():
    ds = [d for d in derivation_instances() if weak_head_redex(d.subject) is not None]
    return len(ds), [b for d in ds for b in check_weak_head_typed(d)]


LEMMAS = {
    "left preservation of redexes": run_left_preservation,
    "leftmost redex survives avoiding traces": run_leftmost_survives,
    "typed substitution keeps typed positions": run_typed_substitution,
    "typed descendants": run_typed_descendant,
    "typed ancestors": run_typed_ancestor,
    "normal derivations type weak-head normal forms": run_normal_is_whnf,
    "weak-head redex is typed": run_weak_head_typed,
}
