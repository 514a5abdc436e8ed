"""Corpora, the four-way normalisation cross-check and observational tests.

The four checkers are: typability (principal derivation found and valid),
weak-head normalisation by the name strategy, termination of the
weak-head-needed driver, and call-by-need evaluation.  Verdicts are
``yes``, ``no-within-fuel`` or ``inconclusive`` (resource guard tripped).
When one checker says ``yes`` and another ran out of fuel, the latter is
retried with more fuel before its verdict is recorded.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import asdict, dataclass, field

from .cbneed import eval_need
from .derivations import expand_derivation, infer_principal
from .neededness import whnd_normalize
from .reduction import FuelExhausted, contract, run_strategy
from .syntax import (
    DELTA, I, K, OMEGA, Abs, App, Hole, Term, Var, all_names, fresh_name, parse, plug,
    replace_at, subterm_at,
)
from .typesys import (
    Arrow, BaseVar, Derivation, MultisetType, RuleViolation, abs_, app, ax, val, validate,
)

__all__ = [
    "CorpusSpec", "ZOO", "generate_corpus", "random_term",
    "YES", "NO", "INCONCLUSIVE", "check_equivalences", "EquivalenceRow", "run_equivalences",
    "enumerate_contexts", "check_observational", "Agree", "Counterexample",
    "random_normal_derivation", "random_expansion", "random_derivation",
]

YES, NO, INCONCLUSIVE = "yes", "no-within-fuel", "inconclusive"

_Z = {"I": I, "K": K, "Omega": OMEGA, "Delta": DELTA}

ZOO = {
    "I": I,
    "K": K,
    "Omega": OMEGA,
    "Delta": DELTA,
    "KIOmega": parse("K I Omega", _Z),
    "lam_Omega": parse("\\x. Omega", _Z),
    "needed_taxonomy": parse("(\\y. \\x. (I x) (I I)) (I I)", _Z),
    "need_trace": parse("(\\x1. I (x1 I)) (\\y. I y)", _Z),
    "Omega3": parse("(\\x. x x x) (\\x. x x x)"),
}


@dataclass
class CorpusSpec:
    seed: int = 1
    max_size: int = 14
    count: int = 1000
    closed_only: bool = False
    include_zoo: bool = True

    @classmethod
    def from_json(cls, obj):
        known = {k: obj[k] for k in ("seed", "max_size", "count", "closed_only", "include_zoo") if k in obj}
        return cls(**known)


_BINDERS = ["x", "y", "z", "w"]
_FREE = ["a", "b"]


def random_term(rng: random.Random, size: int, scope=(), closed: bool = False) -> Term:
    """A term with exactly *size* nodes, biased towards redexes."""
    scope = list(scope)
    if size <= 1:
        if scope and (closed or rng.random() < 0.85):
            return Var(rng.choice(scope))
        if closed:
            raise ValueError("no closed term of size 1 without variables in scope")
        return Var(rng.choice(_FREE))
    if size == 4 and rng.random() < 0.35:
        x = rng.choice(_BINDERS)
        return Abs(x, App(Var(x), Var(x)))
    if size == 3 and scope and rng.random() < 0.5:
        # self-application, the seed of most divergence
        v = Var(rng.choice(scope))
        return App(v, v)
    if size == 2 or (closed and not scope and size < 4):
        x = rng.choice(_BINDERS)
        return Abs(x, random_term(rng, size - 1, scope + [x], closed))
    roll = rng.random()
    if roll < 0.3:
        x = rng.choice(_BINDERS)
        return Abs(x, random_term(rng, size - 1, scope + [x], closed))
    if roll < 0.6 and size >= 4 and not (closed and not scope and size < 5):
        # a redex (\x.s) u
        left = rng.randint(2, size - 3 if closed and not scope else size - 2)
        x = rng.choice(_BINDERS)
        fun = Abs(x, random_term(rng, left - 1, scope + [x], closed))
        return App(fun, random_term(rng, size - 1 - left, scope, closed))
    left = rng.randint(1, size - 2)
    if closed and not scope:
        left = max(left, 2)
        if size - 1 - left < 2:
            x = rng.choice(_BINDERS)
            return Abs(x, random_term(rng, size - 1, scope + [x], closed))
    return App(random_term(rng, left, scope, closed), random_term(rng, size - 1 - left, scope, closed))


def generate_corpus(spec: CorpusSpec) -> list:
    rng = random.Random(spec.seed)
    out = list(ZOO.values()) if spec.include_zoo else []
    for _ in range(spec.count):
        low = 1 if not spec.closed_only else 2
        if rng.random() < 0.7:
            low = max(low, spec.max_size // 2 + 1)
        n = rng.randint(low, max(low, spec.max_size))
        if n >= 5 and rng.random() < 0.8:
            # an application at the root keeps the term out of WHNF more often
            left = rng.randint(2, n - 3)
            x = rng.choice(_BINDERS)
            fun = Abs(x, random_term(rng, left - 1, [x], spec.closed_only))
            if rng.random() < 0.3 and left >= 3:
                fun = random_term(rng, left, [], spec.closed_only)
            out.append(App(fun, random_term(rng, n - 1 - left, [], spec.closed_only)))
        else:
            out.append(random_term(rng, n, (), spec.closed_only))
    return out


# ---------------------------------------------------------------------------
# Four-way check

@dataclass
class EquivalenceRow:
    term: str
    typable: str
    wn_name: str
    wn_whnd: str
    wn_need: str
    mismatches: list = field(default_factory=list)

    def verdicts(self):
        return {"typable": self.typable, "wn_name": self.wn_name,
                "wn_whnd": self.wn_whnd, "wn_need": self.wn_need}

    def to_json(self):
        return asdict(self)


def _guard(fn):
    try:
        return fn()
    except (RecursionError, MemoryError):
        return INCONCLUSIVE


def _typable(t, fuel):
    d = infer_principal(t, fuel)
    if isinstance(d, FuelExhausted):
        return NO
    try:
        validate(d)
    except RuleViolation:
        return NO
    if d.subject != t:
        return NO
    return YES


def _wn_name(t, fuel):
    return YES if run_strategy(t, "name", fuel).normalized else NO


def _wn_whnd(t, fuel):
    return YES if whnd_normalize(t, fuel)[0] else NO


NEED_FUEL_FACTOR = 4


def _wn_need(t, fuel):
    res = eval_need(t, fuel * NEED_FUEL_FACTOR)
    return YES if res.status in ("answer", "stuck") else NO


CHECKERS = {"typable": _typable, "wn_name": _wn_name, "wn_whnd": _wn_whnd, "wn_need": _wn_need}


def check_equivalences(t: Term, fuel: int, escalation: int = 8) -> EquivalenceRow:
    verdicts = {name: _guard(lambda f=f: f(t, fuel)) for name, f in CHECKERS.items()}
    if YES in verdicts.values():
        for name, v in verdicts.items():
            if v == NO and escalation > 1:
                verdicts[name] = _guard(lambda f=CHECKERS[name]: f(t, fuel * escalation))
    definite = [(k, v) for k, v in verdicts.items() if v != INCONCLUSIVE]
    mismatches = [f"{a}={va} vs {b}={vb}" for (a, va), (b, vb) in itertools.combinations(definite, 2) if va != vb]
    return EquivalenceRow(str(t), mismatches=mismatches, **verdicts)


def run_equivalences(terms, fuel: int) -> dict:
    rows = [check_equivalences(t, fuel) for t in terms]
    return {
        "fuel": fuel,
        "terms": len(rows),
        "mismatch_count": sum(1 for r in rows if r.mismatches),
        "rows": [r.to_json() for r in rows],
    }


# ---------------------------------------------------------------------------
# Observational equivalence over small contexts

_POOL = [Var("x"), Var("y"), I, K, OMEGA]


def enumerate_contexts(max_size: int, pool=None, binders=("x", "y")):
    """Contexts ``□ | C t | t C | \\x.C`` with at most *max_size* constructors around the hole."""
    pool = list(_POOL if pool is None else pool)
    layer = [Hole()]
    yield Hole()
    for _ in range(max_size):
        nxt = []
        for c in layer:
            for p in pool:
                nxt.append(App(c, p))
                nxt.append(App(p, c))
            for x in binders:
                nxt.append(Abs(x, c))
        yield from nxt
        layer = nxt


@dataclass
class Agree:
    contexts_checked: int


@dataclass
class Counterexample:
    context: Term
    relation: str
    left: str
    right: str


def _wn_pair(t, fuel):
    return {"whnd": _guard(lambda: _wn_whnd(t, fuel)), "need": _guard(lambda: _wn_need(t, fuel))}


def check_observational(t: Term, u: Term, max_ctx_size: int, fuel: int, pool=None):
    """First context separating *t* and *u* (or either relation from the other)."""
    n = 0
    for ctx in enumerate_contexts(max_ctx_size, pool):
        n += 1
        vt, vu = _wn_pair(plug(ctx, t), fuel), _wn_pair(plug(ctx, u), fuel)
        for rel in ("whnd", "need"):
            a, b = vt[rel], vu[rel]
            if INCONCLUSIVE not in (a, b) and a != b:
                return Counterexample(ctx, rel, a, b)
        for side in (vt, vu):
            if INCONCLUSIVE not in side.values() and side["whnd"] != side["need"]:
                return Counterexample(ctx, "whnd-vs-need", side["whnd"], side["need"])
    return Agree(n)


# ---------------------------------------------------------------------------
# Random valid derivations (for property tests)

def random_normal_derivation(rng: random.Random, depth: int = 3, scope=("f", "g", "h")) -> Derivation:
    """A derivation built bottom-up from val, ax/app spines and abstractions."""
    roll = rng.random()
    if depth <= 0 or roll < 0.2:
        if rng.random() < 0.5:
            body = random_term(rng, rng.randint(1, 5), ["x"])
            return val(Abs("x", body))
        return ax(rng.choice(scope), BaseVar(rng.choice(["α1", "α2"])))
    if roll < 0.4:
        x = rng.choice(["x", "y"])
        body = random_normal_derivation(rng, depth - 1, tuple(scope) + (x,))
        return abs_(x, body)
    head = rng.choice(scope)
    n = rng.randint(1, 3)
    args = []
    for _ in range(n):
        k = rng.choice([0, 0, 1, 1, 2])
        if k == 0:
            args.append((random_term(rng, rng.randint(1, 5), list(scope)), []))
        else:
            a = random_normal_derivation(rng, depth - 1, scope)
            args.append((a.subject, [a] * k))
    tau = BaseVar(rng.choice(["α1", "α2"]))
    for _, ds in reversed(args):
        tau = Arrow(MultisetType(d.type for d in ds), tau)
    d = ax(head, tau)
    for term, ds in args:
        d = app(d, term, ds)
    return d


_EXTRA_ARGS = [OMEGA, I, Var("f"), parse("\\z. z z"), parse("g (\\x. x)")]


def random_expansion(rng: random.Random, t: Term):
    """A pair (t', p) with t' ->p t: one beta-expansion somewhere in *t*."""
    from .syntax import occurrences
    occs = sorted(occurrences(t))
    p = rng.choice(occs)
    s = subterm_at(t, p)
    w = fresh_name("v", all_names(t))
    kind = rng.random()
    if kind < 0.35:
        # w is fresh, so the argument is discarded
        expanded = App(Abs(w, s), rng.choice(_EXTRA_ARGS + [s]))
    elif kind < 0.55:
        expanded = App(Abs(w, Var(w)), s)
    else:
        expanded = _abstract_subterm(rng, s, w)
    t2 = replace_at(t, p, expanded)
    if contract(t2, p) != t:
        return None
    return t2, p


def _abstract_subterm(rng, s, w):
    """(\\w. s[q := w]) (s|q) for a subterm whose free variables are not bound above it."""
    from .syntax import _walk
    cands = []
    for q, node in _walk(s):
        bound_on_path = set()
        cur = s
        for c in q:
            if isinstance(cur, Abs):
                bound_on_path.add(cur.binder)
            cur = cur.children()[int(c)]
        if not (node.fv & bound_on_path):
            cands.append(q)
    q = rng.choice(cands)
    v = subterm_at(s, q)
    targets = [q] if rng.random() < 0.5 else [p for p in cands if subterm_at(s, p) == v]
    body = s
    for p in sorted(targets, key=len, reverse=True):
        body = replace_at(body, p, Var(w))
    return App(Abs(w, body), v)


def random_derivation(rng: random.Random, expansions: int = 4, depth: int = 3) -> Derivation:
    d = random_normal_derivation(rng, depth)
    for _ in range(expansions):
        pair = random_expansion(rng, d.subject)
        if pair is None:
            continue
        t2, p = pair
        d = expand_derivation(t2, p, d)
    return d
