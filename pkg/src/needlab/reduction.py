"""Beta contraction at an occurrence, redex enumeration and the three
deterministic strategies (name, head, leftmost) with explicit fuel."""

from __future__ import annotations

from dataclasses import dataclass, field

from .syntax import Abs, App, Term, OccurrenceError, format_occ, replace_at, subst, subterm_at

__all__ = [
    "NotARedex", "TraceStep", "ReductionTrace", "StrategyResult", "Normalized", "FuelExhausted",
    "is_redex", "beta", "redex_occurrences", "contract", "to_the_left", "leftmost_redex",
    "head_redex", "weak_head_redex", "is_nf", "is_hnf", "is_whnf", "run_strategy",
    "STRATEGIES", "trace_to_json", "trace_from_json",
]


class NotARedex(ValueError):
    pass


class TraceStep:
    """One contraction ``before ->occurrence after``.

    Either term may be given as a zero-argument builder; it is built on
    first access.  Long traces of growing terms stay linear this way.
    """

    __slots__ = ("occurrence", "_before", "_after")

    def __init__(self, before, occurrence: str, after):
        self._before = before
        self.occurrence = occurrence
        self._after = after

    @property
    def before(self) -> Term:
        if not isinstance(self._before, Term):
            self._before = self._before()
        return self._before

    @property
    def after(self) -> Term:
        if not isinstance(self._after, Term):
            self._after = self._after()
        return self._after

    def __repr__(self):
        return f"TraceStep({self.before}, {format_occ(self.occurrence)!r}, {self.after})"


@dataclass
class ReductionTrace:
    initial: Term
    steps: list = field(default_factory=list)

    @property
    def final(self) -> Term:
        return self.steps[-1].after if self.steps else self.initial

    @property
    def occurrences(self) -> list:
        return [s.occurrence for s in self.steps]

    def __len__(self):
        return len(self.steps)

    @classmethod
    def replay(cls, initial: Term, occs) -> "ReductionTrace":
        trace = cls(initial)
        cur = initial
        for r in occs:
            nxt = contract(cur, r)
            trace.steps.append(TraceStep(cur, r, nxt))
            cur = nxt
        return trace


@dataclass
class StrategyResult:
    trace: ReductionTrace

    @property
    def normalized(self) -> bool:
        return isinstance(self, Normalized)


@dataclass
class Normalized(StrategyResult):
    result: Term = None


@dataclass
class FuelExhausted(StrategyResult):
    pass


def is_redex(t: Term) -> bool:
    return isinstance(t, App) and isinstance(t.fun, Abs)


def beta(t: Term) -> Term:
    if not is_redex(t):
        raise NotARedex(f"{t} is not a beta-redex")
    return subst(t.fun.body, t.fun.binder, t.arg)


def redex_occurrences(t: Term) -> list:
    """roc(t), in preorder (which is also the to-the-left order)."""
    out = []
    stack = [("", t)]
    while stack:
        p, node = stack.pop()
        if not node.has_redex:
            continue
        if is_redex(node):
            out.append(p)
        kids = node.children()
        for i in reversed(range(len(kids))):
            stack.append((p + str(i), kids[i]))
    return out


def contract(t: Term, r: str) -> Term:
    try:
        s = subterm_at(t, r)
    except OccurrenceError:
        raise NotARedex(f"occurrence {format_occ(r)} is not in the term")
    return replace_at(t, r, beta(s))


def _occ_less(r1: str, r2: str) -> bool:
    # Proper prefix first, otherwise the first differing letter decides.
    # Over {0,1} this is exactly Python's string order.
    return r1 != r2 and r1 < r2


def to_the_left(t: Term, r1: str, r2: str) -> bool:
    for r in (r1, r2):
        try:
            if not is_redex(subterm_at(t, r)):
                raise NotARedex(f"{format_occ(r)} is not a redex occurrence")
        except OccurrenceError:
            raise NotARedex(f"{format_occ(r)} is not an occurrence")
    return _occ_less(r1, r2)


def leftmost_redex(t: Term):
    stack = [("", t)]
    while stack:
        p, node = stack.pop()
        if not node.has_redex:
            continue
        if is_redex(node):
            return p
        kids = node.children()
        for i in reversed(range(len(kids))):
            stack.append((p + str(i), kids[i]))
    return None


def _spine_redex(t: Term, under_lambda: bool):
    p = ""
    node = t
    while True:
        if is_redex(node):
            return p
        if isinstance(node, App):
            node, p = node.fun, p + "0"
        elif isinstance(node, Abs) and under_lambda:
            node, p = node.body, p + "0"
        else:
            return None


def head_redex(t: Term):
    return _spine_redex(t, True)


def weak_head_redex(t: Term):
    return _spine_redex(t, False)


def is_nf(t: Term) -> bool:
    return not t.has_redex


def is_hnf(t: Term) -> bool:
    return head_redex(t) is None


def is_whnf(t: Term) -> bool:
    return weak_head_redex(t) is None


STRATEGIES = {
    "name": (weak_head_redex, is_whnf),
    "head": (head_redex, is_hnf),
    "leftmost": (leftmost_redex, is_nf),
}


def _rewind(head, args):
    while args is not None:
        head = App(head, args[0])
        args = args[1]
    return head


def _unwind(t, args, n):
    while type(t) is App:
        args = (t.arg, args)
        n += 1
        t = t.fun
    return t, args, n


def _run_name(t: Term, fuel: int) -> StrategyResult:
    # Weak-head reduction on a spine: a head and a persistent list of arguments.
    trace = ReductionTrace(t)
    head, args, n = _unwind(t, None, 0)
    while True:
        if type(head) is not Abs or args is None:
            return Normalized(trace, _rewind(head, args) if trace.steps else t)
        if len(trace.steps) == fuel:
            return FuelExhausted(trace)
        arg, rest = args
        contractum = subst(head.body, head.binder, arg)
        before = t if not trace.steps else (lambda h=head, a=args: _rewind(h, a))
        trace.steps.append(TraceStep(before, "0" * (n - 1), lambda h=contractum, a=rest: _rewind(h, a)))
        head, args, n = _unwind(contractum, rest, n - 1)


def run_strategy(t: Term, strategy: str, fuel: int) -> StrategyResult:
    """Contract the strategy's redex until its normal form or until *fuel* steps."""
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    if strategy == "name":
        return _run_name(t, fuel)
    select, target = STRATEGIES[strategy]
    trace = ReductionTrace(t)
    cur = t
    for _ in range(fuel + 1):
        r = select(cur)
        if r is None:
            # every term either has the selected redex or is in the target form
            assert target(cur)
            return Normalized(trace, cur)
        if len(trace.steps) == fuel:
            break
        nxt = contract(cur, r)
        trace.steps.append(TraceStep(cur, r, nxt))
        cur = nxt
    return FuelExhausted(trace)


def trace_to_json(trace: ReductionTrace, status=None, term_json=None):
    from .syntax import term_to_json
    enc = term_json or term_to_json
    out = {
        "initial": enc(trace.initial),
        "steps": [{"occ": format_occ(s.occurrence), "after": enc(s.after)} for s in trace.steps],
    }
    if status is not None:
        out["status"] = status
    return out


def trace_from_json(obj) -> ReductionTrace:
    from .syntax import parse_occ, term_from_json
    initial = term_from_json(obj["initial"])
    occs = [parse_occ(s["occ"]) for s in obj.get("steps", [])]
    trace = ReductionTrace.replay(initial, occs)
    for step, raw in zip(trace.steps, obj.get("steps", [])):
        if "after" in raw and term_from_json(raw["after"]) != step.after:
            raise ValueError(f"trace step at {raw['occ']} does not match its recorded reduct")
    return trace
