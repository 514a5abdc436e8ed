"""Call-by-need evaluation with explicit substitutions.

Two rules, applied inside need contexts:

* dB:  ``L<\\x.t> u  ->  L<t[x/u]>``
* lsv: ``N<<x>>[x/L<v>]  ->  L<N<v>[x/v]>``

``L`` is a (possibly empty) chain of closures.  The evaluator walks down
the needed position (left of applications, into closure bodies, and into
the bound term of a closure whose variable is needed) and fires the unique
rule found there.  Renamings use deterministic fresh names ``x1, x2, ...``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .syntax import Abs, App, Closure, Term, Var, is_pure, rename, subst

__all__ = [
    "NeedRedex", "Answer", "Stuck", "NeedStep", "NeedResult",
    "decompose_need", "step_need", "eval_need", "unfold", "embed", "freshen_binders",
]


@dataclass(frozen=True)
class NeedRedex:
    """A decomposition: *frames* is the path from the root to the focus.

    Frames are ``(kind, node, hole)``: ``app`` (went left of an
    application), ``body`` (went into a closure body) or ``bound`` (went
    into a closure's bound term because the variable at *hole* inside its
    body is needed).
    """

    rule: str
    occurrence: str
    focus: Term
    frames: tuple
    hole: str = ""

    def replug(self, t: Term) -> Term:
        return _replug(self.frames, t)


@dataclass(frozen=True)
class Answer:
    term: Term


@dataclass(frozen=True)
class Stuck:
    term: Term
    variable: str


_DIRECTION = {"app": "0", "body": "0", "bound": "1"}


def _descend(frames, node):
    """Walk to the needed position, extending *frames* in place.

    Frame nodes are only trusted for their off-path children; the on-path
    child is rebuilt from the deeper frames when needed.  Returns
    ``("dB" | "lsv", i, focus)`` with *i* the index of the redex frame,
    ``("answer", None, None)`` or ``("stuck", name, None)``.
    """
    while True:
        cls = type(node)
        if cls is App:
            frames.append(("app", node, None))
            node = node.fun
        elif cls is Closure:
            frames.append(("body", node, None))
            node = node.body
        elif cls is Abs:
            j = len(frames)
            while j > 0 and frames[j - 1][0] == "body":
                j -= 1
            if j == 0:
                return "answer", None, None
            kind, c, _ = frames[j - 1]
            inner = _replug(frames[j:], node)
            if kind == "app":
                return "dB", j - 1, App(inner, c.arg)
            return "lsv", j - 1, Closure(c.body, c.binder, inner)
        elif cls is Var:
            i = len(frames) - 1
            while i >= 0 and not (frames[i][0] == "body" and frames[i][1].binder == node.name):
                i -= 1
            if i < 0:
                return "stuck", node.name, None
            c = frames[i][1]
            hole = "".join(_DIRECTION[f[0]] for f in frames[i + 1:])
            body = _replug(frames[i + 1:], node)
            del frames[i:]
            frames.append(("bound", Closure(body, c.binder, c.bound), hole))
            node = c.bound
        else:
            raise ValueError(f"cannot evaluate {node}")


def _occurrence(frames) -> str:
    return "".join(_DIRECTION[f[0]] for f in frames)


def _replug(frames, t: Term) -> Term:
    cur = t
    for kind, node, _ in reversed(frames):
        if kind == "app":
            cur = App(cur, node.arg)
        elif kind == "body":
            cur = Closure(cur, node.binder, node.bound)
        else:
            cur = Closure(node.body, node.binder, cur)
    return cur


def decompose_need(t: Term):
    """The need-context decomposition of *t*: a NeedRedex, Answer or Stuck."""
    frames = []
    kind, info, focus = _descend(frames, t)
    if kind == "answer":
        return Answer(t)
    if kind == "stuck":
        return Stuck(t, info)
    hole = frames[info][2]
    return NeedRedex(kind, _occurrence(frames[:info]), focus, tuple(frames[:info]), hole or "")


def _wrap_list(chain, core):
    for binder, bound in reversed(chain):
        core = Closure(core, binder, bound)
    return core


class _Names:
    """Fresh-name supply plus binder multiplicities (renamings never add duplicates)."""

    def __init__(self, t):
        self.used = set()
        self.binders = {}
        stack = [t]
        while stack:
            n = stack.pop()
            stack.extend(n.children())
            if isinstance(n, Var):
                self.used.add(n.name)
            elif isinstance(n, (Abs, Closure)):
                self.used.add(n.binder)
                self.binders[n.binder] = self.binders.get(n.binder, 0) + 1
        self.next = 1

    def fresh(self, base="x"):
        while f"{base}{self.next}" in self.used:
            self.next += 1
        name = f"{base}{self.next}"
        self.used.add(name)
        self.binders[name] = 1
        return name

    def retire(self, binder):
        self.binders[binder] = self.binders.get(binder, 1) - 1


def _freshen_list(term, avoid, names):
    """Split the outer closure chain of *term*, renaming binders in *avoid*."""
    chain = []
    while isinstance(term, Closure):
        binder, body = term.binder, term.body
        if binder in avoid:
            new = names.fresh()
            body = rename(body, {binder: new})
            binder = new
        chain.append((binder, term.bound))
        term = body
    return chain, term


def freshen_binders(t: Term, names) -> Term:
    """Alpha-rename every binder of *t* to a fresh name."""
    if isinstance(t, Var):
        return t
    if isinstance(t, App):
        return App(freshen_binders(t.fun, names), freshen_binders(t.arg, names))
    if isinstance(t, Abs):
        new = names.fresh()
        return Abs(new, freshen_binders(rename(t.body, {t.binder: new}), names))
    if isinstance(t, Closure):
        new = names.fresh()
        return Closure(freshen_binders(rename(t.body, {t.binder: new}), names), new,
                       freshen_binders(t.bound, names))
    return t


def _fire_db(redex: App, names):
    chain, lam = _freshen_list(redex.fun, redex.arg.fv, names)
    x, body = lam.binder, lam.body
    # cosmetic: closures get a name of their own if the binder is shared
    if names.binders.get(x, 0) > 1:
        names.retire(x)
        new = names.fresh()
        body = rename(body, {x: new})
        x = new
    return _wrap_list(chain, Closure(body, x, redex.arg))


def _substitute_hole(body, hole, value, avoid, names):
    """Put *value* at *hole* in *body*, renaming closures on the way that would capture *avoid*."""
    trail = []
    cur = body
    for c in hole:
        cls = type(cur)
        if cls is App:
            trail.append((cur, c, None))
            cur = cur.fun if c == "0" else cur.arg
        elif cls is Closure:
            if c == "1":
                trail.append((cur, c, None))
                cur = cur.bound
            else:
                binder, inner = cur.binder, cur.body
                if binder in avoid:
                    names.retire(binder)
                    new = names.fresh()
                    inner = rename(inner, {binder: new})
                    binder = new
                trail.append((cur, c, binder))
                cur = inner
        else:
            raise ValueError("need path goes through an abstraction")
    out = value
    for node, c, binder in reversed(trail):
        if type(node) is App:
            out = App(out, node.arg) if c == "0" else App(node.fun, out)
        elif c == "1":
            out = Closure(node.body, node.binder, out)
        else:
            out = Closure(out, binder, node.bound)
    return out


def _fire_lsv(c: Closure, hole: str, names):
    body, x = c.body, c.binder
    chain, v = _freshen_list(c.bound, body.fv - {x}, names)
    if x in v.fv:
        names.retire(x)
        new = names.fresh()
        body = rename(body, {x: new})
        x = new
    copy = freshen_binders(v, names)
    return _wrap_list(chain, Closure(_substitute_hole(body, hole, copy, v.fv, names), x, v))


class NeedStep:
    """One need step; the whole terms are rebuilt on demand."""

    __slots__ = ("rule", "_occ", "_frames", "_old", "_new", "_before", "_after")

    def __init__(self, rule, frames, old, new):
        self.rule = rule
        self._frames = frames
        self._old, self._new = old, new
        self._before = self._after = self._occ = None

    def _materialize(self):
        if self._before is None:
            self._before = _replug(self._frames, self._old)
            self._after = _replug(self._frames, self._new)
            self._occ = _occurrence(self._frames)
            self._frames = None

    @property
    def before(self) -> Term:
        self._materialize()
        return self._before

    @property
    def after(self) -> Term:
        self._materialize()
        return self._after

    @property
    def occurrence(self) -> str:
        self._materialize()
        return self._occ

    def __repr__(self):
        return f"NeedStep({self.rule}, {self.after})"


class _NeedMachine:
    def __init__(self, t):
        self.frames = []
        self.node = t
        self.names = _Names(t)

    def step(self):
        kind, info, focus = _descend(self.frames, self.node)
        if kind == "answer":
            return "answer", None
        if kind == "stuck":
            return "stuck", info
        hole = self.frames[info][2]
        if kind == "dB":
            new = _fire_db(focus, self.names)
        else:
            new = _fire_lsv(focus, hole, self.names)
        del self.frames[info:]
        self.node = new
        return kind, NeedStep(kind, list(self.frames), focus, new)


def step_need(t: Term):
    """One need step (a NeedStep), or the Answer / Stuck outcome."""
    kind, info = _NeedMachine(t).step()
    if kind == "answer":
        return Answer(t)
    if kind == "stuck":
        return Stuck(t, info)
    return info


@dataclass
class NeedResult:
    status: str  # answer | stuck | fuel
    initial: Term
    steps: list = field(default_factory=list)
    variable: str | None = None

    @property
    def term(self) -> Term:
        return self.steps[-1].after if self.steps else self.initial

    @property
    def rules(self) -> list:
        return [s.rule for s in self.steps]


def eval_need(t: Term, fuel: int) -> NeedResult:
    """Iterate need steps until an answer, a stuck variable, or *fuel* steps."""
    res = NeedResult("fuel", t)
    machine = _NeedMachine(t)
    while True:
        if len(res.steps) >= fuel:
            # one more look: the current term may already be an answer
            kind, _, _ = _descend(list(machine.frames), machine.node)
            if kind in ("answer", "stuck"):
                break
            return res
        kind, info = machine.step()
        if kind == "answer":
            res.status = "answer"
            return res
        if kind == "stuck":
            res.status = "stuck"
            res.variable = info
            return res
        res.steps.append(info)
    kind, info = machine.step()
    res.status = kind
    res.variable = info
    return res


def unfold(t: Term) -> Term:
    """Execute all explicit substitutions, giving a pure term."""
    if isinstance(t, Var):
        return t
    if isinstance(t, App):
        return App(unfold(t.fun), unfold(t.arg))
    if isinstance(t, Abs):
        return Abs(t.binder, unfold(t.body))
    if isinstance(t, Closure):
        return subst(unfold(t.body), t.binder, unfold(t.bound))
    raise ValueError(f"cannot unfold {t}")


def embed(t: Term) -> Term:
    if not is_pure(t):
        raise ValueError("expected a pure lambda term")
    return t
