"""Non-idempotent intersection types with an answer constant.

Types are ``a`` (answer), base variables, and arrows ``M -> t`` whose
domain ``M`` is a multiset of types.  Derivations are explicit trees built
from four rules: ``ax``, ``val`` (any abstraction has type ``a`` in the empty
context), ``abs`` and ``app``.  In ``app`` the first premise types the
function and each further premise types the same argument once per element
of the domain multiset, so an argument with an empty domain stays untyped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property

from .syntax import Abs, App, Term, Var, format_occ, replace_at, term_from_json, term_to_json

__all__ = [
    "VType", "Answer", "BaseVar", "Arrow", "MultisetType", "TypingContext", "ANS",
    "Derivation", "RuleViolation", "DerivationError",
    "ax", "val", "abs_", "app", "validate", "is_valid", "size",
    "typed_occurrences", "tree_at", "replace_at_derivation", "maximal_typed_prefix",
    "type_to_json", "type_from_json", "derivation_to_json", "derivation_from_json",
    "parse_type", "canonical_key", "show_derivation",
]


class RuleViolation(ValueError):
    def __init__(self, path, message):
        super().__init__(f"node at {format_occ(path) if path is not None else '?'}: {message}")
        self.path = path
        self.reason = message


class DerivationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Types

class VType:
    __slots__ = ()

    def __lt__(self, other):
        return self.key < other.key


@dataclass(frozen=True)
class Answer(VType):
    @property
    def key(self):
        return (0,)

    def __str__(self):
        return "a"


@dataclass(frozen=True)
class BaseVar(VType):
    name: str

    @property
    def key(self):
        return (1, self.name)

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class MultisetType:
    """A finite multiset of types, stored sorted so ``==`` ignores order."""

    items: tuple = ()

    def __init__(self, items=()):
        object.__setattr__(self, "items", tuple(sorted(items, key=lambda s: s.key)))

    @property
    def key(self):
        return tuple(s.key for s in self.items)

    def __add__(self, other):
        return MultisetType(self.items + other.items)

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __bool__(self):
        return bool(self.items)

    def __str__(self):
        return "[" + ", ".join(map(str, self.items)) + "]"


@dataclass(frozen=True)
class Arrow(VType):
    domain: MultisetType
    codomain: VType

    @property
    def key(self):
        return (2, self.domain.key, self.codomain.key)

    def __str__(self):
        return f"{self.domain} -> {self.codomain}"


ANS = Answer()
EMPTY = MultisetType()


def parse_type(src: str) -> VType:
    """Read ``a``, base names, ``[t, ...] -> t`` and parentheses."""
    toks = re.findall(r"->|[\[\](),]|[A-Za-zα-ω][A-Za-z0-9_'α-ω]*", src)
    if "".join(toks) != re.sub(r"\s+", "", src):
        raise ValueError(f"bad type syntax: {src!r}")
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def eat(tok):
        nonlocal pos
        if peek() != tok:
            raise ValueError(f"expected {tok!r} in type {src!r}")
        pos += 1

    def typ():
        nonlocal pos
        tok = peek()
        if tok == "[":
            eat("[")
            items = []
            if peek() != "]":
                items.append(typ())
                while peek() == ",":
                    eat(",")
                    items.append(typ())
            eat("]")
            eat("->")
            return Arrow(MultisetType(items), typ())
        if tok == "(":
            eat("(")
            t = typ()
            eat(")")
            return t
        if tok is None or not re.match(r"[A-Za-zα-ω]", tok):
            raise ValueError(f"unexpected {tok!r} in type {src!r}")
        pos += 1
        return ANS if tok == "a" else BaseVar(tok)

    t = typ()
    if pos != len(toks):
        raise ValueError(f"trailing input in type {src!r}")
    return t


def type_to_json(t: VType):
    if isinstance(t, Answer):
        return {"ans": True}
    if isinstance(t, BaseVar):
        return {"base": t.name}
    return {"arrow": [[type_to_json(s) for s in t.domain], type_to_json(t.codomain)]}


def type_from_json(obj) -> VType:
    if isinstance(obj, str):
        return parse_type(obj)
    if "ans" in obj:
        return ANS
    if "base" in obj:
        return BaseVar(obj["base"])
    if "arrow" in obj:
        dom, cod = obj["arrow"]
        return Arrow(MultisetType(type_from_json(s) for s in dom), type_from_json(cod))
    raise ValueError(f"not a type encoding: {obj!r}")


# ---------------------------------------------------------------------------
# Typing contexts

@dataclass(frozen=True)
class TypingContext:
    """Variables to non-empty multisets; absent variables map to ``[]``."""

    entries: tuple = ()

    def __init__(self, mapping=None):
        items = dict(mapping or {})
        object.__setattr__(self, "entries", tuple(sorted((x, m) for x, m in items.items() if m)))

    def get(self, x) -> MultisetType:
        for y, m in self.entries:
            if y == x:
                return m
        return EMPTY

    def __call__(self, x):
        return self.get(x)

    @property
    def domain(self):
        return {x for x, _ in self.entries}

    def as_dict(self):
        return dict(self.entries)

    def __add__(self, other):
        merged = self.as_dict()
        for x, m in other.entries:
            merged[x] = merged.get(x, EMPTY) + m
        return TypingContext(merged)

    def without(self, x):
        return TypingContext({y: m for y, m in self.entries if y != x})

    def __bool__(self):
        return bool(self.entries)

    def __str__(self):
        return ", ".join(f"{x}:{m}" for x, m in self.entries)

    @property
    def key(self):
        return tuple((x, m.key) for x, m in self.entries)


def context_sum(ctxs) -> TypingContext:
    out = TypingContext()
    for c in ctxs:
        out = out + c
    return out


# ---------------------------------------------------------------------------
# Derivations

@dataclass(frozen=True)
class Derivation:
    rule: str
    ctx: TypingContext
    subject: Term
    type: VType
    premises: tuple = field(default=())

    @property
    def judgement(self):
        return (self.ctx, self.subject, self.type)

    @property
    def fun(self):
        return self.premises[0]

    @property
    def args(self):
        return self.premises[1:]

    @cached_property
    def size(self) -> int:
        return 1 + sum(p.size for p in self.premises)

    @cached_property
    def toc(self) -> frozenset:
        if self.rule in ("ax", "val"):
            return frozenset({""})
        out = {""}
        out.update("0" + p for p in self.premises[0].toc)
        for a in self.premises[1:]:
            out.update("1" + p for p in a.toc)
        return frozenset(out)

    def __str__(self):
        return f"{self.ctx} |- {self.subject} : {self.type}"


def ax(x: str, tau: VType) -> Derivation:
    return Derivation("ax", TypingContext({x: MultisetType([tau])}), Var(x), tau)


def val(t: Term) -> Derivation:
    if not isinstance(t, Abs):
        raise DerivationError(f"val needs an abstraction, got {t}")
    return Derivation("val", TypingContext(), t, ANS)


def abs_(x: str, premise: Derivation) -> Derivation:
    return Derivation("abs", premise.ctx.without(x), Abs(x, premise.subject),
                      Arrow(premise.ctx.get(x), premise.type), (premise,))


def app(fun: Derivation, arg_term: Term, args=()) -> Derivation:
    if not isinstance(fun.type, Arrow):
        raise DerivationError(f"function premise has non-arrow type {fun.type}")
    args = tuple(args)
    ctx = context_sum([fun.ctx] + [a.ctx for a in args])
    return Derivation("app", ctx, App(fun.subject, arg_term), fun.type.codomain, (fun,) + args)


def size(d: Derivation) -> int:
    return d.size


def validate(d: Derivation, path: str = "") -> None:
    """Raise RuleViolation at the first node that does not instantiate its rule."""
    stack = [(d, path)]
    while stack:
        node, p = stack.pop()
        _check_node(node, p)
        if node.rule == "abs":
            stack.append((node.premises[0], p + "0"))
        elif node.rule == "app":
            stack.append((node.premises[0], p + "0"))
            for a in node.premises[1:]:
                stack.append((a, p + "1"))


def is_valid(d: Derivation) -> bool:
    try:
        validate(d)
    except RuleViolation:
        return False
    return True


def _check_node(d, p):
    def fail(msg):
        raise RuleViolation(p, f"{d.rule}: {msg}")

    t = d.subject
    if d.rule == "ax":
        if d.premises:
            fail("axiom has premises")
        if not isinstance(t, Var):
            fail("subject is not a variable")
        if d.ctx != TypingContext({t.name: MultisetType([d.type])}):
            fail(f"context {d.ctx} is not {t.name}:[{d.type}]")
    elif d.rule == "val":
        if d.premises:
            fail("val has premises")
        if not isinstance(t, Abs):
            fail("subject is not an abstraction")
        if d.ctx:
            fail("context is not empty")
        if d.type != ANS:
            fail("type is not the answer type")
    elif d.rule == "abs":
        if len(d.premises) != 1:
            fail("expected exactly one premise")
        if not isinstance(t, Abs):
            fail("subject is not an abstraction")
        prem = d.premises[0]
        if prem.subject != t.body:
            fail("premise subject is not the body")
        if d.ctx != prem.ctx.without(t.binder):
            fail("context is not the premise context minus the binder")
        if d.type != Arrow(prem.ctx.get(t.binder), prem.type):
            fail(f"type {d.type} does not match {prem.ctx.get(t.binder)} -> {prem.type}")
    elif d.rule == "app":
        if not d.premises:
            fail("missing function premise")
        if not isinstance(t, App):
            fail("subject is not an application")
        fun, args = d.premises[0], d.premises[1:]
        if fun.subject != t.fun:
            fail("function premise has the wrong subject")
        if not isinstance(fun.type, Arrow):
            fail("function premise does not have an arrow type")
        if fun.type.codomain != d.type:
            fail("type is not the codomain of the function type")
        for a in args:
            if a.subject != t.arg:
                fail("argument premise has the wrong subject")
        if MultisetType(a.type for a in args) != fun.type.domain:
            fail("argument types do not match the domain multiset")
        if d.ctx != context_sum([fun.ctx] + [a.ctx for a in args]):
            fail("context is not the sum of the premise contexts")
    else:
        fail("unknown rule")


def typed_occurrences(d: Derivation) -> set:
    return set(d.toc)


def _tree_at(d, p):
    # Lenient: copies that do not reach p contribute nothing.
    if p == "":
        return [d]
    if d.rule in ("ax", "val"):
        return []
    head, rest = p[0], p[1:]
    if head == "0":
        return _tree_at(d.premises[0], rest) if d.rule in ("abs", "app") else []
    if d.rule != "app":
        return []
    out = []
    for a in d.premises[1:]:
        out.extend(_tree_at(a, rest))
    return out


def tree_at(d: Derivation, p: str) -> list:
    """The multiset (as a list in premise order) of subderivations at *p*."""
    if p not in d.toc:
        raise DerivationError(f"occurrence {format_occ(p)} is not typed")
    return _tree_at(d, p)


def replace_at_derivation(d: Derivation, p: str, repl, subject: Term | None = None) -> Derivation:
    """Swap the subderivations at *p* for *repl*, split left to right.

    Untyped copies of the subterm at *p* are rewritten textually to the
    common subject of *repl* (or *subject* when *repl* is empty).
    """
    repl = list(repl)
    if subject is None:
        if not repl:
            raise DerivationError("an empty replacement needs an explicit subject")
        subject = repl[0].subject
    for r in repl:
        if r.subject != subject:
            raise DerivationError("replacement derivations do not share a subject")
    have = len(_tree_at(d, p))
    if have != len(repl):
        raise DerivationError(f"arity mismatch: {have} subderivations at {format_occ(p)}, {len(repl)} given")
    return _replace(d, p, repl, subject)


def _replace(d, p, repl, s):
    if p == "":
        return repl[0]
    if d.rule == "val":
        return val(replace_at(d.subject, p, s))
    if d.rule == "ax":
        raise DerivationError("occurrence goes below a variable")
    head, rest = p[0], p[1:]
    if d.rule == "abs":
        prem = _replace(d.premises[0], rest, repl, s)
        return abs_(d.subject.binder, prem)
    fun, args = d.premises[0], d.premises[1:]
    if head == "0":
        return app(_replace(fun, rest, repl, s), d.subject.arg, args)
    new_args = []
    i = 0
    for a in args:
        k = len(_tree_at(a, rest))
        new_args.append(_replace(a, rest, repl[i:i + k], s))
        i += k
    return app(fun, replace_at(d.subject.arg, rest, s), new_args)


def maximal_typed_prefix(d: Derivation, p: str) -> str:
    toc = d.toc
    for k in range(len(p), -1, -1):
        if p[:k] in toc:
            return p[:k]
    return ""


def canonical_key(d: Derivation):
    """Identity up to alpha on subjects and reordering of argument premises."""
    prem_keys = [canonical_key(x) for x in d.premises]
    if d.rule == "app":
        prem_keys = prem_keys[:1] + sorted(prem_keys[1:])
    return (d.rule, d.ctx.key, d.subject.key, d.type.key, tuple(prem_keys))


# ---------------------------------------------------------------------------
# JSON and display

def derivation_to_json(d: Derivation):
    return {
        "rule": d.rule,
        "ctx": {x: [type_to_json(s) for s in m] for x, m in d.ctx.entries},
        "subject": term_to_json(d.subject),
        "type": type_to_json(d.type),
        "premises": [derivation_to_json(p) for p in d.premises],
    }


def derivation_from_json(obj) -> Derivation:
    rule = obj["rule"]
    aliases = {"abs_i": "abs", "app_e": "app"}
    rule = aliases.get(rule, rule)
    ctx = TypingContext({x: MultisetType(type_from_json(s) for s in ms) for x, ms in obj.get("ctx", {}).items()})
    return Derivation(rule, ctx, term_from_json(obj["subject"]), type_from_json(obj["type"]),
                      tuple(derivation_from_json(p) for p in obj.get("premises", [])))


def show_derivation(d: Derivation, indent: int = 0) -> str:
    lines = []
    stack = [(d, indent)]
    while stack:
        node, ind = stack.pop()
        lines.append("  " * ind + f"({node.rule}) {node}")
        for prem in reversed(node.premises):
            stack.append((prem, ind + 1))
    return "\n".join(lines)
