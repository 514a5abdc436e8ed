"""Lambda terms, explicit-substitution closures, occurrences and parsing.

Terms keep their surface names.  Equality and hashing go through a
canonical nameless key, so ``==`` on terms *is* alpha-equivalence while
positional operations (``replace_at``, ``plug``) stay textual and may
capture variables.

Occurrences are plain strings over ``"0"`` and ``"1"``; the empty string is
the root.  Lexicographic string order is the canonical order used for
occurrence sets throughout the package.
"""

from __future__ import annotations

import re
from typing import Iterable, Iterator

__all__ = [
    "Term", "Var", "App", "Abs", "Closure", "Hole",
    "ParseError", "OccurrenceError",
    "parse", "parse_occ", "format_occ", "is_prefix",
    "occurrences", "subterm_at", "replace_at", "alpha_eq",
    "free_vars", "bound_vars", "all_names", "fresh_name",
    "subst", "rename", "plug", "term_size", "is_pure",
    "term_to_json", "term_from_json",
    "I", "K", "DELTA", "OMEGA",
]


class ParseError(ValueError):
    def __init__(self, message, pos):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class OccurrenceError(ValueError):
    pass


# Tokens of the flat alpha key.  Bound variables are non-negative ints and
# free variables are strings, so none of these can collide.
_K_APP, _K_ABS, _K_CLO, _K_HOLE = -1, -2, -3, -4


class Term:
    """Base class of all term nodes (pure and explicit-substitution).

    Nodes are never mutated after construction; the slots prefixed with an
    underscore are lazily filled caches.
    """

    __slots__ = ("_key", "_fv", "_size", "_has_redex")

    def _init_caches(self):
        self._key = self._fv = self._size = self._has_redex = None

    def children(self) -> tuple:
        return ()

    @property
    def key(self) -> tuple:
        """Canonical nameless encoding; equal keys iff alpha-equivalent."""
        if self._key is None:
            self._key = _alpha_key(self)
        return self._key

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Term):
            return NotImplemented
        return self.key == other.key

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __hash__(self):
        return hash(self.key)

    @property
    def fv(self) -> frozenset:
        if self._fv is None:
            _synthesize(self, "_fv", _fv_node)
        return self._fv

    @property
    def size(self) -> int:
        if self._size is None:
            _synthesize(self, "_size", lambda n: 1 + sum(c._size for c in n.children()))
        return self._size

    @property
    def has_redex(self) -> bool:
        if self._has_redex is None:
            _synthesize(self, "_has_redex", _has_redex_node)
        return self._has_redex

    def __str__(self):
        return _show(self)

    def __repr__(self):
        return f"<{type(self).__name__} {_show(self)}>"

    def __reduce__(self):
        return (type(self), self._fields())


class Var(Term):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self._key = self._fv = self._size = self._has_redex = None

    def _fields(self):
        return (self.name,)


class App(Term):
    __slots__ = ("fun", "arg")

    def __init__(self, fun: Term, arg: Term):
        self.fun = fun
        self.arg = arg
        self._key = self._fv = self._size = self._has_redex = None

    def children(self):
        return (self.fun, self.arg)

    def _fields(self):
        return (self.fun, self.arg)


class Abs(Term):
    __slots__ = ("binder", "body")

    def __init__(self, binder: str, body: Term):
        self.binder = binder
        self.body = body
        self._key = self._fv = self._size = self._has_redex = None

    def children(self):
        return (self.body,)

    def _fields(self):
        return (self.binder, self.body)


class Closure(Term):
    """``body[binder/bound]``: an explicit substitution."""

    __slots__ = ("body", "binder", "bound")

    def __init__(self, body: Term, binder: str, bound: Term):
        self.body = body
        self.binder = binder
        self.bound = bound
        self._key = self._fv = self._size = self._has_redex = None

    def children(self):
        return (self.body, self.bound)

    def _fields(self):
        return (self.body, self.binder, self.bound)


class Hole(Term):
    """The hole of a context; plugging is textual."""

    __slots__ = ()

    def __init__(self):
        self._key = self._fv = self._size = self._has_redex = None

    def _fields(self):
        return ()


def _alpha_key(root):
    out = []
    stack = [(root, 0, {})]
    while stack:
        node, depth, env = stack.pop()
        cls = type(node)
        if cls is Var:
            level = env.get(node.name)
            out.append(node.name if level is None else depth - level - 1)
        elif cls is App:
            out.append(_K_APP)
            stack.append((node.arg, depth, env))
            stack.append((node.fun, depth, env))
        elif cls is Abs:
            out.append(_K_ABS)
            stack.append((node.body, depth + 1, {**env, node.binder: depth}))
        elif cls is Closure:
            out.append(_K_CLO)
            stack.append((node.bound, depth, env))
            stack.append((node.body, depth + 1, {**env, node.binder: depth}))
        else:
            out.append(_K_HOLE)
    return tuple(out)


def _fv_node(node):
    cls = type(node)
    if cls is Var:
        return frozenset((node.name,))
    if cls is App:
        return node.fun._fv | node.arg._fv
    if cls is Abs:
        return node.body._fv - {node.binder}
    if cls is Closure:
        return (node.body._fv - {node.binder}) | node.bound._fv
    return frozenset()


def _has_redex_node(node):
    if type(node) is App and type(node.fun) is Abs:
        return True
    return any(c._has_redex for c in node.children())


def _synthesize(root, attr, compute):
    """Fill a cached bottom-up attribute without recursing on the C stack."""
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if getattr(node, attr) is not None:
            continue
        if expanded:
            setattr(node, attr, compute(node))
            continue
        stack.append((node, True))
        for child in node.children():
            if getattr(child, attr) is None:
                stack.append((child, False))


# ---------------------------------------------------------------------------
# Well-known terms

I = Abs("z", Var("z"))
K = Abs("x", Abs("y", Var("x")))
DELTA = Abs("x", App(Var("x"), Var("x")))
OMEGA = App(DELTA, DELTA)


# ---------------------------------------------------------------------------
# Variables and substitution

def free_vars(t: Term) -> frozenset:
    return t.fv


def bound_vars(t: Term) -> set:
    return {n.binder for n in _nodes(t) if isinstance(n, (Abs, Closure))}


def all_names(t: Term) -> set:
    names = set()
    for n in _nodes(t):
        if isinstance(n, Var):
            names.add(n.name)
        elif isinstance(n, (Abs, Closure)):
            names.add(n.binder)
    return names


def term_size(t: Term) -> int:
    return t.size


def is_pure(t: Term) -> bool:
    return not any(isinstance(n, (Closure, Hole)) for n in _nodes(t))


def _nodes(t: Term) -> Iterator[Term]:
    stack = [t]
    seen = set()
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        yield node
        stack.extend(node.children())


_TRAILING_DIGITS = re.compile(r"\d+$")


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    """First of ``stem1, stem2, ...`` not in *avoid* (stem = base sans digits)."""
    avoid = set(avoid)
    stem = _TRAILING_DIGITS.sub("", base) or "x"
    k = 1
    while f"{stem}{k}" in avoid:
        k += 1
    return f"{stem}{k}"


def subst(t: Term, x: str, u: Term) -> Term:
    """Capture-avoiding ``t{x:=u}``; renamed binders get fresh names."""
    if x not in t.fv:
        return t
    if isinstance(t, Var):
        return u
    if isinstance(t, App):
        return App(subst(t.fun, x, u), subst(t.arg, x, u))
    if isinstance(t, Abs):
        binder, body = t.binder, t.body
        if binder in u.fv:
            new = fresh_name(binder, u.fv | body.fv | {x})
            body = subst(body, binder, Var(new))
            binder = new
        return Abs(binder, subst(body, x, u))
    if isinstance(t, Closure):
        bound = subst(t.bound, x, u)
        if t.binder == x:
            return Closure(t.body, x, bound)
        binder, body = t.binder, t.body
        if binder in u.fv:
            new = fresh_name(binder, u.fv | body.fv | {x})
            body = subst(body, binder, Var(new))
            binder = new
        return Closure(subst(body, x, u), binder, bound)
    return t


def rename(t: Term, mapping: dict) -> Term:
    """Rename free variables by *mapping*; target names must be fresh for *t*."""
    if not mapping or not (t.fv & mapping.keys()):
        return t
    if isinstance(t, Var):
        return Var(mapping[t.name])
    if isinstance(t, App):
        return App(rename(t.fun, mapping), rename(t.arg, mapping))
    if isinstance(t, Abs):
        inner = {k: v for k, v in mapping.items() if k != t.binder}
        return Abs(t.binder, rename(t.body, inner))
    if isinstance(t, Closure):
        inner = {k: v for k, v in mapping.items() if k != t.binder}
        return Closure(rename(t.body, inner), t.binder, rename(t.bound, mapping))
    return t


def alpha_eq(t: Term, u: Term) -> bool:
    return t.key == u.key


def plug(context: Term, t: Term) -> Term:
    """Replace the unique hole of *context* by *t*, allowing capture."""
    paths = [p for p, n in _walk(context) if isinstance(n, Hole)]
    if len(paths) != 1:
        raise ValueError(f"context must contain exactly one hole, found {len(paths)}")
    return replace_at(context, paths[0], t)


# ---------------------------------------------------------------------------
# Occurrences

def parse_occ(text: str) -> str:
    """Read an occurrence literal; ``e``/``ε``/empty denote the root."""
    text = text.strip()
    if text in ("", "e", "ε"):
        return ""
    if set(text) - {"0", "1"}:
        raise ValueError(f"bad occurrence literal {text!r}")
    return text


def format_occ(p: str) -> str:
    return p or "e"


def is_prefix(p: str, q: str) -> bool:
    return q.startswith(p)


def _walk(t: Term) -> Iterator[tuple[str, Term]]:
    stack = [("", t)]
    while stack:
        p, node = stack.pop()
        yield p, node
        kids = node.children()
        for i in reversed(range(len(kids))):
            stack.append((p + str(i), kids[i]))


def occurrences(t: Term) -> set:
    return {p for p, _ in _walk(t)}


def subterm_at(t: Term, p: str) -> Term:
    node = t
    for i, c in enumerate(p):
        kids = node.children()
        k = int(c)
        if k >= len(kids):
            raise OccurrenceError(f"occurrence {format_occ(p)} not in term (stopped at {format_occ(p[:i])})")
        node = kids[k]
    return node


def _with_child(node: Term, k: int, child: Term) -> Term:
    cls = type(node)
    if cls is App:
        return App(child, node.arg) if k == 0 else App(node.fun, child)
    if cls is Abs:
        return Abs(node.binder, child)
    if cls is Closure:
        return Closure(child, node.binder, node.bound) if k == 0 else Closure(node.body, node.binder, child)
    raise OccurrenceError("node has no children")


def replace_at(t: Term, p: str, s: Term) -> Term:
    """Textual replacement of ``t|p`` by *s* (no renaming, capture allowed)."""
    path = []
    node = t
    for i, c in enumerate(p):
        kids = node.children()
        k = 0 if c == "0" else 1
        if k >= len(kids):
            raise OccurrenceError(f"occurrence {format_occ(p)} not in term (stopped at {format_occ(p[:i])})")
        path.append((node, k))
        node = kids[k]
    result = s
    for parent, k in reversed(path):
        result = _with_child(parent, k, result)
    return result


# ---------------------------------------------------------------------------
# Concrete syntax

_TOKEN = re.compile(r"\s*(?:(?P<lam>\\|λ)|(?P<ident>[a-zA-Z][a-zA-Z0-9_']*)|(?P<hole>□)|(?P<sym>[().\[\]/]))")


def _tokenize(src):
    pos = 0
    tokens = []
    while True:
        while pos < len(src) and src[pos].isspace():
            pos += 1
        if pos >= len(src):
            break
        m = _TOKEN.match(src, pos)
        if not m:
            raise ParseError(f"unexpected character {src[pos]!r}", pos)
        start = m.start(m.lastgroup)
        if m.lastgroup == "lam":
            tokens.append(("lam", "\\", start))
        elif m.lastgroup == "ident":
            tokens.append(("ident", m.group("ident"), start))
        elif m.lastgroup == "hole":
            tokens.append(("hole", "□", start))
        else:
            tokens.append((m.group("sym"), m.group("sym"), start))
        pos = m.end()
    tokens.append(("eof", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src, macros):
        self.tokens = _tokenize(src)
        self.i = 0
        self.macros = macros or {}

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind):
        tok = self.tokens[self.i]
        if tok[0] != kind:
            shown = tok[1] or "end of input"
            raise ParseError(f"expected {kind!r}, got {shown!r}", tok[2])
        self.i += 1
        return tok

    def term(self):
        if self.peek()[0] == "lam":
            self.take("lam")
            binders = [self.take("ident")[1]]
            while self.peek()[0] == "ident":
                binders.append(self.take("ident")[1])
            self.take(".")
            body = self.term()
            for b in reversed(binders):
                body = Abs(b, body)
            return body
        head = self.postfix()
        while True:
            kind = self.peek()[0]
            if kind in ("ident", "(", "hole"):
                head = App(head, self.postfix())
            elif kind == "lam":
                return App(head, self.term())
            else:
                return head

    def postfix(self):
        t = self.atom()
        while self.peek()[0] == "[":
            self.take("[")
            x = self.take("ident")[1]
            self.take("/")
            u = self.term()
            self.take("]")
            t = Closure(t, x, u)
        return t

    def atom(self):
        kind, text, pos = self.peek()
        if kind == "ident":
            self.i += 1
            return Var(text)
        if kind == "hole":
            self.i += 1
            return Hole()
        if kind == "(":
            self.i += 1
            t = self.term()
            self.take(")")
            return t
        raise ParseError(f"unexpected {text or 'end of input'!r}", pos)


def parse(src: str, macros: dict | None = None) -> Term:
    """Parse concrete syntax.

    Application is left-associative, an abstraction body extends as far
    right as possible, ``t[x/u]`` is a postfix closure and ``□`` is a hole.
    *macros* maps free identifiers to closed terms substituted after parsing.
    """
    p = _Parser(src, macros)
    t = p.term()
    p.take("eof")
    for name, value in (macros or {}).items():
        if name in t.fv:
            t = subst(t, name, value)
    return t


def _show(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Hole):
        return "□"
    if isinstance(t, Abs):
        binders = []
        while isinstance(t, Abs):
            binders.append(t.binder)
            t = t.body
        return "\\" + " ".join(binders) + ". " + _show(t)
    if isinstance(t, App):
        args = []
        while isinstance(t, App):
            args.append(t.arg)
            t = t.fun
        head = _show(t)
        if isinstance(t, Abs):
            head = f"({head})"
        parts = [head]
        for a in reversed(args):
            s = _show(a)
            parts.append(f"({s})" if isinstance(a, (App, Abs)) else s)
        return " ".join(parts)
    # closure chain
    subs = []
    while isinstance(t, Closure):
        subs.append(f"[{t.binder}/{_show(t.bound)}]")
        t = t.body
    body = _show(t)
    if isinstance(t, (App, Abs)):
        body = f"({body})"
    return body + "".join(reversed(subs))


# ---------------------------------------------------------------------------
# JSON encoding

def term_to_json(t: Term):
    if isinstance(t, Var):
        return {"var": t.name}
    if isinstance(t, App):
        return {"app": [term_to_json(t.fun), term_to_json(t.arg)]}
    if isinstance(t, Abs):
        return {"abs": [t.binder, term_to_json(t.body)]}
    if isinstance(t, Closure):
        return {"sub": [term_to_json(t.body), t.binder, term_to_json(t.bound)]}
    return {"hole": True}


def term_from_json(obj) -> Term:
    if isinstance(obj, str):
        return parse(obj)
    if "var" in obj:
        return Var(obj["var"])
    if "app" in obj:
        f, a = obj["app"]
        return App(term_from_json(f), term_from_json(a))
    if "abs" in obj:
        x, b = obj["abs"]
        return Abs(x, term_from_json(b))
    if "sub" in obj:
        b, x, u = obj["sub"]
        return Closure(term_from_json(b), x, term_from_json(u))
    if "hole" in obj:
        return Hole()
    raise ValueError(f"not a term encoding: {obj!r}")
