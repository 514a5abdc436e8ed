"""Independent reference implementation used to derive expected values.

Terms are nested tuples with de Bruijn indices, and every node carries the
set of occurrences it came from in the original term (a substituted
variable passes its own origin on to the copy that replaces it).  Residuals are then read off
by tracking tags through a beta step instead of by case analysis.  Nothing
here imports the package's reduction or residual code.
"""

from needlab.syntax import Abs, App, Var


def to_tagged(t, path="", env=()):
    if isinstance(t, Var):
        if t.name in env:
            return ("var", frozenset({path}), env.index(t.name))
        return ("free", frozenset({path}), t.name)
    if isinstance(t, App):
        return ("app", frozenset({path}), to_tagged(t.fun, path + "0", env), to_tagged(t.arg, path + "1", env))
    if isinstance(t, Abs):
        return ("lam", frozenset({path}), to_tagged(t.body, path + "0", (t.binder,) + env))
    raise TypeError(t)


def positions(t, here=""):
    yield here, t
    if t[0] == "app":
        yield from positions(t[2], here + "0")
        yield from positions(t[3], here + "1")
    elif t[0] == "lam":
        yield from positions(t[2], here + "0")


def occurrences(t):
    return {p for p, _ in positions(t)}


def redexes(t):
    return {p for p, n in positions(t) if n[0] == "app" and n[2][0] == "lam"}


def _shift(t, d, cutoff=0):
    kind = t[0]
    if kind == "var":
        return ("var", t[1], t[2] + d if t[2] >= cutoff else t[2])
    if kind == "app":
        return ("app", t[1], _shift(t[2], d, cutoff), _shift(t[3], d, cutoff))
    if kind == "lam":
        return ("lam", t[1], _shift(t[2], d, cutoff + 1))
    return t


def _subst(t, j, s):
    kind = t[0]
    if kind == "var":
        if t[2] == j:
            return (s[0], s[1] | t[1]) + s[2:]
        return t
    if kind == "app":
        return ("app", t[1], _subst(t[2], j, s), _subst(t[3], j, s))
    if kind == "lam":
        return ("lam", t[1], _subst(t[2], j + 1, _shift(s, 1)))
    return t


def _beta(redex):
    body, arg = redex[2][2], redex[3]
    return _shift(_subst(body, 0, _shift(arg, 1)), -1)


def contract(t, r):
    if r == "":
        return _beta(t)
    kind = t[0]
    if kind == "app":
        if r[0] == "0":
            return ("app", t[1], contract(t[2], r[1:]), t[3])
        return ("app", t[1], t[2], contract(t[3], r[1:]))
    return ("lam", t[1], contract(t[2], r[1:]))


def residuals(t, p, r):
    """Positions of the reduct that descend from p (t must be freshly tagged)."""
    return {q for q, n in positions(contract(t, r)) if p in n[1]}


def retag(t, here=""):
    tag = frozenset({here})
    kind = t[0]
    if kind == "app":
        return ("app", tag, retag(t[2], here + "0"), retag(t[3], here + "1"))
    if kind == "lam":
        return ("lam", tag, retag(t[2], here + "0"))
    return (kind, tag, t[2])


def shape(t):
    """Tag-free structure, for alpha-insensitive comparison."""
    kind = t[0]
    if kind == "app":
        return ("app", shape(t[2]), shape(t[3]))
    if kind == "lam":
        return ("lam", shape(t[2]))
    return (kind, t[2])


def left_of(r1, r2):
    """The to-the-left order written out from its definition."""
    if r1 == r2:
        return False
    if r2.startswith(r1):
        return True
    if r1.startswith(r2):
        return False
    k = 0
    while r1[k] == r2[k]:
        k += 1
    return r1[k] == "0" and r2[k] == "1"


def leftmost(t):
    best = None
    for r in redexes(t):
        if best is None or left_of(r, best):
            best = r
    return best


def weak_head(t):
    p, n = "", t
    while n[0] == "app":
        if n[2][0] == "lam":
            return p
        p, n = p + "0", n[2]
    return None


def head(t):
    p, n = "", t
    while n[0] in ("app", "lam"):
        if n[0] == "app" and n[2][0] == "lam":
            return p
        p, n = p + "0", n[2]
    return None


def normalize(t, select, fuel):
    """Run a redex selector; returns (list of contracted occurrences, final) or None."""
    occs = []
    for _ in range(fuel):
        r = select(t)
        if r is None:
            return occs, t
        occs.append(r)
        t = retag(contract(t, r))
    return None


def used(t, r, occs):
    """Is r (or a residual) contracted along occs?  Tags follow residuals."""
    cur = {r}
    for s in occs:
        if s in cur:
            return True
        nxt = set()
        for p in cur:
            nxt |= residuals(t, p, s)
        t = retag(contract(t, s))
        cur = nxt
    return False


def is_whnf(t):
    return weak_head(t) is None


def wn_name(t, fuel):
    return normalize(t, weak_head, fuel) is not None
