"""Height-1 identity systems and the catalogue of named term conditions.

A side of an identity is either a variable (a plain ``str``) or an
:class:`App` applying an operation symbol to variables.  The single exception
is the absorption shape ``outer(..., inner, ...) = inner`` (one nested flat
application on the left, the same application on the right), which the
2-semilattice law needs.  Endpoint projections
of chain conditions (``p_0 = x``, ``p_n = z`` and friends) are never declared as
symbols: the boundary identities are rewritten onto variables instead.

Condition strings accepted by :func:`parse_condition`::

    maltsev  nu:K  weaknu:K  sdmeet  hm:N  jonsson:N  gumm:N  hobmck:N  tsi:K  2sl
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Union


@dataclass(frozen=True)
class App:
    symbol: str
    args: tuple  # of variable names, or (absorption identities only) nested App

    def __str__(self):
        return f"{self.symbol}({','.join(map(str, self.args))})"

    @property
    def flat(self) -> bool:
        return all(isinstance(a, str) for a in self.args)


Term = Union[str, App]


def term_vars(t: Term) -> tuple[str, ...]:
    if isinstance(t, str):
        return (t,)
    out: list[str] = []
    for a in t.args:
        out.extend(term_vars(a))
    return tuple(out)


def term_symbols(t: Term) -> list[App]:
    if isinstance(t, str):
        return []
    out = [t]
    for a in t.args:
        out.extend(term_symbols(a))
    return out


@dataclass(frozen=True)
class Identity:
    lhs: Term
    rhs: Term

    @property
    def variables(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for v in term_vars(self.lhs) + term_vars(self.rhs):
            seen.setdefault(v)
        return tuple(seen)

    @property
    def balanced(self) -> bool:
        return set(term_vars(self.lhs)) == set(term_vars(self.rhs))

    def __str__(self):
        return f"{self.lhs}={self.rhs}"


@dataclass(frozen=True)
class IdentitySystem:
    symbols: dict[str, int]
    identities: tuple[Identity, ...]
    idempotent: bool = True
    name: str = ""
    params: tuple[int, ...] = field(default=())

    def __hash__(self):
        return hash((tuple(self.symbols.items()), self.identities, self.idempotent))

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        return self.name + ":" + ":".join(map(str, self.params))

    def __str__(self):
        return "; ".join(map(str, self.identities))


def eq(lhs: Term, rhs: Term) -> Identity:
    return Identity(lhs, rhs)


def f(symbol: str, args: str) -> App:
    """``f("p", "xyy")`` is shorthand for ``p(x,y,y)`` with one-letter variables."""
    return App(symbol, tuple(args))


class ConditionError(ValueError):
    pass


def validate_system(sys: IdentitySystem) -> list[str]:
    """Return a list of problems (empty when the system is well formed)."""
    errors = []
    for sym, ar in sys.symbols.items():
        if ar < 1:
            errors.append(f"symbol {sym} has arity {ar} < 1")
    for ident in sys.identities:
        for side in (ident.lhs, ident.rhs):
            for app in term_symbols(side):
                if app.symbol not in sys.symbols:
                    errors.append(f"{ident}: undeclared symbol {app.symbol}")
                elif len(app.args) != sys.symbols[app.symbol]:
                    errors.append(
                        f"{ident}: {app.symbol} has arity {sys.symbols[app.symbol]}, "
                        f"used with {len(app.args)} arguments"
                    )
        if isinstance(ident.rhs, App) and not ident.rhs.flat:
            errors.append(f"{ident}: nested term on the right-hand side")
        if isinstance(ident.lhs, App) and not ident.lhs.flat:
            nested = [a for a in ident.lhs.args if isinstance(a, App)]
            if len(nested) != 1 or not nested[0].flat or nested[0] != ident.rhs:
                errors.append(f"{ident}: nesting only allowed as outer(..., t, ...) = t")
    return errors


def absorption_parts(ident: Identity):
    """For ``outer(..., inner, ...) = inner`` return ``(outer, position, inner)``, else None."""
    lhs = ident.lhs
    if isinstance(lhs, App) and not lhs.flat:
        pos = next(i for i, a in enumerate(lhs.args) if isinstance(a, App))
        return lhs, pos, lhs.args[pos]
    return None


def is_balanced(sys: IdentitySystem) -> bool:
    # implied idempotency identities f(x,...,x)=x are always balanced
    return all(i.balanced for i in sys.identities)


# -- catalogue ---------------------------------------------------------------

def _near_unanimous(sym: str, k: int) -> list[App]:
    return [App(sym, tuple("y" if j == i else "x" for j in range(k))) for i in range(k)]


def _weak_nu_ids(sym: str, k: int) -> list[Identity]:
    terms = _near_unanimous(sym, k)
    return [eq(terms[0], t) for t in terms[1:]]


def maltsev() -> IdentitySystem:
    return IdentitySystem({"p": 3}, (eq(f("p", "xyy"), "x"), eq(f("p", "yyx"), "x")), name="maltsev")


def nu(k: int) -> IdentitySystem:
    if k < 2:
        raise ConditionError("nu needs arity >= 2")
    ids = tuple(eq(t, "x") for t in _near_unanimous("m", k))
    return IdentitySystem({"m": k}, ids, name="nu", params=(k,))


def weak_nu(k: int) -> IdentitySystem:
    if k < 2:
        raise ConditionError("weaknu needs arity >= 2")
    return IdentitySystem({"w": k}, tuple(_weak_nu_ids("w", k)), name="weaknu", params=(k,))


def sd_meet_pair() -> IdentitySystem:
    ids = _weak_nu_ids("w1", 3) + _weak_nu_ids("w2", 4)
    ids.append(eq(f("w1", "yxx"), f("w2", "yxxx")))
    return IdentitySystem({"w1": 3, "w2": 4}, tuple(ids), name="sdmeet")


def hagemann_mitschke(n: int) -> IdentitySystem:
    """Chain p_1..p_{n-1}: x=p_1(x,y,y), p_i(x,x,y)=p_{i+1}(x,y,y), p_{n-1}(x,x,y)=y.

    ``n = 1`` leaves no symbols and the single identity ``x = y``.
    """
    if n < 1:
        raise ConditionError("hm needs n >= 1")
    if n == 1:
        return IdentitySystem({}, (eq("x", "y"),), name="hm", params=(1,))
    syms = {f"p{i}": 3 for i in range(1, n)}
    ids = [eq(f("p1", "xyy"), "x")]
    for i in range(1, n - 1):
        ids.append(eq(f(f"p{i}", "xxy"), f(f"p{i+1}", "xyy")))
    ids.append(eq(f(f"p{n-1}", "xxy"), "y"))
    return IdentitySystem(syms, tuple(ids), name="hm", params=(n,))


def jonsson(n: int) -> IdentitySystem:
    """J_1..J_{n-1} with J_0 = x and J_n = z eliminated."""
    if n < 1:
        raise ConditionError("jonsson needs n >= 1")
    name = lambda i: None if i in (0, n) else f"J{i}"  # noqa: E731
    proj = lambda i, pat: pat[0] if i == 0 else pat[2]  # noqa: E731
    syms = {f"J{i}": 3 for i in range(1, n)}
    ids = []
    for i in range(1, n):
        ids.append(eq(f(f"J{i}", "xyx"), "x"))
    for i in range(n):
        pat = "xxy" if i % 2 == 0 else "xyy"
        l, r = name(i), name(i + 1)
        lhs = proj(i, pat) if l is None else App(l, tuple(pat))
        rhs = proj(i + 1, pat) if r is None else App(r, tuple(pat))
        ids.append(eq(lhs, rhs))
    return IdentitySystem(syms, tuple(ids), name="jonsson", params=(n,))


def gumm(n: int, verbatim: bool = False) -> IdentitySystem:
    """Gumm chain s_1..s_{2n}, p with s_0 = x eliminated.

    Links alternate ``s_i(x,y,y)=s_{i+1}(x,y,y)`` for even ``i`` and
    ``s_i(x,x,y)=s_{i+1}(x,x,y)`` for odd ``i``; every s_i satisfies
    ``s_i(x,y,x)=x``; then ``s_{2n}(x,y,y)=p(x,y,y)`` and ``p(x,x,y)=y``.
    With ``verbatim=True`` every link uses the ``(x,y,y)`` pattern.
    """
    if n < 1:
        raise ConditionError("gumm needs n >= 1")
    m = 2 * n
    syms = {f"s{i}": 3 for i in range(1, m + 1)}
    syms["p"] = 3
    ids = [eq(f(f"s{i}", "xyx"), "x") for i in range(1, m + 1)]
    for i in range(m):
        pat = "xyy" if (i % 2 == 0 or verbatim) else "xxy"
        lhs = pat[0] if i == 0 else App(f"s{i}", tuple(pat))
        ids.append(eq(lhs, App(f"s{i+1}", tuple(pat))))
    ids.append(eq(f(f"s{m}", "xyy"), f("p", "xyy")))
    ids.append(eq(f("p", "xxy"), "y"))
    return IdentitySystem(syms, tuple(ids), name="gumm" if not verbatim else "gumm-verbatim", params=(n,))


def hobby_mckenzie(n: int) -> IdentitySystem:
    """d_1..d_n, p, e_0..e_{n-1} with d_0 = x and e_n = z eliminated."""
    if n < 0:
        raise ConditionError("hobmck needs n >= 0")

    def d(i, pat):
        return pat[0] if i == 0 else App(f"d{i}", tuple(pat))

    def e(i, pat):
        return pat[2] if i == n else App(f"e{i}", tuple(pat))

    syms = {f"d{i}": 3 for i in range(1, n + 1)}
    syms["p"] = 3
    syms.update({f"e{i}": 3 for i in range(n)})
    ids = []
    for i in range(n):
        pat = "xyy" if i % 2 == 0 else "xxy"
        ids.append(eq(d(i, pat), d(i + 1, pat)))
        ids.append(eq(e(i, pat), e(i + 1, pat)))
    ids.append(eq(d(n, "xyy"), f("p", "xyy")))
    ids.append(eq(f("p", "xxy"), e(0, "xxy")))
    for i in range(n):
        if i % 2 == 1:
            ids.append(eq(d(i, "xyx"), d(i + 1, "xyx")))
        else:
            ids.append(eq(e(i, "xyx"), e(i + 1, "xyx")))
    ids = [i for i in ids if i.lhs != i.rhs]
    return IdentitySystem(syms, tuple(ids), name="hobmck", params=(n,))


_VARNAMES = "xyzuvw"


def _surjections(k: int, s: int):
    for t in product(range(s), repeat=k):
        if len(set(t)) == s:
            yield t


def tsi(k: int) -> IdentitySystem:
    """k-ary operation whose value depends only on the set of its arguments.

    For each set size ``s`` the canonical term is ``f(x1, x2, ..., xs, xs, ..., xs)``;
    every other surjective argument pattern onto ``s`` variables is equated with it.
    """
    if k < 1:
        raise ConditionError("tsi needs arity >= 1")
    names = _VARNAMES if k <= len(_VARNAMES) else [f"x{i}" for i in range(1, k + 1)]
    ids = []
    for s in range(1, k + 1):
        canon = tuple(names[min(j, s - 1)] for j in range(k))
        for t in _surjections(k, s):
            args = tuple(names[c] for c in t)
            if args != canon:
                ids.append(eq(App("f", canon), App("f", args)))
    return IdentitySystem({"f": k}, tuple(ids), name="tsi", params=(k,))


def two_semilattice() -> IdentitySystem:
    """Commutative binary ``dot`` with ``dot(x, dot(x, y)) = dot(x, y)``.

    The second law is the one nested identity in the catalogue; it has the
    absorption shape ``outer(..., inner, ...) = inner``.
    """
    inner = f("dot", "xy")
    ids = (eq(f("dot", "xy"), f("dot", "yx")), eq(App("dot", ("x", inner)), inner))
    return IdentitySystem({"dot": 2}, ids, name="2sl")


CHAIN_FAMILIES = {
    "hm": hagemann_mitschke,
    "hagemann_mitschke": hagemann_mitschke,
    "jonsson": jonsson,
    "gumm": gumm,
    "hobmck": hobby_mckenzie,
    "hobby_mckenzie": hobby_mckenzie,
}


_FIXED = {
    "maltsev": (maltsev, 0),
    "sdmeet": (sd_meet_pair, 0),
    "sd_meet_pair": (sd_meet_pair, 0),
    "2sl": (two_semilattice, 0),
    "two_semilattice": (two_semilattice, 0),
    "nu": (nu, 1),
    "weaknu": (weak_nu, 1),
    "tsi": (tsi, 1),
    "hm": (hagemann_mitschke, 1),
    "hagemann_mitschke": (hagemann_mitschke, 1),
    "jonsson": (jonsson, 1),
    "gumm": (gumm, 1),
    "hobmck": (hobby_mckenzie, 1),
    "hobby_mckenzie": (hobby_mckenzie, 1),
}

# arities above this make dense tables and indicator universes impractical
MAX_ARITY = 5


def named_system(name: str, params=(), *, verbatim_gumm: bool = False) -> IdentitySystem:
    """Look up a catalogue condition by name with its integer parameters."""
    params = tuple(int(p) for p in params)
    if name not in _FIXED:
        raise ConditionError(f"unknown condition {name!r}")
    builder, nparams = _FIXED[name]
    if len(params) != nparams:
        raise ConditionError(f"{name} takes {nparams} parameter(s), got {len(params)}")
    if name == "gumm" and verbatim_gumm:
        return gumm(*params, verbatim=True)
    if name in ("nu", "weaknu", "tsi") and params[0] > MAX_ARITY:
        raise ConditionError(f"{name}: arity {params[0]} exceeds the cap of {MAX_ARITY}")
    return builder(*params)


def parse_condition(text: str, *, verbatim_gumm: bool = False) -> IdentitySystem:
    """Parse ``name[:param...]`` as used on the command line, e.g. ``hm:4``."""
    parts = text.strip().split(":")
    try:
        params = [int(p) for p in parts[1:]]
    except ValueError:
        raise ConditionError(f"bad parameter in {text!r}") from None
    return named_system(parts[0], params, verbatim_gumm=verbatim_gumm)
