"""Explicit operation tables, the polymorphism verifier, and table transforms.

Chains of operations are passed around as ``dict`` from symbol name to
:class:`OperationTable`, using the symbol names of the matching catalogue
system (``p1 .. p{n-1}`` for Hagemann-Mitschke, ``s1 .. s{2n}, p`` for Gumm,
and so on).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Mapping, Optional

from .constructions import (
    cycle,
    extend_bottom,
    extend_bottom_top,
    extend_top,
    fresh_name,
    transitive_tournament,
)
from .identities import (
    App,
    IdentitySystem,
    gumm,
    hagemann_mitschke,
    hobby_mckenzie,
    jonsson,
    term_symbols,
)
from .structures import RelStruct

MAX_TABLE_ARITY = 5
MAX_TABLE_DOMAIN = 12


@dataclass(frozen=True)
class OperationTable:
    arity: int
    domain: tuple[str, ...]
    entries: Mapping[tuple, str]

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError("arity must be positive")
        dom = set(self.domain)
        expected = len(self.domain) ** self.arity
        if len(self.entries) != expected:
            raise ValueError(f"table has {len(self.entries)} entries, expected {expected}")
        for args, val in self.entries.items():
            if len(args) != self.arity or not dom.issuperset(args):
                raise ValueError(f"bad argument tuple {args}")
            if val not in dom:
                raise ValueError(f"value {val} at {args} outside the domain")

    def __call__(self, *args):
        return self.entries[args]

    @classmethod
    def from_function(cls, domain, arity: int, fn: Callable) -> "OperationTable":
        domain = tuple(domain)
        if arity > MAX_TABLE_ARITY or len(domain) > MAX_TABLE_DOMAIN:
            raise ValueError(f"table {len(domain)}^{arity} exceeds the configured caps")
        return cls(arity, domain, {t: fn(*t) for t in product(domain, repeat=arity)})

    def rows(self) -> list[list[str]]:
        """Rows ``[args..., value]`` in lexicographic order of domain positions."""
        return [list(t) + [self.entries[t]] for t in product(self.domain, repeat=self.arity)]

    def restrict(self, keep) -> "OperationTable":
        keep = tuple(v for v in self.domain if v in set(keep))
        return OperationTable(self.arity, keep, {t: self.entries[t] for t in product(keep, repeat=self.arity)})

    def to_json(self) -> dict:
        return {"arity": self.arity, "rows": self.rows()}

    @classmethod
    def from_json(cls, data: dict, domain) -> "OperationTable":
        entries = {tuple(r[:-1]): r[-1] for r in data["rows"]}
        return cls(int(data["arity"]), tuple(domain), entries)


def tables_to_json(tables: Mapping[str, OperationTable]) -> dict:
    return {sym: tables[sym].to_json() for sym in sorted(tables)}


def witness_text(tables: Mapping[str, OperationTable]) -> str:
    """Witness JSON with symbols sorted and one table row per line (byte-stable)."""
    import json

    blocks = []
    for sym in sorted(tables):
        t = tables[sym]
        rows = ",\n".join("      " + json.dumps(r) for r in t.rows())
        blocks.append(f'  {json.dumps(sym)}: {{\n    "arity": {t.arity},\n    "rows": [\n{rows}\n    ]\n  }}')
    return "{\n" + ",\n".join(blocks) + "\n}\n"


def tables_from_json(data: dict, domain) -> dict[str, OperationTable]:
    return {sym: OperationTable.from_json(d, domain) for sym, d in data.items()}


def projection(domain, arity: int, i: int) -> OperationTable:
    return OperationTable.from_function(domain, arity, lambda *t: t[i])


# -- verification --------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    kind: str  # "edge", "mark", "identity", "idempotent"
    symbol: str
    detail: str
    args: tuple = ()

    def __str__(self):
        return f"{self.kind} violation for {self.symbol}: {self.detail}"


def _evaluate(term, env, tables):
    if isinstance(term, str):
        return env[term]
    return tables[term.symbol].entries[tuple(_evaluate(a, env, tables) for a in term.args)]


def verify(tables: Mapping[str, OperationTable], sys: IdentitySystem, G: RelStruct) -> Optional[Violation]:
    """Check polymorphism-hood, identities and idempotency; return the first violation."""
    if set(tables) != set(sys.symbols):
        raise ValueError(f"symbols {sorted(tables)} do not match system {sorted(sys.symbols)}")
    for sym, ar in sys.symbols.items():
        if tables[sym].arity != ar:
            raise ValueError(f"{sym}: table arity {tables[sym].arity}, system arity {ar}")
        if set(tables[sym].domain) != set(G.vertices):
            raise ValueError(f"{sym}: table domain differs from the structure")
    edges = G.sorted_edges()
    for sym in sys.symbols:
        t = tables[sym]
        for combo in product(edges, repeat=t.arity):
            src = tuple(e[0] for e in combo)
            dst = tuple(e[1] for e in combo)
            if (t.entries[src], t.entries[dst]) not in G.edges:
                return Violation("edge", sym, f"{src} -> {dst} maps to non-edge "
                                 f"({t.entries[src]}, {t.entries[dst]})", src + dst)
        for name, members in G.marks.items():
            ms = G.sorted_vertices(members)
            for args in product(ms, repeat=t.arity):
                if t.entries[args] not in members:
                    return Violation("mark", sym, f"{args} in {name} maps outside it", args)
        if sys.idempotent:
            for v in G.vertices:
                args = (v,) * t.arity
                if t.entries[args] != v:
                    return Violation("idempotent", sym, f"{sym}{args} = {t.entries[args]}", args)
    for ident in sys.identities:
        names = ident.variables
        for vals in product(G.vertices, repeat=len(names)):
            env = dict(zip(names, vals))
            left = _evaluate(ident.lhs, env, tables)
            right = _evaluate(ident.rhs, env, tables)
            if left != right:
                syms = [a.symbol for a in term_symbols(ident.lhs) + term_symbols(ident.rhs)]
                return Violation("identity", syms[0] if syms else "",
                                 f"{ident} fails at {env}: {left} != {right}", vals)
    return None


# -- cycles and tournaments ----------------------------------------------------

def cycle_maltsev(n: int) -> OperationTable:
    """First projection on 1- and 3-valued triples, minority value otherwise."""
    def p(a, b, c):
        if len({a, b, c}) != 2:
            return a
        return a if b == c else (c if a == b else b)
    return OperationTable.from_function(cycle(n).vertices, 3, p)


def cycle_majority(n: int) -> OperationTable:
    """First projection on 1- and 3-valued triples, majority value otherwise."""
    def m(a, b, c):
        if len({a, b, c}) != 2:
            return a
        return b if b == c else a
    return OperationTable.from_function(cycle(n).vertices, 3, m)


def cycle_two_semilattice(n: int) -> OperationTable:
    if n < 1 or n % 2 == 0:
        raise ValueError(f"cycle of even length {n} has no commutative binary polymorphism")
    half = n // 2

    def dot(i, j):
        return i if (int(j) - int(i)) % n <= half else j
    return OperationTable.from_function(cycle(n).vertices, 2, dot)


def tournament(k: int) -> RelStruct:
    """The transitive tournament on ``0 .. k-1``."""
    return transitive_tournament(0, k - 1)


def tournament_median(k: int) -> OperationTable:
    return OperationTable.from_function(
        tournament(k).vertices, 3, lambda *t: sorted(t, key=int)[1])


def tournament_min_tsi(k: int, arity: int) -> OperationTable:
    return OperationTable.from_function(tournament(k).vertices, arity, lambda *t: min(t, key=int))


# -- one-point extensions ------------------------------------------------------

def _lift(t: OperationTable, G: RelStruct, new: str, GX: RelStruct) -> OperationTable:
    if set(t.domain) != set(G.vertices):
        raise ValueError("table domain differs from the structure")
    inside = set(G.vertices)
    return OperationTable.from_function(
        GX.vertices, t.arity,
        lambda *a: t.entries[a] if inside.issuperset(a) else new)


def lift_top(t: OperationTable, G: RelStruct) -> OperationTable:
    """Extend ``t`` to ``extend_top(G)``: the new sink wins whenever it appears."""
    return _lift(t, G, fresh_name(G, "top"), extend_top(G))


def lift_bottom(t: OperationTable, G: RelStruct) -> OperationTable:
    return _lift(t, G, fresh_name(G, "bot"), extend_bottom(G))


def lift_top_bottom(t: OperationTable, G: RelStruct) -> OperationTable:
    """``lift_bottom(lift_top(t))``: bottom wins, then top, else ``t``."""
    return lift_bottom(lift_top(t, G), extend_top(G))


def _guarded(base: OperationTable, guard: Callable, value: Callable) -> OperationTable:
    return OperationTable.from_function(
        base.domain, base.arity,
        lambda *a: value(*a) if guard(*a) else base.entries[a])


def _require(tables, sys, G, what):
    bad = verify(tables, sys, G)
    if bad is not None:
        raise ValueError(f"{what}: input does not verify {sys.label}: {bad}")


def lift_permutability_chain(chain: Mapping[str, OperationTable], G: RelStruct) -> dict[str, OperationTable]:
    """Hagemann-Mitschke chain ``p1..p{n-1}`` on G to ``q1..q{n+1}`` on ``extend_bottom_top(G)``."""
    n = len(chain) + 1
    _require(chain, hagemann_mitschke(n), G, "lift_permutability_chain")
    GX = extend_bottom_top(G)
    ps = [projection(G.vertices, 3, 0)] + [chain[f"p{i}"] for i in range(1, n)] + [projection(G.vertices, 3, 2)]
    lifted = [lift_top_bottom(p, G) for p in ps]
    out = {}
    out["p1"] = _guarded(lifted[0], lambda x, y, z: y == z, lambda x, y, z: x)
    for i in range(1, n):
        out[f"p{i+1}"] = lifted[i]
    out[f"p{n+1}"] = _guarded(lifted[n], lambda x, y, z: x == y, lambda x, y, z: z)
    _require(out, hagemann_mitschke(n + 2), GX, "lift_permutability_chain output")
    return out


def _hobmck_n(chain) -> int:
    return sum(1 for s in chain if s.startswith("d"))


def lift_hobby_mckenzie(chain: Mapping[str, OperationTable], G: RelStruct) -> dict[str, OperationTable]:
    """Hobby-McKenzie chain of length n on G to length n+2 on ``extend_bottom(extend_top(G))``."""
    n = _hobmck_n(chain)
    _require(chain, hobby_mckenzie(n), G, "lift_hobby_mckenzie")
    GX = extend_bottom(extend_top(G))
    V = G.vertices
    d = [projection(V, 3, 0)] + [chain[f"d{i}"] for i in range(1, n + 1)]
    e = [chain[f"e{i}"] for i in range(n)] + [projection(V, 3, 2)]
    dl = [lift_top_bottom(t, G) for t in d]
    el = [lift_top_bottom(t, G) for t in e]
    out = {"p": lift_top_bottom(chain["p"], G)}
    out["d1"] = _guarded(dl[0], lambda x, y, z: not (x == y or x == z), lambda x, y, z: x)
    for i in range(2, n + 3):
        out[f"d{i}"] = dl[i - 2]
    for i in range(n + 1):
        out[f"e{i}"] = el[i]
    if n % 2 == 0:
        guard = lambda x, y, z: x == y  # noqa: E731
    else:
        guard = lambda x, y, z: x == z or y == z  # noqa: E731
    out[f"e{n+1}"] = _guarded(el[n], guard, lambda x, y, z: z)
    _require(out, hobby_mckenzie(n + 2), GX, "lift_hobby_mckenzie output")
    return out


def topbot_majority(n: int) -> OperationTable:
    """Majority operation on ``extend_bottom_top(cycle(n))``."""
    if n < 2:
        raise ValueError("need n >= 2")
    C = cycle(n)
    GX = extend_bottom_top(C)
    bot, top = GX.vertices[-2], GX.vertices[-1]
    m = cycle_majority(n)
    inner = set(C.vertices)

    def mp(a, b, c):
        if inner.issuperset((a, b, c)):
            return m.entries[(a, b, c)]
        if len({a, b, c}) < 3:
            return b if b == c else a
        return top if bot not in (a, b, c) else bot
    return OperationTable.from_function(GX.vertices, 3, mp)


def cm_to_cd_transform(chain: Mapping[str, OperationTable], G: RelStruct) -> tuple[dict[str, OperationTable], Optional[Violation]]:
    """Gumm chain ``s1..s{2m}, p`` to a Jonsson chain ``J1..J{2m+2}`` on the same structure.

    ``p`` is replaced by ``q'`` (first argument when it equals the third) and a
    first projection is prepended.  Returns the chain together with the
    verifier's verdict against ``jonsson(2m+3)``.
    """
    m2 = sum(1 for s in chain if s.startswith("s"))
    if m2 % 2 or set(chain) != {f"s{i}" for i in range(1, m2 + 1)} | {"p"}:
        raise ValueError("expected symbols s1..s2m and p")
    q = chain["p"]
    qp = _guarded(q, lambda x, y, z: x == z, lambda x, y, z: x)
    out = {"J1": projection(q.domain, 3, 0)}
    for i in range(1, m2 + 1):
        out[f"J{i+1}"] = chain[f"s{i}"]
    out[f"J{m2+2}"] = qp
    bad = verify(out, jonsson(m2 + 3), G)
    if bad is not None:
        raise ValueError(f"transformed chain fails {jonsson(m2 + 3).label}: {bad}")
    return out, bad


# -- unions --------------------------------------------------------------------

def _union_domain(t1: OperationTable, t2: OperationTable):
    left = tuple("1:" + v for v in t1.domain)
    right = tuple("2:" + v for v in t2.domain)
    return left, right


def union_weak_nu(t1: OperationTable, t2: OperationTable) -> OperationTable:
    """Weak NU on the (structured) disjoint union; vertex names as in ``disjoint_union``."""
    if t1.arity != t2.arity:
        raise ValueError("arity mismatch")
    left, right = _union_domain(t1, t2)
    lset, rset = set(left), set(right)

    def w(*a):
        if lset.issuperset(a):
            return "1:" + t1.entries[tuple(x[2:] for x in a)]
        if rset.issuperset(a):
            return "2:" + t2.entries[tuple(x[2:] for x in a)]
        return next(x for x in a if x in lset)
    return OperationTable.from_function(left + right, t1.arity, w)


def union_ternary_extend(method: int, pG: OperationTable, pH: OperationTable) -> OperationTable:
    """Ternary extension to the union: 1 = first argument, 2 = third, 3 = minority selection."""
    if method not in (1, 2, 3):
        raise ValueError(f"method must be 1, 2 or 3, got {method}")
    if pG.arity != 3 or pH.arity != 3:
        raise ValueError("ternary tables required")
    left, right = _union_domain(pG, pH)
    lset, rset = set(left), set(right)

    def p(a, b, c):
        t = (a, b, c)
        if lset.issuperset(t):
            return "1:" + pG.entries[tuple(x[2:] for x in t)]
        if rset.issuperset(t):
            return "2:" + pH.entries[tuple(x[2:] for x in t)]
        if method == 1:
            return a
        if method == 2:
            return c
        sides = [x in lset for x in t]
        lone = [x for x, s in zip(t, sides) if sides.count(s) == 1]
        # every mixed triple splits 1-vs-2, so the fallback is never reached
        return lone[0] if len(lone) == 1 else a
    return OperationTable.from_function(left + right, 3, p)


# -- padding -------------------------------------------------------------------

def pad_chain(family: str, chain: Mapping[str, OperationTable], domain) -> dict[str, OperationTable]:
    """Witness of the family at parameter n+1 from one at parameter n, by projections."""
    domain = tuple(domain)
    px, pz = projection(domain, 3, 0), projection(domain, 3, 2)
    out = dict(chain)
    if family in ("hm", "hagemann_mitschke"):
        out[f"p{len(chain) + 1}"] = pz
    elif family == "jonsson":
        out[f"J{len(chain) + 1}"] = pz
    elif family == "gumm":
        m2 = len(chain) - 1
        out = {"s1": px, "s2": px, "p": chain["p"]}
        for i in range(1, m2 + 1):
            out[f"s{i+2}"] = chain[f"s{i}"]
    elif family in ("hobmck", "hobby_mckenzie"):
        n = _hobmck_n(chain)
        out[f"d{n+1}"] = chain[f"d{n}"] if n else px
        out[f"e{n}"] = pz
    else:
        raise ValueError(f"unknown chain family {family!r}")
    return out


def union_permutability_chain(chainG, chainH) -> dict[str, OperationTable]:
    """Combine Hagemann-Mitschke chains on G and H into one on their union.

    The shorter chain is padded with third projections; ``p1`` uses minority
    selection and the rest use the third argument on mixed tuples.
    """
    dG = next(iter(chainG.values())).domain
    dH = next(iter(chainH.values())).domain
    while len(chainG) < len(chainH):
        chainG = pad_chain("hm", chainG, dG)
    while len(chainH) < len(chainG):
        chainH = pad_chain("hm", chainH, dH)
    return {s: union_ternary_extend(3 if s == "p1" else 2, chainG[s], chainH[s]) for s in chainG}

