"""Deciding identity systems over a digraph via the indicator instance.

The variables of the indicator are the table cells ``(symbol, tuple)``.  Each
identity, instantiated at every assignment of its variables, either merges two
cells or pins a cell to a vertex; the merged classes become CSP variables.
Cells of one symbol are tied by the template's edge relation componentwise,
and absorption identities ``outer(..., t, ...) = t`` add conditional binary
constraints ``t = c  =>  outer(..., c, ...) = c``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Optional

from .homsolver import BinaryCsp, Relation
from .identities import (
    App,
    CHAIN_FAMILIES,
    ConditionError,
    IdentitySystem,
    absorption_parts,
    gumm,
    parse_condition,
    sd_meet_pair,
    validate_system,
)
from .polyconstruct import OperationTable, verify
from .structures import RelStruct


class PolymorphismError(ValueError):
    """Bad input to the polymorphism solver (loops, empty template, malformed system)."""


class InvariantViolation(RuntimeError):
    """A solver witness failed independent verification."""


def _check_template(G: RelStruct) -> None:
    if G.size == 0:
        raise PolymorphismError("template is empty")
    if G.has_loops:
        raise PolymorphismError("template has loops; only loop-free digraphs are supported")


@dataclass
class IndicatorInstance:
    template: RelStruct
    system: IdentitySystem
    offsets: dict                 # symbol -> first cell index
    ncells: int
    class_of: list[int]           # cell -> class
    domains: list[int]            # class -> vertex bitmask
    edge_pairs: set = field(default_factory=set)        # (class, class)
    absorb_triples: set = field(default_factory=set)    # (class, class, value)
    contradiction: Optional[str] = None

    @property
    def nclasses(self) -> int:
        return len(self.domains)

    @property
    def unsatisfiable(self) -> bool:
        return self.contradiction is not None

    def cell(self, symbol: str, args: tuple[int, ...]) -> int:
        n = self.template.size
        c = 0
        for a in args:
            c = c * n + a
        return self.offsets[symbol] + c

    def to_csp(self) -> BinaryCsp:
        n = self.template.size
        csp = BinaryCsp(n, self.domains)
        if self.contradiction is not None:
            csp.failed = True
            return csp
        idx = self.template.index
        edge = Relation(n, ((idx[u], idx[v]) for u, v in self.template.edges))
        for x, y in sorted(self.edge_pairs):
            csp.add(x, y, edge)
        cond = {}
        for x, y, c in sorted(self.absorb_triples):
            if c not in cond:
                cond[c] = Relation(n, ((u, w) for u in range(n) for w in range(n) if u != c or w == c))
            csp.add(x, y, cond[c])
        return csp

    def decode(self, values: list[int]) -> dict[str, OperationTable]:
        V = self.template.vertices
        n = len(V)
        out = {}
        for sym, ar in self.system.symbols.items():
            off = self.offsets[sym]
            entries = {}
            for k, t in enumerate(product(range(n), repeat=ar)):
                entries[tuple(V[i] for i in t)] = V[values[self.class_of[off + k]]]
            out[sym] = OperationTable(ar, V, entries)
        return out


class _UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra < rb:
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb


def build_indicator(template: RelStruct, sys: IdentitySystem) -> IndicatorInstance:
    _check_template(template)
    problems = validate_system(sys)
    if problems:
        raise PolymorphismError("; ".join(problems))
    V = template.vertices
    n = len(V)
    offsets, total = {}, 0
    for sym, ar in sys.symbols.items():
        offsets[sym] = total
        total += n ** ar
    uf = _UnionFind(total + n)  # the last n nodes stand for the vertices themselves
    const = lambda a: total + a  # noqa: E731
    contradiction = None

    def cell_of(app: App, env) -> int:
        c = 0
        for a in app.args:
            c = c * n + env[a]
        return offsets[app.symbol] + c

    if sys.idempotent:
        for sym, ar in sys.symbols.items():
            for a in range(n):
                uf.union(cell_of(App(sym, ("d",) * ar), {"d": a}), const(a))

    absorptions = []
    for ident in sys.identities:
        parts = absorption_parts(ident)
        if parts is not None:
            absorptions.append((ident, parts))
            continue
        names = ident.variables
        for vals in product(range(n), repeat=len(names)):
            env = dict(zip(names, vals))
            nodes = [const(env[s]) if isinstance(s, str) else cell_of(s, env)
                     for s in (ident.lhs, ident.rhs)]
            uf.union(nodes[0], nodes[1])

    # a class holding two vertex nodes is forced to two values
    for a in range(1, n):
        ra = uf.find(const(a))
        for b in range(a):
            if uf.find(const(b)) == ra:
                contradiction = f"identities force {V[b]} = {V[a]}"
                break
        if contradiction:
            break

    reps: dict[int, int] = {}
    class_of = [0] * total
    for c in range(total):
        r = uf.find(c)
        if r not in reps:
            reps[r] = len(reps)
        class_of[c] = reps[r]
    full = (1 << n) - 1
    domains = [full] * len(reps)
    for a in range(n):
        r = uf.find(const(a))
        if r in reps:
            domains[reps[r]] = 1 << a

    idx = template.index
    for name, members in template.marks.items():
        mask = sum(1 << idx[v] for v in members)
        ms = sorted(idx[v] for v in members)
        for sym, ar in sys.symbols.items():
            for t in product(ms, repeat=ar):
                env = dict(enumerate(t))
                k = class_of[cell_of(App(sym, tuple(range(ar))), env)]
                domains[k] &= mask
    if contradiction is None and any(d == 0 for d in domains):
        contradiction = "mark restrictions leave a cell without values"

    inst = IndicatorInstance(template, sys, offsets, total, class_of, domains,
                             contradiction=contradiction)
    if contradiction is not None:
        return inst

    edges = sorted((idx[u], idx[v]) for u, v in template.edges)
    for sym, ar in sys.symbols.items():
        off = offsets[sym]
        for combo in product(edges, repeat=ar):
            s = d = 0
            for u, v in combo:
                s = s * n + u
                d = d * n + v
            inst.edge_pairs.add((class_of[off + s], class_of[off + d]))

    for ident, (outer, pos, inner) in absorptions:
        names = ident.variables
        for vals in product(range(n), repeat=len(names)):
            env = dict(zip(names, vals))
            x = class_of[cell_of(inner, env)]
            for c in range(n):
                args = [env[a] if isinstance(a, str) else c for a in outer.args]
                k = 0
                for a in args:
                    k = k * n + a
                inst.absorb_triples.add((x, class_of[offsets[outer.symbol] + k], c))
    return inst


def _checked(inst: IndicatorInstance, values: list[int]) -> dict[str, OperationTable]:
    tables = inst.decode(values)
    bad = verify(tables, inst.system, inst.template)
    if bad is not None:
        raise InvariantViolation(f"solver witness for {inst.system.label or inst.system} fails: {bad}")
    return tables


def has_polymorphisms(template: RelStruct, sys: IdentitySystem) -> Optional[dict[str, OperationTable]]:
    """A verified witness (symbol -> table) or ``None`` when none exists."""
    inst = build_indicator(template, sys)
    if inst.unsatisfiable:
        return None
    values = inst.to_csp().solve()
    if values is None:
        return None
    return _checked(inst, values)


def enumerate_polymorphisms(template: RelStruct, sys: IdentitySystem, limit: int,
                            check: bool = False) -> Iterator[dict[str, OperationTable]]:
    """Yield up to ``limit`` witnesses in search order (``check`` re-verifies each)."""
    inst = build_indicator(template, sys)
    if inst.unsatisfiable:
        return
    for k, values in enumerate(inst.to_csp().iter_solutions()):
        if k >= limit:
            return
        yield _checked(inst, values) if check else inst.decode(values)


# -- chain families ------------------------------------------------------------

_FAMILY_START = {"hm": 1, "jonsson": 1, "gumm": 1, "hobmck": 0}
_FAMILY_CANON = {"hagemann_mitschke": "hm", "hobby_mckenzie": "hobmck"}


def default_bound(template: RelStruct) -> int:
    return 2 * template.size + 2


@dataclass
class MinParameter:
    family: str
    bound: int
    value: Optional[int]                 # None: nothing up to ``bound``
    witness: Optional[dict] = None

    @property
    def found(self) -> bool:
        return self.value is not None


def min_parameter(template: RelStruct, family: str, bound: int, *, verbatim_gumm: bool = False) -> MinParameter:
    """Smallest parameter in ``start..bound`` at which the family holds.

    Projection padding makes every family monotone, so the first hit is minimal.
    Hobby-McKenzie starts at 0 (the Maltsev case); the others at 1.
    """
    fam = _FAMILY_CANON.get(family, family)
    if fam not in _FAMILY_START:
        raise ConditionError(f"unknown chain family {family!r}")
    if bound < 1:
        raise ConditionError("bound must be at least 1")
    builder = CHAIN_FAMILIES[fam]
    for k in range(_FAMILY_START[fam], bound + 1):
        sys = gumm(k, verbatim=True) if fam == "gumm" and verbatim_gumm else builder(k)
        w = has_polymorphisms(template, sys)
        if w is not None:
            return MinParameter(fam, bound, k, w)
    return MinParameter(fam, bound, None)


# -- structural obstruction to Gumm chains -------------------------------------

def no_gumm_witness(G: RelStruct) -> Optional[tuple[str, str, str, str, str]]:
    """Least ``(a, a', b, b', one)`` (by vertex positions) obstructing Gumm chains.

    Requires ``a, b, one`` pairwise distinct, ``one+`` nonempty,
    ``a+ & one- == {a'}`` with ``a'- & one- == {a}``, and ``b, b' in one-``
    with ``b -> b'``.
    """
    if G.has_loops:
        raise PolymorphismError("no_gumm_witness needs a loop-free digraph")
    idx = G.index
    best = None
    for one in G.vertices:
        if not G.succ[one]:
            continue
        below = G.pred[one]
        for a in G.vertices:
            if a == one:
                continue
            common = G.succ[a] & below
            if len(common) != 1:
                continue
            (ap,) = common
            if G.pred[ap] & below != {a}:
                continue
            for b in G.sorted_vertices(below):
                if b in (a, one):
                    continue
                for bp in G.sorted_vertices(G.succ[b] & below):
                    cand = (a, ap, b, bp, one)
                    key = tuple(idx[v] for v in cand)
                    if best is None or key < best[0]:
                        best = (key, cand)
                    break
    return None if best is None else best[1]


# -- analysis ------------------------------------------------------------------

HOLDS, FAILS, UNKNOWN, ERROR = "holds", "fails", "unknown_above_bound", "error"

# condition prefix -> (family searched, report key)
_SEARCHES = {
    "perm": "hm",
    "cd": "jonsson",
    "cm": "gumm",
}


@dataclass
class ConditionResult:
    condition: str
    verdict: str
    run_id: str
    parameter: Optional[int] = None
    bound: Optional[int] = None
    note: str = ""
    witness: Optional[dict] = None
    millis: float = 0.0


@dataclass
class AnalysisReport:
    template: RelStruct
    results: list[ConditionResult]

    def verdicts(self) -> dict[str, str]:
        return {r.condition: r.verdict for r in self.results}

    def __getitem__(self, condition: str) -> ConditionResult:
        for r in self.results:
            if r.condition == condition:
                return r
        raise KeyError(condition)


def _search_plan(cond: str, template: RelStruct) -> Optional[tuple[str, int]]:
    """``(family, bound)`` for search conditions, ``None`` for catalogue names."""
    parts = cond.split(":")
    head = parts[0]
    if head == "min":
        if len(parts) not in (2, 3):
            raise ConditionError(f"expected min:<family>[:bound], got {cond!r}")
        family = _FAMILY_CANON.get(parts[1], parts[1])
        if family not in _FAMILY_START:
            raise ConditionError(f"unknown chain family {parts[1]!r}")
        rest = parts[2:]
    elif head in _SEARCHES:
        if len(parts) > 2:
            raise ConditionError(f"expected {head}[:bound], got {cond!r}")
        family = _SEARCHES[head]
        rest = parts[1:]
    else:
        return None
    try:
        bound = int(rest[0]) if rest else default_bound(template)
    except ValueError:
        raise ConditionError(f"bad bound in {cond!r}") from None
    if bound < 1:
        raise ConditionError(f"bound must be at least 1 in {cond!r}")
    return family, bound


def check_condition(cond: str, template: RelStruct, *, verbatim_gumm: bool = False) -> None:
    """Raise :class:`ConditionError` if ``cond`` does not parse."""
    if _search_plan(cond, template) is None:
        parse_condition(cond, verbatim_gumm=verbatim_gumm)


def _run_condition(template: RelStruct, cond: str, verbatim_gumm: bool) -> tuple:
    head = cond.split(":")[0]
    plan = _search_plan(cond, template)
    if plan is not None:
        family, bound = plan
        if head == "cm":
            w = no_gumm_witness(template)
            if w is not None:
                return FAILS, None, bound, "structural witness (a, a', b, b', 1) = " + ",".join(w), None
        res = min_parameter(template, family, bound, verbatim_gumm=verbatim_gumm)
        if res.found:
            return HOLDS, res.value, bound, f"minimal {res.family} parameter", res.witness
        note = f"no {res.family} chain up to {bound}"
        if head == "cm":
            note += "; absence of Gumm chains in general is not decided"
        return UNKNOWN, None, bound, note, None
    sys = parse_condition(cond, verbatim_gumm=verbatim_gumm)
    w = has_polymorphisms(template, sys)
    note = ""
    if sys.name == "weaknu":
        note = "a single arity only; a yes answer is sound, a no answer does not refute Taylor"
    return (HOLDS if w is not None else FAILS), None, None, note, w


def analyze(template: RelStruct, conditions, *, verbatim_gumm: bool = False) -> AnalysisReport:
    """Run each condition string; per-condition errors are recorded, not raised."""
    _check_template(template)
    results = []
    for k, cond in enumerate(conditions, start=1):
        start = time.perf_counter()
        run_id = f"run-{k}"
        try:
            verdict, param, bound, note, witness = _run_condition(template, cond, verbatim_gumm)
        except (ConditionError, PolymorphismError, ValueError) as exc:
            verdict, param, bound, note, witness = ERROR, None, None, str(exc), None
        millis = (time.perf_counter() - start) * 1000.0
        results.append(ConditionResult(cond, verdict, run_id, param, bound, note, witness, millis))
    return AnalysisReport(template, results)


def sd_meet(template: RelStruct) -> Optional[dict]:
    return has_polymorphisms(template, sd_meet_pair())
