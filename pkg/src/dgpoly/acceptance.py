"""Acceptance criteria shared by ``dgpoly suite paper`` and the test suite.

Each criterion is a function returning ``(passed, detail, parameter)``; the
runner times it and catches exceptions so one failure never hides the rest.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import product
from typing import Callable, Optional

from .constructions import (
    cycle,
    digraphs_up_to_isomorphism,
    direct_product,
    disjoint_union,
    extend_bottom_top,
    extend_top,
    interval_extension,
    structured_union,
    transitive_tournament,
)
from .homsolver import find_homomorphism
from .identities import (
    IdentitySystem,
    eq,
    f,
    gumm,
    hagemann_mitschke,
    jonsson,
    nu,
    parse_condition,
    sd_meet_pair,
)
from .polyconstruct import (
    cm_to_cd_transform,
    lift_permutability_chain,
    topbot_majority,
    tournament,
    verify,
)
from .polysolver import analyze, enumerate_polymorphisms, has_polymorphisms, min_parameter, no_gumm_witness
from .reductions import add_top_instance, product_membership, strip_sinks, union_membership
from .structures import RelStruct


@dataclass
class CriterionResult:
    id: int
    name: str
    tags: tuple[str, ...]
    passed: bool
    detail: str
    millis: float
    parameter: Optional[object] = None


def _expect(label, got, want, lines):
    ok = got == want
    lines.append(f"{label}={got}" + ("" if ok else f" (want {want})"))
    return ok


def crit_cycle_catalogue():
    lines, ok = [], True
    want = {
        3: {"maltsev": "holds", "nu:3": "holds", "2sl": "holds", "tsi:3": "fails"},
        4: {"maltsev": "holds", "nu:3": "holds", "2sl": "fails", "tsi:4": "fails"},
    }
    for n, expect in want.items():
        got = analyze(cycle(n), list(expect)).verdicts()
        for cond, v in expect.items():
            ok &= _expect(f"C{n} {cond}", got[cond], v, lines)
    return ok, "; ".join(lines), None


def crit_tournament_perm(sizes=(2, 3, 4, 5)):
    lines, ok = [], True
    for n in sizes:
        ok &= _expect(f"T{n}", min_parameter(tournament(n), "hm", n + 2).value, n, lines)
    return ok, "; ".join(lines), None


def crit_extension_perm():
    lines, ok = [], True
    C3 = cycle(3)
    for k in (0, 1):
        got = min_parameter(interval_extension(C3, 0, k), "hm", 2 * k + 4).value
        ok &= _expect(f"C3[0,{k}]", got, 2 * k + 2, lines)
    got = min_parameter(interval_extension(C3, -1, 1), "hm", 6).value
    ok &= _expect("C3[-1,1]", got, 4, lines)
    return ok, "; ".join(lines), None


def crit_topbot_majority():
    lines, ok = [], True
    for n in (2, 3, 4):
        G = extend_bottom_top(cycle(n))
        solved = has_polymorphisms(G, nu(3)) is not None
        built = verify({"m": topbot_majority(n)}, nu(3), G) is None
        ok &= _expect(f"n={n} solver", solved, True, lines)
        ok &= _expect(f"n={n} table", built, True, lines)
    return ok, "; ".join(lines), None


def crit_cm_obstruction():
    lines, ok = [], True
    C3 = cycle(3)
    G = interval_extension(C3, 0, 2)
    w = no_gumm_witness(G)
    ok &= _expect("witness[0,2]", w is not None, True, lines)
    for m in (1, 2):
        ok &= _expect(f"gumm:{m}", has_polymorphisms(G, gumm(m)) is not None, False, lines)
    ok &= _expect("witness[0,1]", no_gumm_witness(interval_extension(C3, 0, 1)), None, lines)
    return ok, "; ".join(lines), w


def crit_sd_meet():
    lines, ok = [], True
    C3 = cycle(3)
    for label, G in (("C3", C3), ("C3[0,1]", interval_extension(C3, 0, 1)),
                     ("C3[-1,1]", interval_extension(C3, -1, 1))):
        ok &= _expect(label, has_polymorphisms(G, sd_meet_pair()) is not None, True, lines)
    return ok, "; ".join(lines), None


def crit_lift_permutability():
    C3 = cycle(3)
    chain = has_polymorphisms(C3, hagemann_mitschke(2))
    if chain is None:
        return False, "no Maltsev chain found on C3", None
    lifted = lift_permutability_chain(chain, C3)
    bad = verify(lifted, hagemann_mitschke(4), extend_bottom_top(C3))
    return bad is None, f"{len(lifted)} tables; verify hm:4 -> {bad or 'ok'}", len(lifted)


def crit_cm_to_cd():
    G = extend_bottom_top(cycle(3))
    res = min_parameter(G, "gumm", 4)
    if not res.found:
        return False, "no Gumm chain found on C3 with top and bottom", None
    try:
        chain, bad = cm_to_cd_transform(res.witness, G)
    except ValueError as exc:
        return False, str(exc), None
    n = len(chain) + 1
    return bad is None, f"gumm:{res.value} -> jonsson:{n} verify ok", n


# -- brute-force oracle for binary and unary single-symbol systems ------------

def _law_checks(name: str):
    """Identity predicates written directly, independent of the identity machinery."""
    comm = lambda op, V: all(op[a, b] == op[b, a] for a in V for b in V)  # noqa: E731
    if name == "tsi:1":
        return 1, lambda op, V: True
    if name in ("tsi:2", "weaknu:2"):
        return 2, comm
    if name == "nu:2":
        return 2, lambda op, V: all(op[a, b] == a and op[b, a] == a for a in V for b in V)
    if name == "2sl":
        return 2, lambda op, V: comm(op, V) and all(op[a, op[a, b]] == op[a, b] for a in V for b in V)
    raise KeyError(name)


ORACLE_SYSTEMS = ("tsi:1", "tsi:2", "weaknu:2", "nu:2", "2sl")


def brute_force_exists(G: RelStruct, name: str) -> bool:
    arity, law = _law_checks(name)
    V = G.vertices
    cells = [t for t in product(V, repeat=arity) if len(set(t)) > 1]
    edge_pairs = [(tuple(e[0] for e in c), tuple(e[1] for e in c))
                  for c in product(sorted(G.edges), repeat=arity)]
    for values in product(V, repeat=len(cells)):
        op = {(v,) * arity: v for v in V}
        op.update(zip(cells, values))
        if all((op[s], op[d]) in G.edges for s, d in edge_pairs) and law(op, V):
            return True
    return False


def small_digraphs(max_n: int, loops: bool = False):
    for n in range(1, max_n + 1):
        yield from digraphs_up_to_isomorphism(n, loops)


def crit_oracle():
    pool = list(small_digraphs(3))
    mismatches = []
    for G in pool:
        for name in ORACLE_SYSTEMS:
            solver = has_polymorphisms(G, parse_condition(name)) is not None
            if solver != brute_force_exists(G, name):
                mismatches.append(f"{name} on {sorted(G.edges)}")
    detail = f"{len(pool)} digraphs x {len(ORACLE_SYSTEMS)} systems; mismatches: {mismatches or 'none'}"
    return not mismatches, detail, len(pool)


def crit_reductions():
    pool = [RelStruct((), frozenset())] + list(small_digraphs(4, loops=True))
    bad = []
    for G in (cycle(2), cycle(3), transitive_tournament(0, 1)):
        GT = extend_top(G)
        for H in pool:
            a = find_homomorphism(H, GT) is not None
            b = find_homomorphism(strip_sinks(H), G) is not None
            c = find_homomorphism(H, G) is not None
            d = find_homomorphism(add_top_instance(H), GT) is not None
            if a != b or c != d:
                bad.append(sorted(H.edges))
    return not bad, f"{len(pool)} instances x 3 templates; exceptions: {len(bad)}", len(bad)


def _marked_variants(K: RelStruct):
    for labels in product((None, "uA", "uB"), repeat=K.size):
        marks = {m: frozenset(v for v, l in zip(K.vertices, labels) if l == m) for m in ("uA", "uB")}
        yield RelStruct(K.vertices, K.edges, marks)


def crit_csp_algebra():
    pool = [RelStruct((), frozenset())] + list(small_digraphs(3, loops=True))
    bad = []
    checks = 0
    for G, H in ((cycle(2), cycle(3)), (transitive_tournament(0, 1), cycle(3))):
        prod, du, su = direct_product(G, H), disjoint_union(G, H), structured_union(G, H)
        for K in pool:
            checks += 2
            if product_membership(K, G, H).accept != (find_homomorphism(K, prod) is not None):
                bad.append(("product", sorted(K.edges)))
            if union_membership(K, G, H).accept != (find_homomorphism(K, du) is not None):
                bad.append(("union", sorted(K.edges)))
            for KM in _marked_variants(K):
                checks += 1
                if union_membership(KM, G, H, structured=True).accept != (find_homomorphism(KM, su) is not None):
                    bad.append(("structured", sorted(K.edges), dict(KM.marks)))
    return not bad, f"{checks} comparisons; disagreements: {bad[:3] or 'none'}", len(bad)


def crit_projection_collapse(cap: int = 10_000):
    C3 = cycle(3)
    G = extend_bottom_top(C3)
    sys = IdentitySystem({"p": 3}, (eq(f("p", "xyy"), "x"),), name="p-xyy")
    count, bad = 0, None
    for tables in enumerate_polymorphisms(G, sys, cap):
        count += 1
        p = tables["p"]
        for t in product(C3.vertices, repeat=3):
            if p.entries[t] != t[0]:
                bad = (t, p.entries[t])
                break
        if bad:
            break
    if count == 0:
        return False, "no solutions enumerated", 0
    return bad is None, f"{count} solutions (cap {cap}); counterexample: {bad or 'none'}", count


CRITERIA: list[tuple[int, str, tuple[str, ...], Callable]] = [
    (1, "cycle catalogue", ("cycle",), crit_cycle_catalogue),
    (2, "tournament permutability", ("perm", "tournament"), crit_tournament_perm),
    (3, "extension permutability", ("perm", "extension"), crit_extension_perm),
    (4, "majority on two-sided extensions", ("majority", "extension"), crit_topbot_majority),
    (5, "modularity obstruction", ("cm", "gumm"), crit_cm_obstruction),
    (6, "SD(meet) stability", ("sdmeet", "balanced"), crit_sd_meet),
    (7, "permutability lift", ("perm", "lift"), crit_lift_permutability),
    (8, "Gumm to Jonsson transform", ("cm", "cd", "lift"), crit_cm_to_cd),
    (9, "brute-force oracle", ("oracle",), crit_oracle),
    (10, "reduction round trips", ("reduction",), crit_reductions),
    (11, "CSP algebra", ("union", "product"), crit_csp_algebra),
    (12, "projection collapse", ("projection",), crit_projection_collapse),
]


def select(filter_text: Optional[str] = None):
    if not filter_text:
        return list(CRITERIA)
    key = filter_text.lower()
    return [c for c in CRITERIA
            if key == str(c[0]) or key in c[1].lower() or any(key in t for t in c[2])]


def run_criterion(entry) -> CriterionResult:
    cid, name, tags, fn = entry
    start = time.perf_counter()
    try:
        passed, detail, param = fn()
    except Exception as exc:  # report, keep going
        passed, detail, param = False, f"{type(exc).__name__}: {exc}", None
    millis = (time.perf_counter() - start) * 1000.0
    return CriterionResult(cid, name, tags, bool(passed), detail, millis, param)


def run_criteria(filter_text: Optional[str] = None) -> list[CriterionResult]:
    return [run_criterion(c) for c in select(filter_text)]
