from itertools import product

import pytest
from hypothesis import given, strategies as st

from dgpoly.acceptance import ORACLE_SYSTEMS, brute_force_exists, small_digraphs
from dgpoly.constructions import (
    cycle,
    extend_bottom_top,
    extend_top,
    interval_extension,
    single_vertex,
    structured_union,
)
from dgpoly.identities import (
    IdentitySystem,
    eq,
    f,
    gumm,
    hagemann_mitschke,
    is_balanced,
    maltsev,
    nu,
    parse_condition,
    tsi,
    two_semilattice,
    weak_nu,
)
from dgpoly.polyconstruct import tournament, verify
from dgpoly.polysolver import (
    FAILS,
    HOLDS,
    UNKNOWN,
    PolymorphismError,
    analyze,
    build_indicator,
    default_bound,
    enumerate_polymorphisms,
    has_polymorphisms,
    min_parameter,
    no_gumm_witness,
)
from dgpoly.structures import RelStruct, build_structure, dismantlability_witness
from strategies import digraphs

POOL3 = list(small_digraphs(3))
POOL4 = list(small_digraphs(4))


def test_indicator_maltsev_on_c3():
    C3 = cycle(3)
    inst = build_indicator(C3, maltsev())
    assert inst.ncells == 27
    idx = C3.index
    for a, b in product(C3.vertices, repeat=2):
        ia, ib = idx[a], idx[b]
        for args in ((ia, ib, ib), (ib, ib, ia)):
            k = inst.class_of[inst.cell("p", args)]
            assert inst.domains[k] == 1 << ia


def test_indicator_nu3_on_c3():
    C3 = cycle(3)
    inst = build_indicator(C3, nu(3))
    assert inst.ncells == 27
    fixed = [c for c in range(27) if inst.domains[inst.class_of[c]] & (inst.domains[inst.class_of[c]] - 1) == 0]
    # 3 diagonal cells plus 18 near-unanimous cells
    assert len(fixed) == 21


def test_contradictions_short_circuit():
    assert build_indicator(cycle(3), hagemann_mitschke(1)).unsatisfiable
    assert build_indicator(cycle(2), nu(2)).unsatisfiable
    assert not build_indicator(single_vertex(), hagemann_mitschke(1)).unsatisfiable
    assert has_polymorphisms(single_vertex(), hagemann_mitschke(1)) == {}


def test_refuses_loops_and_empty():
    with pytest.raises(PolymorphismError, match="loops"):
        build_indicator(build_structure("a", [("a", "a")]), maltsev())
    with pytest.raises(PolymorphismError, match="empty"):
        build_indicator(RelStruct((), frozenset()), maltsev())
    bad = IdentitySystem({"p": 3}, (eq(f("p", "xy"), "x"),))
    with pytest.raises(PolymorphismError):
        build_indicator(cycle(3), bad)


def test_has_polymorphisms_examples():
    assert has_polymorphisms(cycle(4), two_semilattice()) is None
    w = has_polymorphisms(cycle(3), maltsev())
    assert w is not None and verify(w, maltsev(), cycle(3)) is None
    assert has_polymorphisms(cycle(3), tsi(3)) is None
    assert has_polymorphisms(extend_bottom_top(cycle(3)), nu(3)) is not None
    assert has_polymorphisms(tournament(2), hagemann_mitschke(2)) is not None


@pytest.mark.parametrize("n, expect", [(1, True), (3, True), (5, True), (2, False), (4, False), (6, False)])
def test_two_semilattice_parity(n, expect):
    assert (has_polymorphisms(cycle(n), two_semilattice()) is not None) == expect


def test_witness_is_deterministic():
    G = interval_extension(cycle(3), -1, 1)
    runs = [has_polymorphisms(G, hagemann_mitschke(4)) for _ in range(3)]
    assert runs[0] == runs[1] == runs[2]


@pytest.mark.parametrize("G", POOL3, ids=lambda G: str(sorted(G.edges)))
def test_oracle_equivalence(G):
    for name in ORACLE_SYSTEMS:
        assert (has_polymorphisms(G, parse_condition(name)) is not None) == brute_force_exists(G, name), name


def test_oracle_is_not_vacuous():
    answers = {(name, str(sorted(G.edges))): brute_force_exists(G, name) for G in POOL3 for name in ORACLE_SYSTEMS}
    assert any(answers.values()) and not all(answers.values())


BALANCED = ["weaknu:2", "weaknu:3", "tsi:2", "tsi:3", "2sl"]


@pytest.mark.parametrize("name", BALANCED)
def test_balanced_systems_stable_under_extensions(name):
    sys = parse_condition(name)
    assert is_balanced(sys)
    for G in POOL4:
        base = has_polymorphisms(G, sys) is not None
        for i, j in ((-1, 0), (0, 1), (-1, 1)):
            assert (has_polymorphisms(interval_extension(G, i, j), sys) is not None) == base


def test_sd_meet_stable_under_extensions():
    sys = parse_condition("sdmeet")
    for G in POOL3:
        base = has_polymorphisms(G, sys) is not None
        for i, j in ((-1, 0), (0, 1), (-1, 1)):
            assert (has_polymorphisms(interval_extension(G, i, j), sys) is not None) == base


@given(digraphs(max_size=4), st.sampled_from(["maltsev", "nu:3", "weaknu:3", "tsi:2", "2sl", "hm:3"]))
def test_witnesses_keep_neighbourhoods_closed(G, name):
    w = has_polymorphisms(G, parse_condition(name))
    if w is None:
        return
    for t in w.values():
        for v in G.vertices:
            for S in (G.succ[v], G.pred[v]):
                for args in product(sorted(S), repeat=t.arity):
                    assert t(*args) in S


def test_projection_collapse_on_nondismantlable_pool():
    sys = IdentitySystem({"p": 3}, (eq(f("p", "xyy"), "x"),))
    checked = 0
    for G in POOL3:
        if not G.edges or dismantlability_witness(G) is not None:
            continue
        checked += 1
        H = extend_bottom_top(G)
        for tables in enumerate_polymorphisms(H, sys, 300):
            p = tables["p"]
            assert all(p(*t) == t[0] for t in product(G.vertices, repeat=3))
    assert checked >= 2


@pytest.mark.parametrize("G, family", [
    (tournament(3), "hm"), (interval_extension(cycle(3), 0, 1), "hm"),
    (tournament(3), "jonsson"), (cycle(3), "gumm"), (tournament(2), "hobmck"),
])
def test_min_parameter_monotone(G, family):
    from dgpoly.identities import CHAIN_FAMILIES
    res = min_parameter(G, family, 8)
    assert res.found
    assert has_polymorphisms(G, CHAIN_FAMILIES[family](res.value + 1)) is not None
    if res.value > 1:
        assert has_polymorphisms(G, CHAIN_FAMILIES[family](res.value - 1)) is None


def test_min_parameter_examples():
    assert min_parameter(tournament(3), "hagemann_mitschke", 6).value == 3
    assert min_parameter(interval_extension(cycle(3), 0, 1), "hm", 8).value == 4
    assert min_parameter(cycle(3), "hm", 4).value == 2
    res = min_parameter(tournament(4), "hm", 3)
    assert res.value is None and res.bound == 3


def test_semicomplete_without_weak_nu():
    vs = ["0", "1", "2", "c"]
    es = [("0", "1"), ("1", "2"), ("2", "0")] + [(x, "c") for x in "012"] + [("c", x) for x in "012"]
    G = build_structure(vs, es)
    assert has_polymorphisms(G, weak_nu(3)) is None


def test_no_gumm_examples():
    C3 = cycle(3)
    w = no_gumm_witness(interval_extension(C3, 0, 2))
    a, ap, b, bp, one = w
    assert a.startswith("v:") and b.startswith("v:") and one == "p1"
    assert no_gumm_witness(C3) is None
    assert no_gumm_witness(interval_extension(C3, 0, 1)) is None
    with pytest.raises(PolymorphismError):
        no_gumm_witness(build_structure("a", [("a", "a")]))


def _conditions_hold(G, w):
    a, ap, b, bp, one = w
    return (len({a, b, one}) == 3 and G.succ[one]
            and G.succ[a] & G.pred[one] == {ap} and G.pred[ap] & G.pred[one] == {a}
            and b in G.pred[one] and bp in G.pred[one] and bp in G.succ[b])


@given(digraphs(max_size=5))
def test_no_gumm_witness_satisfies_conditions(G):
    w = no_gumm_witness(G)
    if w is not None:
        assert _conditions_hold(G, w)
        # and then no Gumm chain of small length exists
        assert has_polymorphisms(G, gumm(1)) is None


@given(digraphs(min_size=2, max_size=4))
def test_double_top_obstruction(G):
    # edges (u1,v1), (u2,v2) with u1 != u2, u1+ = {v1}, v1- = {u1}
    hit = any(u1 != u2 and G.succ[u1] == {v1} and G.pred[v1] == {u1}
              for u1, v1 in G.edges for u2, v2 in G.edges)
    if hit:
        assert no_gumm_witness(extend_top(extend_top(G))) is not None


def test_analyze_cycle_examples():
    rep = analyze(cycle(4), ["maltsev", "nu:3", "2sl", "tsi:4"])
    assert rep.verdicts() == {"maltsev": HOLDS, "nu:3": HOLDS, "2sl": FAILS, "tsi:4": FAILS}
    assert rep["maltsev"].witness is not None and rep["2sl"].witness is None
    assert [r.run_id for r in rep.results] == ["run-1", "run-2", "run-3", "run-4"]


def test_analyze_searches():
    rep = analyze(tournament(4), ["perm:6", "cd", "cm"])
    assert rep["perm:6"].parameter == 4
    assert rep["cd"].bound == default_bound(tournament(4))
    rep = analyze(interval_extension(cycle(3), 0, 2), ["cm", "perm:3", "min:hobmck:2", "sdmeet"])
    assert rep["cm"].verdict == FAILS and "structural" in rep["cm"].note
    assert rep["perm:3"].verdict == UNKNOWN
    assert rep["sdmeet"].verdict == HOLDS


def test_analyze_records_errors():
    rep = analyze(cycle(3), ["nope", "maltsev", "min:foo", "perm:x"])
    assert rep.verdicts() == {"nope": "error", "maltsev": HOLDS, "min:foo": "error", "perm:x": "error"}


def test_analyze_single_vertex():
    conds = ["maltsev", "nu:3", "weaknu:4", "sdmeet", "2sl", "tsi:3", "hm:1", "gumm:1", "perm", "cm"]
    rep = analyze(single_vertex(), conds)
    assert set(rep.verdicts().values()) == {HOLDS}


def test_structured_union_marks_bind_witnesses():
    U = structured_union(cycle(3), cycle(2))
    w = has_polymorphisms(U, maltsev())
    assert w is not None
    p = w["p"]
    for t in product(sorted(U.marks["uA"]), repeat=3):
        assert p(*t) in U.marks["uA"]
    assert has_polymorphisms(structured_union(cycle(3), cycle(4)), two_semilattice()) is None
