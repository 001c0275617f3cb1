import warnings

import pytest
from hypothesis import given, strategies as st

from dgpoly.constructions import cycle, disjoint_union, transitive_tournament
from dgpoly.structures import (
    RelStruct,
    StructureError,
    build_structure,
    canonical_form,
    classify_vertices,
    dismantlability_witness,
    is_isomorphic,
    neighborhoods,
    weak_components,
)
from strategies import digraphs


def test_build_converts_identifiers():
    S = build_structure(range(3), [(0, 1), (1, 2), (0, 1)])
    assert S.vertices == ("0", "1", "2")
    assert S.edges == {("0", "1"), ("1", "2")}


@pytest.mark.parametrize("vs, es, marks, msg", [
    ("aa", [], None, "duplicate vertex a"),
    ("ab", [("a", "c")], None, "unknown vertex c"),
    ("ab", [], {"m": ["z"]}, "unknown vertex z in mark m"),
])
def test_validation_errors(vs, es, marks, msg):
    with pytest.raises(StructureError, match=msg):
        build_structure(list(vs), es, marks)


def test_neighborhoods_and_unknown_vertex():
    C = cycle(3)
    assert neighborhoods(C, "0") == ({"1"}, {"2"})
    assert neighborhoods(C, 1) == ({"2"}, {"0"})
    with pytest.raises(StructureError):
        neighborhoods(C, "7")


def test_classification_of_tournament():
    cl = classify_vertices(transitive_tournament(0, 2))
    assert cl.sources == {"0"} and cl.sinks == {"2"}
    assert cl.total_sources == {"0"} and cl.total_sinks == {"2"}
    assert not cl.has_loop
    assert classify_vertices(cycle(3)).total_sources == frozenset()


def test_dismantlability():
    assert dismantlability_witness(cycle(3)) is None
    # semicomplete digraphs are cores
    assert dismantlability_witness(transitive_tournament(0, 2)) is None
    assert dismantlability_witness(build_structure("abc", [("a", "b"), ("c", "b")])) == ("a", "c")
    assert dismantlability_witness(build_structure("ab")) == ("a", "b")


def test_loop_warning():
    S = build_structure("a", [("a", "a")])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        dismantlability_witness(S)
    assert any("loops" in str(w.message) for w in caught)


def test_weak_components_order():
    U = disjoint_union(cycle(2), transitive_tournament(0, 2))
    assert weak_components(U) == [["1:0", "1:1"], ["2:0", "2:1", "2:2"]]
    assert weak_components(build_structure("xyz", [("z", "x")])) == [["x", "z"], ["y"]]


@given(digraphs(max_size=5), st.randoms(use_true_random=False))
def test_isomorphism_under_relabelling(S, rnd):
    names = [f"w{i}" for i in range(S.size)]
    rnd.shuffle(names)
    T = S.relabel(dict(zip(S.vertices, names)))
    iso = is_isomorphic(S, T)
    assert iso is not None
    assert {(iso[u], iso[v]) for u, v in S.edges} == T.edges
    assert canonical_form(S) == canonical_form(T.relabel({w: str(names.index(w)) for w in names}))


@given(digraphs(max_size=4))
def test_isomorphism_detects_edge_count_change(S):
    extra = [(u, v) for u in S.vertices for v in S.vertices if u != v and (u, v) not in S.edges]
    if extra:
        T = RelStruct(S.vertices, S.edges | {extra[0]})
        assert is_isomorphic(S, T) is None


def test_isomorphism_respects_marks():
    a = build_structure("xy", [("x", "y")], {"m": ["x"]})
    b = build_structure("xy", [("x", "y")], {"m": ["y"]})
    assert is_isomorphic(a, b) is None
    assert is_isomorphic(a, a) == {"x": "x", "y": "y"}


def test_marks_sorted_and_missing_mark_empty():
    S = build_structure("ab", [], {"z": ["a"], "b": ["b"]})
    assert list(S.marks) == ["b", "z"]
    assert S.mark("nothing") == frozenset()


@given(digraphs(max_size=4, marks=True))
def test_induced_keeps_marks_inside(S):
    keep = S.vertices[: max(1, S.size // 2)]
    T = S.induced(keep)
    assert set(T.vertices) == set(keep)
    assert all(set(m) <= set(keep) for m in T.marks.values())
    assert T.edges <= S.edges
