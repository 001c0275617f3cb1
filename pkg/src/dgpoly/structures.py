"""Finite digraphs with optional unary marks.

A :class:`RelStruct` carries one binary edge relation plus any number of named
unary relations ("marks").  Vertex identifiers are opaque strings and their
construction order is the canonical order used whenever ties must be broken.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property
from itertools import permutations
from typing import Iterable, Mapping, Optional, Sequence


class StructureError(ValueError):
    """Raised when a structure fails validation."""


@dataclass(frozen=True)
class RelStruct:
    vertices: tuple[str, ...]
    edges: frozenset[tuple[str, str]]
    marks: Mapping[str, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for v in self.vertices:
            if not isinstance(v, str):
                raise StructureError(f"vertex identifier {v!r} is not a string")
            if v in seen:
                raise StructureError(f"duplicate vertex {v}")
            seen.add(v)
        for u, v in self.edges:
            for w in (u, v):
                if w not in seen:
                    raise StructureError(f"unknown vertex {w}")
        for name, members in self.marks.items():
            for w in members:
                if w not in seen:
                    raise StructureError(f"unknown vertex {w} in mark {name}")
        # freeze the mark mapping with names in sorted order
        object.__setattr__(
            self, "marks", {k: frozenset(self.marks[k]) for k in sorted(self.marks)}
        )

    def __hash__(self):
        return hash((self.vertices, self.edges, tuple(self.marks.items())))

    @property
    def size(self) -> int:
        return len(self.vertices)

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def succ(self) -> dict[str, frozenset[str]]:
        out = {v: set() for v in self.vertices}
        for u, v in self.edges:
            out[u].add(v)
        return {v: frozenset(s) for v, s in out.items()}

    @cached_property
    def pred(self) -> dict[str, frozenset[str]]:
        inn = {v: set() for v in self.vertices}
        for u, v in self.edges:
            inn[v].add(u)
        return {v: frozenset(s) for v, s in inn.items()}

    @cached_property
    def has_loops(self) -> bool:
        return any(u == v for u, v in self.edges)

    def sorted_edges(self) -> list[tuple[str, str]]:
        idx = self.index
        return sorted(self.edges, key=lambda e: (idx[e[0]], idx[e[1]]))

    def sorted_vertices(self, vs: Iterable[str]) -> list[str]:
        idx = self.index
        return sorted(vs, key=idx.__getitem__)

    def mark(self, name: str) -> frozenset[str]:
        return self.marks.get(name, frozenset())

    def induced(self, keep: Iterable[str]) -> "RelStruct":
        """Induced substructure on ``keep`` (vertex order inherited)."""
        keep = set(keep)
        vs = tuple(v for v in self.vertices if v in keep)
        es = frozenset((u, v) for u, v in self.edges if u in keep and v in keep)
        ms = {k: m & keep for k, m in self.marks.items()}
        return RelStruct(vs, es, ms)

    def relabel(self, mapping: Mapping[str, str]) -> "RelStruct":
        vs = tuple(mapping[v] for v in self.vertices)
        es = frozenset((mapping[u], mapping[v]) for u, v in self.edges)
        ms = {k: frozenset(mapping[v] for v in m) for k, m in self.marks.items()}
        return RelStruct(vs, es, ms)

    def __repr__(self):
        return f"RelStruct(|V|={self.size}, |E|={len(self.edges)}, marks={sorted(self.marks)})"


@dataclass(frozen=True)
class VertexClassification:
    sources: frozenset[str]
    sinks: frozenset[str]
    total_sources: frozenset[str]
    total_sinks: frozenset[str]
    has_loop: bool


def build_structure(
    vertices: Sequence,
    edges: Iterable[tuple] = (),
    unary_marks: Optional[Mapping[str, Iterable]] = None,
) -> RelStruct:
    """Validate and build a structure; duplicate edges collapse.

    Non-string identifiers are converted with ``str`` so ``build_structure(range(3), ...)``
    works.
    """
    vs = tuple(str(v) for v in vertices)
    es = frozenset((str(u), str(v)) for u, v in edges)
    ms = {str(k): frozenset(str(v) for v in m) for k, m in (unary_marks or {}).items()}
    return RelStruct(vs, es, ms)


def _check_vertex(S: RelStruct, v) -> str:
    v = str(v)
    if v not in S.index:
        raise StructureError(f"unknown vertex {v}")
    return v


def neighborhoods(S: RelStruct, v) -> tuple[frozenset[str], frozenset[str]]:
    """Return ``(v+, v-)``: out- and in-neighbourhoods of ``v``."""
    v = _check_vertex(S, v)
    return S.succ[v], S.pred[v]


def classify_vertices(S: RelStruct) -> VertexClassification:
    n = S.size
    sources = frozenset(v for v in S.vertices if not S.pred[v])
    sinks = frozenset(v for v in S.vertices if not S.succ[v])
    tsrc = frozenset(
        v for v in S.vertices if len(S.succ[v]) == n - 1 and v not in S.succ[v]
    )
    tsnk = frozenset(
        v for v in S.vertices if len(S.pred[v]) == n - 1 and v not in S.pred[v]
    )
    return VertexClassification(sources, sinks, tsrc, tsnk, S.has_loops)


def warn_loops(S: RelStruct, what: str) -> None:
    if S.has_loops:
        warnings.warn(f"{what}: structure has loops; results assume loop-free digraphs",
                      stacklevel=3)


def dismantlability_witness(S: RelStruct) -> Optional[tuple[str, str]]:
    """Least pair ``(v, w)``, ``v != w``, with ``v+ <= w+`` and ``v- <= w-``.

    ``None`` means the digraph is nondismantlable.
    """
    warn_loops(S, "dismantlability_witness")
    for v in S.vertices:
        for w in S.vertices:
            if v != w and S.succ[v] <= S.succ[w] and S.pred[v] <= S.pred[w]:
                return v, w
    return None


def weak_components(S: RelStruct) -> list[list[str]]:
    """Weakly connected components, each in vertex order, ordered by first vertex."""
    parent = {v: v for v in S.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in S.edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            if S.index[ru] < S.index[rv]:
                parent[rv] = ru
            else:
                parent[ru] = rv
    blocks: dict[str, list[str]] = {}
    for v in S.vertices:
        blocks.setdefault(find(v), []).append(v)
    return list(blocks.values())


def _signature(S: RelStruct, v: str):
    return (
        len(S.succ[v]),
        len(S.pred[v]),
        v in S.succ[v],
        tuple(v in S.marks[k] for k in S.marks),
    )


def is_isomorphic(S: RelStruct, T: RelStruct) -> Optional[dict[str, str]]:
    """Find an edge- and mark-preserving bijection ``S -> T`` (both directions).

    Plain backtracking with degree/mark signature pruning; meant for small inputs.
    """
    if S.size != T.size or len(S.edges) != len(T.edges):
        return None
    if set(S.marks) != set(T.marks):
        # absent marks count as empty
        names = set(S.marks) | set(T.marks)
        if any(len(S.mark(k)) != len(T.mark(k)) for k in names):
            return None
        S = RelStruct(S.vertices, S.edges, {k: S.mark(k) for k in names})
        T = RelStruct(T.vertices, T.edges, {k: T.mark(k) for k in names})
    if any(len(S.marks[k]) != len(T.marks[k]) for k in S.marks):
        return None
    sig_s = {v: _signature(S, v) for v in S.vertices}
    sig_t = {v: _signature(T, v) for v in T.vertices}
    if sorted(sig_s.values()) != sorted(sig_t.values()):
        return None
    # most constrained vertices first
    order = sorted(S.vertices, key=lambda v: (sum(1 for w in S.vertices if sig_s[w] == sig_s[v]), S.index[v]))
    mapping: dict[str, str] = {}
    used: set[str] = set()

    def consistent(v, w):
        for u, x in mapping.items():
            if ((v, u) in S.edges) != ((w, x) in T.edges):
                return False
            if ((u, v) in S.edges) != ((x, w) in T.edges):
                return False
        return True

    def extend(i):
        if i == len(order):
            return True
        v = order[i]
        for w in T.vertices:
            if w in used or sig_t[w] != sig_s[v] or not consistent(v, w):
                continue
            mapping[v] = w
            used.add(w)
            if extend(i + 1):
                return True
            del mapping[v]
            used.discard(w)
        return False

    if extend(0):
        return {v: mapping[v] for v in S.vertices}
    return None


def canonical_form(S: RelStruct) -> tuple:
    """Brute-force canonical edge set over all vertex permutations (tiny inputs only)."""
    n = S.size
    best = None
    idx = S.index
    marks = [S.marks[k] for k in S.marks]
    for perm in permutations(range(n)):
        es = tuple(sorted((perm[idx[u]], perm[idx[v]]) for u, v in S.edges))
        ms = tuple(tuple(sorted(perm[idx[v]] for v in m)) for m in marks)
        key = (es, ms)
        if best is None or key < best:
            best = key
    return (n, tuple(S.marks), best)
