"""Digraph families and combinators with deterministic vertex naming.

Naming scheme:

* ``cycle(n)`` uses ``"0" .. "n-1"``; ``transitive_tournament(i, j)`` uses the
  integers ``i .. j`` as strings.
* ``interval_extension`` names the vertices below the blown-up point
  ``"m1", "m2", ...`` (``m1`` adjacent to the inner digraph) and those above it
  ``"p1", "p2", ...``; inner vertices get the prefix ``"v:"``.
* ``extend_top`` / ``extend_bottom`` add the first unused name among
  ``top1, top2, ...`` / ``bot1, bot2, ...``.
* unions prefix the two sides with ``"1:"`` and ``"2:"``; products name the
  pair ``(g, h)`` as ``"(g;h)"``.
"""

from __future__ import annotations

from itertools import count

from .structures import RelStruct

TOP = "top"
BOTTOM = "bot"


def cycle(n: int) -> RelStruct:
    if n < 1:
        raise ValueError(f"cycle length must be positive, got {n}")
    vs = tuple(str(i) for i in range(n))
    if n == 1:
        return RelStruct(vs, frozenset())
    return RelStruct(vs, frozenset((str(i), str((i + 1) % n)) for i in range(n)))


def transitive_tournament(i: int, j: int) -> RelStruct:
    if i > j:
        raise ValueError(f"empty interval [{i},{j}]")
    vs = tuple(str(k) for k in range(i, j + 1))
    es = frozenset((str(k), str(l)) for k in range(i, j + 1) for l in range(k + 1, j + 1))
    return RelStruct(vs, es)


def single_vertex() -> RelStruct:
    return cycle(1)


def fresh_name(G: RelStruct, stem: str) -> str:
    for k in count(1):
        name = f"{stem}{k}"
        if name not in G.index:
            return name
    raise AssertionError("unreachable")


def extend_top(G: RelStruct) -> RelStruct:
    """Add a total sink."""
    t = fresh_name(G, TOP)
    return RelStruct(G.vertices + (t,), G.edges | {(v, t) for v in G.vertices}, G.marks)


def extend_bottom(G: RelStruct) -> RelStruct:
    """Add a total source."""
    b = fresh_name(G, BOTTOM)
    return RelStruct(G.vertices + (b,), G.edges | {(b, v) for v in G.vertices}, G.marks)


def extend_bottom_top(G: RelStruct) -> RelStruct:
    """The two-sided extension, built as ``extend_top(extend_bottom(G))``."""
    return extend_top(extend_bottom(G))


def interval_extension(G: RelStruct, i: int, j: int) -> RelStruct:
    """Blow up the 0 vertex of the tournament ``[i, j]`` into ``G``."""
    if i > 0 or j < 0:
        raise ValueError(f"need i <= 0 <= j, got [{i},{j}]")
    if i == 0 and j == 0:
        return G
    inner = {v: "v:" + v for v in G.vertices}
    below = [f"m{k}" for k in range(-i, 0, -1)]  # m|i| .. m1, in increasing tournament order
    above = [f"p{k}" for k in range(1, j + 1)]
    order = below + ["*"] + above
    vs = tuple(below) + tuple(inner[v] for v in G.vertices) + tuple(above)
    es = set((inner[u], inner[v]) for u, v in G.edges)
    for a in range(len(order)):
        for b in range(a + 1, len(order)):
            x, y = order[a], order[b]
            if x == "*":
                es.update((inner[v], y) for v in G.vertices)
            elif y == "*":
                es.update((x, inner[v]) for v in G.vertices)
            else:
                es.add((x, y))
    marks = {k: frozenset(inner[v] for v in m) for k, m in G.marks.items()}
    return RelStruct(vs, frozenset(es), marks)


def _side(G: RelStruct, prefix: str):
    ren = {v: prefix + v for v in G.vertices}
    return G.relabel(ren)


def disjoint_union(G: RelStruct, H: RelStruct) -> RelStruct:
    A, B = _side(G, "1:"), _side(H, "2:")
    marks = {}
    for name in set(A.marks) | set(B.marks):
        marks[name] = A.mark(name) | B.mark(name)
    return RelStruct(A.vertices + B.vertices, A.edges | B.edges, marks)


def _union_mark_names(G: RelStruct, H: RelStruct) -> tuple[str, str]:
    taken = set(G.marks) | set(H.marks)
    if "uA" not in taken and "uB" not in taken:
        return "uA", "uB"
    for k in count(2):
        a, b = f"uA{k}", f"uB{k}"
        if a not in taken and b not in taken:
            return a, b
    raise AssertionError("unreachable")


def structured_union(G: RelStruct, H: RelStruct) -> RelStruct:
    """Disjoint union plus unary marks naming each side."""
    na, nb = _union_mark_names(G, H)
    U = disjoint_union(G, H)
    marks = dict(U.marks)
    marks[na] = frozenset("1:" + v for v in G.vertices)
    marks[nb] = frozenset("2:" + v for v in H.vertices)
    return RelStruct(U.vertices, U.edges, marks)


def pair_name(g: str, h: str) -> str:
    return f"({g};{h})"


def direct_product(G: RelStruct, H: RelStruct) -> RelStruct:
    vs = tuple(pair_name(g, h) for g in G.vertices for h in H.vertices)
    es = frozenset(
        (pair_name(g, h), pair_name(g2, h2))
        for g, g2 in G.edges
        for h, h2 in H.edges
    )
    marks = {
        k: frozenset(pair_name(g, h) for g in G.marks[k] for h in H.marks[k])
        for k in set(G.marks) & set(H.marks)
    }
    return RelStruct(vs, es, marks)


def digraphs_up_to_isomorphism(n: int, loops: bool = False):
    """One representative per isomorphism class of digraphs on ``"0" .. "n-1"``.

    Brute force over edge bitmasks and vertex permutations; fine for n <= 4.
    """
    from itertools import permutations

    pairs = [(u, v) for u in range(n) for v in range(n) if loops or u != v]
    pos = {p: k for k, p in enumerate(pairs)}
    perms = [
        [pos[(pi[u], pi[v])] for u, v in pairs]
        for pi in permutations(range(n))
    ]
    vs = tuple(str(i) for i in range(n))
    for mask in range(1 << len(pairs)):
        bits = [k for k in range(len(pairs)) if mask >> k & 1]
        if all(sum(1 << perm[k] for k in bits) >= mask for perm in perms):
            yield RelStruct(vs, frozenset((vs[pairs[k][0]], vs[pairs[k][1]]) for k in bits))
