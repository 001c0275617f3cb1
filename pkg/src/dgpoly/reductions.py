"""Instance transforms for one-point extensions and membership tests for unions/products."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .constructions import extend_top, pair_name
from .homsolver import find_homomorphism
from .structures import RelStruct, weak_components


def strip_sinks(H: RelStruct, iterate: int = 1) -> RelStruct:
    """Drop the sinks of ``H`` (``iterate`` times), so ``H -> G^top`` iff result ``-> G``."""
    if iterate < 1:
        raise ValueError("iterate must be at least 1")
    for _ in range(iterate):
        H = H.induced(v for v in H.vertices if H.succ[v])
    return H


def add_top_instance(H: RelStruct, pair_encoding: bool = False) -> RelStruct:
    """Instance with ``H -> G`` iff result ``-> G^top``.

    By default this is ``extend_top(H)``.  With ``pair_encoding`` the vertices are
    the pairs ``(v;v)`` plus ``(a;b)`` for the first and last vertex ``a != b``, an
    isomorphic copy written the way a first-order interpretation builds it.
    """
    if not pair_encoding or H.size < 2:
        return extend_top(H)
    a, b = H.vertices[0], H.vertices[-1]
    diag = {v: pair_name(v, v) for v in H.vertices}
    apex = pair_name(a, b)
    es = {(diag[u], diag[v]) for u, v in H.edges} | {(diag[v], apex) for v in H.vertices}
    marks = {k: frozenset(diag[v] for v in m) for k, m in H.marks.items()}
    return RelStruct(tuple(diag.values()) + (apex,), frozenset(es), marks)


@dataclass
class ComponentVerdict:
    vertices: list[str]
    side: Optional[str]       # "G", "H", or None when rejected
    reason: str


@dataclass
class Membership:
    accept: bool
    components: list[ComponentVerdict] = field(default_factory=list)

    def explain(self) -> str:
        lines = [("accept" if self.accept else "reject")]
        for c in self.components:
            lines.append(f"  {{{', '.join(c.vertices)}}}: {c.side or '-'} ({c.reason})")
        return "\n".join(lines)


def _unmarked(S: RelStruct, names) -> RelStruct:
    return RelStruct(S.vertices, S.edges, {k: m for k, m in S.marks.items() if k not in names})


def union_membership(K: RelStruct, G: RelStruct, H: RelStruct, structured: bool = False,
                     side_marks: tuple[str, str] = ("uA", "uB")) -> Membership:
    """Decide ``K -> G + H`` (disjoint or structured union) component by component."""
    ma, mb = side_marks
    if structured:
        extra = sorted(k for k, m in K.marks.items() if m and k not in side_marks)
        if extra:
            raise ValueError(f"structured union instance carries marks other than {ma}/{mb}: {extra}")
    verdicts = []
    accept = True
    for block in weak_components(K):
        C = K.induced(block)
        if structured:
            in_a, in_b = bool(C.mark(ma)), bool(C.mark(mb))
            C = _unmarked(C, side_marks)
        else:
            in_a = in_b = False
        if in_a and in_b:
            verdicts.append(ComponentVerdict(block, None, f"has both {ma} and {mb} vertices"))
            accept = False
            continue
        options = ["G"] if in_a else ["H"] if in_b else ["G", "H"]
        side = next((s for s in options if find_homomorphism(C, G if s == "G" else H) is not None), None)
        if side is None:
            accept = False
            verdicts.append(ComponentVerdict(block, None, "maps to neither allowed side"
                                             if len(options) == 2 else f"does not map to {options[0]}"))
        else:
            verdicts.append(ComponentVerdict(block, side, f"maps to {side}"))
    return Membership(accept, verdicts)


def product_membership(K: RelStruct, G: RelStruct, H: RelStruct) -> Membership:
    """``K -> G x H`` iff ``K -> G`` and ``K -> H``."""
    to_g = find_homomorphism(K, G) is not None
    to_h = find_homomorphism(K, H) is not None
    verdicts = [ComponentVerdict(list(K.vertices), "G" if to_g else None, f"K -> G: {to_g}"),
                ComponentVerdict(list(K.vertices), "H" if to_h else None, f"K -> H: {to_h}")]
    return Membership(to_g and to_h, verdicts)
