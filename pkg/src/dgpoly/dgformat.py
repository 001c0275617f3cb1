"""Reader and writer for the line-oriented ``.dg`` digraph format.

Grammar (``#`` starts a comment that runs to end of line; blank lines ignored;
whitespace around tokens is insignificant)::

    file      := line*
    line      := "vertices" ":" token*
               | "edges" ":" [ pair ("," pair)* ]
               | "unary" NAME ":" token*
    pair      := token token
    token     := one or more characters other than whitespace, "," and "#"
    NAME      := token without ":"

``vertices`` and ``edges`` lines may repeat; their contents accumulate in order.
Every vertex must be declared on a ``vertices`` line before the file ends.
The writer emits exactly one ``vertices`` line, one ``edges`` line (edges in
vertex order) and one ``unary`` line per mark in name order.
"""

from __future__ import annotations

import re
from pathlib import Path

from .structures import RelStruct, StructureError, build_structure

_UNARY = re.compile(r"^unary\s+([^\s:,#]+)\s*:(.*)$")


class DgParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _tokens(text: str, lineno: int) -> list[str]:
    if "," in text:
        raise DgParseError("unexpected ','", lineno)
    return text.split()


def parse_dg(text: str) -> RelStruct:
    vertices: list[str] = []
    edges: list[tuple[str, str]] = []
    marks: dict[str, list[str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, rest = line.partition(":")
        head = head.strip()
        if head == "vertices" and sep:
            vertices.extend(_tokens(rest, lineno))
        elif head == "edges" and sep:
            rest = rest.strip()
            if not rest:
                continue
            for chunk in rest.split(","):
                pair = chunk.split()
                if len(pair) != 2:
                    raise DgParseError(f"edge must have two endpoints, got {chunk.strip()!r}", lineno)
                edges.append((pair[0], pair[1]))
        else:
            m = _UNARY.match(line)
            if not m:
                raise DgParseError(f"unrecognised line {line!r}", lineno)
            marks.setdefault(m.group(1), []).extend(_tokens(m.group(2), lineno))
    try:
        return build_structure(vertices, edges, marks)
    except StructureError as exc:
        raise DgParseError(str(exc), 0) from exc


def format_dg(S: RelStruct) -> str:
    lines = ["vertices: " + " ".join(S.vertices)]
    lines.append("edges: " + ", ".join(f"{u} {v}" for u, v in S.sorted_edges()))
    for name in S.marks:
        lines.append(f"unary {name}: " + " ".join(S.sorted_vertices(S.marks[name])))
    return "\n".join(line.rstrip() for line in lines) + "\n"


def read_dg(path) -> RelStruct:
    return parse_dg(Path(path).read_text())


def write_dg(S: RelStruct, path) -> None:
    Path(path).write_text(format_dg(S))
