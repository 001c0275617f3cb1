"""Homomorphism search, enumeration and core computation.

Everything bottoms out in :class:`BinaryCsp`: variables with bitmask domains
over a fixed value set, and binary constraints given by relations on that set.
Solving is arc consistency (AC-3 over variables, queue in FIFO order) followed
by backtracking that maintains arc consistency.  The branching variable is the
one with the smallest domain (ties by variable index) and values are tried in
increasing order, so every run returns the same solutions in the same order.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, Mapping, Optional

from .structures import RelStruct, warn_loops

_TABLE_LIMIT = 14  # precompute image tables up to 2**14 masks


class Relation:
    """A binary relation on ``range(nvals)`` with cached image tables."""

    def __init__(self, nvals: int, pairs):
        self.nvals = nvals
        fwd = [0] * nvals
        bwd = [0] * nvals
        for a, b in pairs:
            fwd[a] |= 1 << b
            bwd[b] |= 1 << a
        self.fwd_rows = fwd
        self.bwd_rows = bwd
        self.diagonal = sum(1 << a for a in range(nvals) if fwd[a] >> a & 1)
        self._fwd = self._bwd = None

    @staticmethod
    def _image_table(rows, n):
        if n > _TABLE_LIMIT:
            return _LazyImage(rows)
        table = [0] * (1 << n)
        for m in range(1, 1 << n):
            low = m & -m
            table[m] = table[m ^ low] | rows[low.bit_length() - 1]
        return table

    @property
    def fwd(self):
        """``fwd[mask]`` = values reachable from some value in ``mask``."""
        if self._fwd is None:
            self._fwd = self._image_table(self.fwd_rows, self.nvals)
        return self._fwd

    @property
    def bwd(self):
        if self._bwd is None:
            self._bwd = self._image_table(self.bwd_rows, self.nvals)
        return self._bwd


class _LazyImage(dict):
    def __init__(self, rows):
        super().__init__()
        self.rows = rows

    def __missing__(self, mask):
        out, m = 0, mask
        while m:
            low = m & -m
            out |= self.rows[low.bit_length() - 1]
            m ^= low
        self[mask] = out
        return out


class BinaryCsp:
    """Binary CSP over values ``0..nvals-1`` with bitmask domains."""

    def __init__(self, nvals: int, domains: list[int]):
        self.nvals = nvals
        self.full = (1 << nvals) - 1
        self.domains = list(domains)
        self.watch: list[list] = [[] for _ in domains]
        self.nodes = 0
        self.failed = any(d == 0 for d in self.domains)

    @property
    def nvars(self) -> int:
        return len(self.domains)

    def restrict(self, var: int, mask: int) -> None:
        self.domains[var] &= mask
        if not self.domains[var]:
            self.failed = True

    def add(self, x: int, y: int, rel: Relation) -> None:
        """Require ``(value[x], value[y])`` to lie in ``rel``."""
        if x == y:
            self.restrict(x, rel.diagonal)
            return
        self.watch[x].append((y, rel.fwd))
        self.watch[y].append((x, rel.bwd))

    def _propagate(self, dom: list[int], changed) -> bool:
        queue = deque(changed)
        inq = bytearray(len(dom))
        for v in changed:
            inq[v] = 1
        watch = self.watch
        while queue:
            x = queue.popleft()
            inq[x] = 0
            dx = dom[x]
            for y, tab in watch[x]:
                dy = dom[y]
                ny = dy & tab[dx]
                if ny != dy:
                    if not ny:
                        return False
                    dom[y] = ny
                    if not inq[y]:
                        inq[y] = 1
                        queue.append(y)
        return True

    @staticmethod
    def _choose(dom: list[int]) -> int:
        best, best_size = -1, 1 << 30
        for i, d in enumerate(dom):
            if d & (d - 1):
                c = d.bit_count()
                if c < best_size:
                    best, best_size = i, c
                    if c == 2:
                        break
        return best

    def propagated_domains(self) -> Optional[list[int]]:
        if self.failed:
            return None
        dom = list(self.domains)
        return dom if self._propagate(dom, range(len(dom))) else None

    def iter_solutions(self) -> Iterator[list[int]]:
        """Yield solutions as lists of value indices, in search order."""
        root = self.propagated_domains()
        if root is None:
            return
        stack: list[list] = []
        node = root
        while True:
            v = self._choose(node)
            if v < 0:
                yield [d.bit_length() - 1 for d in node]
            else:
                stack.append([node, v, node[v]])
            node = None
            while stack:
                top = stack[-1]
                rem = top[2]
                if not rem:
                    stack.pop()
                    continue
                low = rem & -rem
                top[2] = rem ^ low
                child = top[0][:]
                child[top[1]] = low
                self.nodes += 1
                if self._propagate(child, (top[1],)):
                    node = child
                    break
            if node is None:
                return

    def solve(self) -> Optional[list[int]]:
        return next(self.iter_solutions(), None)


# -- homomorphisms -------------------------------------------------------------

@dataclass
class CspProblem:
    """Homomorphism-style CSP: every binary constraint must land on a template edge."""

    variables: tuple
    domains: dict = field(default_factory=dict)
    binary_constraints: frozenset = frozenset()
    fixed: dict = field(default_factory=dict)


def homomorphism_problem(instance: RelStruct, template: RelStruct) -> Optional[CspProblem]:
    """Translate ``instance -> template`` into a :class:`CspProblem`.

    Returns ``None`` when some instance mark is nonempty but absent from the template.
    """
    full = frozenset(template.vertices)
    domains = {v: full for v in instance.vertices}
    for name, members in instance.marks.items():
        if not members:
            continue
        if name not in template.marks:
            return None
        allowed = template.marks[name]
        for v in members:
            domains[v] = domains[v] & allowed
    return CspProblem(instance.vertices, domains, instance.edges, {})


def _edge_relation(template: RelStruct) -> Relation:
    idx = template.index
    return Relation(template.size, ((idx[u], idx[v]) for u, v in template.edges))


def compile_problem(problem: CspProblem, template: RelStruct) -> BinaryCsp:
    idx = template.index
    var_index = {v: i for i, v in enumerate(problem.variables)}
    doms = []
    for v in problem.variables:
        d = problem.domains.get(v)
        mask = (1 << template.size) - 1 if d is None else sum(1 << idx[a] for a in d)
        if v in problem.fixed:
            mask &= 1 << idx[problem.fixed[v]]
        doms.append(mask)
    csp = BinaryCsp(template.size, doms)
    rel = _edge_relation(template)
    order = sorted(problem.binary_constraints, key=lambda e: (var_index[e[0]], var_index[e[1]]))
    for u, v in order:
        csp.add(var_index[u], var_index[v], rel)
    return csp


def solve_csp(problem: CspProblem, template: RelStruct, limit: int = 1) -> list[dict]:
    csp = compile_problem(problem, template)
    out = []
    for sol in csp.iter_solutions():
        out.append({v: template.vertices[sol[i]] for i, v in enumerate(problem.variables)})
        if len(out) >= limit:
            break
    return out


def enumerate_homomorphisms(instance: RelStruct, template: RelStruct, limit: int) -> list[dict]:
    if limit < 1:
        raise ValueError("limit must be positive")
    problem = homomorphism_problem(instance, template)
    if problem is None:
        return []
    return solve_csp(problem, template, limit)


def find_homomorphism(instance: RelStruct, template: RelStruct) -> Optional[dict]:
    found = enumerate_homomorphisms(instance, template, 1)
    return found[0] if found else None


def is_homomorphism(mapping: Mapping[str, str], instance: RelStruct, template: RelStruct) -> bool:
    if set(mapping) != set(instance.vertices):
        return False
    if any((mapping[u], mapping[v]) not in template.edges for u, v in instance.edges):
        return False
    for name, members in instance.marks.items():
        if any(mapping[v] not in template.mark(name) for v in members):
            return False
    return True


# -- cores ---------------------------------------------------------------------

def _retraction_onto(S: RelStruct, keep: tuple[str, ...]) -> Optional[dict]:
    keep_set = frozenset(keep)
    problem = homomorphism_problem(S, S)
    for v in S.vertices:
        problem.domains[v] = problem.domains[v] & keep_set
    problem.fixed = {v: v for v in keep}
    found = solve_csp(problem, S, 1)
    return found[0] if found else None


def _core_size(S: RelStruct) -> int:
    current = S
    while True:
        shrunk = None
        for v in current.vertices:
            problem = homomorphism_problem(current, current)
            others = frozenset(current.vertices) - {v}
            for w in current.vertices:
                problem.domains[w] = problem.domains[w] & others
            found = solve_csp(problem, current, 1)
            if found:
                shrunk = current.induced(set(found[0].values()))
                break
        if shrunk is None:
            return current.size
        current = shrunk


def core_of(S: RelStruct) -> tuple[RelStruct, dict]:
    """Core retract of ``S`` and a retraction onto it.

    Among the retracts of minimum size, the one whose vertex set comes first in
    lexicographic order (by vertex position) is returned.
    """
    warn_loops(S, "core_of")
    if S.size == 0:
        return S, {}
    k = _core_size(S)
    for keep in combinations(S.vertices, k):
        r = _retraction_onto(S, keep)
        if r is not None:
            return S.induced(keep), r
    raise AssertionError("no retract of the computed core size")
