"""Command-line front end.

Exit codes: 0 ran to completion, 1 usage, parse or I/O error, 2 internal
invariant violation (a solver witness failed verification), 3 the acceptance
suite ran but some criterion failed.  Analysis verdicts never affect the code.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path
from typing import Optional

from . import constructions as C
from .acceptance import run_criteria
from .dgformat import DgParseError, format_dg, read_dg, write_dg
from .homsolver import core_of, enumerate_homomorphisms
from .identities import ConditionError
from .polyconstruct import witness_text
from .polysolver import InvariantViolation, PolymorphismError, analyze, check_condition
from .reductions import add_top_instance, product_membership, strip_sinks, union_membership
from .structures import StructureError

EXIT_OK, EXIT_USAGE, EXIT_INTERNAL, EXIT_SUITE_FAILED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class ExpressionError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"at position {pos}: {message}")
        self.pos = pos


# -- construction expressions --------------------------------------------------

_INT = re.compile(r"-?\d+")
_WORD = re.compile(r"[a-z]+")


class _ExprParser:
    """``cycle:N | tt:I:J | ext:I:J(e) | top(e) | bot(e) | du(e,e) | su(e,e) | prod(e,e)``"""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _expect(self, ch: str):
        self._skip()
        if not self.text.startswith(ch, self.pos):
            found = self.text[self.pos] if self.pos < len(self.text) else "end of input"
            raise ExpressionError(f"expected {ch!r}, found {found!r}", self.pos)
        self.pos += 1

    def _int(self) -> int:
        self._skip()
        m = _INT.match(self.text, self.pos)
        if not m:
            raise ExpressionError("expected an integer", self.pos)
        self.pos = m.end()
        return int(m.group())

    def parse(self):
        S = self.expr()
        self._skip()
        if self.pos != len(self.text):
            raise ExpressionError(f"unexpected {self.text[self.pos]!r}", self.pos)
        return S

    def expr(self):
        self._skip()
        start = self.pos
        m = _WORD.match(self.text, self.pos)
        if not m:
            raise ExpressionError("expected a construction name", self.pos)
        word = m.group()
        self.pos = m.end()
        try:
            if word == "cycle":
                self._expect(":")
                return C.cycle(self._int())
            if word == "tt":
                self._expect(":")
                i = self._int()
                self._expect(":")
                return C.transitive_tournament(i, self._int())
            if word == "ext":
                self._expect(":")
                i = self._int()
                self._expect(":")
                j = self._int()
                self._expect("(")
                inner = self.expr()
                self._expect(")")
                return C.interval_extension(inner, i, j)
            if word in ("top", "bot"):
                self._expect("(")
                inner = self.expr()
                self._expect(")")
                return C.extend_top(inner) if word == "top" else C.extend_bottom(inner)
            if word in ("du", "su", "prod"):
                self._expect("(")
                a = self.expr()
                self._expect(",")
                b = self.expr()
                self._expect(")")
                fn = {"du": C.disjoint_union, "su": C.structured_union, "prod": C.direct_product}[word]
                return fn(a, b)
        except ExpressionError:
            raise
        except ValueError as exc:
            raise ExpressionError(str(exc), start) from None
        raise ExpressionError(f"unknown construction {word!r}", start)


def parse_expression(text: str):
    return _ExprParser(text).parse()


# -- helpers -------------------------------------------------------------------

def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load(path: str):
    try:
        return read_dg(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except DgParseError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", text)


# -- subcommands ---------------------------------------------------------------

def cmd_construct(args):
    try:
        S = parse_expression(args.expression)
    except ExpressionError as exc:
        raise UsageError(f"bad expression {args.expression!r}: {exc}") from None
    if args.output:
        write_dg(S, args.output)
    else:
        sys.stdout.write(format_dg(S))
    print(f"vertices: {S.size} edges: {len(S.edges)}", file=sys.stderr if not args.output else sys.stdout)
    return EXIT_OK


_SEARCH_HEADS = ("perm", "cd", "cm")


def _with_bound(cond: str, bound: Optional[int]) -> str:
    if bound is None:
        return cond
    parts = cond.split(":")
    if parts[0] in _SEARCH_HEADS and len(parts) == 1:
        return f"{cond}:{bound}"
    if parts[0] == "min" and len(parts) == 2:
        return f"{cond}:{bound}"
    return cond


def report_json(report, witness_paths: dict, timing: bool = True) -> dict:
    rows = []
    for r in report.results:
        row = {"id": r.condition, "verdict": r.verdict}
        if r.parameter is not None:
            row["parameter"] = r.parameter
        if r.bound is not None:
            row["bound"] = r.bound
        if r.note:
            row["note"] = r.note
        if r.condition in witness_paths:
            row["witness_path"] = witness_paths[r.condition]
        row["run"] = r.run_id
        if timing:
            row["millis"] = round(r.millis, 3)
        rows.append(row)
    S = report.template
    return {"template": {"vertices": S.size, "edges": len(S.edges)}, "criteria": rows}


def cmd_analyze(args):
    S = _load(args.file)
    if args.bound is not None and args.bound < 1:
        raise UsageError("--bound must be at least 1")
    conds = [c.strip() for c in args.props.split(",") if c.strip()]
    if not conds:
        raise UsageError("--props is empty")
    conds = [_with_bound(c, args.bound) for c in conds]
    for c in conds:
        check_condition(c, S, verbatim_gumm=args.verbatim_gumm)
    try:
        report = analyze(S, conds, verbatim_gumm=args.verbatim_gumm)
    except PolymorphismError as exc:
        raise UsageError(str(exc)) from None
    paths = {}
    if args.witness_dir:
        d = Path(args.witness_dir)
        d.mkdir(parents=True, exist_ok=True)
        for r in report.results:
            if r.witness is not None:
                p = d / f"{_slug(r.condition)}.json"
                p.write_text(witness_text(r.witness))
                paths[r.condition] = str(p)
    if args.figure:
        from .plotting import draw_report
        draw_report(report, args.figure)
    if args.json:
        _emit(_dump(report_json(report, paths, timing=not args.no_timing)), args.output)
    else:
        lines = []
        for r in report.results:
            param = "" if r.parameter is None else f" n={r.parameter}"
            bound = "" if r.bound is None else f" bound={r.bound}"
            note = f"  # {r.note}" if r.note else ""
            lines.append(f"{r.condition}: {r.verdict}{param}{bound}{note}")
        _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_hom(args):
    K, G = _load(args.instance), _load(args.template)
    limit = args.limit if args.all else 1
    if limit < 1:
        raise UsageError("--limit must be positive")
    found = enumerate_homomorphisms(K, G, limit)
    if args.all:
        _emit(_dump(found), args.output)
    else:
        _emit(_dump(found[0] if found else None), args.output)
    return EXIT_OK


def cmd_core(args):
    S = _load(args.file)
    core, r = core_of(S)
    if args.output:
        write_dg(core, args.output)
    sys.stdout.write(_dump({"core": list(core.vertices), "retraction": r}))
    return EXIT_OK


def _write_or_print(S, out):
    if out:
        write_dg(S, out)
    else:
        sys.stdout.write(format_dg(S))


def cmd_reduce(args):
    if args.action == "strip-sinks":
        if args.iterate < 1:
            raise UsageError("--iterate must be at least 1")
        _write_or_print(strip_sinks(_load(args.input), args.iterate), args.output)
    elif args.action == "add-top":
        _write_or_print(add_top_instance(_load(args.input), pair_encoding=args.pair_encoding), args.output)
    else:
        K, G, H = _load(args.instance), _load(args.left), _load(args.right)
        try:
            if args.action == "union-check":
                res = union_membership(K, G, H, structured=args.structured)
            else:
                res = product_membership(K, G, H)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        print(res.explain())
    return EXIT_OK


def cmd_suite(args):
    results = run_criteria(args.filter)
    if not results:
        raise UsageError(f"no criteria match {args.filter!r}")
    if args.figure:
        from .plotting import draw_suite
        draw_suite(results, args.figure)
    if args.json:
        rows = []
        for r in results:
            row = {"id": r.id, "verdict": "pass" if r.passed else "fail", "name": r.name, "detail": r.detail}
            if r.parameter is not None and isinstance(r.parameter, (int, str)):
                row["parameter"] = r.parameter
            if not args.no_timing:
                row["millis"] = round(r.millis, 3)
            rows.append(row)
        _emit(_dump({"criteria": rows}), args.output)
    else:
        lines = []
        for r in results:
            timing = "" if args.no_timing else f"  {r.millis:9.1f} ms"
            lines.append(f"{r.id:>3}  {'PASS' if r.passed else 'FAIL'}  {r.name:<34}{timing}  {r.detail}")
        passed = sum(r.passed for r in results)
        lines.append(f"{passed}/{len(results)} criteria passed")
        _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK if all(r.passed for r in results) else EXIT_SUITE_FAILED


# -- argument parsing ----------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dgpoly", description="Polymorphism conditions on finite digraphs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("construct", help="build a digraph from an expression")
    c.add_argument("expression", help="e.g. 'ext:0:2(cycle:3)' or 'prod(cycle:2,cycle:3)'")
    c.add_argument("-o", "--output", help=".dg file to write (default: stdout)")
    c.set_defaults(func=cmd_construct)

    a = sub.add_parser("analyze", help="test polymorphism conditions on a .dg file")
    a.add_argument("file")
    a.add_argument("--props", required=True,
                   help="comma-separated conditions: maltsev, nu:K, weaknu:K, sdmeet, hm:N, "
                        "jonsson:N, gumm:N, hobmck:N, tsi:K, 2sl, perm[:B], cd[:B], cm[:B], min:FAMILY[:B]")
    a.add_argument("--bound", type=int, help="bound for searches given without one (default 2|V|+2)")
    a.add_argument("--json", action="store_true", help="emit the JSON report")
    a.add_argument("--no-timing", action="store_true", help="omit timings (byte-stable output)")
    a.add_argument("--witness-dir", help="write witness tables as JSON into this directory")
    a.add_argument("--figure", help="render the digraph and verdicts to this image file")
    a.add_argument("--verbatim-gumm", action="store_true",
                   help="use (x,y,y) for every Gumm link instead of the alternating form")
    a.add_argument("-o", "--output")
    a.set_defaults(func=cmd_analyze)

    h = sub.add_parser("hom", help="find homomorphisms instance -> template")
    h.add_argument("instance")
    h.add_argument("template")
    h.add_argument("--all", action="store_true", help="list solutions up to --limit")
    h.add_argument("--limit", type=int, default=100)
    h.add_argument("-o", "--output")
    h.set_defaults(func=cmd_hom)

    k = sub.add_parser("core", help="core retract of a digraph")
    k.add_argument("file")
    k.add_argument("-o", "--output", help=".dg file for the core")
    k.set_defaults(func=cmd_core)

    r = sub.add_parser("reduce", help="instance reductions and membership checks")
    rs = r.add_subparsers(dest="action", required=True, parser_class=_Parser)
    s1 = rs.add_parser("strip-sinks")
    s1.add_argument("input")
    s1.add_argument("--iterate", type=int, default=1)
    s1.add_argument("-o", "--output")
    s2 = rs.add_parser("add-top")
    s2.add_argument("input")
    s2.add_argument("--pair-encoding", action="store_true")
    s2.add_argument("-o", "--output")
    for name in ("union-check", "product-check"):
        s = rs.add_parser(name)
        s.add_argument("instance")
        s.add_argument("left")
        s.add_argument("right")
        if name == "union-check":
            s.add_argument("--structured", action="store_true")
    r.set_defaults(func=cmd_reduce)

    s = sub.add_parser("suite", help="run the acceptance criteria")
    s.add_argument("name", choices=["paper"])
    s.add_argument("--filter", help="criterion number, name fragment or tag (e.g. perm)")
    s.add_argument("--json", action="store_true")
    s.add_argument("--no-timing", action="store_true")
    s.add_argument("--figure", help="render per-criterion timings to this image file")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_suite)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"dgpoly: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConditionError, StructureError, DgParseError) as exc:
        print(f"dgpoly: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"dgpoly: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvariantViolation, AssertionError) as exc:
        print(f"dgpoly: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
