import json

import pytest

import dgpoly.polysolver as polysolver
from dgpoly.cli import main, parse_expression, ExpressionError
from dgpoly.constructions import cycle, direct_product
from dgpoly.dgformat import read_dg
from dgpoly.polyconstruct import tables_from_json, verify
from dgpoly.identities import maltsev
from dgpoly.structures import is_isomorphic


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path, capsys):
    paths = {}
    for name, expr in (("c3", "cycle:3"), ("c4", "cycle:4"), ("t3", "tt:0:2"), ("c2", "cycle:2"), ("c6", "cycle:6")):
        p = tmp_path / f"{name}.dg"
        assert run(capsys, "construct", expr, "-o", str(p))[0] == 0
        paths[name] = str(p)
    return paths


@pytest.mark.parametrize("expr, nv, ne", [
    ("ext:0:2(cycle:3)", 5, 10),
    ("ext:0:1(cycle:3)", 4, 6),
    ("tt:0:3", 4, 6),
    ("prod(cycle:2,cycle:3)", 6, 6),
    ("du(cycle:2, cycle:3)", 5, 5),
    ("su(cycle:2,cycle:3)", 5, 5),
    ("top(bot(cycle:3))", 5, 10),
    ("ext:-1:1(cycle:3)", 5, 10),
])
def test_construct_counts(capsys, tmp_path, expr, nv, ne):
    out_path = tmp_path / "g.dg"
    code, out, _ = run(capsys, "construct", expr, "-o", str(out_path))
    assert code == 0
    assert out.strip() == f"vertices: {nv} edges: {ne}"
    S = read_dg(str(out_path))
    assert (S.size, len(S.edges)) == (nv, ne)


def test_construct_to_stdout_keeps_counts_off_stdout(capsys):
    code, out, err = run(capsys, "construct", "cycle:3")
    assert code == 0 and out.startswith("vertices: 0 1 2")
    assert "vertices: 3 edges: 3" in err


def test_product_is_six_cycle():
    assert is_isomorphic(parse_expression("prod(cycle:2,cycle:3)"), cycle(6)) is not None
    assert parse_expression("prod(cycle:2,cycle:3)") == direct_product(cycle(2), cycle(3))


@pytest.mark.parametrize("expr, pos", [("cycle:3(", 7), ("cycle:x", 6), ("foo", 0), ("du(cycle:2)", 10), ("", 0)])
def test_parse_error_positions(capsys, expr, pos):
    with pytest.raises(ExpressionError) as info:
        parse_expression(expr)
    assert info.value.pos == pos
    code, _, err = run(capsys, "construct", expr)
    assert code == 1 and f"position {pos}" in err


def test_analyze_examples(capsys, files):
    code, out, _ = run(capsys, "analyze", files["c3"], "--props", "maltsev,nu:3,2sl")
    assert code == 0
    assert out.splitlines() == ["maltsev: holds", "nu:3: holds", "2sl: holds"]
    code, out, _ = run(capsys, "analyze", files["t3"], "--props", "perm:6")
    assert out.startswith("perm:6: holds n=3")
    code, out, _ = run(capsys, "analyze", files["c4"], "--props", "2sl")
    assert code == 0 and out.strip() == "2sl: fails"


def test_analyze_json_round_trip_and_determinism(capsys, files):
    argv = ("analyze", files["c3"], "--props", "maltsev,tsi:3,perm,cm", "--json", "--no-timing")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    data = json.loads(first)
    assert json.dumps(data, indent=2) + "\n" == first
    assert [c["id"] for c in data["criteria"]] == ["maltsev", "tsi:3", "perm", "cm"]
    assert data["template"] == {"vertices": 3, "edges": 3}
    assert all("millis" not in c for c in data["criteria"])
    _, timed, _ = run(capsys, "analyze", files["c3"], "--props", "maltsev", "--json")
    assert "millis" in json.loads(timed)["criteria"][0]


def test_analyze_bound_flag(capsys, files):
    _, out, _ = run(capsys, "analyze", files["t3"], "--props", "perm", "--bound", "2", "--json", "--no-timing")
    row = json.loads(out)["criteria"][0]
    assert row["verdict"] == "unknown_above_bound" and row["bound"] == 2
    assert run(capsys, "analyze", files["t3"], "--props", "perm", "--bound", "0")[0] == 1


def test_analyze_witness_dir_and_figure(capsys, files, tmp_path):
    wdir, fig = tmp_path / "w", tmp_path / "report.png"
    code, out, _ = run(capsys, "analyze", files["c3"], "--props", "maltsev,tsi:3", "--json", "--no-timing",
                       "--witness-dir", str(wdir), "--figure", str(fig))
    assert code == 0
    rows = json.loads(out)["criteria"]
    path = rows[0]["witness_path"]
    assert "witness_path" not in rows[1]
    C3 = read_dg(files["c3"])
    tables = tables_from_json(json.loads(open(path).read()), C3.vertices)
    assert verify(tables, maltsev(), C3) is None
    assert fig.read_bytes()[:4] == b"\x89PNG"


def test_analyze_errors(capsys, files, tmp_path):
    assert run(capsys, "analyze", files["c3"], "--props", "bogus")[0] == 1
    assert run(capsys, "analyze", str(tmp_path / "missing.dg"), "--props", "maltsev")[0] == 1
    bad = tmp_path / "bad.dg"
    bad.write_text("vertices: a\nedges: a b\n")
    assert run(capsys, "analyze", str(bad), "--props", "maltsev")[0] == 1
    loop = tmp_path / "loop.dg"
    loop.write_text("vertices: a\nedges: a a\n")
    assert run(capsys, "analyze", str(loop), "--props", "maltsev")[0] == 1
    assert run(capsys, "analyze", files["c3"])[0] == 1


def test_internal_error_exit_code(capsys, files, monkeypatch):
    def boom(*a, **k):
        raise polysolver.InvariantViolation("forced")
    monkeypatch.setattr("dgpoly.cli.analyze", boom)
    code, _, err = run(capsys, "analyze", files["c3"], "--props", "maltsev")
    assert code == 2 and "internal" in err


def test_hom_and_core(capsys, files):
    code, out, _ = run(capsys, "hom", files["c6"], files["c3"])
    assert code == 0 and len(json.loads(out)) == 6
    code, out, _ = run(capsys, "hom", files["c3"], files["c3"], "--all", "--limit", "2")
    assert len(json.loads(out)) == 2
    code, out, _ = run(capsys, "hom", files["c3"], files["c2"])
    assert code == 0 and json.loads(out) is None
    code, out, _ = run(capsys, "core", files["c6"])
    assert code == 0 and len(json.loads(out)["core"]) == 6


def test_reduce_subcommands(capsys, files, tmp_path):
    code, out, _ = run(capsys, "reduce", "strip-sinks", files["t3"])
    assert out == "vertices: 0 1\nedges: 0 1\n"
    dest = tmp_path / "top.dg"
    assert run(capsys, "reduce", "add-top", files["c3"], "-o", str(dest))[0] == 0
    assert len(read_dg(str(dest)).edges) == 6
    code, out, _ = run(capsys, "reduce", "product-check", files["c6"], files["c2"], files["c3"])
    assert code == 0 and out.startswith("accept")
    code, out, _ = run(capsys, "reduce", "union-check", files["c3"], files["c2"], files["c4"])
    assert code == 0 and out.startswith("reject")


def test_suite_filter(capsys, tmp_path):
    code, out, _ = run(capsys, "suite", "paper", "--filter", "perm", "--no-timing")
    assert code == 0
    lines = out.splitlines()
    assert [l.split()[0] for l in lines[:-1]] == ["2", "3", "7"]
    assert lines[-1] == "3/3 criteria passed"
    assert run(capsys, "suite", "paper", "--filter", "nothing-matches")[0] == 1


def test_suite_json_and_figure(capsys, tmp_path):
    fig = tmp_path / "suite.png"
    code, out, _ = run(capsys, "suite", "paper", "--filter", "cycle", "--json", "--figure", str(fig))
    rows = json.loads(out)["criteria"]
    assert code == 0 and rows[0]["id"] == 1 and rows[0]["verdict"] == "pass" and "millis" in rows[0]
    assert fig.stat().st_size > 0


def test_suite_reports_broken_lift(capsys, monkeypatch):
    import dgpoly.polyconstruct as pc
    orig, calls = pc._guarded, []

    def broken(base, guard, value):
        calls.append(1)
        return base if len(calls) == 1 else orig(base, guard, value)

    monkeypatch.setattr(pc, "_guarded", broken)
    code, out, _ = run(capsys, "suite", "paper", "--filter", "lift", "--no-timing")
    assert code == 3
    line = next(l for l in out.splitlines() if "permutability lift" in l)
    assert "FAIL" in line and "p1(x,y,y)=x fails at" in line


def test_usage_errors(capsys):
    assert run(capsys)[0] == 1
    assert run(capsys, "frobnicate")[0] == 1
    assert run(capsys, "--help")[0] == 0
