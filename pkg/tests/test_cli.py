import io
import json
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from orlovkit import GF, QQ, make_ring
from orlovkit.cli import build_report, emit, run
from orlovkit.formats import module_to_text, parse_mf_text, parse_module_text, parse_ring_text
from orlovkit.grring import ParseError

RINGS = {
    "kx.ring": "field Q\nvars x:1\n",
    "p1.ring": "field Q\nvars x0:1 x1:1\n",
    "u2.ring": "field Q\nvars u:1\nrel u^2\n",
    "xy.ring": "field Q\nvars x:1 y:1\nrel x*y\n",
    "x2t.ring": "field Q\nvars x:0 T:1\nrel x^2*T\n",
    "kz.ring": "field Q\nvars z:0\n",
}

GOOD_MF = "field Q\nvars x:1 y:1\nmf d=2 W=x*y\nE1 gens 1\nE0 gens 0\ne1 x\ne0 y\n"
BAD_MF = "field Q\nvars x:1 y:1\nmf d=2 W=x*y\nE1 gens 1\nE0 gens 0\ne1 x\ne0 x\n"


@pytest.fixture
def files(tmp_path):
    for name, text in RINGS.items():
        (tmp_path / name).write_text(text, encoding="utf-8")
    (tmp_path / "good.mf").write_text(GOOD_MF, encoding="utf-8")
    (tmp_path / "bad.mf").write_text(BAD_MF, encoding="utf-8")
    (tmp_path / "cx.mod").write_text("gens 0\nrel x\n", encoding="utf-8")
    (tmp_path / "k.mod").write_text("gens 0\nrel z\n", encoding="utf-8")
    return tmp_path


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def test_gorenstein_kx(files):
    code, out, _ = call("--json", "gorenstein", files / "kx.ring")
    body = json.loads(out)
    assert code == 0
    assert (body["result"]["n"], body["result"]["a"]) == (1, 1)
    assert body["metadata"]["version"]


def test_sod_main_p1(files):
    code, out, _ = call("--json", "sod", "--case", "MAIN", "--i", "0", files / "p1.ring")
    body = json.loads(out)
    assert code == 0 and body["pass"]
    assert body["checks"]


def test_bad_mf_exit_3(files):
    code, _, err = call("mf", "check", files / "bad.mf")
    assert code == 3
    assert "MFIdentityViolation" in err and "(0, 0)" in err


def test_good_mf_and_hom(files):
    assert call("mf", "check", files / "good.mf")[0] == 0
    code, out, _ = call("--json", "mf", "hom", files / "good.mf", files / "good.mf")
    assert code == 0 and json.loads(out)["result"]["dim"] == 1


def test_subcommands_smoke(files):
    cases = [
        ("resolve", files / "xy.ring", "--module", files / "cx.mod"),
        ("truncate", files / "p1.ring", "--i", "1", "--e-window", "2"),
        ("lc", files / "kx.ring", "--window", "-2", "2"),
        ("bi", files / "u2.ring", "--module", "A0"),
        ("mf", "coker", files / "good.mf"),
        ("mf", "stabilize", files / "xy.ring", "--module", files / "cx.mod"),
        ("psi", files / "kz.ring", "--f", "z^2", "--module", files / "k.mod", "--check-hom"),
    ]
    for argv in cases:
        code, out, err = call(*argv)
        assert code == 0, (argv, err)
        assert "checks" in out


def test_precondition_exit_2(files, tmp_path):
    (tmp_path / "gen.ring").write_text("field Q\nvars x:0 y:0 T:1\nrel x*T\n", encoding="utf-8")
    assert call("bi", tmp_path / "gen.ring")[0] == 2
    (tmp_path / "ng.ring").write_text("field Q\nvars x:1 y:1\nrel x^2\nrel x*y\n", encoding="utf-8")
    assert call("gorenstein", tmp_path / "ng.ring")[0] == 2


def test_resource_exit_4(files):
    # Cech with a cap too small to stabilize is a resource failure
    from orlovkit import cli

    code, _, err = call("mf", "stabilize", files / "xy.ring")
    assert code == 0
    import orlovkit.mf as mf

    orig = mf.stabilize

    def tight(M, hd, window=None):
        return orig(M, hd, window=0)

    cli.stabilize = tight
    try:
        k = files / "k0.mod"
        k.write_text("gens 0\nrel x\nrel y\n", encoding="utf-8")
        assert call("mf", "stabilize", files / "xy.ring", "--module", k)[0] == 4
    finally:
        cli.stabilize = orig


def test_unknown_flag_is_usage_error(files):
    assert call("gorenstein", files / "kx.ring", "--bogus")[0] == 1


def test_missing_file_is_parse_error(files):
    assert call("gorenstein", files / "nope.ring")[0] == 1


def test_json_is_byte_stable(files):
    a = call("--json", "sod", "--case", "TORSION", "--i", "0", files / "xy.ring")[1]
    b = call("--json", "sod", "--case", "TORSION", "--i", "0", files / "xy.ring", "--workers", "4")[1]
    assert a == b


def test_text_mode_table_and_empty_report():
    rep = build_report("x", {"v": 1}, [{"name": "a", "pass": True}, {"name": "b", "pass": False}])
    text = emit(rep, "text")
    assert "PASS" in text and "FAIL" in text and "2 checks, 1 failed" in text
    empty = build_report("x", {}, [])
    assert json.loads(emit(empty, "json"))["checks"] == []
    assert empty["pass"] is True


def test_console_script_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "orlovkit.cli", "gorenstein", str(files / "kx.ring")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "n: 1" in proc.stdout


def test_parse_examples():
    R = parse_ring_text("field Q\nvars x:1")
    assert R.names == ("x",) and R.relations == ()
    T = parse_ring_text("field Q\nvars x:0 T:1\nrel x^2*T")
    assert T.weights == (0, 1)
    with pytest.raises(ParseError) as ex:
        parse_ring_text("vars x:1")
    assert ex.value.line == 1


def test_parse_error_position():
    with pytest.raises(ParseError) as ex:
        parse_ring_text("field Q\nvars x:1 y:1\nrel x*y + z")
    assert ex.value.line == 3
    assert ex.value.column == len("rel x*y + ") + 1


def test_module_round_trip():
    R = parse_ring_text(RINGS["xy.ring"])
    M = parse_module_text(R, "gens 0 1\nrel x, -1\nrel y^2, y\n")
    M2 = parse_module_text(R, module_to_text(M))
    assert [M.dim(e) for e in range(-1, 4)] == [M2.dim(e) for e in range(-1, 4)]


def test_mf_parse_with_separate_ring():
    S = parse_ring_text("field Q\nvars x:1\n")
    hd, E = parse_mf_text("mf d=2 W=x^2\nE1 gens 1\nE0 gens 0\ne1 x\ne0 x\n", S)
    assert hd.d == 2 and E.rank == 1


names = st.sampled_from(["x", "y", "z", "T", "u1"])


@given(st.sampled_from([QQ, GF(5), GF(32003)]),
       st.lists(st.tuples(names, st.integers(0, 3)), min_size=1, max_size=3, unique_by=lambda t: t[0]))
def test_ring_emit_parse_round_trip(field, vars_):
    if all(w == 0 for _, w in vars_):
        vars_ = vars_[:-1] + [(vars_[-1][0], 1)]
    R = make_ring(field, vars_)
    R2 = parse_ring_text(R.to_text())
    assert R2.signature() == R.signature()


MALFORMED = [
    "",
    "field\nvars x:1",
    "field R\nvars x:1",
    "field F 4\nvars x:1",
    "field Q\nvars x",
    "field Q\nvars x:a",
    "field Q\nvars x:1\nrel x +",
    "field Q\nvars x:1\nrel y",
    "field Q\nvars x:1\nbogus",
    "field Q\nvars x:-1",
    "field Q\nvars x:0 y:1\nrel x + y",
]


@given(st.sampled_from(MALFORMED), st.text(alphabet="xy+*^ :1", max_size=6))
def test_malformed_rings_exit_1(tmp_path_factory, text, junk):
    d = tmp_path_factory.mktemp("bad")
    p = d / "r.ring"
    p.write_text(text + junk if text.endswith("rel x +") else text, encoding="utf-8")
    assert call("gorenstein", p)[0] == 1


MALFORMED_MF = [
    "field Q\nvars x:1\nE1 gens 1\nE0 gens 0\ne1 x\ne0 x\n",
    "field Q\nvars x:1\nmf d=2 W=x^2\nE0 gens 0\ne0 x\n",
    "field Q\nvars x:1\nmf d=two W=x^2\nE1 gens 1\nE0 gens 0\n",
    "field Q\nvars x:1\nmf d=3 W=x^2\nE1 gens 1\nE0 gens 0\ne1 x\ne0 x\n",
    "field Q\nvars x:1\nmf d=2 W=x^2\nE1 gens 1\nE0 gens 0\ne1 x x\ne0 x\n",
]


@given(st.sampled_from(MALFORMED_MF))
def test_malformed_mf_exit_1(tmp_path_factory, text):
    p = tmp_path_factory.mktemp("badmf") / "m.mf"
    p.write_text(text, encoding="utf-8")
    assert call("mf", "check", p)[0] == 1


@given(st.sampled_from(["x", "y", "x + y", "2*x"]), st.sampled_from(["x", "y", "-y", "x - y"]))
def test_mf_check_exit_codes(tmp_path_factory, a, b):
    p = tmp_path_factory.mktemp("mf") / "m.mf"
    p.write_text("field Q\nvars x:1 y:1\nmf d=2 W=x*y\nE1 gens 1\nE0 gens 0\ne1 %s\ne0 %s\n" % (a, b), encoding="utf-8")
    R = make_ring("Q", [("x", 1), ("y", 1)])
    ok = R.mul(R.parse(a), R.parse(b)) == R.parse("x*y")
    assert call("mf", "check", p)[0] == (0 if ok else 3)
