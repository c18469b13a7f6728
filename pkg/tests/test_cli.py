"""Check-file parsing, evaluation, report emission, and exit codes."""

import json
import subprocess
import sys

import pytest

from diracgeom.cli import (
    BinOp,
    Call,
    CheckFile,
    CheckStmt,
    IntLit,
    LetStmt,
    Name,
    Neg,
    RunReport,
    emit_report,
    main,
    parse_checkfile,
    print_checkfile,
    run_builtin_suite,
    run_checkfile,
    run_checks,
)
from diracgeom.errors import CheckError, ParseError, UnknownReference

SAMPLE = """\
# a closed two-form on the plane
let M = patch(x, y)
let omega = (1 + x)*dx^dy
let L = graph_two_form(omega)

check dirac L
check closed omega
check lagrangian L
"""


def write(tmp_path, text, name="file.check"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


# -- parsing ---------------------------------------------------------------------


def test_parse_shapes():
    cf = parse_checkfile(SAMPLE)
    assert [type(s) for s in cf.statements] == [LetStmt, LetStmt, LetStmt, CheckStmt, CheckStmt, CheckStmt]
    omega = cf.statements[1]
    assert omega == LetStmt(
        "omega",
        BinOp("*", BinOp("+", IntLit(1), Name("x")), BinOp("^", Name("dx"), Name("dy"))),
    )
    assert cf.statements[3] == CheckStmt("dirac", (Name("L"),))


def test_parse_print_round_trip():
    cf = parse_checkfile(SAMPLE)
    assert parse_checkfile(print_checkfile(cf)) == cf


def test_round_trip_preserves_tricky_expressions():
    text = "\n".join(
        [
            "let M = patch(x, y)",
            "let a = -(x + y)*dx^dy",
            "let b = 2*a - (1/3)*dx^dy",
            "let L = graph_two_form(b)",
            "check dirac L",
            "check linearity L 1",
        ]
    )
    cf = parse_checkfile(text)
    assert parse_checkfile(print_checkfile(cf)) == cf


def test_parse_errors_carry_positions():
    with pytest.raises(ParseError) as err:
        parse_checkfile("let x = = 1\n")
    assert "line 1" in str(err.value)
    with pytest.raises(ParseError):
        parse_checkfile("let 9bad = 1\n")
    with pytest.raises(ParseError):
        parse_checkfile("let a = 1\nlet a = 2\n")
    with pytest.raises(ParseError):
        parse_checkfile("frob a b\n")
    with pytest.raises(ParseError):
        parse_checkfile("check verywrong L\n")
    with pytest.raises(ParseError):
        parse_checkfile("let a = (1 + 2\n")


def test_comments_and_blanks_are_ignored():
    cf = parse_checkfile("\n\n# only comments\n   # indented\n")
    assert cf == CheckFile(())


# -- evaluation ---------------------------------------------------------------------


def test_form_literal_binds_to_covering_patch():
    cf = parse_checkfile(
        "let A = patch(u)\nlet M = patch(x, y)\ncheck closed (x*dx^dy)\n"
    )
    rep = run_checks(cf)
    assert rep.checks[0].verdict == "pass"
    assert rep.checks[0].name == "closed (x*dx^dy)"


def test_vector_field_atoms_and_foliations():
    cf = parse_checkfile(
        "let M = patch(x, y, z)\ncheck dirac foliation_frame(Dx, Dy)\n"
        "check dirac foliation_frame(Dx, x*Dy + Dz)\n"
    )
    rep = run_checks(cf)
    assert [c.verdict for c in rep.checks] == ["pass", "fail"]


def test_bivector_wedge_and_graph():
    cf = parse_checkfile(
        "let M = patch(x_1, x_2, x_3)\n"
        "let pi = x_3*Dx_1^Dx_2 + x_1*Dx_2^Dx_3 - x_2*Dx_1^Dx_3\n"
        "check dirac graph_bivector(pi)\n"
        "check linearity graph_bivector(pi) 0\n"
    )
    rep = run_checks(cf)
    assert [c.verdict for c in rep.checks] == ["pass", "pass"]


def test_groupoid_constructors_in_files():
    cf = parse_checkfile(
        "let G = heisenberg3()\n"
        "check groupoid_axioms G\n"
        "check groupoid_axioms tangent_groupoid(G)\n"
        "check lie_algebroid lie_algebroid_of(G)\n"
        "let H = abelian_group(2)\n"
        "let pi = x_1*Dx_1^Dx_2\n"
        "check multiplicative_bivector H pi\n"
        "check bialgebroid lie_algebroid_of(H) induced_dual_bracket(H, pi)\n"
    )
    rep = run_checks(cf)
    assert all(c.verdict == "pass" for c in rep.checks)


def test_unknown_references():
    with pytest.raises(UnknownReference):
        run_checks(parse_checkfile("check dirac nosuch\n"))
    with pytest.raises(UnknownReference):
        run_checks(parse_checkfile("let a = frobnicate(1)\n"))
    with pytest.raises(UnknownReference):
        # no declared patch covers the symbol
        run_checks(parse_checkfile("let M = patch(x)\ncheck closed dx^dq\n"))


def test_type_errors_are_check_errors():
    with pytest.raises(CheckError):
        run_checks(parse_checkfile("let M = patch(x, y)\ncheck dirac dx^dy\n"))
    with pytest.raises(CheckError):
        run_checks(parse_checkfile("let M = patch(x)\nlet a = dx + Dx\n"))
    with pytest.raises(CheckError):
        run_checks(parse_checkfile("let M = patch(x)\nlet a = x/(x)\n"))
    with pytest.raises(CheckError):
        run_checks(parse_checkfile("let a = patch(x) + 1\n"))
    with pytest.raises(CheckError):
        run_checks(parse_checkfile("check dirac abelian_group(1, 2)\n"))


def test_engine_errors_become_check_errors():
    text = "let M = patch(x)\nlet L = graph_two_form(0*dx^dx)\ncheck linearity L 7\n"
    with pytest.raises(CheckError):
        run_checks(parse_checkfile(text))


# -- reports ----------------------------------------------------------------------


def test_report_counts_and_witnesses(tmp_path):
    path = write(
        tmp_path,
        "let M = patch(x, y, z)\ncheck dirac graph_two_form(z*dx^dy)\ncheck closed dx^dy\n",
    )
    rep = run_checkfile(path)
    assert rep.passes == 1 and rep.failures == 1
    assert rep.exit_code == 1
    failing = rep.checks[0]
    assert failing.verdict == "fail"
    assert failing.witness == "mu[1,2,3] = 1"
    assert rep.checks[1].witness is None


def test_json_schema(tmp_path):
    path = write(tmp_path, "let M = patch(x, y, z)\ncheck dirac graph_two_form(z*dx^dy)\n")
    rep = run_checkfile(path)
    data = json.loads(emit_report(rep, "json").decode("utf-8"))
    assert set(data) == {"checks", "summary"}
    assert data["summary"] == {"pass": 0, "fail": 1}
    (entry,) = data["checks"]
    assert entry["name"] == "dirac graph_two_form(z*dx^dy)"
    assert entry["verdict"] == "fail"
    assert entry["witness"] == "mu[1,2,3] = 1"
    assert data["summary"]["pass"] + data["summary"]["fail"] == len(data["checks"])


def test_reports_exclude_timing(tmp_path):
    path = write(tmp_path, "let M = patch(x)\ncheck closed dx^dx\n")
    rep = run_checkfile(path)
    assert rep.checks[0].seconds >= 0.0
    blob = emit_report(rep, "json") + emit_report(rep, "text")
    assert b"seconds" not in blob and b"time" not in blob


def test_emissions_are_deterministic(tmp_path):
    path = write(
        tmp_path,
        "let M = patch(x, y)\nlet L = graph_two_form((1 + x)*dx^dy)\ncheck dirac L\ncheck lagrangian L\n",
    )
    first = emit_report(run_checkfile(path), "json")
    second = emit_report(run_checkfile(path), "json")
    assert first == second
    assert emit_report(run_checkfile(path), "text") == emit_report(run_checkfile(path), "text")


def test_empty_file_gives_empty_report(tmp_path):
    path = write(tmp_path, "")
    rep = run_checkfile(path)
    assert rep.checks == () and rep.exit_code == 0


def test_unknown_format_rejected():
    with pytest.raises(ValueError):
        emit_report(RunReport(()), "xml")


# -- entry point -------------------------------------------------------------------


def test_main_exit_codes(tmp_path, capsys):
    good = write(tmp_path, "let M = patch(x, y)\ncheck closed dx^dy\n", "good.check")
    bad = write(tmp_path, "let M = patch(x, y, z)\ncheck closed (z*dx^dy)\n", "bad.check")
    broken = write(tmp_path, "let = nope\n", "broken.check")
    assert main(["verify", good]) == 0
    assert main(["verify", bad, "--format", "json"]) == 1
    assert main(["verify", broken]) == 2
    assert main(["verify", str(tmp_path / "missing.check")]) == 2
    capsys.readouterr()


def test_main_requires_one_source(tmp_path, capsys):
    good = write(tmp_path, "", "x.check")
    with pytest.raises(SystemExit) as err:
        main(["verify", good, "--suite", "paper-examples"])
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main(["verify"])
    assert err.value.code == 2
    capsys.readouterr()


def test_builtin_suite_passes():
    rep = run_builtin_suite()
    assert rep.failures == 0
    assert rep.passes == 10
    assert rep.exit_code == 0


def test_cli_subprocess_round_trip(tmp_path):
    path = write(tmp_path, "let M = patch(x, y)\ncheck closed dx^dy\n")
    out = subprocess.run(
        [sys.executable, "-m", "diracgeom", "verify", path, "--format", "json"],
        capture_output=True,
    )
    assert out.returncode == 0
    data = json.loads(out.stdout.decode("utf-8"))
    assert data["summary"] == {"pass": 1, "fail": 0}
