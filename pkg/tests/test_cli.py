"""Case-file parsing, the verify/sweep/explain commands and their exit codes."""

import json
import subprocess
import sys
from fractions import Fraction

import pytest

from heckeblocks.cli import bundled_names, load_cases, main
from heckeblocks.cli.cases import CaseError, parse_line, parse_text, parse_value


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, text, name="c.cases"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


# -- parsing -------------------------------------------------------------------


def test_parse_value_lists_and_ranges():
    assert parse_value("1,-2") == [Fraction(1), Fraction(-2)]
    assert parse_value("-1..1") == [Fraction(-1), Fraction(0), Fraction(1)]
    assert parse_value("1/2,sym") == [Fraction(1, 2), "sym"]
    with pytest.raises(ValueError):
        parse_value("3..1")
    with pytest.raises(ValueError):
        parse_value("1,,2")


def test_parse_line_expands_sweep():
    spec = parse_line("factorize id=x a=1,-1 mu=0 lambda=1..2 flavor=pgl2")
    assert spec.case_id == "x"
    # j defaults to 0..lambda-1: (1 + 2) per a
    assert len(spec.instances) == 2 * 3


def test_comments_blank_lines_and_default_ids():
    cases = parse_text("# header\n\ncasimir points=2  # trailing\n")
    assert [c.case_id for c in cases] == ["casimir-3"]
    assert cases[0].line == 3


def test_virasoro_uses_antisymmetry():
    spec = parse_line("virasoro m=-1..1 n=-1..1 depth=1")
    assert sorted((i["m"], i["n"]) for i in spec.instances) == [(-1, 0), (-1, 1), (0, 1)]


@pytest.mark.parametrize(
    "line,needle",
    [
        ("bogus a=1", "unknown case kind"),
        ("factorize a=1 bad", "expected key=value"),
        ("factorize q=1", "does not take"),
        ("factorize a=1 a=2", "duplicate key"),
        ("factorize a=0 mu=0 lambda=1", "nonzero"),
        ("factorize a=1 mu=1 lambda=1 flavor=sl2", "even pairings"),
        ("ward-transport N=1 k=-2", "critical"),
        ("ward-transport N=1 mutation=nope", "unknown mutation"),
        ("minuscule lambda=2", "minuscule"),
        ("two-point chi=1 k=sym", "rational level"),
        ("kz-transport N=2 i=3", "out of range"),
        ("factorize a=1 expect=maybe", "expect"),
        ("hecke-class type=A1 mu=0 lambda=1 j=1", "j"),
    ],
)
def test_parse_errors(line, needle):
    with pytest.raises(CaseError) as exc:
        parse_text("# first\n" + line + "\n", "f.cases")
    assert exc.value.line == 2
    assert str(exc.value).startswith("f.cases:2:")
    assert needle in str(exc.value)


def test_duplicate_ids_rejected():
    with pytest.raises(CaseError) as exc:
        parse_text("casimir id=a\ncasimir id=a\n", "d.cases")
    assert "duplicate case id" in str(exc.value) and exc.value.line == 2


def test_bundled_corpora():
    assert bundled_names() == ["conjugation", "factorization", "transport", "two_point", "virasoro"]
    cases = load_cases("@all", None)
    kinds = {c.kind for c in cases}
    assert {"virasoro", "conjugation-nilpotent", "conjugation-coweight", "minuscule", "factorize",
            "ward-transport", "kz-transport", "two-point", "casimir"} <= kinds


# -- commands and exit codes ---------------------------------------------------


def test_verify_ok(tmp_path, capsys):
    f = write(tmp_path, "factorize id=f a=1,2 mu=0..1 lambda=1..2\ncasimir id=c\n")
    code, out, err = run(["verify", f, "--stable"], capsys)
    assert code == 0, err
    rep = json.loads(out)
    assert rep["summary"] == {"cases": 2, "verified": 2, "failed": 0, "errors": 0, "identities": 12 + 12, "exit_code": 0}
    assert [c["case"] for c in rep["cases"]] == ["f", "c"]
    assert "seconds" not in rep["summary"]


def test_verify_timing_fields_when_not_stable(tmp_path, capsys):
    f = write(tmp_path, "casimir id=c\n")
    code, out, _ = run(["verify", f], capsys)
    rep = json.loads(out)
    assert code == 0 and "seconds" in rep["summary"] and "seconds" in rep["cases"][0]


def test_mutation_without_expect_fail_exits_1(tmp_path, capsys):
    f = write(tmp_path, "ward-transport id=m N=2 chi=equal mutation=chi-extra\n")
    code, out, err = run(["verify", f, "--stable"], capsys)
    assert code == 1
    assert "FAILED m (" in err and ":1)" in err
    rep = json.loads(out)
    assert rep["cases"][0]["status"] == "failed"
    assert any(r["residual"] != "0" for r in rep["results"])


def test_expect_fail_passes_when_caught(tmp_path, capsys):
    f = write(tmp_path, "ward-transport id=m N=2 chi=equal mutation=chi-extra expect=fail\n")
    code, _, _ = run(["verify", f, "--stable"], capsys)
    assert code == 0


def test_expect_fail_on_true_identity_exits_1(tmp_path, capsys):
    f = write(tmp_path, "casimir id=c expect=fail\n")
    code, _, err = run(["verify", f, "--stable"], capsys)
    assert code == 1
    assert "expected a nonzero residual" in err


def test_wrong_expected_class_exits_1(tmp_path, capsys):
    f = write(tmp_path, "hecke-class id=h type=A1 mu=0 lambda=2 j=1 nu=2\n")
    code, out, err = run(["verify", f, "--stable"], capsys)
    assert code == 1
    assert "expected alpha=2, got alpha=0" in out


def test_parse_error_exits_2(tmp_path, capsys):
    f = write(tmp_path, "casimir\nnonsense x=1\n")
    code, out, err = run(["verify", f], capsys)
    assert code == 2
    assert out == ""
    assert f"{f}:2:" in err


def test_missing_file_exits_2(tmp_path, capsys):
    code, _, err = run(["verify", str(tmp_path / "nope.cases")], capsys)
    assert code == 2 and "cannot read" in err
    code, _, err = run(["verify", "@nope"], capsys)
    assert code == 2 and "no bundled corpus" in err


def test_empty_file_warns_and_passes(tmp_path, capsys):
    f = write(tmp_path, "# nothing here\n")
    code, out, err = run(["verify", f, "--stable"], capsys)
    assert code == 0
    assert "contains no cases" in err
    assert json.loads(out)["summary"]["cases"] == 0


def test_sweep_command(capsys):
    code, out, _ = run(["sweep", "factorize", "a=1,-3", "mu=2", "lambda=1..3", "--stable"], capsys)
    assert code == 0
    assert json.loads(out)["summary"]["identities"] == 2 * 6


def test_sweep_flavor_flag(capsys):
    code, out, _ = run(["sweep", "factorize", "a=1", "mu=0,2", "lambda=2", "--flavor", "sl2", "--stable"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["summary"]["identities"] == 4
    assert all("sl2" in r["identity"] for r in rep["results"])


def test_sweep_parse_error(capsys):
    code, _, err = run(["sweep", "factorize", "a=0"], capsys)
    assert code == 2 and "<command line>:1:" in err


def test_out_file(tmp_path, capsys):
    target = tmp_path / "r.json"
    code, out, _ = run(["sweep", "casimir", "--stable", "--out", str(target)], capsys)
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["summary"]["verified"] == 1


def test_jobs_preserve_order_and_bytes(tmp_path, capsys):
    f = write(tmp_path, "two-point id=a chi=1/2,1 k=1,2\nfactorize id=b\ncasimir id=c points=2..3\n")
    _, one, _ = run(["verify", f, "--stable"], capsys)
    _, many, _ = run(["verify", f, "--stable", "--jobs", "4"], capsys)
    assert one == many


def test_stable_runs_are_byte_identical(capsys):
    _, a, _ = run(["verify", "@factorization", "--stable"], capsys)
    _, b, _ = run(["verify", "@factorization", "--stable"], capsys)
    assert a == b


def test_explain_ward(tmp_path, capsys):
    f = write(tmp_path, "ward-transport id=w N=1\n")
    code, out, _ = run(["explain", "w", f], capsys)
    assert code == 0
    assert "relations (3)" in out and "residuals (3)" in out
    assert out.count("Psi[") >= 3
    for g in ("ward-e", "ward-h", "ward-t"):
        assert g in out


def test_explain_instance_selection(tmp_path, capsys):
    f = write(tmp_path, "factorize id=f a=1,2 mu=0 lambda=2\n")
    code, out, _ = run(["explain", "f", f, "--instance", "3"], capsys)
    assert code == 0
    assert out.count("# factorize") == 1 and "a=2" in out and "j=1" in out
    code, _, err = run(["explain", "f", f, "--instance", "9"], capsys)
    assert code == 2 and "out of range" in err
    code, _, err = run(["explain", "nope", f], capsys)
    assert code == 2 and "no case with id" in err


def test_explain_every_kind(capsys):
    for case_id, corpus in [("coweight-matrix", "@conjugation"), ("minuscule-depth3", "@conjugation"), ("hecke-a2-theta", "@factorization"),
                            ("kz", "@transport"), ("casimir", "@transport")]:
        code, out, _ = run(["explain", case_id, corpus, "--instance", "0"], capsys)
        assert code == 0 and out.startswith(f"case {case_id} ")


def test_corpus_command(capsys):
    code, out, _ = run(["corpus"], capsys)
    assert code == 0 and out.split() == [f"@{n}" for n in bundled_names()]


def test_module_entry_point(tmp_path):
    f = write(tmp_path, "casimir id=c points=2\n")
    res = subprocess.run([sys.executable, "-m", "heckeblocks", "verify", f, "--stable"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["summary"]["verified"] == 1
