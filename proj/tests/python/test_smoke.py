from pathlib import Path

import pytest

import hlweave

DATA = Path(__file__).resolve().parent.parent / "data"


def text(name):
    return (DATA / name).read_text()


def test_sample_prints_before_advice():
    r = hlweave.run(text("Test.hl"), "Test.main", [text("Sample.asp")], "Test.hl")
    assert r["error"] is None
    assert r["stdout"] == "before foo!foo"


def test_run_without_aspects():
    assert hlweave.run(text("Test.hl"), "Test.main")["stdout"] == "foo"


def test_weave_marks_provenance_and_reparses():
    code, warnings = hlweave.weave(text("Test.hl"), [text("Sample.asp")], "Test.hl")
    assert warnings == []
    assert "AOP: PCCallFunc(:foo)" in code
    plain, _ = hlweave.weave(text("Test.hl"), [text("Sample.asp")], "Test.hl", debug_lines=False)
    assert hlweave.format(code, "woven.hl", debug_lines=False) == plain


def test_short_circuit_warning():
    _, warnings = hlweave.weave(text("shortcircuit.hl"), [text("dump_args.asp")])
    assert len(warnings) == 1


def test_runtime_error_is_reported():
    r = hlweave.run("function main()\n  error(\"bad\")\nend\n", "main")
    assert "bad" in r["error"]


def test_syntax_error_raises():
    with pytest.raises(hlweave.SyntaxError):
        hlweave.format("function (")


def test_dump_xml_matches_golden():
    assert hlweave.dump_xml(text("fib.hl"), "fib.hl") == text("fib.xml")


def test_cli_exit_codes():
    code, out, _ = hlweave.cli(["run", str(DATA / "Test.hl"), "--aspects", str(DATA / "Sample.asp"),
                                "--entry", "Test.main"])
    assert (code, out) == (0, "before foo!foo")
    code, _, err = hlweave.cli(["run", str(DATA / "Test.hl"), "--aspects", "missing.asp"])
    assert code == 1 and "aspect file not found" in err
