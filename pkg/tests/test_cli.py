"""Command line behaviour: flag parsing, status output, exit codes."""

import json

import pytest

from conftest import corpus_path, run_cli
from minibmc.cli import RunConfig, UsageError, parse_args


class TestParseArgs:
    def test_defaults(self):
        config = parse_args([corpus_path("abs.c")])
        assert config.entry == "main"
        assert config.unwind.global_bound is None
        assert not config.checks.bounds_check

    def test_function_and_checks(self):
        config = parse_args(["f.c", "--function", "abs",
                             "--signed-overflow-check", "--bounds-check"])
        assert config.entry == "abs"
        assert config.checks.signed_overflow_check
        assert config.checks.bounds_check

    def test_unwind_and_unwindset(self):
        config = parse_args(["f.c", "--unwind", "6",
                             "--unwindset", "main.0:4,main.1:8"])
        assert config.unwind.global_bound == 6
        assert config.unwind.per_loop == {"main.0": 4, "main.1": 8}

    def test_data_models(self):
        for flag, (iw, lw) in {"--16": (16, 32), "--32": (32, 32),
                               "--64": (32, 64), "--LP64": (32, 64),
                               "--ILP64": (64, 64), "--LLP64": (32, 32),
                               "--ILP32": (32, 32), "--LP32": (16, 32)}.items():
            config = parse_args(["f.c", flag])
            assert (config.platform.int_width,
                    config.platform.long_width) == (iw, lw), flag

    def test_defines_and_includes(self):
        config = parse_args(["f.c", "-DN=4", "-D", "M", "-Iinc", "-I", "inc2"])
        assert [name for name, _ in config.defines] == ["N", "M"]
        assert config.include_paths == ["inc", "inc2"]

    def test_cover_excludes_unwinding_assertions(self):
        with pytest.raises(UsageError):
            parse_args(["f.c", "--cover", "branch", "--unwinding-assertions"])
        with pytest.raises(UsageError):
            parse_args(["f.c", "--cover", "branch", "--partial-loops"])

    def test_bad_unwindset(self):
        with pytest.raises(UsageError):
            parse_args(["f.c", "--unwindset", "main.0"])

    def test_no_sources(self):
        with pytest.raises(UsageError):
            parse_args(["--unwind", "3"])

    def test_unknown_flag(self):
        with pytest.raises(UsageError):
            parse_args(["f.c", "--no-such-flag"])

    def test_returns_runconfig(self):
        assert isinstance(parse_args(["f.c"]), RunConfig)


def test_version_flag():
    code, out, _ = run_cli("--version")
    assert code == 0
    assert out.strip() == "0.1.0"


def test_help_exits_zero():
    code, out, _ = run_cli("--help")
    assert code == 0
    assert "minibmc" in out and "--unwind" in out


def test_usage_error_exit_one():
    code, _, err = run_cli("--no-such-flag")
    assert code == 1
    assert "no-such-flag" in err


def test_missing_file_exit_one():
    code, _, err = run_cli("/nonexistent/file.c")
    assert code == 1
    assert err


def test_abs_overflow_full_run():
    code, out, _ = run_cli(corpus_path("abs.c"), "--function", "abs",
                           "--signed-overflow-check", "--trace")
    assert code == 10
    for line in ("Parsing " + corpus_path("abs.c"),
                 "Converting",
                 "Type-checking abs",
                 "Generating GOTO Program",
                 "Starting Bounded Model Checking",
                 "Passing problem to propositional reduction",
                 "Running propositional reduction",
                 "SAT checker: instance is SATISFIABLE",
                 "Generated 1 VCC(s), 1 remaining after simplification",
                 "[abs.overflow.1] line 5 arithmetic overflow on signed "
                 "unary minus in -x: FAILURE",
                 "INPUT x: -2147483648 (10000000 00000000 00000000 00000000)",
                 "** 1 of 1 failed (2 iterations)",
                 "VERIFICATION FAILED"):
        assert line in out, line


def test_abs_no_checks_success():
    code, out, _ = run_cli(corpus_path("abs.c"), "--function", "abs")
    assert code == 0
    assert "Generated 0 VCC(s), 0 remaining after simplification" in out
    assert "VERIFICATION SUCCESSFUL" in out


def test_abs_16bit_model():
    code, out, _ = run_cli(corpus_path("abs.c"), "--function", "abs",
                           "--signed-overflow-check", "--16", "--trace")
    assert code == 10
    assert "INPUT x: -32768 (10000000 00000000)" in out


def test_unwind_failure_exit_six():
    code, _, err = run_cli(corpus_path("lock.c"))
    assert code == 6
    assert "does not stop" in err and "--unwind" in err


def test_show_properties():
    code, out, _ = run_cli(corpus_path("binsearch.c"), "--function",
                           "binsearch", "--bounds-check",
                           "--show-properties")
    assert code == 0
    assert "binsearch.array_bounds.1" in out


def test_show_goto_functions():
    code, out, _ = run_cli(corpus_path("abs.c"), "--function", "abs",
                           "--show-goto-functions")
    assert code == 0
    assert "abs" in out and "IF" in out or "GOTO" in out


def test_show_loop_ids():
    code, out, _ = run_cli(corpus_path("binsearch.c"), "--function",
                           "binsearch", "--show-loop-ids")
    assert code == 0
    assert "binsearch.0" in out


def test_dimacs_output():
    code, out, _ = run_cli(corpus_path("abs.c"), "--function", "abs",
                           "--signed-overflow-check", "--dimacs")
    assert code == 0
    assert "p cnf " in out


def test_json_ui():
    code, out, _ = run_cli(corpus_path("abs.c"), "--function", "abs",
                           "--signed-overflow-check", "--json-ui")
    assert code == 10
    start = out.index("{")
    record = json.loads(out[start:])
    assert record["properties"][0]["id"] == "abs.overflow.1"


def test_ignored_flag_warns():
    code, out, err = run_cli(corpus_path("abs.c"), "--function", "abs",
                             "--i386-win32")
    assert code == 0
    assert "ignoring" in err.lower() or "warning" in err.lower()


def test_cover_branch_cli():
    code, out, _ = run_cli(corpus_path("pid.c"), "--cover", "mcdc",
                           "--unwind", "6")
    assert code == 0
    assert "** coverage results:" in out
    assert "Test suite:" in out


def test_verbosity_silences_status():
    code, out, _ = run_cli(corpus_path("abs.c"), "--function", "abs",
                           "--verbosity", "1")
    assert code == 0
    assert "Parsing" not in out
