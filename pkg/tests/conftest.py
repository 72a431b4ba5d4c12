import contextlib
import io
import os

import pytest

from minibmc import cli
from minibmc.frontend.parser import parse_translation_unit
from minibmc.frontend.typecheck import typecheck
from minibmc.goto.convert import convert_to_goto
from minibmc.goto.transforms import build_entry_harness, \
    remove_function_pointers, remove_returns
from minibmc.instrument import CheckOptions, generate_checks
from minibmc.lang import PlatformConfig

CORPUS = os.path.join(os.path.dirname(__file__), "corpus")


def corpus_path(name):
    return os.path.join(CORPUS, name)


def build_model(source, entry="main", config=None, checks=None, library=True,
                filename="test.c"):
    """Front end pipeline up to an instrumented GOTO model, from source text
    or a corpus file name."""
    config = config or PlatformConfig()
    if source.endswith(".c") and "\n" not in source:
        filename = source
        with open(corpus_path(source)) as f:
            source = f.read()
    unit = parse_translation_unit(source, filename)
    program = typecheck(unit, config, library=library)
    model = convert_to_goto(program)
    remove_function_pointers(model)
    remove_returns(model)
    build_entry_harness(model, entry, config)
    generate_checks(model, checks or CheckOptions(), config)
    return model, config


def verify(source, entry="main", config=None, checks=None, policy=None,
           library=True):
    """Whole pipeline; returns (result, eq, varmap)."""
    from minibmc.encode import bitblast
    from minibmc.results import decide_properties
    from minibmc.satcore import Solver
    from minibmc.symex import UnwindPolicy, symex

    model, config = build_model(source, entry, config, checks, library)
    eq = symex(model, policy or UnwindPolicy())
    formula, varmap, _ = bitblast(eq)
    solver = Solver()
    while solver.nvars < formula.variable_count:
        solver.new_var()
    for clause in formula.clauses:
        solver.add_clause(clause)
    return decide_properties(eq, varmap, solver), eq, varmap


def statuses(result):
    return {p.id: p.status for p in result.properties}


def run_cli(*args):
    """cli.main in-process; returns (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    code = 0
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        try:
            cli.main(list(args))
        except SystemExit as exc:
            code = exc.code if isinstance(exc.code, int) else 1
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def platform():
    return PlatformConfig()
