"""Command-line driver: option parsing, pipeline orchestration, dumps.

Three console entry points live here: `minibmc` (the checker itself),
`minibmc-cc` (compile a source file to a serialized GOTO model) and
`minibmc-link` (merge several serialized models into one).
"""

from __future__ import annotations

import json
import sys
import time
from dataclasses import dataclass, field, replace

from . import __version__, lang
from .cover import CRITERIA, generate_tests, instrument_goals, render_suite, \
    suite_record
from .encode import bitblast, emit_dimacs
from .frontend.lexer import parse_define_option
from .frontend.parser import parse_translation_unit
from .frontend.typecheck import typecheck
from .goto import binary
from .goto.convert import convert_to_goto
from .goto.printer import print_loop_ids, print_model
from .goto.transforms import build_entry_harness, remove_function_pointers, \
    remove_returns
from .instrument import CheckOptions, enumerate_properties, generate_checks, \
    show_properties
from .lang import ConfigurationError, FrontendError, InternalError, \
    PlatformConfig
from .results import EXIT_FAILED, EXIT_INTERNAL, EXIT_SUCCESS, EXIT_USAGE, \
    build_trace, decide_properties, report
from .satcore import SATISFIABLE, Solver, UNSATISFIABLE
from .symex import UnwindPolicy, UnwindingFailure, print_vcc, symex

USAGE = """\
Usage: minibmc [options] file.c ...

Main options:
  --function f                 use function f as entry point (default: main)
  -I path                      add include search path
  -D macro[=value]             predefine a macro
  --16, --32, --64             set the width of int (and long accordingly)
  --LP64, --ILP64, --LLP64, --ILP32, --LP32
                               data model presets for int/long widths
  --little-endian              order bytes least significant first
  --big-endian                 order bytes most significant first
  --unsigned-char              make char unsigned by default
  --no-library                 do not add built-in library models

Analysis options:
  --bounds-check               add array bounds checks
  --signed-overflow-check      add signed arithmetic overflow checks
  --unsigned-overflow-check    add unsigned arithmetic wrap-around checks
  --div-by-zero-check          add division-by-zero checks
  --undefined-shift-check      add undefined-shift checks
  --conversion-check           add lossy type-conversion checks

Unwinding options:
  --unwind n                   unwind every loop at most n times
  --unwindset f.k:n,...        per-loop unwinding bounds
  --unwinding-assertions       assert that the bounds are sufficient
  --partial-loops              allow paths through partially unwound loops
  --depth n                    stop paths after n steps
  --no-assumptions             ignore user assumptions

Test-suite generation:
  --cover criterion            generate tests (location, branch, condition,
                               mcdc, cover)

Output options:
  --show-parse-tree            dump the parse tree and exit
  --show-symbol-table          dump the symbol table and exit
  --show-goto-functions        dump the GOTO program and exit
  --show-loop-ids              dump loop identifiers and exit
  --show-properties            dump the instrumented properties and exit
  --show-vcc                   dump the verification conditions and exit
  --dimacs                     dump the CNF in DIMACS format and exit
  --trace                      print a counterexample trace per failure
  --json-ui                    report in JSON
  --xml-ui                     report in XML
  --verbosity n                verbosity level, 0-9 (default: 6)

Miscellaneous:
  -h, -?, --help               show this help
  --version                    show version and exit
"""

# dialect presets from other platforms: accepted so scripts don't break,
# but they change nothing here
IGNORED_FLAGS = ("--i386-win32", "--i386-macos", "--i386-linux",
                 "--ppc-macos", "--win32", "--winx64", "--gcc")

CHECK_FLAGS = {
    "--bounds-check": "bounds_check",
    "--signed-overflow-check": "signed_overflow_check",
    "--unsigned-overflow-check": "unsigned_overflow_check",
    "--div-by-zero-check": "div_by_zero_check",
    "--undefined-shift-check": "undefined_shift_check",
    "--conversion-check": "conversion_check",
}

DATA_MODELS = {  # flag -> (int width, long width)
    "--16": (16, 32),
    "--32": (32, 32),
    "--64": (32, 64),
    "--LP64": (32, 64),
    "--ILP64": (64, 64),
    "--LLP64": (32, 32),
    "--ILP32": (32, 32),
    "--LP32": (16, 32),
}

DUMP_FLAGS = {
    "--show-parse-tree": "parse_tree",
    "--show-symbol-table": "symbol_table",
    "--show-goto-functions": "goto_functions",
    "--show-loop-ids": "loop_ids",
    "--show-properties": "properties",
    "--show-vcc": "vcc",
    "--dimacs": "dimacs",
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    sources: list = field(default_factory=list)
    entry: str = "main"
    platform: PlatformConfig = field(default_factory=PlatformConfig)
    checks: CheckOptions = field(default_factory=CheckOptions)
    unwind: UnwindPolicy = field(default_factory=UnwindPolicy)
    dumps: set = field(default_factory=set)
    ui: str = "plain"
    trace: bool = False
    cover: str | None = None
    verbosity: int = 6
    defines: list = field(default_factory=list)
    include_paths: list = field(default_factory=list)
    library: bool = True
    warnings: list = field(default_factory=list)


def _parse_unwindset(text, policy):
    for part in text.split(","):
        if not part:
            continue
        name, sep, bound = part.partition(":")
        if not sep or not bound.isdigit() or "." not in name:
            raise UsageError(f"invalid unwindset entry `{part}'")
        policy.per_loop[name] = int(bound)


def parse_args(argv) -> RunConfig:
    """Raises UsageError for anything malformed; SystemExit(0) for --help
    and --version."""
    config = RunConfig()
    args = list(argv)
    i = 0

    def value(flag):
        nonlocal i
        i += 1
        if i >= len(args):
            raise UsageError(f"option {flag} requires an argument")
        return args[i]

    def number(flag):
        v = value(flag)
        if not v.isdigit():
            raise UsageError(f"option {flag} expects a number, got `{v}'")
        return int(v)

    while i < len(args):
        arg = args[i]
        if arg in ("-h", "-?", "--help"):
            print(USAGE, end="")
            raise SystemExit(EXIT_SUCCESS)
        elif arg == "--version":
            print(__version__)
            raise SystemExit(EXIT_SUCCESS)
        elif arg == "--function":
            config.entry = value(arg)
        elif arg == "-I":
            config.include_paths.append(value(arg))
        elif arg.startswith("-I") and len(arg) > 2:
            config.include_paths.append(arg[2:])
        elif arg == "-D":
            config.defines.append(parse_define_option(value(arg)))
        elif arg.startswith("-D") and len(arg) > 2:
            config.defines.append(parse_define_option(arg[2:]))
        elif arg in DATA_MODELS:
            iw, lw = DATA_MODELS[arg]
            config.platform = replace(config.platform, int_width=iw,
                                      long_width=lw)
        elif arg == "--little-endian":
            config.platform = replace(config.platform, endianness="little")
        elif arg == "--big-endian":
            config.platform = replace(config.platform, endianness="big")
        elif arg == "--unsigned-char":
            config.platform = replace(config.platform, char_signed=False)
        elif arg in CHECK_FLAGS:
            setattr(config.checks, CHECK_FLAGS[arg], True)
        elif arg == "--unwind":
            config.unwind.global_bound = number(arg)
        elif arg == "--unwindset":
            _parse_unwindset(value(arg), config.unwind)
        elif arg == "--unwinding-assertions":
            config.unwind.mode = "assertions"
        elif arg == "--partial-loops":
            config.unwind.mode = "partial_loops"
        elif arg == "--depth":
            config.unwind.depth = number(arg)
        elif arg == "--no-assumptions":
            config.unwind.no_assumptions = True
        elif arg in DUMP_FLAGS:
            config.dumps.add(DUMP_FLAGS[arg])
        elif arg == "--trace":
            config.trace = True
        elif arg == "--cover":
            criterion = value(arg)
            if criterion not in CRITERIA:
                raise UsageError(f"unknown coverage criterion `{criterion}'")
            config.cover = criterion
        elif arg in ("--json-ui", "--json-interface"):
            config.ui = "json"
        elif arg in ("--xml-ui", "--xml-interface"):
            config.ui = "xml"
        elif arg == "--verbosity":
            config.verbosity = number(arg)
        elif arg == "--no-library":
            config.library = False
        elif arg in IGNORED_FLAGS:
            config.warnings.append(f"warning: option {arg} has no effect")
        elif arg.startswith("-") and arg != "-":
            raise UsageError(f"unknown option `{arg}'")
        else:
            config.sources.append(arg)
        i += 1

    if not config.sources:
        raise UsageError("no input files")
    if config.cover and config.unwind.mode == "assertions":
        raise UsageError(
            "--cover and --unwinding-assertions are mutually exclusive")
    if config.cover and config.unwind.mode == "partial_loops":
        raise UsageError("--cover and --partial-loops are mutually exclusive")
    return config


# -- pipeline ---------------------------------------------------------------
def _base_name(path):
    name = path.rsplit("/", 1)[-1]
    return name.rsplit(".", 1)[0]


def build_model(config, status):
    """Front end for all sources, linked into one instrumented model."""
    models = []
    for src_path in config.sources:
        if src_path.endswith(".gb"):
            status(f"Reading GOTO program from {src_path}")
            models.append(binary.read_model(src_path))
            continue
        status(f"Parsing {src_path}")
        with open(src_path) as f:
            source = f.read()
        unit = parse_translation_unit(source, src_path,
                                      defines=config.defines,
                                      include_paths=config.include_paths)
        if "parse_tree" in config.dumps:
            print(unit.dump())
            raise SystemExit(EXIT_SUCCESS)
        status("Converting")
        status(f"Type-checking {_base_name(src_path)}")
        program = typecheck(unit, config.platform, library=config.library)
        if "symbol_table" in config.dumps:
            print(program.dump_symbol_table())
            raise SystemExit(EXIT_SUCCESS)
        models.append(convert_to_goto(program))
    status("Generating GOTO Program")
    model = models[0] if len(models) == 1 else binary.link(models)
    if config.library:
        status("Adding CPROVER library")
    status("Removal of function pointers and virtual functions")
    remove_function_pointers(model)
    remove_returns(model)
    if config.entry not in model.functions:
        raise ConfigurationError(
            f"the entry point `{config.entry}' was not found")
    build_entry_harness(model, config.entry, config.platform)
    status("Generic Property Instrumentation")
    generate_checks(model, config.checks, config.platform)
    return model


def _strip_cover_asserts(model):
    """User __CPROVER_cover markers are goals, not assertions: outside cover
    mode they must not show up as properties."""
    from .goto import ir
    for fn in model.functions.values():
        for i, ins in enumerate(fn.body):
            if ins.kind == "ASSERT" and ins.property_class == "cover":
                fn.body[i] = ir.Instr("SKIP", loc=ins.loc)


def run(config: RunConfig) -> int:
    def status(msg):
        if config.verbosity >= 6:
            print(msg)

    def warn(msg):
        if config.verbosity >= 2:
            print(msg, file=sys.stderr)

    for w in config.warnings:
        warn(w)
    status(f"minibmc version {__version__}")
    model = build_model(config, status)

    goals = None
    if config.cover:
        goals = instrument_goals(model, config.cover, config.platform)
    else:
        _strip_cover_asserts(model)

    if "goto_functions" in config.dumps:
        print(print_model(model, config.platform))
        return EXIT_SUCCESS
    if "loop_ids" in config.dumps:
        print(print_loop_ids(model, config.platform))
        return EXIT_SUCCESS
    if "properties" in config.dumps:
        props = enumerate_properties(model, config.platform)
        print(show_properties(props, config.platform))
        return EXIT_SUCCESS

    status("Starting Bounded Model Checking")

    if config.cover:
        def log(eq):
            status(f"size of program expression: {eq.size_steps} steps")
        suite = generate_tests(model, goals, config.unwind, config.platform,
                               log=log)
        if config.ui == "json":
            print(json.dumps(suite_record(suite), indent=2))
        else:
            print(render_suite(suite, config.platform))
        return EXIT_SUCCESS

    eq = symex(model, config.unwind)
    status(f"size of program expression: {eq.size_steps} steps")
    if "vcc" in config.dumps:
        print(print_vcc(eq, config.platform))
        return EXIT_SUCCESS
    status(f"simple slicing removed {eq.sliced_assignments} assignments")
    status(f"Generated {eq.vcc_before} VCC(s), {eq.vcc_after} remaining "
           "after simplification")
    if eq.unreachable_assertions:
        warn(f"warning: {eq.unreachable_assertions} assertion(s) are "
             "unreachable under the given assumptions")

    if eq.vcc_after == 0:
        # nothing to decide: every obligation simplified away
        result = decide_properties(eq, None, None)
        traces = {}
        if not any(p for p in result.properties):
            print("VERIFICATION SUCCESSFUL")
            return EXIT_SUCCESS
    else:
        status("Passing problem to propositional reduction")
        status("converting SSA")
        status("Running propositional reduction")
        formula, varmap, _builder = bitblast(eq)
        status("Post-processing")
        if "dimacs" in config.dumps:
            print(emit_dimacs(formula, varmap))
            return EXIT_SUCCESS
        status("Solving with minibmc CDCL core")
        status(f"{formula.variable_count} variables, "
               f"{len(formula.clauses)} clauses")
        solver = Solver()
        while solver.nvars < formula.variable_count:
            solver.new_var()
        for clause in formula.clauses:
            solver.add_clause(clause)
        start = time.perf_counter()
        result = decide_properties(eq, varmap, solver)
        elapsed = time.perf_counter() - start
        verdict = SATISFIABLE if result.failed_count else UNSATISFIABLE
        status(f"SAT checker: instance is {verdict}")
        status(f"Runtime decision procedure: {elapsed:.6g}s")
        traces = {}
        if config.trace:
            for p in result.properties:
                if p.status == "FAILURE":
                    traces[p.id] = build_trace(result.models[p.id], eq,
                                               varmap, p, config.platform)

    print()
    print(report(result, traces, config.ui, config.platform))
    return result.exit_code


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        config = parse_args(argv)
    except UsageError as exc:
        print(f"minibmc: error: {exc}", file=sys.stderr)
        print(USAGE, end="", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    try:
        raise SystemExit(run(config))
    except (FrontendError, ConfigurationError, binary.LinkError,
            OSError) as exc:
        print(f"minibmc: error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    except UnwindingFailure as exc:
        print(f"minibmc: error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_INTERNAL)
    except InternalError as exc:
        print(f"minibmc: internal error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_INTERNAL)


# -- goto-cc style model compiler and linker --------------------------------
CC_USAGE = "Usage: minibmc-cc [-o out.gb] [-I path] [-D macro] file.c\n"
LINK_USAGE = "Usage: minibmc-link -o out.gb file.gb ...\n"


def cc_main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    out = None
    defines, includes, sources = [], [], []
    i = 0
    try:
        while i < len(argv):
            arg = argv[i]
            if arg in ("-h", "--help"):
                print(CC_USAGE, end="")
                raise SystemExit(EXIT_SUCCESS)
            elif arg == "-o":
                i += 1
                if i >= len(argv):
                    raise UsageError("option -o requires an argument")
                out = argv[i]
            elif arg == "-D":
                i += 1
                if i >= len(argv):
                    raise UsageError("option -D requires an argument")
                defines.append(parse_define_option(argv[i]))
            elif arg.startswith("-D") and len(arg) > 2:
                defines.append(parse_define_option(arg[2:]))
            elif arg == "-I":
                i += 1
                if i >= len(argv):
                    raise UsageError("option -I requires an argument")
                includes.append(argv[i])
            elif arg.startswith("-I") and len(arg) > 2:
                includes.append(arg[2:])
            elif arg.startswith("-"):
                raise UsageError(f"unknown option `{arg}'")
            else:
                sources.append(arg)
            i += 1
        if len(sources) != 1:
            raise UsageError("exactly one source file expected")
    except UsageError as exc:
        print(f"minibmc-cc: error: {exc}", file=sys.stderr)
        print(CC_USAGE, end="", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    src_path = sources[0]
    out = out or _base_name(src_path) + ".gb"
    platform = PlatformConfig()
    try:
        with open(src_path) as f:
            source = f.read()
        unit = parse_translation_unit(source, src_path, defines=defines,
                                      include_paths=includes)
        program = typecheck(unit, platform)
        model = convert_to_goto(program)
        binary.write_model(model, out)
    except (FrontendError, ConfigurationError, OSError) as exc:
        print(f"minibmc-cc: error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    raise SystemExit(EXIT_SUCCESS)


def link_main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    out = None
    inputs = []
    i = 0
    try:
        while i < len(argv):
            arg = argv[i]
            if arg in ("-h", "--help"):
                print(LINK_USAGE, end="")
                raise SystemExit(EXIT_SUCCESS)
            elif arg == "-o":
                i += 1
                if i >= len(argv):
                    raise UsageError("option -o requires an argument")
                out = argv[i]
            elif arg.startswith("-"):
                raise UsageError(f"unknown option `{arg}'")
            else:
                inputs.append(arg)
            i += 1
        if not inputs:
            raise UsageError("no input files")
        if out is None:
            raise UsageError("an output file (-o) is required")
    except UsageError as exc:
        print(f"minibmc-link: error: {exc}", file=sys.stderr)
        print(LINK_USAGE, end="", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    try:
        models = [binary.read_model(p) for p in inputs]
        binary.write_model(binary.link(models), out)
    except (binary.LinkError, OSError) as exc:
        print(f"minibmc-link: error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    raise SystemExit(EXIT_SUCCESS)
