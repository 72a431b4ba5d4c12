"""Trace construction, report rendering, and property bookkeeping."""

import json
from xml.etree import ElementTree as ET

from conftest import build_model, corpus_path, run_cli, statuses, verify
from minibmc.encode import bitblast
from minibmc.instrument import CheckOptions
from minibmc.lang import PlatformConfig, signedbv
from minibmc.results import build_trace, decide_properties, render_trace, \
    render_value, report, sorted_for_report
from minibmc.satcore import Solver
from minibmc.symex import UnwindPolicy, symex

PLATFORM = PlatformConfig()


def failing_trace(source, entry="main", checks=None, prop_id=None,
                  bound=None):
    policy = UnwindPolicy(global_bound=bound) if bound else UnwindPolicy()
    result, eq, varmap = verify(source, entry=entry, checks=checks,
                                policy=policy)
    prop = next(p for p in result.properties
                if p.status == "FAILURE"
                and (prop_id is None or p.id == prop_id))
    model = result.models[prop.id]
    return build_trace(model, eq, varmap, prop, PLATFORM), prop


def test_render_value_formats():
    int32 = signedbv(32, "signed int")
    assert render_value(-2147483648, int32) == \
        "-2147483648 (10000000 00000000 00000000 00000000)"
    assert render_value(5, int32) == \
        "5 (00000000 00000000 00000000 00000101)"


def test_abs_trace_matches_expected_shape():
    trace, prop = failing_trace(
        "abs.c", entry="abs",
        checks=CheckOptions(signed_overflow_check=True))
    assert prop.id == "abs.overflow.1"
    assert prop.description == "arithmetic overflow on signed unary minus in -x"
    texts = [s.text for s in trace.steps]
    assert texts == [
        "INPUT x: -2147483648 (10000000 00000000 00000000 00000000)",
        "x=-2147483648 (10000000 00000000 00000000 00000000)",
        "y=0 (00000000 00000000 00000000 00000000)",
        "y=-2147483648 (10000000 00000000 00000000 00000000)",
    ]
    assert trace.violated_cond == "!(x == -2147483648)"
    # state numbers strictly increase
    numbers = [s.state_number for s in trace.steps]
    assert numbers == sorted(numbers) and len(set(numbers)) == len(numbers)


def test_trace_violated_block_rendering():
    trace, _ = failing_trace(
        "abs.c", entry="abs",
        checks=CheckOptions(signed_overflow_check=True))
    text = render_trace(trace, PLATFORM)
    assert "Violated property:" in text
    assert "file abs.c line 5 function abs" in text
    assert text.count("-" * 52) == len(trace.steps)


def test_login_trace_shows_index_and_stores():
    trace, prop = failing_trace(
        "login.c", checks=CheckOptions(bounds_check=True),
        prop_id="main.array_bounds.2", bound=20)
    texts = [s.text for s in trace.steps]
    assert any(t.startswith("index=16 ") for t in texts)
    assert any(t.startswith("buffer[15]=") for t in texts)
    assert trace.violated_cond == "!((signed long int)index >= 16l)"


def test_non_retroactive_assumption():
    """An assumption placed after an assertion must not rescue it, while the
    same assumption before the assertion does."""
    before = """
int nondet_int();
int main() {
  int x = nondet_int();
  __CPROVER_assume(x > 10);
  assert(x > 0);
  return 0;
}
"""
    after = """
int nondet_int();
int main() {
  int x = nondet_int();
  assert(x > 0);
  __CPROVER_assume(x > 10);
  return 0;
}
"""
    r1, _, _ = verify(before)
    r2, _, _ = verify(after)
    assert statuses(r1)["main.assertion.1"] == "SUCCESS"
    assert statuses(r2)["main.assertion.1"] == "FAILURE"


def test_solver_iterations_count_final_unsat():
    model, _ = build_model("abs.c", entry="abs",
                          checks=CheckOptions(signed_overflow_check=True))
    eq = symex(model, UnwindPolicy())
    formula, varmap, _ = bitblast(eq)
    solver = Solver()
    while solver.nvars < formula.variable_count:
        solver.new_var()
    for clause in formula.clauses:
        solver.add_clause(clause)
    result = decide_properties(eq, varmap, solver)
    assert result.solver_iterations == 2
    assert result.failed_count == 1


def test_report_ordering_by_location():
    src = """
int nondet_int();
int main() {
  int a = nondet_int();
  assert(a != 1);
  assert(a != 2);
  assert(a != 3);
  return 0;
}
"""
    result, _, _ = verify(src)
    ordered = sorted_for_report(result.properties)
    lines = [p.loc.line for p in ordered]
    assert lines == sorted(lines)


def test_report_plain_summary_lines():
    result, _, _ = verify("lock.c", policy=UnwindPolicy(global_bound=2))
    text = report(result, ui="plain", config=PLATFORM)
    assert "** Results:" in text
    assert "** 1 of 2 failed (2 iterations)" in text
    assert "VERIFICATION FAILED" in text


def test_report_json_roundtrips():
    result, _, _ = verify("lock.c", policy=UnwindPolicy(global_bound=2))
    record = json.loads(report(result, ui="json", config=PLATFORM))
    props = {p["id"]: p["status"] for p in record["properties"]}
    assert props == {"lock.assertion.1": "SUCCESS",
                     "unlock.assertion.1": "FAILURE"}
    assert record["verification"] == "FAILED"


def test_report_xml_wellformed():
    result, _, _ = verify("lock.c", policy=UnwindPolicy(global_bound=2))
    root = ET.fromstring(report(result, ui="xml", config=PLATFORM))
    props = root.findall("property")
    got = {(p.get("id"), p.get("status")) for p in props}
    assert got == {("lock.assertion.1", "SUCCESS"),
                   ("unlock.assertion.1", "FAILURE")}
    assert root.find("summary").get("verification") == "FAILED"


def test_cli_trace_output_includes_states():
    code, out, _ = run_cli(corpus_path("lock.c"), "--unwind", "2", "--trace")
    assert code == 10
    assert "Trace for unlock.assertion.1:" in out
    assert "State " in out and "thread 0" in out


def test_all_success_report():
    result, _, _ = verify("binsearch.c", entry="binsearch",
                          checks=CheckOptions(bounds_check=True),
                          policy=UnwindPolicy(global_bound=6,
                                              mode="assertions"))
    assert result.overall == "SUCCESSFUL"
    text = report(result, ui="plain", config=PLATFORM)
    assert "VERIFICATION SUCCESSFUL" in text
    assert "FAILURE" not in text
