"""Coverage instrumentation and test suite generation."""

import itertools

from conftest import build_model
from minibmc import interp
from minibmc.cover import atoms_of, generate_tests, instrument_goals, \
    render_suite
from minibmc.symex import UnwindPolicy

AND_IF = """
int f(_Bool a, _Bool b) {
  int r = 0;
  if (a && b)
    r = 1;
  return r;
}
"""


def covered_suite(source, criterion, entry="main", bound=None):
    model, config = build_model(source, entry=entry)
    goals = instrument_goals(model, criterion, config)
    policy = UnwindPolicy(global_bound=bound) if bound else UnwindPolicy()
    suite = generate_tests(model, goals, policy, config)
    return model, goals, suite


def replay(model, test):
    """Interpret the instrumented program feeding the test's inputs in
    order; returns the set of goal ids the run reaches."""
    values = [v for _, _, v, _ in test.inputs]

    def chooser(typ):
        return values.pop(0) if values else 0

    result = interp.run(model, chooser, decl_chooser=lambda typ: 0)
    # a goal is an assertion of the negated reach condition: reaching it
    # makes the assertion evaluate false
    return {pid for kind, pid, holds in result.events
            if kind == "ASSERT" and not holds}


def test_branch_cover_two_tests_full_coverage():
    model, goals, suite = covered_suite(AND_IF, "branch", entry="f")
    assert len(goals) == 2
    assert suite.covered_count == 2
    assert len(suite.tests) == 2
    assert suite.percentage == 100.0


def test_branch_tests_replay_in_interpreter():
    model, goals, suite = covered_suite(AND_IF, "branch", entry="f")
    reached = set()
    for goal, covered_by in suite.goals:
        assert covered_by, goal.id
        for tidx in covered_by:
            assert goal.id in replay(model, suite.tests[tidx - 1]), goal.id
        reached.add(goal.id)
    assert len(reached) == 2


def test_mcdc_needs_three_tests():
    model, goals, suite = covered_suite(AND_IF, "mcdc", entry="f")
    assert suite.covered_count == len(goals)
    assert len(suite.tests) == 3
    # the three tests exhibit the classic minimal a&&b MC/DC patterns
    patterns = set()
    for t in suite.tests:
        pairs = [(n, v) for _, n, v, _ in t.inputs]
        a = next(v for n, v in pairs if "a" in n)
        b = next(v for n, v in pairs if "b" in n)
        patterns.add((bool(a), bool(b)))
    assert (True, True) in patterns
    assert (False, True) in patterns or (False, False) in patterns
    assert (True, False) in patterns


def test_mcdc_independence_by_enumeration():
    """Each atom of a && b can independently toggle the decision exactly when
    the masking condition says so; cross-check against truth-table toggling."""
    model, _ = build_model(AND_IF, entry="f")
    fn = model.functions["f"]
    decisions = [i.guard for i in fn.body
                 if i.kind == "GOTO" and i.guard is not None
                 and i.guard.kind != "const"]
    assert len(decisions) == 1
    atoms = atoms_of(decisions[0])
    assert len(atoms) == 2
    # truth-table oracle: for a && b every atom is independent somewhere
    def and2(a, b):
        return a and b
    for i in range(2):
        toggles = any(
            and2(*vals) != and2(*(v if j != i else not v
                                  for j, v in enumerate(vals)))
            for vals in itertools.product([False, True], repeat=2))
        assert toggles


def test_condition_cover_four_goals():
    _, goals, suite = covered_suite(AND_IF, "condition", entry="f")
    assert len(goals) == 4
    assert suite.covered_count == 4


def test_location_cover_labels_blocks():
    _, goals, suite = covered_suite(AND_IF, "location", entry="f")
    assert all(g.description.startswith("block ") for g in goals)
    assert suite.covered_count == len(goals)


def test_unreachable_goal_stays_failed():
    src = """
int f(int x) {
  if (x != x)
    x = 1;  /* dead */
  return x;
}
"""
    model, goals, suite = covered_suite(src, "branch", entry="f")
    by_desc = {g.description: g.covered for g, _ in suite.goals}
    assert any(not c for c in by_desc.values())
    assert any(c for c in by_desc.values())
    text = render_suite(suite)
    assert "FAILED" in text and "SATISFIED" in text


def test_goal_ids_numbered_per_function():
    model, goals, _suite = covered_suite(AND_IF, "branch", entry="f")
    assert [g.id for g in goals] == ["f.coverage.1", "f.coverage.2"]


def test_user_assertions_become_assumptions():
    """In cover mode an assert() restricts the search space instead of being
    checked, so no test drives x into the asserted-away region."""
    src = """
int f(int x) {
  assert(x > 0);
  if (x > 10)
    x = 0;
  return x;
}
"""
    model, goals, suite = covered_suite(src, "branch", entry="f")
    assert suite.covered_count == len(suite.goals)
    for t in suite.tests:
        xs = [v for _, n, v, _ in t.inputs]
        assert all(v > 0 for v in xs)


def test_pid_mcdc_over_iterations():
    model, goals, suite = covered_suite("pid.c", "mcdc", bound=6)
    assert suite.covered_count == len(goals) == 4
    assert len(suite.tests) == 3
    text = render_suite(suite)
    assert "** coverage results:" in text
    assert "(iteration 1)" in text
    assert f"** {len(goals)} of {len(goals)} covered (100.0%)" in text
    assert f"** Used {len(suite.tests)} iterations" in text


def test_render_suite_layout():
    _, _, suite = covered_suite(AND_IF, "branch", entry="f")
    text = render_suite(suite)
    lines = text.splitlines()
    assert lines[0] == "** coverage results:"
    assert "Test suite:" in lines
    assert any(line == "Test 1." for line in lines)


def test_progress_is_monotone():
    """Every generated test covers at least one previously-uncovered goal."""
    _, _, suite = covered_suite("pid.c", "condition", bound=6)
    first_hits = {}
    for goal, covered_by in suite.goals:
        for tidx in covered_by:
            first_hits.setdefault(tidx, set()).add(goal.id)
    seen = set()
    for tidx in range(1, len(suite.tests) + 1):
        fresh = first_hits.get(tidx, set()) - seen
        assert fresh, f"test {tidx} covers nothing new"
        seen |= first_hits.get(tidx, set())
