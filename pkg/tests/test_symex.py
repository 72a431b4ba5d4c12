"""Symbolic execution: unwinding semantics, SSA shape, slicing, policies."""

import pytest

from conftest import build_model, statuses, verify
from minibmc.instrument import CheckOptions
from minibmc.render import render_expr
from minibmc.symex import LOOP_BUDGET, SsaEquation, UnwindPolicy, \
    UnwindingFailure, symex

LOOP_TO_N = """
int nondet_int();
int main() {
  int i = 0;
  while (i < %d) i = i + 1;
  assert(i == %d);
  return 0;
}
"""


def unwind(source, entry="main", checks=None, **policy_kw):
    model, _ = build_model(source, entry=entry, checks=checks)
    return symex(model, UnwindPolicy(**policy_kw))


def assertion_steps(eq):
    return [s for s in eq.steps if s.kind == "assertion"]


def test_abs_ssa_shape():
    """One overflow VCC guarded by the branch condition, with the merge
    picking between the two arms."""
    model, _ = build_model("abs.c", entry="abs",
                          checks=CheckOptions(signed_overflow_check=True))
    eq = symex(model, UnwindPolicy())
    assert eq.vcc_before == 1 and eq.vcc_after == 1
    (step,) = assertion_steps(eq)
    assert step.property_id == "abs.overflow.1"
    assert render_expr(step.cond) == "!(x#1 == -2147483648)"
    assert render_expr(step.guard) == "x#1 < 0"
    phis = [s for s in eq.steps
            if s.kind == "assignment" and s.rhs.kind == "ite"]
    assert any("y#" in render_expr(p.lhs) for p in phis)


def test_complete_unwinding_without_bound():
    """A concrete loop unrolls fully without any --unwind."""
    eq = unwind(LOOP_TO_N % (10, 10))
    (step,) = [s for s in assertion_steps(eq) if s.property_id]
    assert step.cond.is_true  # constant propagation discharged it


def test_concrete_loop_wrong_postcondition():
    eq = unwind(LOOP_TO_N % (10, 11))
    (step,) = assertion_steps(eq)
    assert step.cond.is_false


def test_bound_counts_backjumps():
    """A while(i < 3) loop needs bound 4: three body executions plus the
    final test that exits.  Any smaller bound leaves the cut reachable."""
    for bound in (1, 2, 3, 4):
        result, _, _ = verify(LOOP_TO_N % (3, 3),
                              policy=UnwindPolicy(global_bound=bound,
                                                  mode="assertions"))
        st = statuses(result)
        expected = "SUCCESS" if bound >= 4 else "FAILURE"
        assert st["main.unwind.0"] == expected, f"bound {bound}"


def test_unwinding_assertion_trivially_true_when_loop_exits():
    """The unwind property is still reported when the loop provably stops
    before the bound, so the report lists it as SUCCESS."""
    eq = unwind(LOOP_TO_N % (3, 3), global_bound=5, mode="assertions")
    props = dict((p.id, p.status) for _, p in eq.properties())
    assert props["main.unwind.0"] == "SUCCESS"


def test_default_mode_assumes_without_asserting():
    eq = unwind(LOOP_TO_N % (3, 3), global_bound=2)
    ids = [s.property_id for s in assertion_steps(eq)]
    assert "main.unwind.0" not in ids
    assert any(s.kind == "assumption" for s in eq.steps)


def test_partial_loops_drops_the_cut():
    """partial_loops allows leaving the loop mid-way: the postcondition
    can then be violated even though the real loop would reach it."""
    result, _, _ = verify(LOOP_TO_N % (3, 3),
                          policy=UnwindPolicy(global_bound=2,
                                              mode="partial_loops"))
    assert statuses(result)["main.assertion.1"] == "FAILURE"


def test_unwindset_overrides_global():
    src = """
int main() {
  int i = 0, j = 0;
  while (i < 3) i = i + 1;
  while (j < 5) j = j + 1;
  assert(i == 3 && j == 5);
  return 0;
}
"""
    eq = unwind(src, global_bound=4, mode="assertions",
                per_loop={"main.1": 6})
    props = dict((p.id, p.status) for _, p in eq.properties())
    # loop 0 needs 4, fits; loop 1 needs 6, per-loop bound supplies it
    assert props["main.unwind.0"] == "SUCCESS"
    assert props["main.unwind.1"] == "SUCCESS"
    assert props["main.assertion.1"] == "SUCCESS"


def test_diverging_loop_raises():
    src = """
int nondet_int();
int main() {
  int x = nondet_int();
  while (x > 0) { }
  assert(1);
  return 0;
}
"""
    with pytest.raises(UnwindingFailure) as exc:
        unwind(src)
    assert "--unwind" in str(exc.value)


def test_depth_limit_stops_emission():
    eq = unwind(LOOP_TO_N % (50, 50), depth=10)
    assert len(eq.steps) <= 10


def test_no_assumptions_skips_assumes():
    src = """
unsigned int nondet_uint();
unsigned int f() {
  unsigned int r = nondet_uint();
  __CPROVER_assume(r < 10);
  assert(r < 10);
  return r;
}
"""
    result, _, _ = verify(src, entry="f",
                          policy=UnwindPolicy(no_assumptions=True))
    assert statuses(result)["f.assertion.1"] == "FAILURE"
    result, _, _ = verify(src, entry="f")
    assert statuses(result)["f.assertion.1"] == "SUCCESS"


def test_recursion_bounded():
    src = """
int count(int n) {
  if (n <= 0) return 0;
  return count(n - 1) + 1;
}
int main() {
  assert(count(3) == 3);
  return 0;
}
"""
    eq = unwind(src)
    props = dict((p.id, p.status) for _, p in eq.properties())
    assert props["main.assertion.1"] == "SUCCESS"


def test_unbounded_recursion_with_assertions_mode():
    src = """
int nondet_int();
int count(int n) {
  if (n <= 0) return 0;
  return count(n - 1) + 1;
}
int main() {
  int x = nondet_int();
  int r = count(x);
  assert(r >= 0);
  return 0;
}
"""
    eq = unwind(src, global_bound=4, mode="assertions")
    ids = {p.id for _, p in eq.properties()}
    assert "count.unwind.recursion" in ids


def test_slicing_keeps_visible_assignments():
    src = """
int main() {
  int a = 1;
  int b = a + 1;
  int unused = 42;
  assert(b == 2);
  return 0;
}
"""
    eq = unwind(src)
    names = [s.lhs.name for s in eq.steps if s.kind == "assignment"]
    assert any("unused" in n for n in names)


def test_slicing_removes_hidden_dead_assignments():
    model, _ = build_model("abs.c", entry="abs")
    eq = symex(model, UnwindPolicy())
    # no checks instrumented: nothing to prove, harness plumbing sliced
    assert eq.vcc_before == 0
    assert eq.sliced_assignments >= 1


def test_nondet_calls_become_fresh_symbols():
    src = """
int nondet_int();
int main() {
  int a = nondet_int();
  int b = nondet_int();
  assert(a == b);
  return 0;
}
"""
    result, eq, _ = verify(src)
    assert statuses(result)["main.assertion.1"] == "FAILURE"
    assert len({n for n, _ in eq.nondets}) == len(eq.nondets)


def test_input_steps_tagged_with_iteration():
    model, _ = build_model("pid.c")
    eq = symex(model, UnwindPolicy(global_bound=6))
    iterations = [s.iteration for s in eq.steps if s.kind == "input"]
    assert sorted(set(iterations)) == [1, 2, 3, 4, 5, 6]


def test_size_counts_before_slicing():
    eq = unwind(LOOP_TO_N % (3, 3))
    assert eq.size_steps >= len(eq.steps)
    assert isinstance(eq, SsaEquation)


def test_loop_budget_is_generous():
    # a long but bounded concrete loop stays within the budget
    assert LOOP_BUDGET >= 1 << 16
    eq = unwind(LOOP_TO_N % (300, 300))
    (step,) = assertion_steps(eq)
    assert step.cond.is_true
