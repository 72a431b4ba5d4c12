"""Coverage-goal instrumentation and greedy test-suite generation.

In cover mode the assertion checker is turned on its head: every existing
ASSERT becomes an ASSUME (a failing assertion must not block reachability),
and reachability goals are planted as assertions of the *negated* reach
condition.  A goal is covered exactly when its "violation" indicator is
satisfiable, so the whole propositional machinery is reused unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import lang
from .goto import ir
from .lang import BOOL, Expr, FALSE, TRUE, and_, not_
from .render import render_expr

CRITERIA = ("location", "branch", "condition", "mcdc", "cover")


@dataclass
class CoverageGoal:
    id: str
    criterion: str
    description: str
    loc: object
    reach_expr: Expr
    covered: bool = False


@dataclass
class TestCase:
    # ordered (iteration, name, value, typ) tuples in trace order
    inputs: list = field(default_factory=list)

    def iterations(self):
        """iteration number -> ordered list of (name, value, typ)."""
        grouped = {}
        for it, name, value, typ in self.inputs:
            grouped.setdefault(max(it, 1), []).append((name, value, typ))
        return dict(sorted(grouped.items()))


@dataclass
class TestSuite:
    tests: list  # TestCase
    goals: list  # (CoverageGoal, covered_by test indices)

    @property
    def covered_count(self):
        return sum(1 for g, _ in self.goals if g.covered)

    @property
    def percentage(self):
        if not self.goals:
            return 100.0
        return 100.0 * self.covered_count / len(self.goals)


def _atoms(e, out):
    """Atomic boolean conditions of a decision, left to right, deduplicated."""
    if e.kind == "const":
        return
    if e.kind == "unary" and e.op == "not":
        _atoms(e.ops[0], out)
        return
    if e.kind == "binary" and e.op in ("and", "or"):
        _atoms(e.ops[0], out)
        _atoms(e.ops[1], out)
        return
    if e.kind == "ite" and e.typ.kind == "boolean":
        for op in e.ops:
            _atoms(op, out)
        return
    if all(a != e for a in out):
        out.append(e)


def atoms_of(decision):
    out = []
    _atoms(decision, out)
    return out


def _subst(e, atom, val):
    """Copy of e with every occurrence of atom replaced by the constant
    val (masking substitution)."""
    if e == atom:
        return TRUE if val else FALSE
    if not e.ops:
        return e
    ops = tuple(_subst(op, atom, val) for op in e.ops)
    if ops == e.ops:
        return e
    return Expr(e.kind, e.typ, ops=ops, op=e.op, name=e.name, value=e.value,
                loc=e.loc)


def _independence(decision, atom):
    """The atom independently affects the decision: masking every other
    condition with the model's values, flipping only this atom flips the
    outcome.  Encoded as D[atom:=T] != D[atom:=F]."""
    pos = _subst(decision, atom, True)
    neg = _subst(decision, atom, False)
    return lang.binary("!=", pos, neg, BOOL)


def _block_leaders(body):
    leaders = {0}
    for i, ins in enumerate(body):
        if ins.kind == "GOTO":
            leaders.add(ins.target)
            if i + 1 < len(body):
                leaders.add(i + 1)
    return sorted(leaders)


def _skip_function(name):
    return name.startswith("__CPROVER") or name == "getchar"


def instrument_goals(model, criterion, config=None):
    """Convert the model for cover mode in place; returns the goal list.

    Every user ASSERT becomes an ASSUME; user __CPROVER_cover markers either
    become goals (criterion "cover") or are dropped.  Goal assertions carry
    class "coverage" and assert the negation of the reach condition, so the
    goal is covered iff the assertion can be violated.
    """
    assert criterion in CRITERIA, criterion
    goals = []
    for fname in list(model.functions):
        fn = model.functions[fname]
        instrumentable = not _skip_function(fname)
        counter = 0
        pending = {}  # old index -> list of goal Instrs inserted before it

        def add_goal(at, desc, reach, loc):
            nonlocal counter
            counter += 1
            gid = f"{fname}.coverage.{counter}"
            goal = CoverageGoal(gid, criterion, desc, loc, reach)
            goals.append(goal)
            pending.setdefault(at, []).append(
                ir.Instr("ASSERT", guard=not_(reach), loc=loc,
                         property_class="coverage", property_id=gid,
                         property_description=desc))
            return goal

        body = fn.body
        if instrumentable and criterion == "location":
            block = 0
            for leader in _block_leaders(body):
                if body[leader].kind == "END_FUNCTION":
                    continue
                block += 1
                add_goal(leader, f"block {block}", TRUE, body[leader].loc)
        if instrumentable and criterion in ("branch", "condition", "mcdc"):
            for i, ins in enumerate(body):
                if ins.kind != "GOTO" or ins.guard.is_true \
                        or ins.guard.is_false:
                    continue
                decision = ins.guard
                if criterion == "branch":
                    text = render_expr(decision)
                    add_goal(i, f"branch condition {text} true", decision,
                             ins.loc)
                    add_goal(i, f"branch condition {text} false",
                             not_(decision), ins.loc)
                    continue
                for atom in atoms_of(decision):
                    text = render_expr(atom)
                    if criterion == "condition":
                        add_goal(i, f"condition {text} true", atom, ins.loc)
                        add_goal(i, f"condition {text} false", not_(atom),
                                 ins.loc)
                    else:
                        indep = _independence(decision, atom)
                        add_goal(i, f"condition {text} evaluates true "
                                 "affecting decision",
                                 and_(atom, indep), ins.loc)
                        add_goal(i, f"condition {text} evaluates false "
                                 "affecting decision",
                                 and_(not_(atom), indep), ins.loc)
        # existing properties: cover markers become goals or vanish, plain
        # asserts become assumptions
        rewritten = []
        for i, ins in enumerate(body):
            if ins.kind != "ASSERT":
                rewritten.append((i, ins))
                continue
            if ins.property_class == "cover":
                if instrumentable and criterion == "cover":
                    add_goal(i, ins.property_description,
                             not_(ins.guard), ins.loc)
                rewritten.append((i, ir.Instr("SKIP", loc=ins.loc)))
            else:
                rewritten.append((i, ir.assume(ins.guard, ins.loc)))
        # splice the pending goal assertions in and remap goto targets onto
        # the first instruction now standing at the old index
        new_body = []
        new_index = {}
        for old, ins in rewritten:
            for g in pending.get(old, ()):
                if old not in new_index:
                    new_index[old] = len(new_body)
                new_body.append(g)
            if old not in new_index:
                new_index[old] = len(new_body)
            new_body.append(ins)
        for k, ins in enumerate(new_body):
            if ins.kind == "GOTO":
                new_body[k] = ins.copy(target=new_index[ins.target])
        fn.body = new_body
        fn.validate()
    return goals


def _extract_test(eq, env):
    """Pull the input values along the satisfied path out of the model."""
    test = TestCase()
    for step in eq.steps:
        if step.kind != "input":
            continue
        if not env.eval(step.guard):
            continue
        for arg in step.args:
            test.inputs.append((step.iteration, step.io_name,
                                env.eval(arg), arg.typ))
    return test


def generate_tests(model, goals, policy, config=None, log=None):
    """Greedy cover loop: repeatedly satisfy the disjunction of uncovered
    goal indicators, each model yielding one test that covers everything the
    model happens to reach.  Terminates when the disjunction is unsatisfiable;
    the leftovers are then re-checked one by one (maximality)."""
    from .encode import bitblast
    from .results import ModelEnv
    from .satcore import Solver
    from .symex import symex

    eq = symex(model, policy)
    if log:
        log(eq)
    formula, varmap, builder = bitblast(eq)
    solver = Solver()
    while solver.nvars < formula.variable_count:
        solver.new_var()
    for clause in formula.clauses:
        solver.add_clause(clause)

    # goals whose assertion never produced an indicator are unreachable
    # within the bound (guard simplified to false, or trivially false reach)
    active = [g for g in goals if g.id in varmap.indicators]
    covered_by = {g.id: [] for g in goals}
    tests = []
    uncovered = list(active)
    while uncovered:
        relay = solver.new_var()
        solver.add_clause([-relay] +
                          [varmap.indicators[g.id] for g in uncovered])
        answer = solver.solve([relay])
        if not answer.is_sat:
            break
        env = ModelEnv(answer.model, varmap)
        tests.append(_extract_test(eq, env))
        tidx = len(tests)
        hit, missed = [], []
        for g in uncovered:
            if answer.model[varmap.indicators[g.id]]:
                g.covered = True
                covered_by[g.id].append(tidx)
                hit.append(g)
            else:
                missed.append(g)
        assert hit, "satisfying model must cover a goal"
        uncovered = missed
    # maximality re-check: every goal left behind must be individually
    # unsatisfiable, not just jointly
    for g in uncovered:
        answer = solver.solve([varmap.indicators[g.id]])
        if answer.is_sat:
            env = ModelEnv(answer.model, varmap)
            tests.append(_extract_test(eq, env))
            g.covered = True
            covered_by[g.id].append(len(tests))
    return TestSuite(tests, [(g, covered_by[g.id]) for g in goals])


def _format_value(value, typ):
    if isinstance(value, list):
        return "{ " + ", ".join(str(v) for v in value) + " }"
    return str(value)


def render_suite(suite: TestSuite, config=None) -> str:
    lines = []
    lines.append("** coverage results:")
    for goal, _ in suite.goals:
        loc = goal.loc
        line = loc.line if loc else 0
        status = "SATISFIED" if goal.covered else "FAILED"
        lines.append(f"[{goal.id}] line {line} {goal.description}: {status}")
    lines.append("")
    lines.append(f"** {suite.covered_count} of {len(suite.goals)} covered "
                 f"({suite.percentage:.1f}%)")
    lines.append(f"** Used {len(suite.tests)} iterations")
    lines.append("")
    lines.append("Test suite:")
    for n, test in enumerate(suite.tests, 1):
        lines.append(f"Test {n}.")
        for it, values in test.iterations().items():
            rendered = ", ".join(f"{name}={_format_value(v, t)}"
                                 for name, v, t in values)
            lines.append(f"  (iteration {it}) {rendered}")
        if n != len(suite.tests):
            lines.append("")
    return "\n".join(lines)


def suite_record(suite: TestSuite):
    """JSON-facing structure (goal coverage maps included)."""
    return {
        "goals": [{
            "id": g.id,
            "criterion": g.criterion,
            "description": g.description,
            "file": g.loc.file if g.loc else None,
            "line": g.loc.line if g.loc else None,
            "status": "SATISFIED" if g.covered else "FAILED",
            "covered_by": witnesses,
        } for g, witnesses in suite.goals],
        "tests": [{
            "iterations": {
                str(it): {name: value for name, value, _ in values}
                for it, values in t.iterations().items()}
        } for t in suite.tests],
        "covered": suite.covered_count,
        "total": len(suite.goals),
        "percentage": suite.percentage,
    }
