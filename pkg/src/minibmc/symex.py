"""Symbolic execution: unwind loops, rename to SSA, build the verification
equation.

Execution walks each function body once, merging states at join points with
phi assignments.  Loops are unwound in place: the body is re-executed until
the path condition dies, the unwinding bound is hit, or (with no bound) a
step budget runs out.  The unwinding cut happens at the bound-th arrival at
the loop's backjump: with bound k, up to k executions of the body make it
into the equation.

Assumptions constrain only later steps; each assertion is paired with the
assumptions that precede it when encoded, so an assume can never retroactively
mask an earlier assert.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import lang
from .goto import ir
from .instrument import Property
from .lang import Expr, SourceLocation, and_, const, not_, or_, symbol
from .render import render_expr
from .simplify import simplify

LOOP_BUDGET = 1 << 16


class UnwindingFailure(Exception):
    """Automatic unwinding exhausted its budget with no user-supplied bound."""

    def __init__(self, loop_id):
        self.loop_id = loop_id
        super().__init__(
            f"unwinding of loop {loop_id} does not stop; "
            "set an unwinding bound with --unwind or --unwindset")


@dataclass
class UnwindPolicy:
    global_bound: int | None = None
    per_loop: dict = field(default_factory=dict)  # "function.number" -> bound
    depth: int | None = None
    mode: str = "assumptions"  # assumptions | assertions | partial_loops
    no_assumptions: bool = False

    def bound_for(self, function, number):
        return self.per_loop.get(f"{function}.{number}", self.global_bound)


@dataclass
class SsaStep:
    kind: str  # assignment | assumption | assertion | input | output
    guard: Expr
    lhs: Expr | None = None
    rhs: Expr | None = None
    cond: Expr | None = None
    loc: SourceLocation | None = None
    io_name: str = ""
    args: tuple = ()
    property_id: str = ""
    property_class: str = ""
    property_description: str = ""
    hidden: bool = False
    is_decl: bool = False
    iteration: int = 0
    source_cond: Expr | None = None  # assertion cond before propagation


@dataclass
class SsaEquation:
    steps: list
    nondets: list          # (ssa name, CType)
    vcc_before: int = 0
    vcc_after: int = 0
    sliced_assignments: int = 0
    size_steps: int = 0
    unreachable_assertions: int = 0

    def assertions(self):
        return [(i, s) for i, s in enumerate(self.steps)
                if s.kind == "assertion"]

    def properties(self):
        """One Property per assertion step, pre-marked when discharged."""
        props = []
        for i, s in self.assertions():
            status = "UNKNOWN"
            if s.cond.is_true or s.guard.is_false:
                status = "SUCCESS"
            props.append((i, Property(s.property_id, s.property_class,
                                      s.property_description, s.loc, s.cond,
                                      status)))
        return props


@dataclass
class State:
    guard: Expr
    env: dict  # symbol name -> SSA version


def guard_or(g1: Expr, g2: Expr) -> Expr:
    """Disjunction of path guards.  Relies on object identity of shared
    subterms so merging stays cheap on deep guard chains."""
    if g1 is g2:
        return g1
    if g1.is_true or g2.is_true:
        return lang.TRUE
    if g1.is_false:
        return g2
    if g2.is_false:
        return g1
    if _compl_ident(g1, g2):
        return lang.TRUE
    # (g && c) || (g && !c): the two sides of a branch split rejoin
    if (g1.kind == "binary" and g1.op == "and"
            and g2.kind == "binary" and g2.op == "and"
            and g1.ops[0] is g2.ops[0]
            and _compl_ident(g1.ops[1], g2.ops[1])):
        return g1.ops[0]
    return or_(g1, g2)


def _compl_ident(a: Expr, b: Expr) -> bool:
    if a.kind == "unary" and a.op == "not" and a.ops[0] is b:
        return True
    return b.kind == "unary" and b.op == "not" and b.ops[0] is a


def zero_expr(typ):
    if typ.kind == "array":
        elem = zero_expr(typ.element)
        return lang.array_expr([elem] * typ.size, typ)
    return const(0, typ)


class Executor:
    def __init__(self, model: ir.GotoModel, policy: UnwindPolicy):
        self.model = model
        self.policy = policy
        self.steps: list[SsaStep] = []
        self.nondets = []
        self.versions = {}     # name -> last version
        self.types = {}        # name -> CType
        self.values = {}       # ssa name -> constant Expr
        self.nondet_counter = 0
        self.call_stack = []
        self.iteration_stack = []
        self.depth_hit = False

    # -- ssa bookkeeping ---------------------------------------------------
    def ssa_ref(self, name, version, typ):
        if version == 0:
            return zero_expr(typ)
        ssa_name = f"{name}#{version}"
        known = self.values.get(ssa_name)
        if known is not None:
            return known
        return symbol(ssa_name, typ)

    def emit(self, step: SsaStep):
        if self.policy.depth is not None and len(self.steps) >= self.policy.depth:
            self.depth_hit = True
            return False
        step.iteration = self.iteration_stack[-1] if self.iteration_stack else 0
        self.steps.append(step)
        return True

    def assign(self, state: State, name, typ, rhs, loc, hidden=False,
               is_decl=False, simplify_rhs=True):
        self.types[name] = typ
        version = self.versions.get(name, 0) + 1
        self.versions[name] = version
        ssa_name = f"{name}#{version}"
        if simplify_rhs:
            rhs = simplify(rhs)
        if is_constant_tree(rhs):
            self.values[ssa_name] = rhs
        self.emit(SsaStep("assignment", state.guard, symbol(ssa_name, typ),
                          rhs, loc=loc, hidden=hidden, is_decl=is_decl))
        state.env[name] = version
        return version

    def rename(self, e: Expr, state: State) -> Expr:
        out = self._rename(e, state)
        return simplify(out)

    def _rename(self, e: Expr, state: State) -> Expr:
        kind = e.kind
        if kind == "symbol":
            version = state.env.get(e.name, 0)
            self.types.setdefault(e.name, e.typ)
            return self.ssa_ref(e.name, version, e.typ)
        if kind == "nondet":
            name = f"symex::nondet{self.nondet_counter}"
            self.nondet_counter += 1
            self.nondets.append((name, e.typ))
            return symbol(name, e.typ)
        if kind == "const" or not e.ops:
            return e
        ops = tuple(self._rename(op, state) for op in e.ops)
        return Expr(e.kind, e.typ, ops=ops, op=e.op, value=e.value,
                    name=e.name, loc=e.loc)

    def rename_plain(self, e: Expr, state: State) -> Expr:
        """Version renaming without constant propagation or simplification.
        Keeps the shape the user wrote for the `Violated property' report."""
        if e.kind == "symbol":
            version = state.env.get(e.name, 0)
            return symbol(f"{e.name}#{version}", e.typ, e.loc)
        if e.kind == "const" or not e.ops:
            return e
        ops = tuple(self.rename_plain(op, state) for op in e.ops)
        return Expr(e.kind, e.typ, ops=ops, op=e.op, value=e.value,
                    name=e.name, loc=e.loc)

    def merge(self, s1: State | None, s2: State | None) -> State | None:
        if s1 is None:
            return s2
        if s2 is None:
            return s1
        guard = guard_or(s1.guard, s2.guard)
        env = {}
        for name in set(s1.env) | set(s2.env):
            v1 = s1.env.get(name, 0)
            v2 = s2.env.get(name, 0)
            if v1 == v2:
                env[name] = v1
                continue
            typ = self.types[name]
            rhs = lang.ite(s1.guard, self.ssa_ref(name, v1, typ),
                           self.ssa_ref(name, v2, typ))
            merged = State(guard, env)
            self.assign(merged, name, typ, rhs, None, hidden=True,
                        simplify_rhs=False)
        return State(guard, env)

    def recursion_limit(self):
        return self.policy.global_bound or 256

    # -- instruction execution --------------------------------------------
    def exec_function(self, name, state: State) -> State | None:
        fn = self.model.functions[name]
        self.call_stack.append(name)
        if self.call_stack.count(name) > self.recursion_limit():
            # recursion unwound past its bound: cut this path
            self.call_stack.pop()
            if self.policy.mode == "assertions":
                self.emit(SsaStep("assertion", state.guard, cond=lang.FALSE,
                                  property_id=f"{name}.unwind.recursion",
                                  property_class="unwind",
                                  property_description=
                                  f"recursion unwinding assertion {name}",
                                  loc=self.model.symbol_table[name].loc))
            if self.policy.mode != "partial_loops":
                return None
            return state
        end = len(fn.body) - 1  # END_FUNCTION
        result = self.exec_range(fn, 0, end, state, self._no_escape)
        self.call_stack.pop()
        return result

    @staticmethod
    def _no_escape(target, branch_state):
        raise lang.InternalError(f"goto escapes function body (target {target})")

    def exec_range(self, fn, start, stop, state, escape) -> State | None:
        """Execute body[start:stop]; forward-goto states for targets beyond
        stop are passed to escape.  Returns the state flowing out at stop."""
        loops = {head: bj for bj, head in
                 ((i, ins.target) for i, ins in enumerate(fn.body)
                  if ins.kind == "GOTO" and ins.target is not None
                  and ins.target <= i)}
        pending = {}

        def route(target, branch_state):
            if branch_state is None:
                return
            if target > stop:
                escape(target, branch_state)
                return
            pending[target] = self.merge(pending.get(target), branch_state)

        i = start
        while True:
            if self.depth_hit:
                return None
            if i in pending:
                state = self.merge(state, pending.pop(i))
            if i >= stop:
                assert not pending, "pending states beyond range"
                return state
            if state is None:
                if pending:
                    i = min(pending)
                    state = pending.pop(i)
                    continue
                return None
            instr = fn.body[i]
            backjump = loops.get(i)
            if backjump is not None and backjump < stop and backjump >= i:
                state = self.exec_loop(fn, i, backjump, state, route)
                i = backjump + 1
                continue
            state, jump = self.exec_instr(fn, instr, state, route)
            if jump is not None:
                route(jump, state)
                state = None
            i += 1

    def exec_instr(self, fn, instr: ir.Instr, state, route):
        """Returns (state, unconditional-jump-target)."""
        kind = instr.kind
        if kind == "DECL":
            in_harness = self.call_stack and self.call_stack[-1].startswith(
                "__CPROVER")
            self.assign(state, instr.lhs.name, instr.lhs.typ,
                        self.rename(lang.nondet(instr.lhs.typ), state),
                        instr.loc, is_decl=True,
                        hidden=bool(in_harness))
            return state, None
        if kind in ("DEAD", "SKIP"):
            return state, None
        if kind == "ASSIGN":
            in_harness = self.call_stack and self.call_stack[-1].startswith(
                "__CPROVER")
            lhs = instr.lhs
            rhs = self.rename(instr.rhs, state)
            if lhs.kind == "index":
                base = lhs.ops[0]
                idx = self.rename(lhs.ops[1], state)
                old = self.rename(base, state)
                rhs = lang.store(old, idx, rhs, instr.loc)
                self.assign(state, base.name, base.typ, rhs, instr.loc,
                            hidden=bool(in_harness))
            else:
                self.assign(state, lhs.name, lhs.typ, rhs, instr.loc,
                            hidden=bool(in_harness))
            return state, None
        if kind == "GOTO":
            guard = self.rename(instr.guard, state)
            if guard.is_true:
                return state, instr.target
            if guard.is_false:
                return state, None
            taken = State(and_(state.guard, guard), dict(state.env))
            route(instr.target, taken)
            state.guard = and_(state.guard, not_(guard))
            return state, None
        if kind == "ASSUME":
            if self.policy.no_assumptions:
                return state, None
            cond = self.rename(instr.guard, state)
            self.emit(SsaStep("assumption", state.guard, cond=cond,
                              loc=instr.loc))
            if cond.is_false:
                return None, None
            return state, None
        if kind == "ASSERT":
            cond = self.rename(instr.guard, state)
            self.emit(SsaStep("assertion", state.guard, cond=cond,
                              source_cond=self.rename_plain(instr.guard,
                                                            state),
                              loc=instr.loc, property_id=instr.property_id,
                              property_class=instr.property_class,
                              property_description=instr.property_description))
            return state, None
        if kind == "FUNCTION_CALL":
            callee = self.model.functions.get(instr.func)
            if callee is None:
                raise lang.InternalError(
                    f"call to undefined function {instr.func!r}")
            for pname, arg in zip(callee.parameters, instr.args):
                psym = self.model.symbol_table[pname]
                self.assign(state, pname, psym.typ,
                            self.rename(arg, state), instr.loc,
                            simplify_rhs=False)
            return self.exec_function(instr.func, state), None
        if kind in ("INPUT", "OUTPUT"):
            args = tuple(self.rename(a, state) for a in instr.args)
            self.emit(SsaStep(kind.lower(), state.guard, io_name=instr.io_name,
                              args=args, loc=instr.loc))
            return state, None
        raise lang.InternalError(f"cannot execute {kind}")

    def exec_loop(self, fn, head, backjump, state, outer_route):
        number = fn.body[backjump].loop_number
        loop_id = f"{fn.name}.{number}"
        bound = self.policy.bound_for(fn.name, number)
        mode = self.policy.mode
        jump_instr = fn.body[backjump]
        arrivals = 0
        visits_before = len(self.steps)
        unwind_emitted = False

        def finish(st):
            outer_route(backjump + 1, st)

        def emit_unwind(guard, cond):
            nonlocal unwind_emitted
            self.emit(SsaStep(
                "assertion", guard, cond=cond, loc=jump_instr.loc,
                property_id=f"{fn.name}.unwind.{number}",
                property_class="unwind",
                property_description=f"unwinding assertion loop {number}"))
            unwind_emitted = True

        while state is not None and not self.depth_hit:
            arrivals += 1
            self.iteration_stack.append(arrivals)
            state = self.exec_range(fn, head, backjump, state, outer_route)
            self.iteration_stack.pop()
            if state is None or self.depth_hit:
                break
            jump_guard = self.rename(jump_instr.guard, state)
            if jump_guard.is_false:
                # conditional backjump not taken: plain fall-through
                finish(state)
                return None
            if bound is not None and arrivals >= bound:
                stay = not_(jump_guard)  # loop must in fact exit here
                if mode == "assertions":
                    emit_unwind(state.guard, stay)
                if mode == "partial_loops":
                    finish(state)  # fall through past the backjump, no cut
                    return None
                self.emit(SsaStep("assumption", state.guard, cond=stay,
                                  loc=jump_instr.loc))
                if not stay.is_false:
                    finish(state)
                return None
            if not jump_guard.is_true:
                fall = State(and_(state.guard, not_(jump_guard)),
                             dict(state.env))
                state.guard = and_(state.guard, jump_guard)
                finish(fall)
            if bound is None and (arrivals > LOOP_BUDGET or
                                  len(self.steps) - visits_before > LOOP_BUDGET):
                raise UnwindingFailure(loop_id)
        if mode == "assertions" and bound is not None and not unwind_emitted:
            # loop provably never re-enters past its bound; record the
            # (trivially passing) unwinding assertion so it is still reported
            emit_unwind(lang.FALSE, lang.TRUE)
        return None


def is_constant_tree(e: Expr) -> bool:
    if e.kind == "const":
        return True
    if e.kind == "array":
        return all(is_constant_tree(op) for op in e.ops)
    return False


def symex(model: ir.GotoModel, policy: UnwindPolicy) -> SsaEquation:
    ex = Executor(model, policy)
    entry = model.entry or "main"
    ex.exec_function(entry, State(lang.TRUE, {}))
    eq = SsaEquation(ex.steps, ex.nondets)
    eq.size_steps = len(eq.steps)
    eq.vcc_before = sum(1 for s in eq.steps if s.kind == "assertion")
    simplify_and_propagate(eq)
    eq.vcc_after = sum(1 for s in eq.steps if s.kind == "assertion"
                       and not (s.cond.is_true or s.guard.is_false))
    eq.unreachable_assertions = sum(
        1 for s in eq.steps if s.kind == "assertion" and s.guard.is_false)
    slice_equation(eq)
    return eq


def simplify_and_propagate(eq: SsaEquation):
    """Drop steps under a constant-false guard; fold expressions.  One memo
    cache covers the whole equation so shared guard terms are visited once."""
    cache = {}
    kept = []
    for s in eq.steps:
        s.guard = simplify(s.guard, cache)
        if s.guard.is_false and s.kind in ("assignment", "input", "output"):
            continue
        if s.cond is not None:
            s.cond = simplify(s.cond, cache)
        if s.rhs is not None:
            s.rhs = simplify(s.rhs, cache)
        kept.append(s)
    eq.steps = kept
    return eq


def slice_equation(eq: SsaEquation):
    """Remove assignments no assertion, assumption, INPUT or OUTPUT needs."""
    needed = set()
    seen = {}  # id -> node, keeps visited subterms alive

    def mark(e):
        if e is None or id(e) in seen:
            return
        seen[id(e)] = e
        if e.kind == "symbol":
            needed.add(e.name)
        for op in e.ops:
            mark(op)

    for s in eq.steps:
        if s.kind in ("assertion", "assumption"):
            mark(s.guard)
            mark(s.cond)
        elif s.kind in ("input", "output"):
            mark(s.guard)
            for a in s.args:
                mark(a)

    # walk assignments backwards so transitive needs propagate
    kept_rev = []
    removed = 0
    for s in reversed(eq.steps):
        if s.kind == "assignment":
            # visible assignments survive so counterexample traces keep the
            # values the user wrote, even when constant propagation already
            # folded them into every consumer
            if s.lhs.name not in needed and not s.is_decl and s.hidden:
                removed += 1
                continue
            mark(s.rhs)
            mark(s.guard)
        kept_rev.append(s)
    eq.steps = list(reversed(kept_rev))
    eq.sliced_assignments = removed
    eq.nondets = [(n, t) for n, t in eq.nondets if n in needed]
    return eq


def print_vcc(eq: SsaEquation, config) -> str:
    lines = ["VERIFICATION CONDITIONS:", ""]
    for index, step in eq.assertions():
        lines.append(step.property_id or "(anonymous)")
        lines.append(str(step.loc) if step.loc is not None else "no location")
        lines.append(step.property_description)
        n = 0
        for prior in eq.steps[:index]:
            if prior.kind == "assignment":
                n += 1
                lines.append(f"{{-{n}}} {render_expr(prior.lhs, config)} == "
                             f"{render_expr(prior.rhs, config)}")
            elif prior.kind == "assumption":
                n += 1
                impl = implication(prior.guard, prior.cond, config)
                lines.append(f"{{-{n}}} {impl}")
        lines.append("|--------------------------")
        lines.append(f"{{1}} {implication(step.guard, step.cond, config)}")
        lines.append("")
    return "\n".join(lines).rstrip("\n")


def implication(guard, cond, config):
    if guard.is_true:
        return render_expr(cond, config)
    return f"{render_expr(guard, config)} => {render_expr(cond, config)}"
