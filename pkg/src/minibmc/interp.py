"""Reference concrete interpreter for GOTO models.

Executes a model for one choice of nondeterministic values and records the
observable behaviour: INPUT/OUTPUT events, assertion verdicts, and whether an
assumption stopped the run.  Used as the ground-truth oracle in differential
tests against symbolic execution; its corner-case semantics (nondeterministic
uninitialised declarations, division by zero yielding zero, out-of-range
shifts, no-op out-of-bounds stores) deliberately mirror the bit-level
encoder.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import arith, lang
from .goto import ir
from .lang import Expr, InternalError


class StepLimit(Exception):
    pass


@dataclass
class RunResult:
    events: list = field(default_factory=list)
    # events: ("INPUT"|"OUTPUT", name, tuple of values)
    #         ("ASSERT", property_id, holds: bool)
    stopped_by_assume: bool = False
    steps: int = 0

    @property
    def failed_properties(self):
        return [e[1] for e in self.events if e[0] == "ASSERT" and not e[2]]

    @property
    def io(self):
        return [e for e in self.events if e[0] in ("INPUT", "OUTPUT")]


def zero_of(typ):
    if typ.kind == "array":
        return [zero_of(typ.element) for _ in range(typ.size)]
    return 0


class Interpreter:
    def __init__(self, model: ir.GotoModel, chooser, max_steps=200000,
                 decl_chooser=None):
        self.model = model
        self.chooser = chooser          # callable(CType) -> int
        # uninitialised declarations can be resolved separately, which lets a
        # test replayer feed recorded values to explicit nondet reads only
        self.decl_chooser = decl_chooser or chooser
        self.max_steps = max_steps
        self.env = {}
        self.result = RunResult()

    def nondet_of(self, typ, chooser=None):
        chooser = chooser or self.chooser
        if typ.kind == "array":
            return [self.nondet_of(typ.element, chooser)
                    for _ in range(typ.size)]
        return arith.wrap(chooser(typ), typ)

    # -- expression evaluation --------------------------------------------
    def eval(self, e: Expr):
        kind = e.kind
        if kind == "const":
            return e.value
        if kind == "symbol":
            if e.name not in self.env:
                self.env[e.name] = zero_of(e.typ)
            return self.env[e.name]
        if kind == "nondet":
            return self.nondet_of(e.typ)
        if kind == "unary":
            return arith.eval_unary(e.op, self.eval(e.ops[0]), e.typ)
        if kind == "binary":
            a = self.eval(e.ops[0])
            if e.op == "and":
                return 1 if (a and self.eval(e.ops[1])) else 0
            if e.op == "or":
                return 1 if (a or self.eval(e.ops[1])) else 0
            return arith.eval_binary(e.op, a, self.eval(e.ops[1]), e.typ)
        if kind == "typecast":
            return arith.eval_cast(self.eval(e.ops[0]), e.ops[0].typ, e.typ)
        if kind == "ite":
            return self.eval(e.ops[1] if self.eval(e.ops[0]) else e.ops[2])
        if kind == "index":
            base = self.eval(e.ops[0])
            idx = self.eval(e.ops[1])
            if 0 <= idx < len(base):
                return base[idx]
            return zero_of(e.typ)
        if kind == "store":
            base = list(self.eval(e.ops[0]))
            idx = self.eval(e.ops[1])
            if 0 <= idx < len(base):
                base[idx] = self.eval(e.ops[2])
            return base
        if kind == "array":
            return [self.eval(op) for op in e.ops]
        if kind == "addr_of":
            return e.name
        raise InternalError(f"cannot evaluate {kind} expression")

    # -- execution ---------------------------------------------------------
    def assign_to(self, lhs: Expr, value):
        if lhs.kind == "symbol":
            self.env[lhs.name] = value
            return
        if lhs.kind == "index":
            base_name = lhs.ops[0].name
            arr = self.env.setdefault(base_name, zero_of(lhs.ops[0].typ))
            idx = self.eval(lhs.ops[1])
            if 0 <= idx < len(arr):
                arr = list(arr)
                arr[idx] = value
                self.env[base_name] = arr
            return
        raise InternalError(f"cannot assign to {lhs.kind}")

    def run_function(self, name, args=()):
        fn = self.model.functions[name]
        for pname, val in zip(fn.parameters, args):
            self.env[pname] = val
        pc = 0
        body = fn.body
        while pc < len(body):
            self.result.steps += 1
            if self.result.steps > self.max_steps:
                raise StepLimit(f"step limit exceeded in {name}")
            instr = body[pc]
            kind = instr.kind
            if kind == "END_FUNCTION":
                return True
            if kind == "DECL":
                self.env[instr.lhs.name] = \
                    self.nondet_of(instr.lhs.typ, self.decl_chooser)
            elif kind == "DEAD":
                pass
            elif kind == "ASSIGN":
                self.assign_to(instr.lhs, self.eval(instr.rhs))
            elif kind == "GOTO":
                if self.eval(instr.guard):
                    pc = instr.target
                    continue
            elif kind == "ASSUME":
                if not self.eval(instr.guard):
                    self.result.stopped_by_assume = True
                    return False
            elif kind == "ASSERT":
                holds = bool(self.eval(instr.guard))
                self.result.events.append(
                    ("ASSERT", instr.property_id or instr.property_description,
                     holds))
            elif kind == "FUNCTION_CALL":
                callee = instr.func
                if instr.callee is not None:
                    callee = self.eval(instr.callee)
                argv = [self.eval(a) for a in instr.args]
                if callee not in self.model.functions:
                    raise InternalError(f"call to undefined function {callee}")
                if not self.run_function(callee, argv):
                    return False
            elif kind in ("INPUT", "OUTPUT"):
                values = tuple(self.eval(a) for a in instr.args)
                self.result.events.append((kind, instr.io_name, values))
            elif kind == "SKIP":
                pass
            else:
                raise InternalError(f"cannot interpret {kind}")
            pc += 1
        return True


def run(model: ir.GotoModel, chooser, max_steps=200000,
        decl_chooser=None) -> RunResult:
    it = Interpreter(model, chooser, max_steps, decl_chooser)
    it.run_function(model.entry or "main")
    return it.result


def enumerate_runs(model: ir.GotoModel, domain_of, max_runs=1 << 20,
                   max_steps=200000, decl_chooser=None):
    """Depth-first enumeration over all nondet choices.

    domain_of(typ) yields the candidate values for one nondet read.  Yields
    (choices, RunResult) pairs; raises StepLimit if a single run diverges.
    When decl_chooser is given it resolves uninitialised declarations outside
    the enumeration, keeping the search space to the explicit nondet reads.
    """
    trail = []  # chosen (value, iterator-position) per nondet read

    runs = 0
    while runs < max_runs:
        position = 0
        choices = []

        def chooser(typ):
            nonlocal position
            if position < len(trail):
                value = trail[position][1][trail[position][0]]
            else:
                dom = list(domain_of(typ))
                trail.append([0, dom])
                value = dom[0]
            choices.append(value)
            position += 1
            return value

        result = run(model, chooser, max_steps, decl_chooser)
        runs += 1
        yield tuple(choices), result
        # advance the trail like an odometer (DFS backtrack)
        del trail[position:]
        while trail and trail[-1][0] + 1 >= len(trail[-1][1]):
            trail.pop()
        if not trail:
            return
        trail[-1][0] += 1
