"""Differential testing: the SAT-based verdict on randomly generated
programs must agree with exhaustive enumeration in the interpreter, and
counterexamples must replay concretely."""

import random

from conftest import build_model, verify
from minibmc import interp
from minibmc.lang import PlatformConfig
from minibmc.results import build_trace
from minibmc.symex import UnwindPolicy

DOMAIN = 16  # inputs range over [0, 16)
N_PROGRAMS = 60

ARITH_OPS = ["+", "-", "*", "&", "|", "^"]
CMP_OPS = ["<", "<=", ">", ">=", "==", "!="]


class Gen:
    def __init__(self, seed):
        self.rng = random.Random(seed)
        self.vars = ["a", "b"]

    def expr(self, depth=2):
        r = self.rng
        if depth == 0 or r.random() < 0.3:
            if r.random() < 0.5:
                return r.choice(self.vars)
            return str(r.randrange(0, DOMAIN))
        op = r.choice(ARITH_OPS)
        return f"({self.expr(depth - 1)} {op} {self.expr(depth - 1)})"

    def cond(self, depth=1):
        r = self.rng
        left = self.expr(depth)
        right = self.expr(depth)
        c = f"{left} {r.choice(CMP_OPS)} {right}"
        if depth and r.random() < 0.3:
            c = f"({c}) {r.choice(['&&', '||'])} ({self.cond(0)})"
        return c

    def program(self):
        r = self.rng
        body = []
        for name in ("c", "d"):
            body.append(f"  int {name} = {self.expr()};")
            self.vars.append(name)
        if r.random() < 0.7:
            tgt = r.choice(self.vars[2:])
            body.append(f"  if ({self.cond()})")
            body.append(f"    {tgt} = {self.expr()};")
            if r.random() < 0.5:
                body.append("  else")
                body.append(f"    {tgt} = {self.expr()};")
        if r.random() < 0.6:
            bound = r.randrange(1, 4)  # at most 3 iterations
            acc = r.choice(self.vars[2:])
            body.append(f"  for (int i = 0; i < {bound}; i = i + 1)")
            body.append(f"    {acc} = {acc} {r.choice(ARITH_OPS)} "
                        f"{self.expr(1)};")
        assertion = self.cond()
        lines = ["int f(int a, int b)", "{",
                 f"  __CPROVER_assume(a >= 0 && a < {DOMAIN});",
                 f"  __CPROVER_assume(b >= 0 && b < {DOMAIN});"]
        lines += body
        lines.append(f"  assert({assertion});")
        lines.append("  return 0;")
        lines.append("}")
        return "\n".join(lines)


def oracle_verdict(model):
    """Exhaustively run every in-domain input pair; True means some run
    violates the assertion."""
    found = None
    for choices, result in interp.enumerate_runs(
            model, lambda typ: range(DOMAIN),
            decl_chooser=lambda typ: 0):
        if result.stopped_by_assume:
            continue
        for kind, pid, holds in result.events:
            if kind == "ASSERT" and not holds:
                found = choices
                return True, found
    return False, found


def replay_fails(model, values):
    vals = list(values)
    result = interp.run(model, lambda typ: vals.pop(0) if vals else 0,
                        decl_chooser=lambda typ: 0)
    return any(kind == "ASSERT" and not holds
               for kind, pid, holds in result.events)


def test_random_programs_agree_with_enumeration():
    mismatches = []
    for seed in range(N_PROGRAMS):
        src = Gen(seed).program()
        result, eq, varmap = verify(src, entry="f",
                                    policy=UnwindPolicy(global_bound=8))
        prop = result.properties[0]
        model, _ = build_model(src, entry="f")
        expected_fail, _witness = oracle_verdict(model)
        got_fail = prop.status == "FAILURE"
        if got_fail != expected_fail:
            mismatches.append((seed, prop.status, expected_fail, src))
            continue
        if got_fail:
            trace = build_trace(result.models[prop.id], eq, varmap, prop,
                                PlatformConfig())
            inputs = [s for s in trace.steps if s.kind == "input"]
            values = [int(s.text.split(": ")[1].split(" ")[0])
                      for s in inputs]
            assert len(values) == 2, (seed, [s.text for s in inputs])
            assert replay_fails(model, values), (seed, values, src)
    assert not mismatches, mismatches[0]
