"""Property decision loop, counterexample traces, and report rendering."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from xml.etree import ElementTree as ET

from . import arith, lang
from .instrument import Property
from .render import render_expr

EXIT_SUCCESS = 0
EXIT_FAILED = 10
EXIT_USAGE = 1
EXIT_INTERNAL = 6


@dataclass
class TraceStep:
    state_number: int
    kind: str  # input | assignment | output
    loc: object
    name: str
    text: str  # fully rendered value line (without indentation)


@dataclass
class Trace:
    steps: list
    violated: Property
    violated_loc: object
    violated_cond: str


@dataclass
class VerificationResult:
    properties: list  # Property, statuses filled in
    solver_iterations: int = 0
    models: dict = field(default_factory=dict)  # property id -> SAT model

    @property
    def failed_count(self):
        return sum(1 for p in self.properties if p.status == "FAILURE")

    @property
    def total_count(self):
        return len(self.properties)

    @property
    def overall(self):
        return "FAILED" if self.failed_count else "SUCCESSFUL"

    @property
    def exit_code(self):
        return EXIT_FAILED if self.failed_count else EXIT_SUCCESS


def merge_properties(eq):
    """One reported Property per id, in first-occurrence order.  Discharged
    ids (every instance trivially true) come back already marked SUCCESS."""
    merged = {}
    for _, prop in eq.properties():
        seen = merged.get(prop.id)
        if seen is None:
            merged[prop.id] = prop
        elif seen.status == "SUCCESS" and prop.status == "UNKNOWN":
            # keep the id but let an undischarged instance define the verdict
            merged[prop.id] = Property(seen.id, seen.klass, seen.description,
                                       seen.loc, seen.guard_expr, "UNKNOWN")
    return list(merged.values())


def decide_properties(eq, varmap, solver) -> VerificationResult:
    """Iteratively decide every property.

    Each round solves the disjunction of still-undecided indicators behind a
    fresh relay literal; a SAT answer fails every indicator true in the model,
    an UNSAT answer proves the rest.  The final UNSAT round is counted, which
    is what makes a single-failure run report two iterations."""
    props = merge_properties(eq)
    result = VerificationResult(props)
    undecided = [p for p in props if p.status == "UNKNOWN"]
    if not undecided:
        return result
    while True:
        relay = solver.new_var()
        solver.add_clause([-relay] +
                          [varmap.indicators[p.id] for p in undecided])
        answer = solver.solve([relay])
        result.solver_iterations += 1
        if not answer.is_sat:
            for p in undecided:
                p.status = "SUCCESS"
            return result
        still = []
        for p in undecided:
            if answer.model[varmap.indicators[p.id]]:
                p.status = "FAILURE"
                result.models[p.id] = answer.model
            else:
                still.append(p)
        undecided = still


# -- model-side expression evaluation ---------------------------------------
class ModelEnv:
    def __init__(self, model, varmap):
        self.model = model
        self.varmap = varmap
        self.cache = {}

    def eval(self, e):
        hit = self.cache.get(id(e))
        if hit is not None:
            return hit[0]
        v = self._eval(e)
        self.cache[id(e)] = (v, e)
        return v

    def _eval(self, e):
        kind = e.kind
        if kind == "const":
            return e.value
        if kind == "symbol":
            return self.varmap.value_of(e.name, self.model)
        if kind in ("array", "string"):
            if kind == "string":
                return [ord(c) for c in e.name] + [0]
            return [self.eval(op) for op in e.ops]
        if kind == "ite":
            return self.eval(e.ops[1]) if self.eval(e.ops[0]) \
                else self.eval(e.ops[2])
        if kind == "typecast":
            return arith.eval_cast(self.eval(e.ops[0]), e.ops[0].typ, e.typ)
        if kind == "unary":
            return arith.eval_unary(e.op, self.eval(e.ops[0]), e.typ)
        if kind == "binary":
            if e.op == "and":
                return int(bool(self.eval(e.ops[0]))
                           and bool(self.eval(e.ops[1])))
            if e.op == "or":
                return int(bool(self.eval(e.ops[0]))
                           or bool(self.eval(e.ops[1])))
            return arith.eval_binary(e.op, self.eval(e.ops[0]),
                                     self.eval(e.ops[1]), e.typ)
        if kind == "index":
            base = self.eval(e.ops[0])
            i = self.eval(e.ops[1])
            return base[i] if 0 <= i < len(base) else 0
        if kind == "store":
            base = list(self.eval(e.ops[0]))
            i = self.eval(e.ops[1])
            if 0 <= i < len(base):
                base[i] = self.eval(e.ops[2])
            return base
        raise lang.InternalError(f"cannot evaluate {kind} in a model")


def display_name(ssa_name: str) -> str:
    base = ssa_name.split("#", 1)[0]
    return base.rsplit("::", 1)[-1]


def source_text(e, config) -> str:
    """Render an SSA expression with the versions and scopes scrubbed, giving
    source-level text for trace output."""
    text = render_expr(e, config)
    text = re.sub(r"#\d+", "", text)
    return re.sub(r"[A-Za-z_0-9$<>.-]+::", "", text)


def render_value(value, typ, config=None) -> str:
    if typ.kind == "boolean":
        return f"{int(value)} ({int(value)})"
    if typ.kind == "array":
        inner = ", ".join(str(v) for v in value)
        return f"{{ {inner} }}"
    width = typ.width
    pattern = value & ((1 << width) - 1)
    bits = format(pattern, f"0{width}b")
    if width % 8 == 0:
        grouped = " ".join(bits[i:i + 8] for i in range(0, width, 8))
    else:
        grouped = bits
    return f"{value} ({grouped})"


def build_trace(model, eq, varmap, prop: Property, config) -> Trace:
    env = ModelEnv(model, varmap)
    violated_at = None
    context = True
    for i, s in enumerate(eq.steps):
        if s.kind == "assumption":
            if env.eval(s.guard) and not env.eval(s.cond):
                context = False
            continue
        if s.kind != "assertion" or s.property_id != prop.id:
            continue
        if context and env.eval(s.guard) and not env.eval(s.cond):
            violated_at = i
            break
    if violated_at is None:
        raise lang.InternalError(f"model does not violate {prop.id}")

    steps = []
    for i, s in enumerate(eq.steps[:violated_at]):
        if s.hidden or s.kind in ("assumption", "assertion"):
            continue
        if not env.eval(s.guard):
            continue
        number = i + 1
        if s.kind == "assignment":
            name = display_name(s.lhs.name)
            rhs = s.rhs
            if rhs.kind == "store" and rhs.ops[1].is_const:
                idx = rhs.ops[1]
                elem = env.eval(rhs.ops[2])
                text = (f"{name}[{render_expr(idx, config)}]="
                        f"{render_value(elem, rhs.ops[2].typ, config)}")
            else:
                value = env.eval(s.rhs)
                text = f"{name}={render_value(value, s.lhs.typ, config)}"
            steps.append(TraceStep(number, "assignment", s.loc, name, text))
        elif s.kind in ("input", "output"):
            tag = s.kind.upper()
            parts = ", ".join(
                render_value(env.eval(a), a.typ, config) for a in s.args)
            steps.append(TraceStep(number, s.kind, s.loc, s.io_name,
                                   f"{tag} {s.io_name}: {parts}"))
    violated_step = eq.steps[violated_at]
    shown_cond = violated_step.source_cond or violated_step.cond
    return Trace(steps, prop, violated_step.loc,
                 source_text(shown_cond, config))


def render_trace(trace: Trace, config) -> str:
    lines = [f"Trace for {trace.violated.id}:", ""]
    for step in trace.steps:
        loc = str(step.loc) if step.loc is not None else "no location"
        lines.append(f"State {step.state_number} {loc} thread 0")
        lines.append("-" * 52)
        lines.append(f"  {step.text}")
        lines.append("")
    lines.append("Violated property:")
    loc = str(trace.violated_loc) if trace.violated_loc is not None \
        else "no location"
    lines.append(f"  {loc}")
    lines.append(f"  {trace.violated.description}")
    lines.append(f"  {trace.violated_cond}")
    lines.append("")
    return "\n".join(lines)


def sorted_for_report(properties):
    def key(indexed):
        i, p = indexed
        if p.loc is None:
            return ("", 0, i)
        return (p.loc.file, p.loc.line, i)
    return [p for _, p in sorted(enumerate(properties), key=key)]


def _trace_list(traces):
    if isinstance(traces, dict):
        return list(traces.values())
    return list(traces)


def report_plain(result: VerificationResult, traces, config) -> str:
    lines = ["** Results:"]
    group = None
    ordered = sorted_for_report(result.properties)
    for p in ordered:
        here = (p.loc.file if p.loc else "?",
                p.loc.function if p.loc else "?")
        if here != group:
            group = here
            lines.append(f"{here[0]} function {here[1]}")
        line_no = p.loc.line if p.loc else 0
        lines.append(f"[{p.id}] line {line_no} {p.description}: {p.status}")
    lines.append("")
    for trace in _trace_list(traces):
        lines.append(render_trace(trace, config))
    lines.append(f"** {result.failed_count} of {result.total_count} failed "
                 f"({result.solver_iterations} iterations)")
    lines.append(f"VERIFICATION {result.overall}")
    return "\n".join(lines)


def result_record(result: VerificationResult, traces):
    return {
        "properties": [{
            "id": p.id,
            "class": p.klass,
            "description": p.description,
            "file": p.loc.file if p.loc else None,
            "line": p.loc.line if p.loc else None,
            "function": p.loc.function if p.loc else None,
            "status": p.status,
        } for p in sorted_for_report(result.properties)],
        "traces": {t.violated.id: [
            {"state": s.state_number, "kind": s.kind, "text": s.text}
            for s in t.steps] for t in _trace_list(traces)},
        "failed": result.failed_count,
        "total": result.total_count,
        "iterations": result.solver_iterations,
        "verification": result.overall,
    }


def report_json(result, traces) -> str:
    return json.dumps(result_record(result, traces), indent=2)


def report_xml(result, traces) -> str:
    record = result_record(result, traces)
    root = ET.Element("minibmc")
    for p in record["properties"]:
        el = ET.SubElement(root, "property")
        for k, v in p.items():
            el.set(k, "" if v is None else str(v))
    summary = ET.SubElement(root, "summary")
    summary.set("failed", str(record["failed"]))
    summary.set("total", str(record["total"]))
    summary.set("iterations", str(record["iterations"]))
    summary.set("verification", record["verification"])
    return ET.tostring(root, encoding="unicode")


def report(result: VerificationResult, traces=(), ui="plain",
           config=None) -> str:
    if ui == "json":
        return report_json(result, traces)
    if ui == "xml":
        return report_xml(result, traces)
    return report_plain(result, traces, config)
