"""Human-readable rendering of GOTO models (--show-goto-functions,
--show-loop-ids)."""

from __future__ import annotations

from ..lang import PlatformConfig
from ..render import display_name, render_expr
from . import ir


def instruction_text(instr: ir.Instr, labels, config: PlatformConfig) -> str:
    kind = instr.kind
    if kind == "DECL":
        return f"{config.type_name(instr.lhs.typ)} {display_name(instr.lhs.name)};"
    if kind == "DEAD":
        return f"dead {display_name(instr.lhs.name)};"
    if kind == "ASSIGN":
        return (f"{render_expr(instr.lhs, config)} = "
                f"{render_expr(instr.rhs, config)};")
    if kind == "GOTO":
        label = labels[instr.target]
        if instr.guard.is_true:
            return f"GOTO {label}"
        return f"IF {render_expr(instr.guard, config)} THEN GOTO {label}"
    if kind == "ASSUME":
        return f"ASSUME {render_expr(instr.guard, config)}"
    if kind == "ASSERT":
        return f"ASSERT {render_expr(instr.guard, config)}"
    if kind == "FUNCTION_CALL":
        callee = (display_name(instr.func) if instr.callee is None
                  else f"(*{render_expr(instr.callee, config)})")
        args = ", ".join(render_expr(a, config) for a in instr.args)
        call = f"{callee}({args})"
        if instr.call_lhs is not None:
            return f"{render_expr(instr.call_lhs, config)} = {call};"
        return f"{call};"
    if kind in ("INPUT", "OUTPUT"):
        args = ", ".join(render_expr(a, config) for a in instr.args)
        return f'{kind}("{instr.io_name}", {args});'
    if kind == "RETURN":
        if instr.rhs is None:
            return "RETURN;"
        return f"RETURN {render_expr(instr.rhs, config)};"
    return kind if kind != "SKIP" else "SKIP"


def print_function(fn: ir.GotoFunction, config: PlatformConfig) -> str:
    # number branch targets in instruction order
    targets = sorted({i.target for i in fn.body
                      if i.kind == "GOTO" and i.target is not None})
    labels = {t: str(n + 1) for n, t in enumerate(targets)}
    lines = [fn.name]
    for i, instr in enumerate(fn.body):
        if instr.loc is not None and instr.loc.file != "<none>":
            lines.append(f"   // {i} {instr.loc}")
        else:
            lines.append(f"   // {i} no location")
        if instr.labels:
            lines.append(f"   // Labels: {', '.join(instr.labels)}")
        text = instruction_text(instr, labels, config)
        if i in labels:
            prefix = f"{labels[i]}: "
        else:
            prefix = "   "
        lines.append(prefix + text)
    return "\n".join(lines)


def print_model(model: ir.GotoModel, config: PlatformConfig) -> str:
    parts = [print_function(fn, config) for fn in model.functions.values()]
    return "\n\n".join(parts)


def print_loop_ids(model: ir.GotoModel, config: PlatformConfig) -> str:
    lines = []
    for fn in model.functions.values():
        for i, instr in enumerate(fn.body):
            if instr.loop_number is not None:
                lines.append(f"Loop {fn.name}.{instr.loop_number}:")
                if instr.loc is not None:
                    lines.append(f"  {instr.loc}")
    return "\n".join(lines)
