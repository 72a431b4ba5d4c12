"""Whole-model GOTO transforms: return removal, function-pointer removal,
entry-harness construction."""

from __future__ import annotations

from .. import lang
from ..lang import (BUILTIN_LOCATION, ConfigurationError, Expr, Symbol,
                    const, nondet, not_, symbol)
from . import ir


def rebuild(body, replacements):
    """Replace instruction i by replacements[i] (a list) and remap targets.

    Replacement instructions may carry relative targets ("rel", offset)
    pointing within their own replacement block, or ("after",) meaning the
    instruction following the block.
    """
    new_index = {}
    out = []
    for i, instr in enumerate(body):
        new_index[i] = len(out)
        out.extend(replacements.get(i, [instr]))
    new_index[len(body)] = len(out)
    fixed = []
    for j, instr in enumerate(out):
        if instr.kind == "GOTO" and isinstance(instr.target, tuple):
            kind = instr.target[0]
            if kind == "rel":
                base = j - instr.target[2]
                instr = instr.copy(target=base + instr.target[1])
            else:
                raise lang.InternalError("bad relative target")
        elif instr.kind == "GOTO":
            instr = instr.copy(target=new_index[instr.target])
        fixed.append(instr)
    return fixed


def return_value_symbol(model: ir.GotoModel, func_name: str) -> Symbol:
    name = f"{func_name}#return_value"
    existing = model.symbol_table.get(name)
    if existing is not None:
        return existing
    func_sym = model.symbol_table.get(func_name)
    typ = func_sym.typ.ret
    sym = Symbol(name, name, typ, loc=func_sym.loc,
                 is_static_lifetime=True, is_hidden=True)
    model.symbol_table.add(sym)
    return sym


def remove_returns(model: ir.GotoModel) -> ir.GotoModel:
    """RETURN e becomes `f#return_value = e` plus a jump past the live code;
    call results become reads of the callee's #return_value."""
    for fn in model.functions.values():
        func_sym = model.symbol_table.get(fn.name)
        if func_sym is not None and func_sym.typ.ret.kind != "void":
            return_value_symbol(model, fn.name)
        # the trailing dead-block (or END_FUNCTION) is the return target
        end = len(fn.body) - 1
        dead_start = end
        while dead_start > 0 and fn.body[dead_start - 1].kind == "DEAD":
            dead_start -= 1
        replacements = {}
        for i, instr in enumerate(fn.body):
            if instr.kind == "RETURN":
                repl = []
                if instr.rhs is not None:
                    ret = return_value_symbol(model, fn.name)
                    repl.append(ir.assign(symbol(ret.name, ret.typ),
                                          instr.rhs, instr.loc))
                if i + 1 != dead_start:
                    repl.append(ir.goto(dead_start, loc=instr.loc))
                if not repl:
                    repl.append(ir.skip(instr.loc))
                replacements[i] = repl
            elif instr.kind == "FUNCTION_CALL" and instr.call_lhs is not None:
                ret = return_value_symbol(model, instr.func)
                replacements[i] = [
                    instr.copy(call_lhs=None),
                    ir.assign(instr.call_lhs, symbol(ret.name, ret.typ),
                              instr.loc),
                ]
        if replacements:
            fn.body = rebuild(fn.body, replacements)
    model.validate()
    return model


def compatible_targets(model: ir.GotoModel, callee_typ):
    out = []
    for sym in model.symbol_table:
        if not sym.is_function or sym.typ.kind != "code":
            continue
        if sym.name not in model.functions:
            continue
        if (tuple(sym.typ.params) == tuple(callee_typ.params)
                and sym.typ.ret == callee_typ.ret):
            out.append(sym)
    return out


def remove_function_pointers(model: ir.GotoModel) -> ir.GotoModel:
    """Replace indirect calls by a chain of guarded direct calls over all
    type-compatible functions, with an unreachable-dispatch assertion."""
    for fn in model.functions.values():
        replacements = {}
        for i, instr in enumerate(fn.body):
            if instr.kind != "FUNCTION_CALL" or instr.callee is None:
                continue
            candidates = compatible_targets(model, instr.callee.typ)
            loc = instr.loc
            # one dispatch test per candidate, then the no-match assertion
            block = [None] * len(candidates)
            body_start = len(candidates) + 2
            for k, sym in enumerate(candidates):
                guard = lang.binary(
                    "==", instr.callee,
                    lang.addr_of(sym.name, instr.callee.typ), lang.BOOL, loc)
                block[k] = ir.Instr("GOTO", guard=guard,
                                    target=("rel", body_start + 2 * k, None),
                                    loc=loc)
            block.append(ir.assert_(
                lang.FALSE, "pointer_dispatch",
                "dereferenced function pointer must point to a matching "
                "function", loc))
            end_offset = body_start + 2 * len(candidates)
            block.append(ir.Instr("GOTO", target=("rel", end_offset, None),
                                  loc=loc))
            for sym in candidates:
                block.append(instr.copy(func=sym.name, callee=None))
                block.append(ir.Instr("GOTO", target=("rel", end_offset, None),
                                      loc=loc))
            for j, b in enumerate(block):
                if b.kind == "GOTO" and isinstance(b.target, tuple):
                    block[j] = b.copy(target=("rel", b.target[1], j))
            replacements[i] = block
        if replacements:
            fn.body = rebuild(fn.body, replacements)
    model.validate()
    return model


def build_entry_harness(model: ir.GotoModel, entry: str,
                        config) -> ir.GotoModel:
    """Add __CPROVER_initialize (static initializers) and __CPROVER__start
    (nondet arguments, INPUT/OUTPUT reporting, call to the entry point)."""
    if entry not in model.functions:
        raise ConfigurationError(f"entry function `{entry}' not found")
    symtab = model.symbol_table

    rounding = symtab.get("__CPROVER_rounding_mode")
    if rounding is None:
        rounding = Symbol("__CPROVER_rounding_mode", "__CPROVER_rounding_mode",
                          config.int_type(), loc=BUILTIN_LOCATION,
                          is_static_lifetime=True, is_hidden=True)
        symtab.add(rounding)
    init_body = [
        ir.Instr("ASSIGN", lhs=symbol(rounding.name, rounding.typ),
                 rhs=const(0, rounding.typ),
                 labels=("__CPROVER_HIDE",),
                 loc=lang.SourceLocation(BUILTIN_LOCATION.file, 20)),
    ]
    for sym in symtab:
        if (sym.is_static_lifetime and not sym.is_hidden
                and sym.value is not None):
            init_body.append(ir.assign(symbol(sym.name, sym.typ), sym.value,
                                       sym.loc))
    init_body.append(ir.end_function())
    model.functions["__CPROVER_initialize"] = ir.GotoFunction(
        "__CPROVER_initialize", [], init_body)
    if "__CPROVER_initialize" not in symtab:
        symtab.add(Symbol("__CPROVER_initialize", "__CPROVER_initialize",
                          lang.code_type([], lang.VOID), loc=BUILTIN_LOCATION,
                          is_function=True, is_hidden=True))

    entry_fn = model.functions[entry]
    entry_sym = symtab[entry]
    entry_loc = lang.SourceLocation(
        entry_sym.loc.file if entry_sym.loc else "<none>",
        entry_sym.loc.line if entry_sym.loc else 1)
    body = [ir.call("__CPROVER_initialize", ())]
    arg_syms = []
    for pname in entry_fn.parameters:
        psym = symtab[pname]
        hname = f"__CPROVER__start::{psym.base_name}"
        if hname not in symtab:
            symtab.add(Symbol(hname, psym.base_name, psym.typ, loc=entry_loc,
                              is_hidden=True))
        arg = symbol(hname, psym.typ, entry_loc)
        arg_syms.append(arg)
        body.append(ir.decl(arg, entry_loc))
        body.append(ir.assign(arg, nondet(psym.typ, entry_loc), entry_loc))
        body.append(ir.Instr("INPUT", io_name=psym.base_name, args=(arg,),
                             loc=entry_loc))
    body.append(ir.call(entry, tuple(arg_syms), entry_loc))
    if entry_sym.typ.ret.kind != "void":
        ret = return_value_symbol(model, entry)
        rname = "__CPROVER__start::return'"
        if rname not in symtab:
            symtab.add(Symbol(rname, "return'", ret.typ, loc=entry_loc,
                              is_hidden=True))
        retvar = symbol(rname, ret.typ, entry_loc)
        body.append(ir.assign(retvar, symbol(ret.name, ret.typ), entry_loc))
        body.append(ir.dead(symbol(ret.name, ret.typ), entry_loc))
        body.append(ir.Instr("OUTPUT", io_name="return", args=(retvar,),
                             loc=entry_loc))
    for arg in reversed(arg_syms):
        body.append(ir.dead(arg))
    body.append(ir.end_function())
    model.functions["__CPROVER__start"] = ir.GotoFunction(
        "__CPROVER__start", [], body)
    if "__CPROVER__start" not in symtab:
        symtab.add(Symbol("__CPROVER__start", "__CPROVER__start",
                          lang.code_type([], lang.VOID), loc=BUILTIN_LOCATION,
                          is_function=True, is_hidden=True))
    model.entry = "__CPROVER__start"
    model.validate()
    return model
