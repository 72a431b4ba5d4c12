"""Serialized GOTO model files (`.gb`).

Layout: magic `GBF1`, big-endian u32 format version, big-endian u64 payload
length, then the payload: UTF-8 JSON with a canonical field order (insertion
order of the symbol table and function map is preserved).  JSON keeps the
format debuggable; the framing keeps it versioned and checkable.
"""

from __future__ import annotations

import json
import struct

from .. import lang
from ..lang import CType, Expr, SourceLocation, Symbol, SymbolTable
from . import ir

MAGIC = b"GBF1"
VERSION = 1


class LinkError(Exception):
    pass


class FormatError(Exception):
    pass


# -- value <-> dict ---------------------------------------------------------

def type_to_dict(t: CType | None):
    if t is None:
        return None
    return {
        "kind": t.kind, "width": t.width,
        "element": type_to_dict(t.element), "size": t.size,
        "params": [type_to_dict(p) for p in t.params],
        "ret": type_to_dict(t.ret), "c_name": t.c_name,
    }


def type_from_dict(d):
    if d is None:
        return None
    return CType(d["kind"], d["width"], type_from_dict(d["element"]),
                 d["size"], tuple(type_from_dict(p) for p in d["params"]),
                 type_from_dict(d["ret"]), d["c_name"])


def loc_to_dict(loc: SourceLocation | None):
    if loc is None:
        return None
    return [loc.file, loc.line, loc.function, loc.working_directory]


def loc_from_dict(d):
    if d is None:
        return None
    return SourceLocation(d[0], d[1], d[2], d[3])


def expr_to_dict(e: Expr | None):
    if e is None:
        return None
    return {
        "kind": e.kind, "typ": type_to_dict(e.typ),
        "ops": [expr_to_dict(op) for op in e.ops],
        "op": e.op, "value": e.value, "name": e.name,
        "loc": loc_to_dict(e.loc),
    }


def expr_from_dict(d):
    if d is None:
        return None
    return Expr(d["kind"], type_from_dict(d["typ"]),
                tuple(expr_from_dict(op) for op in d["ops"]),
                d["op"], d["value"], d["name"], loc_from_dict(d["loc"]))


def symbol_to_dict(s: Symbol):
    return {
        "name": s.name, "base_name": s.base_name,
        "typ": type_to_dict(s.typ), "value": expr_to_dict(s.value),
        "loc": loc_to_dict(s.loc),
        "is_static_lifetime": s.is_static_lifetime,
        "is_parameter": s.is_parameter,
        "is_nondet_source": s.is_nondet_source,
        "is_function": s.is_function, "is_hidden": s.is_hidden,
    }


def symbol_from_dict(d):
    return Symbol(d["name"], d["base_name"], type_from_dict(d["typ"]),
                  expr_from_dict(d["value"]), loc_from_dict(d["loc"]),
                  d["is_static_lifetime"], d["is_parameter"],
                  d["is_nondet_source"], d["is_function"], d["is_hidden"])


def instr_to_dict(i: ir.Instr):
    return {
        "kind": i.kind, "loc": loc_to_dict(i.loc),
        "guard": expr_to_dict(i.guard), "lhs": expr_to_dict(i.lhs),
        "rhs": expr_to_dict(i.rhs), "target": i.target, "func": i.func,
        "callee": expr_to_dict(i.callee), "call_lhs": expr_to_dict(i.call_lhs),
        "args": [expr_to_dict(a) for a in i.args], "io_name": i.io_name,
        "labels": list(i.labels), "property_class": i.property_class,
        "property_id": i.property_id,
        "property_description": i.property_description,
        "loop_number": i.loop_number,
    }


def instr_from_dict(d):
    return ir.Instr(d["kind"], loc_from_dict(d["loc"]),
                    expr_from_dict(d["guard"]), expr_from_dict(d["lhs"]),
                    expr_from_dict(d["rhs"]), d["target"], d["func"],
                    expr_from_dict(d["callee"]), expr_from_dict(d["call_lhs"]),
                    tuple(expr_from_dict(a) for a in d["args"]), d["io_name"],
                    tuple(d["labels"]), d["property_class"], d["property_id"],
                    d["property_description"], d["loop_number"])


# -- model <-> bytes --------------------------------------------------------

def serialize(model: ir.GotoModel) -> bytes:
    payload = {
        "symbols": [symbol_to_dict(s) for s in model.symbol_table],
        "functions": [
            {"name": fn.name, "parameters": list(fn.parameters),
             "body": [instr_to_dict(i) for i in fn.body]}
            for fn in model.functions.values()
        ],
        "entry": model.entry,
    }
    blob = json.dumps(payload, separators=(",", ":")).encode("utf-8")
    return MAGIC + struct.pack(">IQ", VERSION, len(blob)) + blob


def deserialize(data: bytes) -> ir.GotoModel:
    if data[:4] != MAGIC:
        raise FormatError("not a GOTO model file (bad magic)")
    version, length = struct.unpack(">IQ", data[4:16])
    if version != VERSION:
        raise FormatError(f"unsupported model format version {version}")
    if len(data) != 16 + length:
        raise FormatError("truncated model file")
    payload = json.loads(data[16:].decode("utf-8"))
    symtab = SymbolTable()
    for d in payload["symbols"]:
        symtab.add(symbol_from_dict(d))
    functions = {}
    for d in payload["functions"]:
        functions[d["name"]] = ir.GotoFunction(
            d["name"], list(d["parameters"]),
            [instr_from_dict(i) for i in d["body"]])
    return ir.GotoModel(symtab, functions, payload["entry"])


def write_model(model: ir.GotoModel, path):
    with open(path, "wb") as f:
        f.write(serialize(model))


def read_model(path) -> ir.GotoModel:
    with open(path, "rb") as f:
        return deserialize(f.read())


def link(models) -> ir.GotoModel:
    """Merge models: declarations resolve against definitions; two
    definitions of the same function are an error."""
    symtab = SymbolTable()
    functions = {}
    entry = ""
    for model in models:
        for sym in model.symbol_table:
            existing = symtab.get(sym.name)
            if existing is None:
                symtab.add(sym)
            elif existing.typ != sym.typ:
                raise LinkError(
                    f"conflicting types for symbol `{sym.name}'")
        for name, fn in model.functions.items():
            if name in functions:
                if name.startswith("__CPROVER") or name == "getchar":
                    continue
                if functions[name].body and fn.body:
                    raise LinkError(f"duplicate definition of function `{name}'")
            functions[name] = fn
        if model.entry:
            entry = model.entry
    return ir.GotoModel(symtab, functions, entry)
