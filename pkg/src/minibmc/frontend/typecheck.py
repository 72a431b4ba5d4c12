"""Type checking: resolves the parse tree into a symbol table plus typed
statement/expression trees with bit-exact types.

Conventions implemented here:
  * integer promotions to int width, usual arithmetic conversions, all
    inserted as explicit typecast nodes
  * short-circuit && and || become conditional expressions
  * locals and parameters are name-mangled as function::name
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .. import lang
from ..lang import (BOOL, VOID, CType, Expr, FrontendError, PlatformConfig,
                    Symbol, SymbolTable, array_of, code_pointer, code_type,
                    const, symbol, typecast)
from ..simplify import simplify
from . import ast

INTRINSICS = {
    "assert": 1,
    "__CPROVER_assert": 2,
    "__CPROVER_assume": 1,
    "__CPROVER_cover": 1,
    "__CPROVER_input": None,   # 2 or more
    "__CPROVER_output": None,
}

LIBRARY_FUNCTIONS = ("getchar", "printf")


@dataclass
class TDecl:
    entries: list  # (Symbol, Expr | None) typed initializer
    loc: lang.SourceLocation = None


@dataclass
class TypedFunction:
    name: str
    symbol: Symbol
    params: list  # parameter symbol names in order
    body: object | None
    loc: lang.SourceLocation = None


@dataclass
class TypedProgram:
    symtab: SymbolTable
    functions: dict
    config: PlatformConfig
    entry_candidates: list = field(default_factory=list)

    def dump_symbol_table(self):
        lines = []
        for name in sorted(self.symtab.names()):
            sym = self.symtab[name]
            lines.append(f"symbol: {sym.name}")
            lines.append(f" * base_name: {sym.base_name}")
            lines.append(f" * type: {sym.typ.kind}")
            if sym.typ.is_bitvector:
                lines.append(f"     * width: {sym.typ.bit_width}")
            if sym.typ.kind == "array":
                lines.append(f"     * size: {sym.typ.size}")
                lines.append(f"     * element width: {sym.typ.element.bit_width}")
            if sym.loc is not None:
                lines.append(f" * location: {sym.loc}")
        return "\n".join(lines)


class Typechecker:
    def __init__(self, config: PlatformConfig, library=True):
        self.config = config
        self.library = library
        self.symtab = SymbolTable()
        self.functions: dict[str, TypedFunction] = {}
        self.scopes = [{}]  # base name -> symbol name
        self.current_function = None
        self.return_type = None

    # -- type resolution -------------------------------------------------
    def resolve_spec(self, spec: ast.TypeSpec) -> CType:
        cfg = self.config
        if spec.base == "void":
            return VOID
        if spec.base == "bool":
            return BOOL
        if spec.base == "char":
            signed = cfg.char_signed if spec.signed is None else spec.signed
            name = "char" if spec.signed is None else (
                "signed char" if spec.signed else "unsigned char")
            return (lang.signedbv if signed else lang.unsignedbv)(8, name)
        signed = True if spec.signed is None else spec.signed
        widths = {"short": 16, "int": cfg.int_width, "long": cfg.long_width}
        width = widths[spec.base]
        names = {"short": "short int", "int": "int", "long": "long int"}
        name = ("signed " if signed else "unsigned ") + names[spec.base]
        return (lang.signedbv if signed else lang.unsignedbv)(width, name)

    def resolve_declarator(self, base: CType, decl: ast.Declarator) -> CType:
        typ = base
        if decl.is_func_pointer:
            params = [self.resolve_param_type(p) for p in decl.func_params]
            return code_pointer(params, base)
        if decl.func_params is not None:
            params = [self.resolve_param_type(p) for p in decl.func_params]
            return code_type(params, base)
        for dim in reversed(decl.array_dims):
            size_expr = simplify(self.value_expr(self.texpr(dim)))
            if not size_expr.is_const:
                raise FrontendError("array size is not a compile-time constant",
                                    decl.loc)
            if size_expr.value < 1:
                raise FrontendError("array size must be at least 1", decl.loc)
            typ = array_of(typ, size_expr.value)
        return typ

    def resolve_param_type(self, param: ast.ParamDecl) -> CType:
        base = self.resolve_spec(param.spec)
        return self.resolve_declarator(base, param.declarator)

    # -- symbol management -----------------------------------------------
    def mangle(self, base_name):
        if self.current_function is None:
            return base_name
        name = f"{self.current_function}::{base_name}"
        candidate, n = name, 0
        while candidate in self.symtab:
            n += 1
            candidate = f"{name}${n}"
        return candidate

    def declare(self, base_name, typ, loc, **flags):
        name = self.mangle(base_name)
        if self.current_function is None and name in self.symtab:
            existing = self.symtab[name]
            if existing.typ != typ:
                raise FrontendError(
                    f"conflicting declarations for {base_name}", loc)
            return existing
        sym = Symbol(name=name, base_name=base_name, typ=typ, loc=loc, **flags)
        self.symtab.add(sym)
        self.scopes[-1][base_name] = name
        return sym

    def lookup(self, base_name, loc):
        for scope in reversed(self.scopes):
            if base_name in scope:
                return self.symtab[scope[base_name]]
        raise FrontendError(f"use of undeclared identifier {base_name!r}", loc)

    # -- program ----------------------------------------------------------
    def check_translation_unit(self, unit: ast.TranslationUnit) -> TypedProgram:
        if self.library:
            self._inject_library()
        for item in unit.items:
            if isinstance(item, ast.FuncDef):
                self.check_funcdef(item)
            else:
                self.check_global_decl(item)
        program = TypedProgram(self.symtab, self.functions, self.config)
        resolve_builtins(program)
        return program

    def _inject_library(self):
        loc = lang.BUILTIN_LOCATION
        if "getchar" not in self.symtab:
            sym = Symbol("getchar", "getchar", code_type([], self.config.int_type()),
                         loc=loc, is_function=True, is_hidden=True)
            self.symtab.add(sym)
            self.scopes[0]["getchar"] = "getchar"
        if "printf" not in self.symtab:
            sym = Symbol("printf", "printf", code_type([], self.config.int_type()),
                         loc=loc, is_function=True, is_hidden=True)
            self.symtab.add(sym)
            self.scopes[0]["printf"] = "printf"

    def check_global_decl(self, decl: ast.Decl):
        base = self.resolve_spec(decl.spec)
        entries = []
        for declarator, init in decl.declarators:
            typ = self.resolve_declarator(base, declarator)
            loc = declarator.loc or decl.loc
            if typ.kind == "code":
                self.declare(declarator.name, typ, loc, is_function=True)
                continue
            sym = self.declare(declarator.name, typ, loc, is_static_lifetime=True)
            sym.value = self.typed_initializer(typ, init, loc, require_const=True)
            entries.append((sym, sym.value))
        return TDecl(entries, loc=decl.loc)

    def typed_initializer(self, typ, init, loc, require_const=False):
        if init is None:
            return zero_value(typ, loc)
        if isinstance(init, list):
            if typ.kind != "array":
                raise FrontendError("initializer list for a non-array", loc)
            if len(init) > typ.size:
                raise FrontendError("too many array initializer elements", loc)
            elems = []
            for pe in init:
                e = simplify(self.convert(self.value_expr(self.texpr(pe)),
                                          typ.element))
                if require_const and not e.is_const:
                    raise FrontendError("array initializer must be constant",
                                        pe.loc)
                elems.append(e)
            # shorter lists zero-pad
            while len(elems) < typ.size:
                elems.append(const(0, typ.element, loc))
            return lang.array_expr(elems, typ, loc)
        e = self.convert(self.value_expr(self.texpr(init)), typ)
        if require_const:
            e = simplify(e)
            if not e.is_const:
                raise FrontendError("global initializer must be constant", loc)
        return e

    def check_funcdef(self, fn: ast.FuncDef):
        name = fn.declarator.name
        ret = self.resolve_spec(fn.spec)
        typ = self.resolve_declarator(ret, fn.declarator)
        sym = self.declare(name, typ, fn.loc, is_function=True)
        if fn.body is None:
            if name not in self.functions:
                self.functions[name] = TypedFunction(name, sym, [], None, fn.loc)
            return
        if name in self.functions and self.functions[name].body is not None:
            raise FrontendError(f"redefinition of function {name}", fn.loc)
        self.current_function = name
        self.return_type = typ.ret
        self.scopes.append({})
        params = []
        for p in fn.declarator.func_params:
            if not p.declarator.name:
                raise FrontendError("parameter name missing in definition", fn.loc)
            ptyp = self.resolve_param_type(p)
            psym = self.declare(p.declarator.name, ptyp,
                                p.declarator.loc or fn.loc, is_parameter=True)
            params.append(psym.name)
        body = self.check_block(fn.body)
        self.scopes.pop()
        self.current_function = None
        self.functions[name] = TypedFunction(name, sym, params, body, fn.loc)

    # -- statements --------------------------------------------------------
    def check_block(self, block: ast.Block):
        self.scopes.append({})
        stmts = [self.check_stmt(s) for s in block.stmts]
        self.scopes.pop()
        return ast.Block(stmts, loc=block.loc)

    def check_stmt(self, stmt):
        if isinstance(stmt, ast.Block):
            return self.check_block(stmt)
        if isinstance(stmt, ast.Decl):
            base = self.resolve_spec(stmt.spec)
            entries = []
            for declarator, init in stmt.declarators:
                typ = self.resolve_declarator(base, declarator)
                loc = declarator.loc or stmt.loc
                sym = self.declare(declarator.name, typ, loc)
                value = (self.typed_initializer(typ, init, loc)
                         if init is not None else None)
                entries.append((sym, value))
            return TDecl(entries, loc=stmt.loc)
        if isinstance(stmt, ast.ExprStmt):
            return ast.ExprStmt(self.texpr(stmt.expr), loc=stmt.loc)
        if isinstance(stmt, ast.If):
            return ast.If(self.cond_expr(stmt.cond), self.check_stmt(stmt.then),
                          self.check_stmt(stmt.els) if stmt.els else None,
                          loc=stmt.loc)
        if isinstance(stmt, ast.While):
            return ast.While(self.cond_expr(stmt.cond), self.check_stmt(stmt.body),
                             loc=stmt.loc)
        if isinstance(stmt, ast.For):
            self.scopes.append({})
            init = self.check_stmt(stmt.init) if stmt.init else None
            cond = self.cond_expr(stmt.cond) if stmt.cond else lang.TRUE
            inc = self.texpr(stmt.inc) if stmt.inc else None
            body = self.check_stmt(stmt.body)
            self.scopes.pop()
            return ast.For(init, cond, inc, body, loc=stmt.loc)
        if isinstance(stmt, ast.Return):
            if stmt.expr is None:
                if self.return_type.kind != "void":
                    raise FrontendError("return without a value in a non-void "
                                        "function", stmt.loc)
                return ast.Return(None, loc=stmt.loc)
            if self.return_type.kind == "void":
                raise FrontendError("return with a value in a void function",
                                    stmt.loc)
            value = self.convert(self.value_expr(self.texpr(stmt.expr)),
                                 self.return_type)
            return ast.Return(value, loc=stmt.loc)
        if isinstance(stmt, (ast.Break, ast.Continue, ast.Null)):
            return stmt
        raise lang.InternalError(f"unhandled statement {type(stmt).__name__}")

    # -- expressions -------------------------------------------------------
    def texpr(self, pe: ast.PExpr) -> Expr:
        kind = pe.kind
        if kind == "const":
            from .. import arith
            int_t = self.config.int_type()
            text = pe.text.lower()
            if "u" in text and "l" in text.replace("0x", ""):
                typ = lang.unsignedbv(self.config.long_width, "unsigned long int")
            elif "u" in text:
                typ = self.config.uint_type()
            elif "l" in text.replace("0x", ""):
                typ = self.config.long_type()
            elif pe.value <= int_t.max_value():
                typ = int_t
            else:
                typ = self.config.long_type()
            return const(arith.wrap(pe.value, typ), typ, pe.loc)
        if kind == "char":
            return const(pe.value, self.config.int_type(), pe.loc)
        if kind == "string":
            typ = array_of(self.config.char_type(), len(pe.text) + 1)
            return Expr("string", typ, name=pe.text, loc=pe.loc)
        if kind == "ident":
            sym = self.lookup(pe.name, pe.loc)
            if sym.typ.kind == "code":
                # function used as a value: take its address
                return lang.addr_of(sym.name,
                                    code_pointer(sym.typ.params, sym.typ.ret),
                                    pe.loc)
            return symbol(sym.name, sym.typ, pe.loc)
        if kind == "unary":
            return self.unary_expr(pe)
        if kind == "binary":
            return self.binary_expr(pe)
        if kind == "logical":
            a = self.cond_expr(pe.ops[0])
            b = self.cond_expr(pe.ops[1])
            if pe.op == "&&":
                return lang.Expr("ite", BOOL, ops=(a, b, lang.FALSE), loc=pe.loc)
            return lang.Expr("ite", BOOL, ops=(a, lang.TRUE, b), loc=pe.loc)
        if kind == "ternary":
            c = self.cond_expr(pe.ops[0])
            a = self.value_expr(self.texpr(pe.ops[1]))
            b = self.value_expr(self.texpr(pe.ops[2]))
            a, b = self.usual_conversions(a, b)
            return lang.Expr("ite", a.typ, ops=(c, a, b), loc=pe.loc)
        if kind == "index":
            base = self.texpr(pe.ops[0])
            if base.typ.kind != "array":
                raise FrontendError("indexed expression is not an array", pe.loc)
            idx = self.promote(self.value_expr(self.texpr(pe.ops[1])))
            return lang.index(base, idx, pe.loc)
        if kind == "assign":
            lhs = self.texpr(pe.ops[0])
            self.require_lvalue(lhs, pe.loc)
            rhs = self.convert(self.value_expr(self.texpr(pe.ops[1])), lhs.typ)
            return Expr("assign", lhs.typ, ops=(lhs, rhs), loc=pe.loc)
        if kind == "opassign":
            lhs = self.texpr(pe.ops[0])
            self.require_lvalue(lhs, pe.loc)
            combined = self.binary_typed(pe.op, lhs,
                                         self.value_expr(self.texpr(pe.ops[1])),
                                         pe.loc)
            rhs = self.convert(combined, lhs.typ)
            return Expr("assign", lhs.typ, ops=(lhs, rhs), loc=pe.loc)
        if kind in ("preincdec", "postincdec"):
            lhs = self.texpr(pe.ops[0])
            self.require_lvalue(lhs, pe.loc)
            return Expr(pe.kind, lhs.typ, ops=(lhs,),
                        op="+" if pe.op == "++" else "-", loc=pe.loc)
        if kind == "call":
            return self.call_expr(pe)
        raise lang.InternalError(f"unhandled expression kind {kind}")

    def unary_expr(self, pe):
        op = pe.op
        if op == "not":
            return lang.Expr("unary", BOOL, ops=(self.cond_expr(pe.ops[0]),),
                             op="not", loc=pe.loc)
        if op == "addrof":
            target = pe.ops[0]
            if target.kind != "ident":
                raise FrontendError("& is only supported on function names",
                                    pe.loc)
            sym = self.lookup(target.name, pe.loc)
            if sym.typ.kind != "code":
                raise FrontendError("& is only supported on function names",
                                    pe.loc)
            return lang.addr_of(sym.name,
                                code_pointer(sym.typ.params, sym.typ.ret), pe.loc)
        if op == "deref":
            inner = self.texpr(pe.ops[0])
            if inner.typ.kind != "code_pointer":
                raise FrontendError("* is only supported on function pointers",
                                    pe.loc)
            return inner
        operand = self.promote(self.value_expr(self.texpr(pe.ops[0])))
        return lang.unary(op, operand, loc=pe.loc)

    def binary_expr(self, pe):
        a = self.value_expr(self.texpr(pe.ops[0]))
        b = self.value_expr(self.texpr(pe.ops[1]))
        return self.binary_typed(pe.op, a, b, pe.loc)

    def binary_typed(self, op, a, b, loc):
        a = self.value_expr(a)
        b = self.value_expr(b)
        if op in ("<<", ">>"):
            a = self.promote(a)
            b = self.promote(b)
            return lang.binary(op, a, b, a.typ, loc)
        if a.typ.kind == "code_pointer" or b.typ.kind == "code_pointer":
            if op not in ("==", "!="):
                raise FrontendError("function pointers only support == and !=",
                                    loc)
            return lang.binary(op, a, b, BOOL, loc)
        a, b = self.usual_conversions(a, b)
        if op in lang.COMPARISONS:
            return lang.binary(op, a, b, BOOL, loc)
        return lang.binary(op, a, b, a.typ, loc)

    def call_expr(self, pe):
        callee = pe.ops[0]
        args = pe.ops[1:]
        if callee.kind == "ident" and callee.name in INTRINSICS:
            return self.intrinsic_call(callee.name, args, pe.loc)
        target = self.texpr(callee)
        if target.kind == "addr_of":
            sym = self.symtab[target.name]
            if sym.name == "printf":
                return Expr("call", self.config.int_type(),
                            ops=tuple(self.printf_arg(a) for a in args),
                            name="printf", loc=pe.loc)
            params, ret = sym.typ.params, sym.typ.ret
            if len(args) != len(params):
                raise FrontendError(
                    f"wrong number of arguments in call to {sym.base_name}",
                    pe.loc)
            typed = tuple(self.convert(self.value_expr(self.texpr(a)), p)
                          for a, p in zip(args, params))
            return Expr("call", ret, ops=typed, name=sym.name, loc=pe.loc)
        if target.typ.kind == "code_pointer":
            params, ret = target.typ.params, target.typ.ret
            if len(args) != len(params):
                raise FrontendError("wrong number of arguments in indirect call",
                                    pe.loc)
            typed = tuple(self.convert(self.value_expr(self.texpr(a)), p)
                          for a, p in zip(args, params))
            return Expr("call", ret, ops=(target,) + typed, name="", loc=pe.loc)
        raise FrontendError("called object is not a function", pe.loc)

    def printf_arg(self, a):
        e = self.texpr(a)
        if e.kind == "string":
            return e
        return self.value_expr(e)

    def intrinsic_call(self, name, args, loc):
        if name in ("assert", "__CPROVER_assume", "__CPROVER_cover"):
            if len(args) != 1:
                raise FrontendError(f"{name} takes exactly one argument", loc)
            cond = self.cond_expr(args[0])
            return Expr("call", VOID, ops=(cond,), name=name, loc=loc)
        if name == "__CPROVER_assert":
            if len(args) != 2:
                raise FrontendError("__CPROVER_assert takes a condition and a "
                                    "description", loc)
            cond = self.cond_expr(args[0])
            desc = self.texpr(args[1])
            if desc.kind != "string":
                raise FrontendError("__CPROVER_assert description must be a "
                                    "string literal", loc)
            return Expr("call", VOID, ops=(cond, desc), name=name, loc=loc)
        # __CPROVER_input / __CPROVER_output
        if len(args) < 2:
            raise FrontendError(f"{name} takes a name and at least one value",
                                loc)
        label = self.texpr(args[0])
        if label.kind != "string":
            raise FrontendError(f"{name} first argument must be a string "
                                "literal", loc)
        values = tuple(self.value_expr(self.texpr(a)) for a in args[1:])
        return Expr("call", VOID, ops=(label,) + values, name=name, loc=loc)

    # -- conversions -------------------------------------------------------
    def require_lvalue(self, e, loc):
        if e.kind == "symbol":
            return
        if e.kind == "index" and e.ops[0].kind == "symbol":
            return
        raise FrontendError("expression is not assignable", loc)

    def value_expr(self, e: Expr) -> Expr:
        """A boolean used as a value becomes an int 0/1."""
        if e.typ.kind == "boolean" and e.kind != "assign":
            return typecast(e, self.config.int_type(), e.loc)
        return e

    def cond_expr(self, pe) -> Expr:
        e = pe if isinstance(pe, Expr) else self.texpr(pe)
        return self.to_bool(e)

    def to_bool(self, e: Expr) -> Expr:
        if e.typ.kind == "boolean":
            return e
        if e.typ.kind == "code_pointer":
            return lang.Expr("binary", BOOL, op="!=",
                             ops=(e, const(0, e.typ)), loc=e.loc)
        if not e.typ.is_bitvector:
            raise FrontendError("expression cannot be used as a condition",
                                e.loc)
        return lang.binary("!=", e, const(0, e.typ), BOOL, e.loc)

    def promote(self, e: Expr) -> Expr:
        int_t = self.config.int_type()
        if e.typ.kind == "boolean":
            return typecast(e, int_t, e.loc)
        if e.typ.is_bitvector and e.typ.width < int_t.width:
            return typecast(e, int_t, e.loc)
        return e

    def usual_conversions(self, a, b):
        a, b = self.promote(a), self.promote(b)
        if a.typ.width == b.typ.width and a.typ.kind == b.typ.kind:
            return a, b
        if a.typ.width != b.typ.width:
            target = a.typ if a.typ.width > b.typ.width else b.typ
        else:
            target = a.typ if a.typ.kind == "unsignedbv" else b.typ
        return typecast(a, target, a.loc), typecast(b, target, b.loc)

    def convert(self, e: Expr, typ: CType) -> Expr:
        if e.typ == typ:
            return e
        if e.typ.kind == "code_pointer" and typ.kind == "code_pointer":
            return e
        if not (e.typ.is_bitvector and typ.is_bitvector):
            raise FrontendError(
                f"cannot convert {e.typ.kind} to {typ.kind}", e.loc)
        return typecast(e, typ, e.loc)


def zero_value(typ, loc=None):
    if typ.kind == "array":
        elem = zero_value(typ.element, loc)
        return lang.array_expr([elem] * typ.size, typ, loc)
    return const(0, typ, loc)


def resolve_builtins(program: TypedProgram):
    """Mark nondeterminism sources and validate the built-in conventions:
    bodyless nondet_* functions become nondet sources of their return type;
    getchar is a per-call nondet int source."""
    for sym in program.symtab:
        if not sym.is_function:
            continue
        fn = program.functions.get(sym.name)
        has_body = fn is not None and fn.body is not None
        if sym.base_name.startswith("nondet_") and not has_body:
            if sym.typ.ret.kind == "void":
                raise FrontendError(
                    f"nondet source {sym.base_name} must return a value",
                    sym.loc)
            sym.is_nondet_source = True
        if sym.name == "getchar" and not has_body:
            sym.is_nondet_source = True
    return program.symtab


def typecheck(unit, config: PlatformConfig, library=True) -> TypedProgram:
    return Typechecker(config, library=library).check_translation_unit(unit)
