"""Conversion of the typed AST into guarded-GOTO programs.

Expressions with side effects (assignments, ++/--, calls) are flattened into
instruction sequences; what remains in instruction operands is side-effect
free.  Structured control flow becomes conditional forward gotos plus one
unconditional backjump per loop.
"""

from __future__ import annotations

from .. import lang
from ..lang import (Expr, SourceLocation, Symbol, const, not_, nondet,
                    symbol)
from ..frontend import ast
from ..frontend.typecheck import TDecl, TypedProgram
from ..render import render_expr
from ..simplify import simplify
from . import ir

GETCHAR_LOC_FILE = "<builtin-library-getchar>"

SIDE_EFFECT_KINDS = ("assign", "preincdec", "postincdec", "call")


def has_side_effects(e: Expr) -> bool:
    return any(n.kind in SIDE_EFFECT_KINDS for n in lang.walk(e))


class Target:
    """Forward-reference jump target, resolved to an index at the end."""

    __slots__ = ("index",)

    def __init__(self):
        self.index = None


class FunctionConverter:
    def __init__(self, program: TypedProgram, fn):
        self.program = program
        self.symtab = program.symtab
        self.fn = fn
        self.body: list[ir.Instr] = []
        self.locals: list[Symbol] = []   # for the dead block, in decl order
        self.tmp_counter = 0
        self.loop_stack = []             # (break_target, continue_target)
        self.end_target = Target()

    # -- emission ----------------------------------------------------------
    def emit(self, instr: ir.Instr):
        if instr.loc is not None and instr.loc.function is None:
            instr.loc = lang.SourceLocation(instr.loc.file, instr.loc.line,
                                            self.fn.name,
                                            instr.loc.working_directory)
        self.body.append(instr)
        return instr

    def mark(self, target: Target):
        target.index = len(self.body)

    def fresh_temp(self, typ, loc):
        name = f"{self.fn.name}::$tmp{self.tmp_counter}"
        self.tmp_counter += 1
        sym = Symbol(name=name, base_name=f"$tmp{self.tmp_counter - 1}",
                     typ=typ, loc=loc, is_hidden=True)
        self.symtab.add(sym)
        self.emit(ir.decl(symbol(name, typ, loc), loc))
        self.locals.append(sym)
        return symbol(name, typ, loc)

    # -- expressions -------------------------------------------------------
    def purify(self, e: Expr, loc=None) -> Expr:
        """Emit side effects of e in evaluation order; return a pure expr."""
        loc = e.loc or loc
        kind = e.kind
        if kind in ("const", "symbol", "nondet", "addr_of", "string"):
            return e
        if kind == "assign":
            lhs, rhs = e.ops
            lhs_pure = self.pure_lvalue(lhs, loc)
            rhs_pure = self.purify(rhs, loc)
            self.emit(ir.assign(lhs_pure, rhs_pure, loc))
            return lhs_pure
        if kind in ("preincdec", "postincdec"):
            lhs = self.pure_lvalue(e.ops[0], loc)
            one = const(1, lhs.typ, loc)
            updated = lang.binary(e.op, lhs, one, lhs.typ, loc)
            if kind == "preincdec":
                self.emit(ir.assign(lhs, updated, loc))
                return lhs
            saved = self.fresh_temp(lhs.typ, loc)
            self.emit(ir.assign(saved, lhs, loc))
            self.emit(ir.assign(lhs, updated, loc))
            return saved
        if kind == "call":
            return self.purify_call(e, loc)
        if kind == "ite" and (has_side_effects(e.ops[1])
                              or has_side_effects(e.ops[2])):
            cond = self.purify(e.ops[0], loc)
            result = self.fresh_temp(e.typ, loc)
            els, end = Target(), Target()
            self.emit(ir.goto(els, guard=not_(cond), loc=loc))
            self.emit(ir.assign(result, self.purify(e.ops[1], loc), loc))
            self.emit(ir.goto(end, loc=loc))
            self.mark(els)
            self.emit(ir.assign(result, self.purify(e.ops[2], loc), loc))
            self.mark(end)
            return result
        if e.ops:
            ops = tuple(self.purify(op, loc) for op in e.ops)
            return lang.Expr(e.kind, e.typ, ops=ops, op=e.op, value=e.value,
                             name=e.name, loc=e.loc)
        return e

    def pure_lvalue(self, lhs: Expr, loc) -> Expr:
        if lhs.kind == "symbol":
            return lhs
        # index: evaluate the subscript's side effects, keep the index node
        base, idx = lhs.ops
        return lang.index(base, self.purify(idx, loc), lhs.loc)

    def purify_call(self, e: Expr, loc) -> Expr:
        name = e.name
        if name == "assert":
            cond = self.purify(e.ops[0], loc)
            self.emit(ir.assert_(cond, "assertion",
                                 f"assertion {render_expr(cond)}", loc))
            return lang.TRUE
        if name == "__CPROVER_assert":
            cond = self.purify(e.ops[0], loc)
            self.emit(ir.assert_(cond, "assertion", e.ops[1].name, loc))
            return lang.TRUE
        if name == "__CPROVER_assume":
            cond = self.purify(e.ops[0], loc)
            self.emit(ir.assume(cond, loc))
            return lang.TRUE
        if name == "__CPROVER_cover":
            cond = self.purify(e.ops[0], loc)
            self.emit(ir.Instr("ASSERT", guard=not_(cond),
                               property_class="cover",
                               property_description=
                               f"condition {render_expr(cond)}", loc=loc))
            return lang.TRUE
        if name in ("__CPROVER_input", "__CPROVER_output"):
            label = e.ops[0].name
            values = tuple(self.purify(v, loc) for v in e.ops[1:])
            kind = "INPUT" if name.endswith("input") else "OUTPUT"
            self.emit(ir.Instr(kind, io_name=label, args=values, loc=loc))
            return lang.TRUE
        if name == "printf":
            for arg in e.ops:
                if arg.kind != "string":
                    self.purify(arg, loc)
            self.emit(ir.skip(loc))
            return const(0, e.typ, loc)
        if name == "":
            callee = self.purify(e.ops[0], loc)
            args = tuple(self.purify(a, loc) for a in e.ops[1:])
            return self.emit_call(None, callee, args, e.typ, loc)
        sym = self.symtab[name]
        if sym.is_nondet_source and name != "getchar":
            return nondet(e.typ, loc)
        args = tuple(self.purify(a, loc) for a in e.ops)
        return self.emit_call(name, None, args, e.typ, loc)

    def emit_call(self, func, callee, args, ret_typ, loc):
        instr = ir.Instr("FUNCTION_CALL", func=func or "", callee=callee,
                         args=args, loc=loc)
        if ret_typ.kind != "void":
            tmp = self.fresh_temp(ret_typ, loc)
            instr.call_lhs = tmp
            self.emit(instr)
            return tmp
        self.emit(instr)
        return lang.TRUE

    def pure_cond(self, e: Expr, loc) -> Expr:
        return self.purify(e, loc)

    # -- statements --------------------------------------------------------
    def convert_stmt(self, stmt):
        if isinstance(stmt, ast.Block):
            for s in stmt.stmts:
                self.convert_stmt(s)
            return
        if isinstance(stmt, TDecl):
            for sym, init in stmt.entries:
                loc = sym.loc or stmt.loc
                self.emit(ir.decl(symbol(sym.name, sym.typ, loc), loc))
                self.locals.append(sym)
                if init is not None:
                    value = self.purify(init, loc)
                    self.emit(ir.assign(symbol(sym.name, sym.typ, loc),
                                        value, loc))
            return
        if isinstance(stmt, ast.ExprStmt):
            self.purify(stmt.expr, stmt.loc)
            return
        if isinstance(stmt, ast.If):
            cond = self.pure_cond(stmt.cond, stmt.loc)
            els = Target()
            self.emit(ir.goto(els, guard=not_(cond), loc=stmt.loc))
            self.convert_stmt(stmt.then)
            if stmt.els is not None:
                end = Target()
                self.emit(ir.goto(end, loc=stmt.loc))
                self.mark(els)
                self.convert_stmt(stmt.els)
                self.mark(end)
            else:
                self.mark(els)
            return
        if isinstance(stmt, ast.While):
            head = Target()
            self.mark(head)
            cond = simplify(self.pure_cond(stmt.cond, stmt.loc))
            exit_t, back_t = Target(), Target()
            if not cond.is_true:
                self.emit(ir.goto(exit_t, guard=not_(cond), loc=stmt.loc))
            self.loop_stack.append((exit_t, back_t))
            self.convert_stmt(stmt.body)
            self.loop_stack.pop()
            self.mark(back_t)
            self.emit(ir.goto(head, loc=stmt.loc))
            self.mark(exit_t)
            return
        if isinstance(stmt, ast.For):
            if stmt.init is not None:
                self.convert_stmt(stmt.init)
            head = Target()
            self.mark(head)
            cond = (simplify(self.pure_cond(stmt.cond, stmt.loc))
                    if stmt.cond is not None else lang.TRUE)
            exit_t, inc_t = Target(), Target()
            if not cond.is_true:
                self.emit(ir.goto(exit_t, guard=not_(cond), loc=stmt.loc))
            self.loop_stack.append((exit_t, inc_t))
            self.convert_stmt(stmt.body)
            self.loop_stack.pop()
            self.mark(inc_t)
            if stmt.inc is not None:
                self.purify(stmt.inc, stmt.loc)
            self.emit(ir.goto(head, loc=stmt.loc))
            self.mark(exit_t)
            return
        if isinstance(stmt, ast.Return):
            value = (self.purify(stmt.expr, stmt.loc)
                     if stmt.expr is not None else None)
            self.emit(ir.Instr("RETURN", rhs=value, loc=stmt.loc))
            return
        if isinstance(stmt, ast.Break):
            self.emit(ir.goto(self.loop_stack[-1][0], loc=stmt.loc))
            return
        if isinstance(stmt, ast.Continue):
            self.emit(ir.goto(self.loop_stack[-1][1], loc=stmt.loc))
            return
        if isinstance(stmt, ast.Null):
            return
        raise lang.InternalError(f"unhandled statement {type(stmt).__name__}")

    # -- driver ------------------------------------------------------------
    def convert(self) -> ir.GotoFunction:
        self.convert_stmt(self.fn.body)
        end_loc = last_loc(self.fn.body) or self.fn.loc
        self.mark(self.end_target)
        for sym in reversed(self.locals):
            self.emit(ir.dead(symbol(sym.name, sym.typ), end_loc))
        self.emit(ir.end_function(end_loc))
        resolve_targets(self.body)
        return ir.GotoFunction(self.fn.name, list(self.fn.params), self.body)


def last_loc(block):
    loc = None
    for s in getattr(block, "stmts", []):
        if getattr(s, "loc", None) is not None:
            loc = s.loc
    return loc


def resolve_targets(body):
    for i, instr in enumerate(body):
        if instr.kind == "GOTO" and isinstance(instr.target, Target):
            assert instr.target.index is not None, "unresolved jump target"
            body[i] = instr.copy(target=instr.target.index)


def make_getchar_body(program: TypedProgram) -> ir.GotoFunction:
    """Model getchar as an unconstrained int that is reported as an INPUT."""
    int_t = program.config.int_type()
    ret_name = "getchar#return_value"
    if ret_name not in program.symtab:
        program.symtab.add(Symbol(ret_name, ret_name, int_t,
                                  loc=lang.BUILTIN_LOCATION,
                                  is_static_lifetime=True, is_hidden=True))
    ret = symbol(ret_name, int_t)
    loc_a = SourceLocation(GETCHAR_LOC_FILE, 14, "getchar")
    loc_b = SourceLocation(GETCHAR_LOC_FILE, 15, "getchar")
    body = [
        ir.assign(ret, nondet(int_t, loc_a), loc_a),
        ir.Instr("INPUT", io_name="getchar", args=(ret,), loc=loc_b),
        ir.end_function(loc_b),
    ]
    return ir.GotoFunction("getchar", [], body)


def convert_to_goto(program: TypedProgram) -> ir.GotoModel:
    functions = {}
    for name, fn in program.functions.items():
        if fn.body is None:
            continue
        functions[name] = FunctionConverter(program, fn).convert()
    getchar_sym = program.symtab.get("getchar")
    getchar_called = any(
        ins.kind == "FUNCTION_CALL" and ins.func == "getchar"
        for fn in functions.values() for ins in fn.body)
    if (getchar_sym is not None and getchar_sym.is_nondet_source
            and getchar_called):
        functions["getchar"] = make_getchar_body(program)
    model = ir.GotoModel(program.symtab, functions)
    model.validate()
    return model


def number_loops(model: ir.GotoModel):
    for fn in model.functions.values():
        fn.number_loops()
    return model
