"""Recursive-descent parser for the supported C subset."""

from __future__ import annotations

from ..lang import FrontendError
from .ast import (Block, Break, Continue, Decl, Declarator, ExprStmt, For,
                  FuncDef, If, Null, ParamDecl, PExpr, Return, TranslationUnit,
                  TypeSpec, While)
from .lexer import Lexer

_TYPE_STARTERS = {"int", "char", "short", "long", "signed", "unsigned", "void", "_Bool"}

_ASSIGN_OPS = {"+=": "+", "-=": "-", "*=": "*", "/=": "/", "%=": "%",
               "&=": "&", "|=": "|", "^=": "^", "<<=": "<<", ">>=": ">>"}


class Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    # -- token helpers --------------------------------------------------
    def peek(self, ahead=0):
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self):
        tok = self.peek()
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, text):
        tok = self.peek()
        return tok.text == text and tok.kind in ("punct", "keyword")

    def accept(self, text):
        if self.at(text):
            return self.next()
        return None

    def expect(self, text):
        tok = self.peek()
        if not self.at(text):
            raise FrontendError(f"expected {text!r} but found {tok.text or '<eof>'!r}",
                                tok.loc)
        return self.next()

    def error(self, message):
        tok = self.peek()
        raise FrontendError(f"{message} (at {tok.text or '<eof>'!r})", tok.loc)

    # -- grammar --------------------------------------------------------
    def parse_translation_unit(self):
        items = []
        while self.peek().kind != "eof":
            items.append(self.external_declaration())
        return TranslationUnit(items)

    def at_type(self):
        tok = self.peek()
        return tok.kind == "keyword" and tok.text in _TYPE_STARTERS

    def type_spec(self):
        tok = self.peek()
        if not self.at_type():
            self.error("expected a type")
        signed = None
        base = None
        longs = 0
        while self.at_type():
            text = self.next().text
            if text == "signed":
                signed = True
            elif text == "unsigned":
                signed = False
            elif text == "long":
                longs += 1
                base = "long"
            elif text in ("int",):
                base = base or "int"
            elif text in ("char", "short", "void", "_Bool"):
                base = text
        if base is None:
            base = "int"  # bare signed/unsigned
        if base == "_Bool":
            base = "bool"
        return TypeSpec(base=base, signed=signed), tok.loc

    def declarator(self, params_allowed=True):
        loc = self.peek().loc
        if self.accept("("):
            # function pointer declarator: ( * name ) ( params )
            self.expect("*")
            name = self._ident()
            self.expect(")")
            self.expect("(")
            params = self.param_list()
            return Declarator(name=name, func_params=params,
                              is_func_pointer=True, loc=loc)
        name = self._ident()
        decl = Declarator(name=name, loc=loc)
        if params_allowed and self.accept("("):
            decl.func_params = self.param_list()
            return decl
        while self.accept("["):
            decl.array_dims.append(self.expression())
            self.expect("]")
        return decl

    def _ident(self):
        tok = self.peek()
        if tok.kind != "ident":
            self.error("expected an identifier")
        return self.next().text

    def param_list(self):
        params = []
        if self.accept(")"):
            return params
        if self.at("void") and self.peek(1).text == ")":
            self.next()
            self.expect(")")
            return params
        while True:
            spec, _ = self.type_spec()
            if self.at(")") or self.at(","):
                decl = Declarator(name="", loc=self.peek().loc)  # unnamed param
            else:
                decl = self.declarator(params_allowed=False)
            params.append(ParamDecl(spec, decl))
            if not self.accept(","):
                break
        self.expect(")")
        return params

    def external_declaration(self):
        spec, loc = self.type_spec()
        decl = self.declarator()
        if decl.func_params is not None and not decl.is_func_pointer:
            if self.at("{"):
                body = self.block()
                return FuncDef(spec, decl, body, loc=loc)
            self.expect(";")
            return FuncDef(spec, decl, None, loc=loc)
        return self.finish_declaration(spec, decl, loc)

    def finish_declaration(self, spec, first, loc):
        declarators = [(first, self.initializer_opt())]
        while self.accept(","):
            decl = self.declarator(params_allowed=False)
            declarators.append((decl, self.initializer_opt()))
        self.expect(";")
        return Decl(spec, declarators, loc=loc)

    def initializer_opt(self):
        if not self.accept("="):
            return None
        if self.at("{"):
            self.next()
            elems = []
            while not self.at("}"):
                elems.append(self.assignment_expr())
                if not self.accept(","):
                    break
            self.expect("}")
            return elems
        return self.assignment_expr()

    # -- statements -----------------------------------------------------
    def block(self):
        loc = self.expect("{").loc
        stmts = []
        while not self.at("}"):
            stmts.append(self.statement())
        self.expect("}")
        return Block(stmts, loc=loc)

    def statement(self):
        tok = self.peek()
        if self.at("{"):
            return self.block()
        if self.at_type():
            spec, loc = self.type_spec()
            decl = self.declarator(params_allowed=False)
            return self.finish_declaration(spec, decl, loc)
        if self.accept(";"):
            return Null(loc=tok.loc)
        if self.accept("if"):
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            then = self.statement()
            els = self.statement() if self.accept("else") else None
            return If(cond, then, els, loc=tok.loc)
        if self.accept("while"):
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            return While(cond, self.statement(), loc=tok.loc)
        if self.accept("for"):
            self.expect("(")
            if self.accept(";"):
                init = None
            elif self.at_type():
                spec, dloc = self.type_spec()
                decl = self.declarator(params_allowed=False)
                init = self.finish_declaration(spec, decl, dloc)
            else:
                init = ExprStmt(self.expression(), loc=tok.loc)
                self.expect(";")
            cond = None if self.at(";") else self.expression()
            self.expect(";")
            inc = None if self.at(")") else self.expression()
            self.expect(")")
            return For(init, cond, inc, self.statement(), loc=tok.loc)
        if self.accept("return"):
            expr = None if self.at(";") else self.expression()
            self.expect(";")
            return Return(expr, loc=tok.loc)
        if self.accept("break"):
            self.expect(";")
            return Break(loc=tok.loc)
        if self.accept("continue"):
            self.expect(";")
            return Continue(loc=tok.loc)
        expr = self.expression()
        self.expect(";")
        return ExprStmt(expr, loc=tok.loc)

    # -- expressions (precedence climbing) ------------------------------
    def expression(self):
        return self.assignment_expr()

    def assignment_expr(self):
        left = self.ternary_expr()
        tok = self.peek()
        if self.at("="):
            self.next()
            right = self.assignment_expr()
            return PExpr("assign", tok.loc, ops=[left, right])
        if tok.kind == "punct" and tok.text in _ASSIGN_OPS:
            self.next()
            right = self.assignment_expr()
            return PExpr("opassign", tok.loc, op=_ASSIGN_OPS[tok.text],
                         ops=[left, right])
        return left

    def ternary_expr(self):
        cond = self.logical_or()
        tok = self.peek()
        if self.accept("?"):
            then = self.expression()
            self.expect(":")
            els = self.ternary_expr()
            return PExpr("ternary", tok.loc, ops=[cond, then, els])
        return cond

    _LEVELS = [
        ("||",), ("&&",), ("|",), ("^",), ("&",), ("==", "!="),
        ("<", "<=", ">", ">="), ("<<", ">>"), ("+", "-"), ("*", "/", "%"),
    ]

    def logical_or(self):
        return self._binary(0)

    def _binary(self, level):
        if level >= len(self._LEVELS):
            return self.unary_expr()
        ops = self._LEVELS[level]
        left = self._binary(level + 1)
        while True:
            tok = self.peek()
            if tok.kind == "punct" and tok.text in ops:
                self.next()
                right = self._binary(level + 1)
                kind = "logical" if tok.text in ("&&", "||") else "binary"
                left = PExpr(kind, tok.loc, op=tok.text, ops=[left, right])
            else:
                return left

    def unary_expr(self):
        tok = self.peek()
        if tok.kind == "punct" and tok.text in ("-", "!", "~", "+", "&", "*"):
            self.next()
            operand = self.unary_expr()
            if tok.text == "+":
                return operand
            op = {"-": "neg", "!": "not", "~": "bitnot",
                  "&": "addrof", "*": "deref"}[tok.text]
            return PExpr("unary", tok.loc, op=op, ops=[operand])
        if tok.kind == "punct" and tok.text in ("++", "--"):
            self.next()
            return PExpr("preincdec", tok.loc, op=tok.text,
                         ops=[self.unary_expr()])
        return self.postfix_expr()

    def postfix_expr(self):
        expr = self.primary_expr()
        while True:
            tok = self.peek()
            if self.accept("["):
                idx = self.expression()
                self.expect("]")
                expr = PExpr("index", tok.loc, ops=[expr, idx])
            elif self.accept("("):
                args = []
                if not self.at(")"):
                    while True:
                        args.append(self.assignment_expr())
                        if not self.accept(","):
                            break
                self.expect(")")
                expr = PExpr("call", tok.loc, ops=[expr] + args)
            elif tok.kind == "punct" and tok.text in ("++", "--"):
                self.next()
                expr = PExpr("postincdec", tok.loc, op=tok.text, ops=[expr])
            else:
                return expr

    def primary_expr(self):
        tok = self.peek()
        if tok.kind == "number":
            self.next()
            return PExpr("const", tok.loc, value=tok.value, text=tok.text)
        if tok.kind == "char":
            self.next()
            return PExpr("char", tok.loc, value=tok.value)
        if tok.kind == "string":
            self.next()
            return PExpr("string", tok.loc, text=tok.text)
        if tok.kind == "ident":
            self.next()
            return PExpr("ident", tok.loc, name=tok.text)
        if self.accept("("):
            expr = self.expression()
            self.expect(")")
            return expr
        self.error("expected an expression")


def parse_translation_unit(source, filename="<source>", defines=None,
                           include_paths=()):
    lexer = Lexer(source, filename, defines=defines, include_paths=include_paths)
    return Parser(lexer.tokens).parse_translation_unit()
