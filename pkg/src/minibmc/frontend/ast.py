"""Parse-tree node definitions (untyped; the typechecker resolves these into
lang.Expr trees and a symbol table)."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..lang import SourceLocation


@dataclass
class TypeSpec:
    base: str  # int, char, short, long, bool, void
    signed: bool | None = None  # None = default for the base type


@dataclass
class Declarator:
    name: str
    array_dims: list = field(default_factory=list)  # PExpr constant dims
    func_params: "list[ParamDecl] | None" = None    # function declarator
    is_func_pointer: bool = False
    loc: SourceLocation | None = None


@dataclass
class ParamDecl:
    spec: TypeSpec
    declarator: Declarator


@dataclass
class PExpr:
    kind: str  # const, char, string, ident, unary, binary, assign, opassign,
               # preincdec, postincdec, call, index, ternary, logical
    loc: SourceLocation
    op: str = ""
    value: int = 0
    name: str = ""
    text: str = ""
    ops: list = field(default_factory=list)


# -- statements --------------------------------------------------------------

@dataclass
class Decl:
    spec: TypeSpec
    declarators: list  # (Declarator, init PExpr | list[PExpr] | None)
    loc: SourceLocation = None


@dataclass
class ExprStmt:
    expr: PExpr
    loc: SourceLocation = None


@dataclass
class If:
    cond: PExpr
    then: object
    els: object
    loc: SourceLocation = None


@dataclass
class While:
    cond: PExpr
    body: object
    loc: SourceLocation = None


@dataclass
class For:
    init: object  # Decl | ExprStmt | None
    cond: PExpr | None
    inc: PExpr | None
    body: object
    loc: SourceLocation = None


@dataclass
class Return:
    expr: PExpr | None
    loc: SourceLocation = None


@dataclass
class Break:
    loc: SourceLocation = None


@dataclass
class Continue:
    loc: SourceLocation = None


@dataclass
class Block:
    stmts: list
    loc: SourceLocation = None


@dataclass
class Null:
    loc: SourceLocation = None


@dataclass
class FuncDef:
    spec: TypeSpec
    declarator: Declarator
    body: Block | None  # None for a pure declaration
    loc: SourceLocation = None


@dataclass
class TranslationUnit:
    items: list  # Decl | FuncDef

    def dump(self):
        lines = ["translation unit"]
        for item in self.items:
            _dump(item, lines, 1)
        return "\n".join(lines)


def _dump(node, lines, depth):
    pad = "  " * depth
    if isinstance(node, FuncDef):
        lines.append(f"{pad}function {node.declarator.name} "
                     f"(file {node.loc.file} line {node.loc.line})")
        if node.body is not None:
            _dump(node.body, lines, depth + 1)
    elif isinstance(node, Decl):
        for decl, init in node.declarators:
            lines.append(f"{pad}declaration {decl.name} "
                         f"(file {node.loc.file} line {node.loc.line})")
            if isinstance(init, PExpr):
                _dump(init, lines, depth + 1)
    elif isinstance(node, Block):
        lines.append(f"{pad}block")
        for s in node.stmts:
            _dump(s, lines, depth + 1)
    elif isinstance(node, PExpr):
        label = node.kind
        if node.kind in ("const", "char"):
            label += f" {node.value}"
        elif node.kind == "ident":
            label += f" {node.name}"
        elif node.op:
            label += f" {node.op}"
        lines.append(f"{pad}{label} (line {node.loc.line})")
        for op in node.ops:
            _dump(op, lines, depth + 1)
    elif node is None:
        lines.append(f"{pad}<none>")
    else:
        name = type(node).__name__.lower()
        lines.append(f"{pad}{name} (line {node.loc.line})")
        for attr in ("cond", "init", "inc", "expr"):
            child = getattr(node, attr, None)
            if child is not None:
                _dump(child, lines, depth + 1)
        for attr in ("then", "els", "body"):
            child = getattr(node, attr, None)
            if child is not None:
                _dump(child, lines, depth + 1)
