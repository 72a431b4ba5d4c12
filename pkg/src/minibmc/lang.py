"""Core language data model: types, expressions, symbols, platform configuration.

Everything here is immutable (frozen dataclasses) so later pipeline stages can
share structure freely.  Expressions compare structurally; source locations are
carried along but excluded from equality so that caching and structural checks
ignore them.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace


@dataclass(frozen=True)
class SourceLocation:
    file: str
    line: int
    function: str | None = None
    working_directory: str | None = None

    def __str__(self):
        parts = [f"file {self.file}", f"line {self.line}"]
        if self.function:
            parts.append(f"function {self.function}")
        return " ".join(parts)


NO_LOCATION = SourceLocation("<none>", 1)
BUILTIN_LOCATION = SourceLocation("<built-in-additions>", 1)


@dataclass(frozen=True)
class CType:
    """A resolved bit-level type.

    kind is one of: boolean, signedbv, unsignedbv, array, code, code_pointer,
    void.  width is the bit width for the bitvector kinds (and 1 for boolean).
    """

    kind: str
    width: int = 0
    element: "CType | None" = None
    size: int = 0
    params: tuple["CType", ...] = ()
    ret: "CType | None" = None
    c_name: str = ""

    @property
    def is_signed(self):
        return self.kind == "signedbv"

    @property
    def is_bitvector(self):
        return self.kind in ("signedbv", "unsignedbv", "boolean", "code_pointer")

    @property
    def bit_width(self):
        if self.kind == "boolean":
            return 1
        return self.width

    def min_value(self):
        if self.kind == "signedbv":
            return -(1 << (self.width - 1))
        return 0

    def max_value(self):
        if self.kind == "signedbv":
            return (1 << (self.width - 1)) - 1
        if self.kind == "boolean":
            return 1
        return (1 << self.width) - 1


BOOL = CType("boolean", width=1, c_name="_Bool")
VOID = CType("void", c_name="void")


def signedbv(width, c_name=""):
    return CType("signedbv", width=width, c_name=c_name)


def unsignedbv(width, c_name=""):
    return CType("unsignedbv", width=width, c_name=c_name)


def array_of(element, size):
    return CType("array", element=element, size=size)


def code_type(params, ret):
    return CType("code", params=tuple(params), ret=ret)


def code_pointer(params, ret, width=32):
    return CType("code_pointer", width=width, params=tuple(params), ret=ret)


@dataclass(frozen=True)
class PlatformConfig:
    int_width: int = 32
    long_width: int = 64
    char_signed: bool = True
    endianness: str = "little"

    def int_type(self):
        return signedbv(self.int_width, "signed int")

    def uint_type(self):
        return unsignedbv(self.int_width, "unsigned int")

    def long_type(self):
        return signedbv(self.long_width, "signed long int")

    def char_type(self):
        if self.char_signed:
            return signedbv(8, "char")
        return unsignedbv(8, "char")

    def type_name(self, typ):
        """C display name for a type under this platform."""
        if typ.c_name:
            return typ.c_name
        if typ.kind == "boolean":
            return "_Bool"
        if typ.kind == "void":
            return "void"
        if typ.kind == "array":
            return f"{self.type_name(typ.element)}[{typ.size}]"
        if typ.kind in ("code", "code_pointer"):
            return "code"
        sign = "signed" if typ.is_signed else "unsigned"
        for width, base in ((8, "char"), (16, "short int"), (self.int_width, "int"),
                            (self.long_width, "long int")):
            if typ.width == width:
                return f"{sign} {base}" if base != "char" else (
                    "char" if (typ.is_signed == self.char_signed) else f"{sign} char")
        return f"{sign}bv[{typ.width}]"


UNARY_OPS = ("neg", "not", "bitnot")
BINARY_OPS = ("+", "-", "*", "/", "%", "<<", ">>", "&", "|", "^",
              "<", "<=", ">", ">=", "==", "!=", "and", "or")
COMPARISONS = ("<", "<=", ">", ">=", "==", "!=")


@dataclass(frozen=True)
class Expr:
    """Expression node.

    kind: const, symbol, nondet, unary, binary, index, store, typecast, ite,
    addr_of, array, string.  For const, value holds the interpreted (signed
    where applicable) integer value.  ops holds operands; op is the operator
    name for unary/binary.
    """

    kind: str
    typ: CType
    ops: tuple = ()
    op: str = ""
    value: int = 0
    name: str = ""
    loc: SourceLocation | None = field(default=None, compare=False)

    def with_loc(self, loc):
        return replace(self, loc=loc)

    @property
    def is_const(self):
        return self.kind == "const"

    @property
    def is_true(self):
        return self.kind == "const" and self.typ.kind == "boolean" and self.value == 1

    @property
    def is_false(self):
        return self.kind == "const" and self.typ.kind == "boolean" and self.value == 0

    def bit_pattern(self):
        """Two's-complement bit string of a constant, MSB first."""
        assert self.kind == "const"
        w = self.typ.bit_width
        return format(self.value & ((1 << w) - 1), f"0{w}b")


TRUE = Expr("const", BOOL, value=1)
FALSE = Expr("const", BOOL, value=0)


def const(value, typ, loc=None):
    return Expr("const", typ, value=value, loc=loc)


def symbol(name, typ, loc=None):
    return Expr("symbol", typ, name=name, loc=loc)


def nondet(typ, loc=None):
    return Expr("nondet", typ, loc=loc)


def unary(op, a, typ=None, loc=None):
    return Expr("unary", typ or a.typ, ops=(a,), op=op, loc=loc)


def binary(op, a, b, typ, loc=None):
    return Expr("binary", typ, ops=(a, b), op=op, loc=loc)


def not_(a):
    if a.is_true:
        return FALSE
    if a.is_false:
        return TRUE
    if a.kind == "unary" and a.op == "not":
        return a.ops[0]
    return Expr("unary", BOOL, ops=(a,), op="not")


def and_(a, b):
    if a.is_false or b.is_false:
        return FALSE
    if a.is_true:
        return b
    if b.is_true:
        return a
    if a is b:
        return a
    return Expr("binary", BOOL, ops=(a, b), op="and")


def or_(a, b):
    if a.is_true or b.is_true:
        return TRUE
    if a.is_false:
        return b
    if b.is_false:
        return a
    if a is b:
        return a
    return Expr("binary", BOOL, ops=(a, b), op="or")


def ite(cond, then, els, loc=None):
    if cond.is_true:
        return then
    if cond.is_false:
        return els
    if then is els or then == els:
        return then
    return Expr("ite", then.typ, ops=(cond, then, els), loc=loc)


def index(base, idx, loc=None):
    return Expr("index", base.typ.element, ops=(base, idx), loc=loc)


def store(base, idx, value, loc=None):
    return Expr("store", base.typ, ops=(base, idx, value), loc=loc)


def typecast(e, typ, loc=None):
    if e.typ == typ:
        return e
    return Expr("typecast", typ, ops=(e,), loc=loc)


def addr_of(func_name, typ, loc=None):
    return Expr("addr_of", typ, name=func_name, loc=loc)


def array_expr(elements, typ, loc=None):
    return Expr("array", typ, ops=tuple(elements), loc=loc)


def walk(e):
    yield e
    for op in e.ops:
        yield from walk(op)


@dataclass
class Symbol:
    name: str
    base_name: str
    typ: CType
    value: Expr | None = None
    loc: SourceLocation | None = None
    is_static_lifetime: bool = False
    is_parameter: bool = False
    is_nondet_source: bool = False
    is_function: bool = False
    is_hidden: bool = False


class SymbolTable:
    """Name-keyed, insertion-ordered symbol collection."""

    def __init__(self):
        self._symbols: dict[str, Symbol] = {}

    def add(self, sym: Symbol):
        if sym.name in self._symbols:
            raise KeyError(f"duplicate symbol {sym.name}")
        self._symbols[sym.name] = sym
        return sym

    def replace(self, sym: Symbol):
        self._symbols[sym.name] = sym

    def __contains__(self, name):
        return name in self._symbols

    def __getitem__(self, name) -> Symbol:
        return self._symbols[name]

    def get(self, name, default=None):
        return self._symbols.get(name, default)

    def __iter__(self):
        return iter(self._symbols.values())

    def __len__(self):
        return len(self._symbols)

    def names(self):
        return list(self._symbols)


class FrontendError(Exception):
    """Syntax or typechecking failure; carries a source location when known."""

    def __init__(self, message, loc: SourceLocation | None = None):
        self.loc = loc
        if loc is not None:
            message = f"{loc.file} line {loc.line}: {message}"
        super().__init__(message)


class ConfigurationError(Exception):
    pass


class InternalError(Exception):
    pass
