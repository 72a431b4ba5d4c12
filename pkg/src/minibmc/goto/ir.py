"""Guarded-GOTO intermediate representation.

A GotoFunction is a flat list of instructions; structured control flow has
been lowered to conditional forward/backward gotos.  A GotoModel bundles the
symbol table with one GOTO program per function plus the entry point name.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .. import lang
from ..lang import TRUE, Expr, SourceLocation

KINDS = ("DECL", "DEAD", "ASSIGN", "ASSUME", "ASSERT", "GOTO",
         "FUNCTION_CALL", "INPUT", "OUTPUT", "SKIP", "END_FUNCTION",
         "RETURN")  # RETURN only exists between conversion and remove_returns


@dataclass
class Instr:
    kind: str
    loc: SourceLocation | None = None
    guard: Expr = TRUE            # GOTO / ASSUME / ASSERT
    lhs: Expr | None = None       # ASSIGN target; DECL/DEAD symbol
    rhs: Expr | None = None       # ASSIGN value; RETURN value
    target: int | None = None     # GOTO destination index
    func: str = ""                # FUNCTION_CALL callee symbol name
    callee: Expr | None = None    # FUNCTION_CALL through a pointer
    call_lhs: Expr | None = None  # FUNCTION_CALL result target
    args: tuple = ()              # FUNCTION_CALL arguments; INPUT/OUTPUT values
    io_name: str = ""             # INPUT/OUTPUT label
    labels: tuple = ()            # e.g. __CPROVER_HIDE
    property_class: str = ""      # ASSERT
    property_id: str = ""         # assigned by the instrumentation pass
    property_description: str = ""  # ASSERT
    loop_number: int | None = None  # backjump GOTOs

    def copy(self, **changes):
        return replace(self, **changes)

    @property
    def is_backjump(self):
        return self.kind == "GOTO" and self.target is not None

    def __repr__(self):
        extra = ""
        if self.kind == "GOTO":
            extra = f" -> {self.target}"
        return f"<Instr {self.kind}{extra}>"


@dataclass
class GotoFunction:
    name: str
    parameters: list = field(default_factory=list)  # symbol names
    body: list = field(default_factory=list)

    def backjumps(self):
        """(index, instr) pairs of GOTOs that jump backwards, in order."""
        return [(i, ins) for i, ins in enumerate(self.body)
                if ins.kind == "GOTO" and ins.target is not None
                and ins.target <= i]

    def number_loops(self):
        """Assign loop numbers: rank of the backjump within the function."""
        for n, (i, ins) in enumerate(self.backjumps()):
            self.body[i] = ins.copy(loop_number=n)

    def loops(self):
        """loop number -> (backjump index, target index)."""
        return {ins.loop_number: (i, ins.target)
                for i, ins in enumerate(self.body)
                if ins.loop_number is not None}

    def validate(self):
        assert self.body, f"{self.name}: empty body"
        assert self.body[-1].kind == "END_FUNCTION", \
            f"{self.name}: last instruction is {self.body[-1].kind}"
        assert sum(1 for i in self.body if i.kind == "END_FUNCTION") == 1, \
            f"{self.name}: multiple END_FUNCTION"
        for i, ins in enumerate(self.body):
            if ins.kind == "GOTO":
                assert ins.target is not None and 0 <= ins.target < len(self.body), \
                    f"{self.name}: instruction {i} has target {ins.target}"


@dataclass
class GotoModel:
    symbol_table: lang.SymbolTable
    functions: dict
    entry: str = ""

    def function(self, name) -> GotoFunction:
        return self.functions[name]

    def validate(self):
        for fn in self.functions.values():
            fn.validate()
        if self.entry:
            assert self.entry in self.functions


def decl(sym_expr, loc=None):
    return Instr("DECL", lhs=sym_expr, loc=loc)


def dead(sym_expr, loc=None):
    return Instr("DEAD", lhs=sym_expr, loc=loc)


def assign(lhs, rhs, loc=None):
    return Instr("ASSIGN", lhs=lhs, rhs=rhs, loc=loc)


def goto(target, guard=TRUE, loc=None):
    return Instr("GOTO", target=target, guard=guard, loc=loc)


def assume(guard, loc=None):
    return Instr("ASSUME", guard=guard, loc=loc)


def assert_(guard, property_class, description, loc=None):
    return Instr("ASSERT", guard=guard, property_class=property_class,
                 property_description=description, loc=loc)


def call(func, args, loc=None):
    return Instr("FUNCTION_CALL", func=func, args=tuple(args), loc=loc)


def skip(loc=None):
    return Instr("SKIP", loc=loc)


def end_function(loc=None):
    return Instr("END_FUNCTION", loc=loc)
