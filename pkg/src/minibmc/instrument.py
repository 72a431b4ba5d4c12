"""Automatic safety-assertion generation (bounds, overflow, division, shift,
conversion checks) and property identifier assignment.

Checks are inserted as ASSERT instructions immediately before the instruction
containing the risky operation.  Conditions that constant-fold to true are
suppressed.  Sub-expressions that are only evaluated under a condition (the
branches of a conditional expression) get that condition as an implication so
short-circuit evaluation does not produce spurious alarms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import lang
from .goto import ir
from .goto.transforms import rebuild
from .lang import Expr, PlatformConfig, and_, const, not_, or_, typecast
from .render import display_name, render_expr
from .simplify import simplify


@dataclass
class CheckOptions:
    bounds_check: bool = False
    signed_overflow_check: bool = False
    unsigned_overflow_check: bool = False
    div_by_zero_check: bool = False
    undefined_shift_check: bool = False
    conversion_check: bool = False

    def any(self):
        return any((self.bounds_check, self.signed_overflow_check,
                    self.unsigned_overflow_check, self.div_by_zero_check,
                    self.undefined_shift_check, self.conversion_check))


@dataclass
class Property:
    id: str
    klass: str
    description: str
    loc: lang.SourceLocation | None
    guard_expr: Expr
    status: str = "UNKNOWN"


OP_NAMES = {"+": "+", "-": "-", "*": "*", "/": "division"}


class CheckGenerator:
    def __init__(self, opts: CheckOptions, config: PlatformConfig):
        self.opts = opts
        self.config = config
        self.checks = []  # (cond, klass, description) for current instruction

    def add(self, cond, klass, description):
        cond = simplify(cond)
        if cond.is_true:
            return
        if (cond, klass, description) not in self.checks:
            self.checks.append((cond, klass, description))

    # ctx is the condition under which the sub-expression is evaluated
    def scan(self, e: Expr, ctx: Expr):
        if e.kind == "ite":
            self.scan(e.ops[0], ctx)
            self.scan(e.ops[1], and_(ctx, e.ops[0]))
            self.scan(e.ops[2], and_(ctx, not_(e.ops[0])))
            return
        for op in e.ops:
            self.scan(op, ctx)
        guarded = (lambda c: or_(not_(ctx), c)) if not ctx.is_true else (lambda c: c)

        if e.kind == "index" and self.opts.bounds_check:
            self.index_check(e, guarded)
        elif e.kind == "unary" and e.op == "neg" and e.typ.is_signed \
                and self.opts.signed_overflow_check:
            x = e.ops[0]
            cond = not_(lang.binary("==", x, const(x.typ.min_value(), x.typ),
                                    lang.BOOL))
            self.add(guarded(cond), "overflow",
                     "arithmetic overflow on signed unary minus in "
                     f"{render_expr(e, self.config)}")
        elif e.kind == "binary":
            self.binary_checks(e, guarded)
        elif e.kind == "typecast" and self.opts.conversion_check:
            self.conversion_check(e, guarded)

    def index_check(self, e: Expr, guarded):
        base, idx = e.ops
        if base.typ.kind != "array":
            return
        slong = self.config.long_type()
        cast_idx = simplify(typecast(idx, slong))
        shown = lang.index(base, typecast(idx, slong))
        name = display_name(base.name) if base.kind == "symbol" else "array"
        lower = lang.binary(">=", cast_idx, const(0, slong), lang.BOOL)
        self.add(guarded(lower), "array_bounds",
                 f"array `{name}' lower bound in "
                 f"{render_expr(shown, self.config)}")
        upper = not_(lang.binary(">=", cast_idx,
                                 const(base.typ.size, slong), lang.BOOL))
        self.add(guarded(upper), "array_bounds",
                 f"array `{name}' upper bound in "
                 f"{render_expr(shown, self.config)}")

    def binary_checks(self, e: Expr, guarded):
        op = e.op
        a, b = e.ops if len(e.ops) == 2 else (None, None)
        if op in ("+", "-", "*") and e.typ.is_signed \
                and self.opts.signed_overflow_check:
            self.add(guarded(self.representable(op, a, b, e.typ)), "overflow",
                     f"arithmetic overflow on signed {op} in "
                     f"{render_expr(e, self.config)}")
        if op in ("+", "-", "*") and e.typ.kind == "unsignedbv" \
                and self.opts.unsigned_overflow_check:
            self.add(guarded(self.representable(op, a, b, e.typ)), "overflow",
                     f"arithmetic overflow on unsigned {op} in "
                     f"{render_expr(e, self.config)}")
        if op in ("/", "%") and self.opts.div_by_zero_check:
            cond = lang.binary("!=", b, const(0, b.typ), lang.BOOL)
            self.add(guarded(cond), "division_by_zero",
                     f"division by zero in {render_expr(e, self.config)}")
        if op == "/" and e.typ.is_signed and self.opts.signed_overflow_check:
            cond = not_(and_(
                lang.binary("==", a, const(a.typ.min_value(), a.typ), lang.BOOL),
                lang.binary("==", b, const(-1, b.typ), lang.BOOL)))
            self.add(guarded(cond), "overflow",
                     "arithmetic overflow on signed division in "
                     f"{render_expr(e, self.config)}")
        if op in ("<<", ">>") and self.opts.undefined_shift_check:
            width = e.ops[0].typ.bit_width
            if b.typ.is_signed:
                self.add(guarded(lang.binary(">=", b, const(0, b.typ),
                                             lang.BOOL)),
                         "undefined_shift",
                         f"shift distance negative in "
                         f"{render_expr(e, self.config)}")
            self.add(guarded(lang.binary("<", b, const(width, b.typ),
                                         lang.BOOL)),
                     "undefined_shift",
                     f"shift distance too large in "
                     f"{render_expr(e, self.config)}")

    def representable(self, op, a, b, typ):
        wide = (lang.signedbv if typ.is_signed else lang.unsignedbv)(
            typ.width * 2)
        r = lang.binary(op, typecast(a, wide), typecast(b, wide), wide)
        lo = lang.binary(">=", r, const(typ.min_value(), wide), lang.BOOL)
        hi = lang.binary("<=", r, const(typ.max_value(), wide), lang.BOOL)
        return and_(lo, hi) if typ.is_signed else (
            and_(lo, hi) if op == "-" else hi)

    def conversion_check(self, e: Expr, guarded):
        src, dst = e.ops[0].typ, e.typ
        if not (src.is_bitvector and dst.is_bitvector):
            return
        if dst.kind == "boolean":
            return
        if dst.min_value() <= src.min_value() and src.max_value() <= dst.max_value():
            return  # value-preserving
        wide_w = max(src.bit_width, dst.bit_width) * 2
        wide = lang.signedbv(wide_w)
        v = typecast(e.ops[0], wide)
        lo = lang.binary(">=", v, const(dst.min_value(), wide), lang.BOOL)
        hi = lang.binary("<=", v, const(dst.max_value(), wide), lang.BOOL)
        self.add(guarded(and_(lo, hi)), "conversion",
                 "arithmetic overflow on type conversion in "
                 f"{render_expr(e, self.config)}")

    def instruction_checks(self, instr: ir.Instr):
        self.checks = []
        if instr.kind == "ASSIGN":
            if instr.lhs.kind == "index":
                self.scan(lang.Expr("index", instr.lhs.typ, ops=instr.lhs.ops),
                          lang.TRUE)
            self.scan(instr.rhs, lang.TRUE)
        elif instr.kind in ("GOTO", "ASSUME", "ASSERT"):
            self.scan(instr.guard, lang.TRUE)
        elif instr.kind in ("FUNCTION_CALL", "INPUT", "OUTPUT"):
            for a in instr.args:
                self.scan(a, lang.TRUE)
        return [
            ir.Instr("ASSERT", guard=cond, property_class=klass,
                     property_description=desc, loc=instr.loc)
            for cond, klass, desc in self.checks
        ]


def generate_checks(model: ir.GotoModel, opts: CheckOptions,
                    config: PlatformConfig):
    """Insert check assertions, then (re)assign property ids.  Returns the
    model and the property list in instruction order."""
    gen = CheckGenerator(opts, config)
    if opts.any():
        for fn in model.functions.values():
            if fn.name.startswith("__CPROVER") or fn.name == "getchar":
                continue
            replacements = {}
            for i, instr in enumerate(fn.body):
                checks = gen.instruction_checks(instr)
                if checks:
                    replacements[i] = checks + [instr]
            if replacements:
                fn.body = rebuild(fn.body, replacements)
    assign_property_ids(model)
    from .goto.convert import number_loops
    number_loops(model)
    return model, enumerate_properties(model, config)


def assign_property_ids(model: ir.GotoModel):
    for fn in model.functions.values():
        counters = {}
        for i, instr in enumerate(fn.body):
            if instr.kind != "ASSERT" or instr.property_id:
                continue
            klass = instr.property_class or "assertion"
            n = counters.get(klass, 0) + 1
            counters[klass] = n
            fn.body[i] = instr.copy(property_class=klass,
                                    property_id=f"{fn.name}.{klass}.{n}")


def enumerate_properties(model: ir.GotoModel, config: PlatformConfig):
    props = []
    for fn in model.functions.values():
        for instr in fn.body:
            if instr.kind == "ASSERT" and instr.property_id:
                props.append(Property(instr.property_id, instr.property_class,
                                      instr.property_description, instr.loc,
                                      instr.guard))
    return props


def show_properties(props, config: PlatformConfig) -> str:
    lines = []
    for p in props:
        lines.append(f"Property {p.id}:")
        lines.append(f"  {p.loc}" if p.loc is not None else "  no location")
        lines.append(f"  {p.description}")
        lines.append(f"  {render_expr(p.guard_expr, config)}")
        lines.append("")
    return "\n".join(lines).rstrip("\n")
