"""Bit-precise translation of the SSA equation into CNF.

Every bitvector value is a list of literals, least significant bit first.
Literal 1 is reserved and constrained true, so constants fold to 1/-1.
Circuits are the usual two's-complement constructions: ripple-carry
add/subtract, shift-and-add multiply, restoring divide, a barrel shifter,
and comparison via borrow chains.  Gates go through a Tseitin transformation
with syntactic caching; the builder also keeps a netlist so tests can
re-simulate circuits independently of the clause set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import lang
from .lang import Expr, InternalError
from .simplify import simplify

TRUEL = 1
FALSEL = -1


@dataclass
class CnfFormula:
    clauses: list
    variable_count: int


@dataclass
class VarMap:
    symbols: dict = field(default_factory=dict)   # name -> bits | [bits,...]
    types: dict = field(default_factory=dict)     # name -> CType
    indicators: dict = field(default_factory=dict)  # property id -> literal

    def value_of(self, name, model):
        """Project a symbol's integer value (or list, for arrays) out of a
        SAT model."""
        typ = self.types[name]
        bits = self.symbols[name]
        if typ.kind == "array":
            return [_bits_value(b, typ.element, model) for b in bits]
        return _bits_value(bits, typ, model)


def _lit_value(lit, model):
    if lit == TRUEL:
        return True
    if lit == FALSEL:
        return False
    v = model[abs(lit)]
    return v if lit > 0 else not v


def _bits_value(bits, typ, model):
    u = 0
    for i, b in enumerate(bits):
        if _lit_value(b, model):
            u |= 1 << i
    if typ.is_signed and bits and u >= 1 << (len(bits) - 1):
        u -= 1 << len(bits)
    return u


class CnfBuilder:
    def __init__(self):
        self.nvars = 1  # variable 1 is the constant true
        self.clauses = [[TRUEL]]
        self.gates = []  # (op, out, (ins...)) netlist for test replay
        self.cache = {}

    def new_var(self):
        self.nvars += 1
        return self.nvars

    def add_clause(self, lits):
        if TRUEL in lits:
            return
        self.clauses.append([l for l in lits if l != FALSEL])

    # -- boolean gates -----------------------------------------------------
    def g_not(self, a):
        return -a

    def g_and(self, a, b):
        if a == FALSEL or b == FALSEL or a == -b:
            return FALSEL
        if a == TRUEL:
            return b
        if b == TRUEL or a == b:
            return a
        key = ("and", *sorted((a, b)))
        out = self.cache.get(key)
        if out is None:
            out = self.new_var()
            self.add_clause([-out, a])
            self.add_clause([-out, b])
            self.add_clause([out, -a, -b])
            self.cache[key] = out
            self.gates.append(("and", out, (a, b)))
        return out

    def g_or(self, a, b):
        return -self.g_and(-a, -b)

    def g_xor(self, a, b):
        if a == TRUEL:
            return -b
        if b == TRUEL:
            return -a
        if a == FALSEL:
            return b
        if b == FALSEL:
            return a
        if a == b:
            return FALSEL
        if a == -b:
            return TRUEL
        key = ("xor", *sorted((abs(a), abs(b))))
        negated = (a < 0) != (b < 0)
        out = self.cache.get(key)
        if out is None:
            x, y = abs(a), abs(b)
            out = self.new_var()
            self.add_clause([-out, x, y])
            self.add_clause([-out, -x, -y])
            self.add_clause([out, x, -y])
            self.add_clause([out, -x, y])
            self.cache[key] = out
            self.gates.append(("xor", out, (x, y)))
        return -out if negated else out

    def g_ite(self, s, a, b):
        if s == TRUEL:
            return a
        if s == FALSEL:
            return b
        if a == b:
            return a
        return self.g_or(self.g_and(s, a), self.g_and(-s, b))

    def g_conj(self, lits):
        out = TRUEL
        for lit in lits:
            out = self.g_and(out, lit)
        return out

    def g_disj(self, lits):
        out = FALSEL
        for lit in lits:
            out = self.g_or(out, lit)
        return out

    def assert_iff(self, a, b):
        self.add_clause([-a, b])
        self.add_clause([a, -b])

    # -- bitvector circuits ------------------------------------------------
    def bv_const(self, value, width):
        return [TRUEL if (value >> i) & 1 else FALSEL for i in range(width)]

    def bv_fresh(self, width):
        return [self.new_var() for _ in range(width)]

    def bv_add(self, a, b, carry_in=FALSEL):
        out = []
        carry = carry_in
        for x, y in zip(a, b):
            out.append(self.g_xor(self.g_xor(x, y), carry))
            carry = self.g_or(self.g_and(x, y),
                              self.g_and(carry, self.g_or(x, y)))
        return out

    def bv_neg(self, a):
        return self.bv_add([-x for x in a], self.bv_const(0, len(a)),
                           carry_in=TRUEL)

    def bv_sub(self, a, b):
        return self.bv_add(a, [-x for x in b], carry_in=TRUEL)

    def bv_ite(self, s, a, b):
        return [self.g_ite(s, x, y) for x, y in zip(a, b)]

    def bv_eq(self, a, b):
        return self.g_conj([-self.g_xor(x, y) for x, y in zip(a, b)])

    def bv_ult(self, a, b):
        # borrow chain: a < b unsigned
        lt = FALSEL
        for x, y in zip(a, b):
            lt = self.g_ite(self.g_xor(x, y), self.g_and(-x, y), lt)
        return lt

    def bv_lt(self, a, b, signed):
        if signed:
            a = a[:-1] + [-a[-1]]  # bias: flip sign bits, compare unsigned
            b = b[:-1] + [-b[-1]]
        return self.bv_ult(a, b)

    def bv_mul(self, a, b):
        width = len(a)
        acc = self.bv_const(0, width)
        for i, bit in enumerate(b):
            partial = [FALSEL] * i + [self.g_and(x, bit)
                                      for x in a[:width - i]]
            acc = self.bv_add(acc, partial)
        return acc

    def bv_udivmod(self, a, b):
        """Restoring division, unsigned.  Returns (quotient, remainder)."""
        width = len(a)
        ext = [FALSEL]  # one extra bit so the compare never overflows
        rem = self.bv_const(0, width + 1)
        bx = b + ext
        quot = [FALSEL] * width
        for i in reversed(range(width)):
            rem = [a[i]] + rem[:width]
            fits = -self.bv_ult(rem, bx)
            diff = self.bv_sub(rem, bx)
            rem = self.bv_ite(fits, diff, rem)
            quot[i] = fits
        return quot, rem[:width]

    def bv_divmod(self, a, b, signed):
        if not signed:
            quot, rem = self.bv_udivmod(a, b)
        else:
            sa, sb = a[-1], b[-1]
            quot_u, rem_u = self.bv_udivmod(
                self.bv_ite(sa, self.bv_neg(a), a),
                self.bv_ite(sb, self.bv_neg(b), b))
            quot = self.bv_ite(self.g_xor(sa, sb), self.bv_neg(quot_u), quot_u)
            rem = self.bv_ite(sa, self.bv_neg(rem_u), rem_u)
        # division by zero yields zero (the division_by_zero property is the
        # sanctioned way to catch it)
        zero_divisor = -self.g_disj(b)
        z = self.bv_const(0, len(a))
        return (self.bv_ite(zero_divisor, z, quot),
                self.bv_ite(zero_divisor, z, rem))

    def bv_shift(self, a, dist, op, signed_value, dist_signed):
        width = len(a)
        fill = a[-1] if (op == ">>" and signed_value) else FALSEL
        stages = max(1, (width - 1).bit_length())
        out = list(a)
        for k in range(stages):
            sel = dist[k] if k < len(dist) else FALSEL
            if op == "<<":
                shifted = [FALSEL] * min(1 << k, width) + out[:width - (1 << k)]
            else:
                shifted = out[1 << k:] + [fill] * min(1 << k, width)
            out = self.bv_ite(sel, shifted, out)
        # out-of-range distances: negative, or at least the width
        too_big = self.g_disj(dist[stages:-1] if dist_signed
                              else dist[stages:])
        if (1 << stages) > width:  # stage bits can hold values >= width
            ge_w = -self.bv_ult(dist[:stages], self.bv_const(width, stages))
            too_big = self.g_or(too_big, ge_w)
        negative = dist[-1] if dist_signed else FALSEL
        oor = self.g_or(too_big, negative)
        return self.bv_ite(oor, [fill] * width, out)


class Encoder:
    def __init__(self, eq):
        self.eq = eq
        self.builder = CnfBuilder()
        self.varmap = VarMap()
        self.expr_cache = {}
        self.violations = {}  # property id -> [literal]
        self.property_order = []

    # -- symbol handling ---------------------------------------------------
    def declare(self, name, typ):
        b = self.builder
        if typ.kind == "array":
            bits = [b.bv_fresh(typ.element.width) for _ in range(typ.size)]
        elif typ.kind == "boolean":
            bits = [b.new_var()]
        else:
            bits = b.bv_fresh(typ.width)
        self.varmap.symbols[name] = bits
        self.varmap.types[name] = typ
        return bits

    def lookup(self, name):
        bits = self.varmap.symbols.get(name)
        if bits is None:
            raise InternalError(f"symbol {name!r} read before definition")
        return bits

    # -- expression encoding ----------------------------------------------
    def encode(self, e: Expr):
        """Bool expressions give a literal; bitvectors a bit list;
        arrays a list of bit lists."""
        hit = self.expr_cache.get(id(e))
        if hit is not None:
            return hit[0]
        out = self._encode(e)
        self.expr_cache[id(e)] = (out, e)
        return out

    def _encode(self, e: Expr):
        b = self.builder
        kind = e.kind
        if kind == "const":
            if e.typ.kind == "boolean":
                return TRUEL if e.value else FALSEL
            return b.bv_const(e.value, e.typ.width)
        if kind == "symbol":
            bits = self.lookup(e.name)
            if e.typ.kind == "boolean":
                return bits[0]
            return bits
        if kind in ("array", "string"):
            if kind == "string":
                chars = [ord(c) for c in e.name] + [0]
                return [b.bv_const(c & 0xFF, e.typ.element.width)
                        for c in chars]
            return [self.encode(op) for op in e.ops]
        if kind == "ite":
            cond = self.encode(e.ops[0])
            then, els = self.encode(e.ops[1]), self.encode(e.ops[2])
            if e.typ.kind == "boolean":
                return b.g_ite(cond, then, els)
            if e.typ.kind == "array":
                return [b.bv_ite(cond, x, y) for x, y in zip(then, els)]
            return b.bv_ite(cond, then, els)
        if kind == "typecast":
            return self.encode_cast(e)
        if kind == "unary":
            return self.encode_unary(e)
        if kind == "binary":
            return self.encode_binary(e)
        if kind == "index":
            return self.encode_index(e)
        if kind == "store":
            return self.encode_store(e)
        raise InternalError(f"cannot encode {kind} expression")

    def encode_cast(self, e):
        b = self.builder
        src = e.ops[0]
        val = self.encode(src)
        if e.typ.kind == "boolean":
            if src.typ.kind == "boolean":
                return val
            return b.g_disj(val)
        if src.typ.kind == "boolean":
            return [val] + [FALSEL] * (e.typ.width - 1)
        width = e.typ.width
        if width <= len(val):
            return val[:width]
        fill = val[-1] if src.typ.is_signed else FALSEL
        return val + [fill] * (width - len(val))

    def encode_unary(self, e):
        b = self.builder
        a = self.encode(e.ops[0])
        if e.op == "not":
            return -a
        if e.op == "neg":
            return b.bv_neg(a)
        if e.op == "bitnot":
            return [-x for x in a]
        raise InternalError(f"cannot encode unary {e.op}")

    def encode_binary(self, e):
        b = self.builder
        op = e.op
        if op == "and":
            return b.g_and(self.encode(e.ops[0]), self.encode(e.ops[1]))
        if op == "or":
            return b.g_or(self.encode(e.ops[0]), self.encode(e.ops[1]))
        x = self.encode(e.ops[0])
        y = self.encode(e.ops[1])
        operand_typ = e.ops[0].typ
        signed = operand_typ.is_signed
        if op == "+":
            return b.bv_add(x, y)
        if op == "-":
            return b.bv_sub(x, y)
        if op == "*":
            return b.bv_mul(x, y)
        if op == "/":
            return b.bv_divmod(x, y, signed)[0]
        if op == "%":
            return b.bv_divmod(x, y, signed)[1]
        if op == "&":
            return [b.g_and(p, q) for p, q in zip(x, y)]
        if op == "|":
            return [b.g_or(p, q) for p, q in zip(x, y)]
        if op == "^":
            return [b.g_xor(p, q) for p, q in zip(x, y)]
        if op in ("<<", ">>"):
            return b.bv_shift(x, y, op, signed, e.ops[1].typ.is_signed)
        if operand_typ.kind == "boolean":
            x, y = [x], [y]
        if op == "==":
            return b.bv_eq(x, y)
        if op == "!=":
            return -b.bv_eq(x, y)
        if op == "<":
            return b.bv_lt(x, y, signed)
        if op == ">":
            return b.bv_lt(y, x, signed)
        if op == "<=":
            return -b.bv_lt(y, x, signed)
        if op == ">=":
            return -b.bv_lt(x, y, signed)
        raise InternalError(f"cannot encode binary {op}")

    def encode_index(self, e):
        b = self.builder
        base = self.encode(e.ops[0])
        idx = e.ops[1]
        if idx.is_const:
            if 0 <= idx.value < len(base):
                return base[idx.value]
            return b.bv_const(0, e.typ.width)  # out-of-bounds reads as zero
        ibits = self.encode(idx)
        out = b.bv_const(0, e.typ.width)
        for k, elem in enumerate(base):
            hit = b.bv_eq(ibits, b.bv_const(k, len(ibits)))
            out = b.bv_ite(hit, elem, out)
        return out

    def encode_store(self, e):
        b = self.builder
        base = [list(x) for x in self.encode(e.ops[0])]
        idx, value = e.ops[1], e.ops[2]
        vbits = self.encode(value)
        if idx.is_const:
            if 0 <= idx.value < len(base):
                base[idx.value] = vbits
            return base  # out-of-bounds store is a no-op
        ibits = self.encode(idx)
        out = []
        for k, elem in enumerate(base):
            hit = b.bv_eq(ibits, b.bv_const(k, len(ibits)))
            out.append(b.bv_ite(hit, vbits, elem))
        return out

    # -- step encoding -----------------------------------------------------
    def run(self):
        b = self.builder
        for name, typ in self.eq.nondets:
            self.declare(name, typ)
        context = TRUEL  # conjunction of assumptions seen so far
        for step in self.eq.steps:
            guard = self.encode(step.guard)
            if step.kind == "assignment":
                rhs = self.encode(step.rhs)
                lhs = self.declare(step.lhs.name, step.lhs.typ)
                if step.lhs.typ.kind == "array":
                    for fresh, val in zip(lhs, rhs):
                        for p, q in zip(fresh, val):
                            b.assert_iff(p, q)
                elif step.lhs.typ.kind == "boolean":
                    b.assert_iff(lhs[0], rhs)
                else:
                    for p, q in zip(lhs, rhs):
                        b.assert_iff(p, q)
            elif step.kind == "assumption":
                cond = self.encode(step.cond)
                context = b.g_and(context, b.g_or(-guard, cond))
            elif step.kind == "assertion":
                cond = self.encode(step.cond)
                violated = b.g_conj([guard, context, -cond])
                pid = step.property_id
                if pid not in self.violations:
                    self.violations[pid] = []
                    self.property_order.append(pid)
                self.violations[pid].append(violated)
        for pid in self.property_order:
            indicator = b.new_var()
            disj = b.g_disj(self.violations[pid])
            b.assert_iff(indicator, disj)
            self.varmap.indicators[pid] = indicator


def bitblast(eq):
    """Encode the whole equation.  Returns (CnfFormula, VarMap, CnfBuilder);
    the builder is exposed for incremental property queries."""
    enc = Encoder(eq)
    enc.run()
    formula = CnfFormula(enc.builder.clauses, enc.builder.nvars)
    return formula, enc.varmap, enc.builder


def encode_properties(eq, varmap):
    """Indicator literals for the iterative property-decision loop, in step
    order."""
    return [(pid, varmap.indicators[pid]) for pid in varmap.indicators]


def emit_dimacs(formula: CnfFormula, varmap: VarMap) -> str:
    lines = []
    for name, bits in varmap.symbols.items():
        typ = varmap.types[name]
        if typ.kind == "array":
            for k, elem in enumerate(bits):
                lines.append(f"c {name}[{k}] " + " ".join(str(x) for x in elem))
        else:
            lines.append(f"c {name} " + " ".join(str(x) for x in bits))
    for pid, lit in varmap.indicators.items():
        lines.append(f"c property {pid} {lit}")
    lines.append(f"p cnf {formula.variable_count} {len(formula.clauses)}")
    for clause in formula.clauses:
        lines.append(" ".join(str(x) for x in clause) + " 0")
    return "\n".join(lines)
