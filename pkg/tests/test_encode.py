"""Bit-blasting correctness: every operator, exhaustively, small widths.

The oracle is two's-complement arithmetic computed directly on Python ints
(via the arith module, itself tested against plain Python semantics).  For
each operator and width we force both operand bit patterns with solver
assumptions and read the result vector back out of the model.
"""

import itertools

import pytest

from minibmc import arith, lang
from minibmc.encode import CnfBuilder, Encoder, FALSEL, TRUEL, bitblast, \
    emit_dimacs
from minibmc.lang import signedbv, unsignedbv
from minibmc.satcore import Solver


def all_values(typ):
    return range(typ.min_value(), typ.max_value() + 1)


class Harness:
    """A builder wired to a solver so individual circuits can be probed."""

    def __init__(self):
        self.builder = CnfBuilder()

    def solve_bits(self, inputs, outputs):
        """inputs: (bits, value) pairs to force; outputs: bit vector (or a
        single literal) to read back.  Returns the output as an int."""
        solver = Solver()
        while solver.nvars < self.builder.nvars:
            solver.new_var()
        for clause in self.builder.clauses:
            solver.add_clause(clause)
        assumptions = []
        for bits, value in inputs:
            for i, b in enumerate(bits):
                want = (value >> i) & 1
                if b in (TRUEL, FALSEL):
                    assert (b == TRUEL) == bool(want), "constant bit clash"
                    continue
                assumptions.append(b if want else -b)
        result = solver.solve(assumptions)
        assert result.is_sat, "circuit must be satisfiable for any input"
        def lit_val(lit):
            if lit == TRUEL:
                return True
            if lit == FALSEL:
                return False
            return result.model[abs(lit)] ^ (lit < 0)
        if isinstance(outputs, int):
            return int(lit_val(outputs))
        return sum(int(lit_val(b)) << i for i, b in enumerate(outputs))


def from_pattern(pattern, typ):
    """Reinterpret an unsigned bit pattern at the given type."""
    return arith.wrap(pattern, typ)


BINARY_ARITH = ["+", "-", "*", "/", "%", "&", "|", "^", "<<", ">>"]
COMPARISONS = ["<", "<=", ">", ">=", "==", "!="]


def circuit_binary(h, op, a_bits, b_bits, typ):
    b = h.builder
    if op == "+":
        return b.bv_add(a_bits, b_bits)
    if op == "-":
        return b.bv_sub(a_bits, b_bits)
    if op == "*":
        return b.bv_mul(a_bits, b_bits)
    if op in ("/", "%"):
        quot, rem = b.bv_divmod(a_bits, b_bits, typ.is_signed)
        return quot if op == "/" else rem
    if op == "&":
        return [b.g_and(x, y) for x, y in zip(a_bits, b_bits)]
    if op == "|":
        return [b.g_or(x, y) for x, y in zip(a_bits, b_bits)]
    if op == "^":
        return [b.g_xor(x, y) for x, y in zip(a_bits, b_bits)]
    if op in ("<<", ">>"):
        return b.bv_shift(a_bits, b_bits, op, typ.is_signed, typ.is_signed)
    raise AssertionError(op)


@pytest.mark.parametrize("width", [1, 4])
@pytest.mark.parametrize("signed", [False, True])
@pytest.mark.parametrize("op", BINARY_ARITH)
def test_binary_exhaustive(width, signed, op):
    typ = signedbv(width) if signed else unsignedbv(width)
    h = Harness()
    a_bits = h.builder.bv_fresh(width)
    b_bits = h.builder.bv_fresh(width)
    out = circuit_binary(h, op, a_bits, b_bits, typ)
    for a in all_values(typ):
        for bval in all_values(typ):
            expected = arith.eval_binary(op, a, bval, typ)
            got_pattern = h.solve_bits(
                [(a_bits, a & ((1 << width) - 1)),
                 (b_bits, bval & ((1 << width) - 1))], out)
            assert from_pattern(got_pattern, typ) == expected, \
                f"{a} {op} {bval} at {typ.kind}[{width}]"


@pytest.mark.parametrize("signed", [False, True])
@pytest.mark.parametrize("op", BINARY_ARITH)
def test_binary_width8_boundary(signed, op):
    """Width 8 is too big for the full cross product per operator; boundary
    and near-boundary values catch the carry/sign edges."""
    typ = signedbv(8) if signed else unsignedbv(8)
    h = Harness()
    a_bits = h.builder.bv_fresh(8)
    b_bits = h.builder.bv_fresh(8)
    out = circuit_binary(h, op, a_bits, b_bits, typ)
    interesting = sorted({typ.min_value(), typ.min_value() + 1, -1 if signed
                          else 0, 0, 1, 2, 3, 7, 8, 9, typ.max_value() - 1,
                          typ.max_value()} & set(all_values(typ)))
    for a in interesting:
        for bval in interesting:
            expected = arith.eval_binary(op, a, bval, typ)
            got = h.solve_bits([(a_bits, a & 0xFF), (b_bits, bval & 0xFF)],
                               out)
            assert from_pattern(got, typ) == expected, f"{a} {op} {bval}"


@pytest.mark.parametrize("width", [1, 4, 8])
@pytest.mark.parametrize("signed", [False, True])
@pytest.mark.parametrize("op", COMPARISONS)
def test_comparisons(width, signed, op):
    typ = signedbv(width) if signed else unsignedbv(width)
    h = Harness()
    a_bits = h.builder.bv_fresh(width)
    b_bits = h.builder.bv_fresh(width)
    b = h.builder
    if op == "==":
        out = b.bv_eq(a_bits, b_bits)
    elif op == "!=":
        out = b.g_not(b.bv_eq(a_bits, b_bits)) if hasattr(b, "g_not") \
            else -b.bv_eq(a_bits, b_bits)
    else:
        def lt(x, y):
            return b.bv_lt(x, y, typ.is_signed)
        if op == "<":
            out = lt(a_bits, b_bits)
        elif op == ">":
            out = lt(b_bits, a_bits)
        elif op == "<=":
            out = -lt(b_bits, a_bits)
        else:
            out = -lt(a_bits, b_bits)
    values = list(all_values(typ))
    if width == 8:
        values = values[:3] + values[-3:] + [v for v in (0, 1, -1)
                                             if v in values]
    for a in values:
        for bval in values:
            expected = arith.eval_binary(op, a, bval, typ)
            got = h.solve_bits(
                [(a_bits, a & ((1 << width) - 1)),
                 (b_bits, bval & ((1 << width) - 1))], out)
            assert got == expected, f"{a} {op} {bval} width {width}"


@pytest.mark.parametrize("width", [1, 4, 8])
@pytest.mark.parametrize("signed", [False, True])
@pytest.mark.parametrize("op", ["neg", "bitnot"])
def test_unary_exhaustive(width, signed, op):
    typ = signedbv(width) if signed else unsignedbv(width)
    h = Harness()
    a_bits = h.builder.bv_fresh(width)
    if op == "neg":
        out = h.builder.bv_neg(a_bits)
    else:
        out = [-b for b in a_bits]
    for a in all_values(typ):
        expected = arith.eval_unary(op, a, typ)
        got = h.solve_bits([(a_bits, a & ((1 << width) - 1))], out)
        assert from_pattern(got, typ) == expected, f"{op} {a}"


def test_division_by_zero_yields_zero():
    typ = signedbv(4)
    h = Harness()
    a_bits = h.builder.bv_fresh(4)
    b_bits = h.builder.bv_fresh(4)
    quot, rem = h.builder.bv_divmod(a_bits, b_bits, True)
    for a in all_values(typ):
        assert from_pattern(h.solve_bits([(a_bits, a & 15), (b_bits, 0)],
                                         quot), typ) == 0
        assert from_pattern(h.solve_bits([(a_bits, a & 15), (b_bits, 0)],
                                         rem), typ) == 0


def test_int_min_divided_by_minus_one_wraps():
    typ = signedbv(4)
    h = Harness()
    a_bits = h.builder.bv_fresh(4)
    b_bits = h.builder.bv_fresh(4)
    quot, rem = h.builder.bv_divmod(a_bits, b_bits, True)
    got_q = h.solve_bits([(a_bits, 8), (b_bits, 15)], quot)  # -8 / -1
    got_r = h.solve_bits([(a_bits, 8), (b_bits, 15)], rem)
    assert from_pattern(got_q, typ) == -8  # wraps, like the machine does
    assert from_pattern(got_r, typ) == 0


@pytest.mark.parametrize("signed", [False, True])
def test_shift_out_of_range(signed):
    """Shift distances at and past the width, plus negative for signed."""
    typ = signedbv(4) if signed else unsignedbv(4)
    h = Harness()
    a_bits = h.builder.bv_fresh(4)
    d_bits = h.builder.bv_fresh(4)
    left = h.builder.bv_shift(a_bits, d_bits, "<<", typ.is_signed,
                              typ.is_signed)
    right = h.builder.bv_shift(a_bits, d_bits, ">>", typ.is_signed,
                               typ.is_signed)
    for a in all_values(typ):
        for d in all_values(typ):
            exp_l = arith.eval_binary("<<", a, d, typ)
            exp_r = arith.eval_binary(">>", a, d, typ)
            inl = [(a_bits, a & 15), (d_bits, d & 15)]
            assert from_pattern(h.solve_bits(inl, left), typ) == exp_l, \
                f"{a} << {d}"
            assert from_pattern(h.solve_bits(inl, right), typ) == exp_r, \
                f"{a} >> {d}"


def test_ite_mux():
    h = Harness()
    b = h.builder
    cond = b.new_var()
    a_bits = b.bv_fresh(4)
    b_bits = b.bv_fresh(4)
    out = b.bv_ite(cond, a_bits, b_bits)
    for c in (0, 1):
        got = h.solve_bits([([cond], c), (a_bits, 5), (b_bits, 10)], out)
        assert got == (5 if c else 10)


def test_constants_fold_without_variables():
    b = CnfBuilder()
    bits = b.bv_add(b.bv_const(3, 4), b.bv_const(4, 4))
    assert all(x in (TRUEL, FALSEL) for x in bits)
    assert sum((x == TRUEL) << i for i, x in enumerate(bits)) == 7


def test_dimacs_roundtrip_format():
    from conftest import verify, build_model
    from minibmc.instrument import CheckOptions
    from minibmc.symex import UnwindPolicy, symex

    model, _ = build_model("abs.c", entry="abs",
                           checks=CheckOptions(signed_overflow_check=True))
    eq = symex(model, UnwindPolicy())
    formula, varmap, _ = bitblast(eq)
    text = emit_dimacs(formula, varmap)
    header = [l for l in text.splitlines() if l.startswith("p cnf")]
    assert len(header) == 1
    nv, nc = map(int, header[0].split()[2:])
    assert nv == formula.variable_count
    assert nc == len(formula.clauses)
