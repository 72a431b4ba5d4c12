"""Concrete two's-complement arithmetic shared by the simplifier and the
reference interpreter.

These functions define the evaluation semantics of the expression language on
Python integers.  The CNF circuits in encode.py implement the same semantics
independently at the bit level; the test suite checks the two against each
other exhaustively at small widths.

Fixed-choice corner cases (kept consistent across interpreter and circuits):
  * division/modulo by zero yields 0
  * signed division truncates toward zero; MIN / -1 wraps to MIN
  * shift amounts are read as the signed value of their type; amounts < 0 or
    >= width give 0 (left shift, logical right) or all sign bits (arithmetic
    right shift)
"""

from __future__ import annotations


def wrap(value, typ):
    """Clip an integer into the representable range of typ (two's complement)."""
    if typ.kind == "boolean":
        return value & 1
    w = typ.width
    value &= (1 << w) - 1
    if typ.kind == "signedbv" and value >= (1 << (w - 1)):
        value -= 1 << w
    return value


def trunc_div(a, b):
    q = abs(a) // abs(b)
    return -q if (a < 0) != (b < 0) else q


def trunc_mod(a, b):
    return a - trunc_div(a, b) * b


def shift_value(op, a, dist, typ):
    w = typ.width
    if dist < 0 or dist >= w:
        if op == ">>" and typ.kind == "signedbv" and a < 0 and dist >= w:
            return -1
        if op == ">>" and typ.kind == "signedbv" and dist < 0:
            return -1 if a < 0 else 0
        return 0
    if op == "<<":
        return wrap(a << dist, typ)
    return wrap(a >> dist, typ)  # Python >> is arithmetic on signed ints


def eval_binary(op, a, b, typ):
    """Evaluate a binary operator on interpreted operand values.

    typ is the result type.  Comparison/boolean operators return 0/1.
    """
    if op == "+":
        return wrap(a + b, typ)
    if op == "-":
        return wrap(a - b, typ)
    if op == "*":
        return wrap(a * b, typ)
    if op == "/":
        return 0 if b == 0 else wrap(trunc_div(a, b), typ)
    if op == "%":
        return 0 if b == 0 else wrap(trunc_mod(a, b), typ)
    if op == "<<" or op == ">>":
        return shift_value(op, a, b, typ)
    if op == "&":
        return wrap(a & b, typ)
    if op == "|":
        return wrap(a | b, typ)
    if op == "^":
        return wrap(a ^ b, typ)
    if op == "<":
        return int(a < b)
    if op == "<=":
        return int(a <= b)
    if op == ">":
        return int(a > b)
    if op == ">=":
        return int(a >= b)
    if op == "==":
        return int(a == b)
    if op == "!=":
        return int(a != b)
    if op == "and":
        return int(bool(a) and bool(b))
    if op == "or":
        return int(bool(a) or bool(b))
    raise ValueError(f"unknown binary operator {op}")


def eval_unary(op, a, typ):
    if op == "neg":
        return wrap(-a, typ)
    if op == "bitnot":
        return wrap(~a, typ)
    if op == "not":
        return int(not a)
    raise ValueError(f"unknown unary operator {op}")


def eval_cast(value, from_typ, to_typ):
    if to_typ.kind == "boolean":
        return int(value != 0)
    return wrap(value, to_typ)
