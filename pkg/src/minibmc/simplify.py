"""Expression simplification: constant folding, light algebra, and
read-over-write normalization for array terms."""

from __future__ import annotations

from . import arith
from .lang import Expr, const, ite, not_, and_, or_


def _fold_binary(e: Expr, a: Expr, b: Expr):
    if a.is_const and b.is_const:
        v = arith.eval_binary(e.op, a.value, b.value, e.typ)
        return const(v, e.typ, e.loc)
    op = e.op
    if op == "and":
        if _complementary(a, b):
            return const(0, e.typ, e.loc)
        return and_(a, b)
    if op == "or":
        if _complementary(a, b):
            return const(1, e.typ, e.loc)
        # (g && c) || (g && !c) is just g: undoes a two-way branch split
        if (a.kind == "binary" and a.op == "and"
                and b.kind == "binary" and b.op == "and"
                and a.ops[0] == b.ops[0]
                and _complementary(a.ops[1], b.ops[1])):
            return a.ops[0]
        return or_(a, b)
    if op in ("+", "|", "^") and a.is_const and a.value == 0:
        return b
    if op in ("+", "-", "|", "^", "<<", ">>") and b.is_const and b.value == 0:
        return a
    if op == "*":
        if (a.is_const and a.value == 0) or (b.is_const and b.value == 0):
            return const(0, e.typ, e.loc)
        if a.is_const and a.value == 1:
            return b
        if b.is_const and b.value == 1:
            return a
    if op == "&":
        if (a.is_const and a.value == 0) or (b.is_const and b.value == 0):
            return const(0, e.typ, e.loc)
    if op in ("==", "<=", ">=") and a == b:
        return const(1, e.typ, e.loc)
    if op in ("!=", "<", ">") and a == b:
        return const(0, e.typ, e.loc)
    if a is e.ops[0] and b is e.ops[1]:
        return e
    return Expr(e.kind, e.typ, ops=(a, b), op=e.op, loc=e.loc)


def _complementary(a: Expr, b: Expr) -> bool:
    if a.kind == "unary" and a.op == "not" and a.ops[0] == b:
        return True
    return b.kind == "unary" and b.op == "not" and b.ops[0] == a


def _fold_index(e: Expr, base: Expr, idx: Expr):
    # read over write: index into a store chain or a literal array
    if idx.is_const:
        probe = base
        while True:
            if probe.kind == "store":
                sidx = probe.ops[1]
                if sidx.is_const:
                    if sidx.value == idx.value:
                        return probe.ops[2]
                    probe = probe.ops[0]
                    continue
                break
            if probe.kind == "array":
                if 0 <= idx.value < len(probe.ops):
                    return probe.ops[idx.value]
                return const(0, e.typ, e.loc)  # out of range reads as 0
            break
    elif base.kind == "store" and base.ops[1] == idx:
        return base.ops[2]
    if base is e.ops[0] and idx is e.ops[1]:
        return e
    return Expr("index", e.typ, ops=(base, idx), loc=e.loc)


def _fold_store(e: Expr, base: Expr, idx: Expr, value: Expr):
    if idx.is_const and base.kind == "array" and 0 <= idx.value < len(base.ops):
        elems = list(base.ops)
        elems[idx.value] = value
        return Expr("array", e.typ, ops=tuple(elems), loc=e.loc)
    if idx.is_const and idx.value < 0:
        return base  # out-of-range store is a no-op
    if (base, idx, value) == e.ops:
        return e
    return Expr("store", e.typ, ops=(base, idx, value), loc=e.loc)


def simplify(e: Expr, cache=None) -> Expr:
    """Bottom-up simplification.  Returns a structurally equal or smaller
    expression; constants everywhere foldable are folded.

    The memo table is keyed by object identity so that shared subterms (path
    guards, phi conditions) are visited once, keeping the cost linear in the
    number of distinct nodes.  Callers may pass one cache across several
    calls to preserve sharing between related expressions."""
    if cache is None:
        cache = {}
    hit = cache.get(id(e))
    if hit is not None:
        return hit[0]
    result = _simplify_node(e, cache)
    cache[id(e)] = (result, e)  # keep e alive so the id stays valid
    return result


def _simplify_node(e: Expr, cache):
    kind = e.kind
    if kind in ("const", "symbol", "nondet", "addr_of", "string"):
        return e
    ops = tuple(simplify(op, cache) for op in e.ops)
    if kind == "binary":
        return _fold_binary(e, ops[0], ops[1])
    if kind == "unary":
        a = ops[0]
        if e.op == "not":
            return not_(a)
        if a.is_const:
            return const(arith.eval_unary(e.op, a.value, e.typ), e.typ, e.loc)
        if e.op == "neg" and a.kind == "unary" and a.op == "neg":
            return a.ops[0]
    elif kind == "typecast":
        a = ops[0]
        if a.is_const:
            return const(arith.eval_cast(a.value, a.typ, e.typ), e.typ, e.loc)
        if a.typ == e.typ:
            return a
        # collapse widening-then-widening chains of the same signedness
        if (a.kind == "typecast" and a.typ.is_bitvector and e.typ.is_bitvector
                and a.ops[0].typ.is_bitvector
                and a.typ.width >= a.ops[0].typ.width
                and e.typ.width >= a.typ.width
                and a.typ.kind == a.ops[0].typ.kind):
            return Expr("typecast", e.typ, ops=(a.ops[0],), loc=e.loc)
    elif kind == "ite":
        return ite(ops[0], ops[1], ops[2], e.loc)
    elif kind == "index":
        return _fold_index(e, ops[0], ops[1])
    elif kind == "store":
        return _fold_store(e, ops[0], ops[1], ops[2])
    if ops == e.ops:
        return e
    return Expr(kind, e.typ, ops=ops, op=e.op, value=e.value, name=e.name, loc=e.loc)
