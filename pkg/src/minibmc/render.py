"""C-like rendering of expressions and types for dumps, property descriptions
and counterexample output."""

from __future__ import annotations

from .lang import Expr, PlatformConfig

_BIN_PREC = {
    "*": 12, "/": 12, "%": 12,
    "+": 11, "-": 11,
    "<<": 10, ">>": 10,
    "<": 9, "<=": 9, ">": 9, ">=": 9,
    "==": 8, "!=": 8,
    "&": 7, "^": 6, "|": 5,
    "and": 4, "or": 3,
}
_BIN_TEXT = {"and": "&&", "or": "||"}
_UNARY_TEXT = {"neg": "-", "not": "!", "bitnot": "~"}
_PREC_UNARY = 13
_PREC_POSTFIX = 14
_PREC_ITE = 2


def render_expr(e: Expr, config: PlatformConfig | None = None) -> str:
    config = config or PlatformConfig()
    text, _ = _render(e, config)
    return text


def display_name(name: str) -> str:
    """Source-level name of a (possibly mangled) symbol: drops the function
    qualifier but keeps suffixes like #return_value."""
    return name.rsplit("::", 1)[-1]


def _render(e: Expr, config):
    kind = e.kind
    if kind == "const":
        if e.typ.kind == "boolean":
            return ("1" if e.value else "0", _PREC_POSTFIX)
        suffix = ""
        if e.typ.width == config.long_width and e.typ.kind == "signedbv":
            suffix = "l"
        elif e.typ.kind == "unsignedbv" and e.typ.width >= config.int_width:
            suffix = "u" if e.typ.width == config.int_width else "ul"
        text = f"{e.value}{suffix}"
        return (text, _PREC_POSTFIX if e.value >= 0 else _PREC_UNARY)
    if kind == "symbol":
        return (display_name(e.name), _PREC_POSTFIX)
    if kind == "nondet":
        return (f"NONDET({config.type_name(e.typ)})", _PREC_POSTFIX)
    if kind == "addr_of":
        return (f"&{e.name}", _PREC_UNARY)
    if kind == "string":
        return ('"%s"' % e.name.replace("\\", "\\\\").replace('"', '\\"'), _PREC_POSTFIX)
    if kind == "unary":
        text, prec = _render(e.ops[0], config)
        if prec < _PREC_UNARY:
            text = f"({text})"
        return (_UNARY_TEXT[e.op] + text, _PREC_UNARY)
    if kind == "binary":
        prec = _BIN_PREC[e.op]
        left, lp = _render(e.ops[0], config)
        right, rp = _render(e.ops[1], config)
        if lp < prec:
            left = f"({left})"
        if rp <= prec:
            right = f"({right})"
        return (f"{left} {_BIN_TEXT.get(e.op, e.op)} {right}", prec)
    if kind == "typecast":
        text, prec = _render(e.ops[0], config)
        if prec < _PREC_UNARY:
            text = f"({text})"
        return (f"({config.type_name(e.typ)}){text}", _PREC_UNARY)
    if kind == "ite":
        c, cp = _render(e.ops[0], config)
        a, _ = _render(e.ops[1], config)
        b, _ = _render(e.ops[2], config)
        if cp <= _PREC_ITE:
            c = f"({c})"
        return (f"{c} ? {a} : {b}", _PREC_ITE)
    if kind == "index":
        base, bp = _render(e.ops[0], config)
        idx, _ = _render(e.ops[1], config)
        if bp < _PREC_POSTFIX:
            base = f"({base})"
        return (f"{base}[{idx}]", _PREC_POSTFIX)
    if kind == "store":
        base, _ = _render(e.ops[0], config)
        idx, _ = _render(e.ops[1], config)
        val, _ = _render(e.ops[2], config)
        return (f"{base} WITH [{idx}:={val}]", _PREC_POSTFIX)
    if kind == "array":
        elems = ", ".join(_render(op, config)[0] for op in e.ops)
        return ("{ " + elems + " }", _PREC_POSTFIX)
    raise ValueError(f"cannot render expression kind {kind}")
