"""Classification of values passed to the ctype functions.

A value is *eof-able* when it is known to be either EOF or an unsigned char
value (``fgetc`` results and variables only ever holding them), *uchar-safe*
when it is an unsigned char value, and *unsafe* otherwise.
"""

from __future__ import annotations

from ..frontend import ast
from . import types as T
from .consteval import fold
from .libc import EOF_PRODUCING
from .. import dialect

EOF_ABLE = "eof-able"
UCHAR_SAFE = "uchar-safe"
UNSAFE = "unsafe"


def _is_uchar(t) -> bool:
    return isinstance(t, T.IntType) and not t.signed and t.width == dialect.CHAR_BIT and t.name != "_Bool"


def _holds_eof(t) -> bool:
    """Can a variable of type ``t`` hold both EOF and every unsigned char?"""
    return isinstance(t, (T.IntType, T.EnumType)) and t.signed and t.width > dialect.CHAR_BIT


def eof_domain(expr: ast.Expr, unit, facts=None, _seen=None) -> str:
    """Classify ``expr``; ``facts`` supplies reaching definitions.

    Without flow facts every variable is unsafe.
    """
    seen = _seen if _seen is not None else set()
    if isinstance(expr, ast.Call) and unit.callee_tag(expr) == EOF_PRODUCING:
        return EOF_ABLE
    if isinstance(expr, ast.Cast):
        return UCHAR_SAFE if _is_uchar(unit.type_of(expr)) else _via_cast(expr, unit, facts, seen)
    t = unit.type_of(expr)
    if _is_uchar(t):
        return UCHAR_SAFE
    value = fold(unit, expr)
    if value is not None:
        if 0 <= value <= (1 << dialect.CHAR_BIT) - 1:
            return UCHAR_SAFE
        if value == dialect.EOF_VALUE:
            return EOF_ABLE
        return UNSAFE
    if isinstance(expr, ast.Ident) and facts is not None:
        sym = unit.resolutions.get(expr)
        if sym is None or not _holds_eof(sym.type) or sym in seen:
            return UNSAFE
        defs = facts.reaching(expr)
        if not defs:
            return UNSAFE
        seen = seen | {sym}
        kinds = set()
        for d in defs:
            if d.kind not in ("assign", "init") or d.value is None:
                return UNSAFE
            kinds.add(eof_domain(d.value, unit, facts, seen))
        if UNSAFE in kinds:
            return UNSAFE
        return UCHAR_SAFE if kinds == {UCHAR_SAFE} else EOF_ABLE
    if isinstance(expr, ast.Assign) and expr.op == "=":
        sym = unit.resolutions.get(expr.target) if isinstance(expr.target, ast.Ident) else None
        if sym is not None and _holds_eof(sym.type):
            return eof_domain(expr.value, unit, facts, seen)
    return UNSAFE


def _via_cast(expr, unit, facts, seen):
    # A widening cast to a type able to hold EOF preserves the class.
    if _holds_eof(unit.type_of(expr)):
        inner = unit.type_of(expr.operand)
        if isinstance(inner, (T.IntType, T.EnumType)) and (_holds_eof(inner) or _is_uchar(inner)):
            return eof_domain(expr.operand, unit, facts, seen)
    return UNSAFE
